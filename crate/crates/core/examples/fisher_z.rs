//! Partial correlations and Fisher-z verdicts on a simulated chain
//! `0 -> 1 -> 2`.
//!
//! Run with `cargo run --example fisher_z`.

use icd::citest::{fisher_z_test, partial_correlation};
use icd::graph::CausalDag;
use icd::simgen::{sample_data, LinearGaussianScm};

fn main() -> icd::Result<()> {
    let dag = CausalDag::observed_only(3, &[(0, 1), (1, 2)])?;
    let scm = LinearGaussianScm::with_weights(dag, &[(0, 1, 1.2), (1, 2, -0.8)])?;
    for rows in [20, 200, 2000] {
        let data = sample_data(&scm, rows, 5)?;
        let marginal = partial_correlation(&data, 0, 2, &[])?;
        let partial = partial_correlation(&data, 0, 2, &[1])?;
        println!(
            "{rows:>5} rows: rho(0,2) = {marginal:+.3} {:?}, rho(0,2|1) = {partial:+.3} {:?}",
            fisher_z_test(&data, 0, 2, &[], 0.01)?,
            fisher_z_test(&data, 0, 2, &[1], 0.01)?,
        );
    }
    Ok(())
}

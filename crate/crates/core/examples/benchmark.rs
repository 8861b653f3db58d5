//! Small oracle benchmark written to a results directory, followed by the
//! report tables and plots.
//!
//! Run with `cargo run --release --example benchmark -- [out-dir]`.

use std::path::PathBuf;

use icd::experiment::{compare, report, run_oracle_experiment, write_results, ExperimentConfig, OutputFormat};

fn main() -> icd::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("icd-benchmark"));
    let cfg = ExperimentConfig { node_counts: vec![10, 15], graphs_per_size: 10, seed: 3, ..ExperimentConfig::default() };

    let results = run_oracle_experiment(&cfg)?;
    for c in compare(&results)? {
        println!(
            "n = {:>2}: ICD fewer tests on {}/{} graphs, mean ratio {:.2}, KS p = {:.4}",
            c.group.nodes, c.icd_fewer, c.pairs, c.mean_ratio, c.ks_p_value
        );
    }

    let results_dir = out.join("results");
    write_results(&results_dir, &results, OutputFormat::Csv)?;
    for path in report(&results_dir, &out.join("report"))? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

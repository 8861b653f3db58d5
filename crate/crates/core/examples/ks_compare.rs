//! Compares two samples of CI-test counts with an ECDF and the two-sample
//! Kolmogorov-Smirnov test.
//!
//! Run with `cargo run --example ks_compare`.

use icd::eval::{ks_2sample, Ecdf};

fn main() -> icd::Result<()> {
    let icd = [41.0, 55.0, 38.0, 60.0, 47.0, 52.0, 44.0, 39.0];
    let fci = [88.0, 120.0, 64.0, 97.0, 150.0, 71.0, 102.0, 93.0];

    for (name, s) in [("icd", &icd[..]), ("fci", &fci[..])] {
        let e = Ecdf::new(s)?;
        println!("{name}: median {}, p90 {}", e.quantile(0.5)?, e.quantile(0.9)?);
    }
    let ks = ks_2sample(&icd, &fci)?;
    println!("D = {:.3}, p = {:.5} ({})", ks.statistic, ks.p_value, if ks.exact { "exact" } else { "asymptotic" });
    Ok(())
}

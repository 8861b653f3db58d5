//! Samples linear-Gaussian data from a random model and learns a PAG with
//! Fisher's z test, then scores it against the true PAG.
//!
//! Run with `cargo run --release --example data_discovery -- [samples] [alpha]`.

use icd::citest::{CachedTester, FisherZ};
use icd::eval::structural_errors;
use icd::icd::{icd_main, IcdConfig};
use icd::oracle::true_pag;
use icd::orientation::ConflictPolicy;
use icd::simgen::{sample_data, Instance};

fn main() -> icd::Result<()> {
    let mut args = std::env::args().skip(1);
    let samples = args.next().and_then(|s| s.parse().ok()).unwrap_or(1000);
    let alpha = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.01);

    let inst = Instance::generate(12, 2.0, 7)?;
    let data = sample_data(&inst.scm, samples, 7)?;
    println!("{} rows over columns {:?}", data.sample_count(), data.names());

    let tester = FisherZ::new(data, alpha)?;
    let mut ci = CachedTester::new(&tester);
    // Finite-sample tests can disagree with each other; keep the first mark.
    let cfg = IcdConfig { conflicts: ConflictPolicy::KeepExisting, ..IcdConfig::default() };
    let learned = icd_main(&mut ci, &cfg)?;

    let errors = structural_errors(&learned, &true_pag(inst.dag())?)?;
    println!("{} unique CI tests, {} cache hits", ci.stats().total(), ci.stats().cache_hits());
    println!("{errors:?}");
    Ok(())
}

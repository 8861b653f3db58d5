//! Learns the PAG of a random instance with ICD and FCI under the perfect
//! oracle and compares the number of CI tests each needed.
//!
//! Run with `cargo run --release --example oracle_discovery -- [nodes] [seed]`.

use icd::citest::CachedTester;
use icd::eval::structural_errors;
use icd::fci::{fci, FciConfig};
use icd::graph::write_pag;
use icd::icd::{icd_main, IcdConfig};
use icd::oracle::{true_pag, DSepOracle};
use icd::simgen::Instance;

fn main() -> icd::Result<()> {
    let mut args = std::env::args().skip(1);
    let nodes = args.next().and_then(|s| s.parse().ok()).unwrap_or(15);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);

    let inst = Instance::generate(nodes, 2.0, seed)?;
    let truth = true_pag(inst.dag())?;
    let oracle = DSepOracle::new(inst.dag().clone());

    let mut ci = CachedTester::new(&oracle);
    let learned = icd_main(&mut ci, &IcdConfig::default())?;
    let icd_tests = ci.stats().clone();

    let mut ci = CachedTester::new(&oracle);
    let baseline = fci(&mut ci, &FciConfig::default())?;
    let fci_tests = ci.stats().clone();

    println!("{} observed of {} nodes", oracle.observed().len(), nodes);
    println!("{}", write_pag(&learned));
    println!("ICD: {} tests {:?}, errors {:?}", icd_tests.total(), icd_tests.by_size(), structural_errors(&learned, &truth)?);
    println!("FCI: {} tests {:?}, errors {:?}", fci_tests.total(), fci_tests.by_size(), structural_errors(&baseline, &truth)?);
    Ok(())
}

//! Queries the d-separation oracle on a small DAG with a latent confounder.
//!
//! Run with `cargo run --example d_separation`.

use icd::citest::CiTester;
use icd::graph::CausalDag;
use icd::oracle::{d_separated, DSepOracle};

fn main() -> icd::Result<()> {
    // 0 -> 1 -> 2, with latent 3 driving both 2 and 4.
    let dag = CausalDag::with_partition(5, &[(0, 1), (1, 2), (3, 2), (3, 4)], &[0, 1, 2, 4], &[3], &[])?;

    println!("0 _||_ 2          : {}", d_separated(&dag, 0, 2, &[])?);
    println!("0 _||_ 2 | 1      : {}", d_separated(&dag, 0, 2, &[1])?);
    println!("0 _||_ 4          : {}", d_separated(&dag, 0, 4, &[])?);
    println!("0 _||_ 4 | 2      : {}", d_separated(&dag, 0, 4, &[2])?);

    // The oracle speaks in observed indices 0..3, i.e. nodes 0, 1, 2, 4.
    let oracle = DSepOracle::new(dag);
    println!("observed nodes    : {:?}", oracle.observed());
    println!("oracle(0, 3 | {{}}) : {:?}", oracle.test(0, 3, &[])?);
    println!("oracle(0, 3 | {{2}}): {:?}", oracle.test(0, 3, &[2])?);
    Ok(())
}

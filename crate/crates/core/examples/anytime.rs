//! Shows the anytime behaviour of ICD: the graph after every iteration is
//! a valid PAG, and the structural error shrinks as the conditioning-set
//! size grows.
//!
//! Run with `cargo run --release --example anytime`.

use icd::citest::CachedTester;
use icd::eval::structural_errors;
use icd::icd::{icd_traced, IcdConfig};
use icd::oracle::{true_pag, DSepOracle};
use icd::simgen::Instance;

fn main() -> icd::Result<()> {
    let inst = Instance::generate(20, 2.0, 11)?;
    let truth = true_pag(inst.dag())?;
    let oracle = DSepOracle::new(inst.dag().clone());
    let mut ci = CachedTester::new(&oracle);

    let mut rows = Vec::new();
    icd_traced(&mut ci, &IcdConfig::default(), |view| {
        let e = structural_errors(view.graph, &truth).expect("same node set");
        rows.push((view.r, view.graph.edge_count(), view.sepsets.len(), e));
    })?;

    println!("{:>3} {:>6} {:>8}  errors", "r", "edges", "removed");
    for (r, edges, removed, e) in rows {
        println!("{r:>3} {edges:>6} {removed:>8}  {e:?}");
    }
    println!("true PAG has {} edges", truth.edge_count());
    Ok(())
}

//! Lists the conditioning sets ICD would try for one edge, with PDS-path
//! distances and scores, with and without the closure filter.
//!
//! Run with `cargo run --example candidate_sets`.

use icd::graph::parse_pag;
use icd::icd::{pds_distances, pdsep_r, Closure, IcdConfig, PathRestriction};

fn main() -> icd::Result<()> {
    let g = parse_pag("pag 5\n0 o-o 1\n0 o-> 2\n2 <-o 3\n1 o-o 4\n")?;
    let (x, y) = (0, 1);
    let base = IcdConfig { restriction: PathRestriction::Off, ..IcdConfig::default() };

    println!("distances from {x}: {:?}", pds_distances(&g, x, y, base.restriction)?);
    println!("distances from {y}: {:?}", pds_distances(&g, y, x, base.restriction)?);

    for r in 1..=2 {
        for closure in [Closure::Off, Closure::Shortest] {
            let sets = pdsep_r(&g, x, y, r, &IcdConfig { closure, ..base.clone() })?;
            let shown: Vec<String> = sets.iter().map(|c| format!("{:?}@{:.2}", c.nodes, c.score)).collect();
            println!("r = {r} {closure:?}: {}", shown.join(" "));
        }
    }
    Ok(())
}

//! Self-dual Hermitian lattices, their neighbors, and the exhaustive neighbor oracle.

use hecke_cycles::hermitian_lattice::{brute_force_neighbors, HermLattice, Space};
use hecke_cycles::local_arith::LocalField;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = LocalField::new(2, 12)?;
    for space in [Space::V, Space::W] {
        let l = HermLattice::standard(&f, space);
        println!("{space}: standard lattice {l}");
        println!("  kind {:?}, self-dual {}, volume {}", l.classify()?, l.is_self_dual()?, l.volume());
        let hs = l.hyperspecial_neighbors()?;
        let sp = l.special_neighbors()?;
        println!("  {} hyperspecial neighbors, {} special neighbors", hs.len(), sp.len());
        for m in hs.iter().take(3) {
            println!("    {m}  relative invariants {:?}, distance {}", l.relative_invariants(m), l.distance(m));
        }
        let mut fast: Vec<_> = hs.iter().map(|m| m.key()).collect();
        let mut slow: Vec<_> = brute_force_neighbors(&l)?.iter().map(|m| m.key()).collect();
        fast.sort();
        slow.sort();
        println!("  isotropic-line neighbors agree with brute force: {}", fast == slow);
        let back = hs[0].step_toward(&l)?;
        println!("  a neighbor steps back to the origin: {}", back.key() == l.key());
    }
    Ok(())
}

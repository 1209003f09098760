//! Partial Hecke operators U, V, S on both trees and the relations they satisfy.

use hecke_cycles::building::{Building, PairVertex};
use hecke_cycles::formal_sum::rat;
use hecke_cycles::hermitian_lattice::Space;
use hecke_cycles::operators::{apply_partial, relation_suite, PairSum, PartialOp};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut b = Building::with_default_precision(2, 6)?;
    let x = b.origin();
    let e = PairSum::single(x, rat(1));
    for op in [PartialOp::UV, PartialOp::VV, PartialOp::SV, PartialOp::UW, PartialOp::VW, PartialOp::SW] {
        let img = apply_partial(&mut b, &e, op)?;
        println!("{op:?} at the origin: {} terms, mass {}", img.len(), img.augmentation(rat(0)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for space in [Space::V, Space::W] {
        let mut samples = vec![b.store(space).origin()];
        for d in 1..=3 {
            samples.push(b.store_mut(space).random_vertex(d, &mut rng)?);
        }
        let r = relation_suite(&mut b, space, &samples)?;
        println!("{space}: measured sibling constant {}", r.measured_c);
        for (name, ok) in &r.checks {
            println!("  {name}: {ok}/{}", r.samples);
        }
    }
    let y = PairVertex { v: b.v.random_vertex(2, &mut rng)?, w: b.w.origin() };
    let u = apply_partial(&mut b, &PairSum::single(y, rat(1)), PartialOp::UV)?;
    let vu = apply_partial(&mut b, &u, PartialOp::VV)?;
    println!("V_V U_V y = {}", vu);
    Ok(())
}

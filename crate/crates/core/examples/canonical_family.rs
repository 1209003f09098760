//! The canonical family x_n: inv, conductor level, descent and H-invariance of inv.

use hecke_cycles::building::{build_canonical_family, Building, FamilyVariant};
use hecke_cycles::suites::{descends, h_invariance};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for q in [2, 3] {
        let mut b = Building::with_default_precision(q, 8)?;
        let fam = build_canonical_family(&mut b, 5, FamilyVariant::Default)?;
        println!("q = {q}: beta = {}, gamma = {}", fam.beta, fam.gamma);
        for n in 0..5 {
            let x = fam.xs[n];
            println!(
                "  x_{n} = {x}: inv {:?}, conductor level {}, V_V V_W x_{} = x_{n}: {}",
                b.inv(x)?,
                b.conductor_level(x)?,
                n + 1,
                descends(&mut b, &fam, n)?
            );
        }
        let (agree, total) = h_invariance(&mut b, 7, 10, 10)?;
        println!("  inv(h x) = inv(x) on {agree}/{total} sampled pairs");
        match build_canonical_family(&mut b, 2, FamilyVariant::Alternative) {
            Ok(alt) => println!("  alternative parameters give inv(x_2) = {:?}", b.inv(alt.xs[2])?),
            Err(e) => println!("  alternative parameters rejected: {e}"),
        }
    }
    Ok(())
}

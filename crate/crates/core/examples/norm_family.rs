//! Synthetic division by a root of the specialized Hecke polynomial and the resulting norm family.

use hecke_cycles::building::{build_canonical_family, Building, FamilyVariant};
use hecke_cycles::distribution::{norm_descent_check, NormFamily};
use hecke_cycles::hecke::{specialize_scalars, trivial_eigenvalues};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let q = 2;
    let (t10, t01) = trivial_eigenvalues(q as i128);
    let h = specialize_scalars(t10, t01, q as i128).full;
    let symbolic = NormFamily::new(&h, q, None)?;
    println!("generic root: remainder {}, telescoping {}", symbolic.remainder, symbolic.telescoping_holds());
    let mut b = Building::with_default_precision(q, 10)?;
    let fam = build_canonical_family(&mut b, 9, FamilyVariant::Default)?;
    for beta in [64, 1] {
        let f = NormFamily::new(&h, q, Some(beta))?;
        let bs: Vec<String> = f.b.iter().map(|x| x.to_string()).collect();
        println!(
            "beta = {beta}: b_0..b_5 = [{}], alpha = {}, v(alpha) = {:?}",
            bs.join(", "),
            f.alpha,
            f.alpha_valuation(q)
        );
        for n in [7, 8] {
            let r = norm_descent_check(&mut b, &fam, &f, n)?;
            println!(
                "  n = {n}: literal {} ({} terms), telescoping {}, augmented {}, normalized augmented {}",
                r.literal_tilde, r.residual_terms, r.telescoping, r.augmented_tilde, r.augmented_y
            );
        }
    }
    Ok(())
}

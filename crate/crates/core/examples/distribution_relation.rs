//! Distribution relation at q = 2: the traced combination as pair-vertices, in operator form,
//! and after collapsing to H-orbit classes; the reversed pairing as a control.

use std::time::Instant;

use hecke_cycles::building::{build_canonical_family, Building, FamilyVariant};
use hecke_cycles::distribution::{distribution_check, Pairing, Variant};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 6;
    let mut b = Building::with_default_precision(2, 13)?;
    let fam = build_canonical_family(&mut b, n + 6, FamilyVariant::Default)?;
    for variant in [Variant::Short, Variant::Full] {
        for pairing in [Pairing::Standard, Pairing::Reversed] {
            let t = Instant::now();
            let r = distribution_check(&mut b, &fam, n, variant, pairing)?;
            println!(
                "{variant:?} {pairing:?}: pair residual terms {}, operator form agrees {}, class totals {:?} ({:.1?})",
                r.residual_terms,
                r.operator_form_agrees,
                r.class_residual,
                t.elapsed()
            );
            for s in r.sample_terms.iter().take(3) {
                println!("    {s}");
            }
        }
    }
    println!("vertices materialized: V {} W {}", b.v.len(), b.w.len());
    Ok(())
}

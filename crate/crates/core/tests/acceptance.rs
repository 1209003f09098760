//! Acceptance criteria 1 to 9. Prints one PASS/FAIL line per criterion and exits nonzero if any fail.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use hecke_cycles::building::{build_canonical_family, Building, CanonicalFamily, FamilyVariant, PairVertex};
use hecke_cycles::config::RunConfig;
use hecke_cycles::distribution::{
    check_orbit_sum, distribution_check, norm_descent_check, orbit_sum, NormFamily, Pairing, Variant,
};
use hecke_cycles::formal_sum::{Coeff, FormalSum};
use hecke_cycles::hecke::{
    specialize_scalars, trivial_eigenvalues, verify_factorization, IntPoly, QSpec, SvConvention,
};
use hecke_cycles::hermitian_lattice::LatticeKey;
use hecke_cycles::local_arith::LocalField;
use hecke_cycles::report::{Status, Suite};
use hecke_cycles::suites;

type Outcome = Result<(bool, String), String>;

const Q: u64 = 2;
const RADIUS: u32 = 13;
const PRECISION: u32 = 2 * RADIUS + 6;

fn peak_rss_mib() -> Option<u64> {
    let s = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = s.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb / 1024)
}

fn run(id: u32, name: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let (ok, detail) = match f() {
        Ok(x) => x,
        Err(e) => (false, format!("error: {e}")),
    };
    let el = t.elapsed();
    let in_time = el <= budget;
    let pass = ok && in_time;
    let mem = peak_rss_mib().map(|m| format!(", peak rss {m} MiB")).unwrap_or_default();
    let late = if in_time { String::new() } else { format!(" over budget {budget:?};") };
    println!(
        "criterion {id} ({name}): {} [{:.2} s{mem}]{late} {detail}",
        if pass { "PASS" } else { "FAIL" },
        el.as_secs_f64()
    );
    pass
}

fn building(q: u64, precision: u32, radius: u32) -> Result<Building, String> {
    let f = LocalField::new(q, precision).map_err(|e| e.to_string())?;
    Ok(Building::new(&f, radius))
}

fn family(b: &mut Building, top: u32) -> Result<CanonicalFamily, String> {
    build_canonical_family(b, top, FamilyVariant::Default).map_err(|e| e.to_string())
}

fn suite_ok(s: &Suite) -> bool {
    !s.failed() && s.checks.iter().any(|c| c.status == Status::Pass)
}

fn statuses(s: &Suite) -> String {
    s.checks.iter().map(|c| format!("{}={}", c.id, c.status.label())).collect::<Vec<_>>().join(" ")
}

fn criterion_1() -> Outcome {
    let good = verify_factorization(QSpec::Symbolic, SvConvention::Q);
    let printed = verify_factorization(QSpec::Symbolic, SvConvention::Q3);
    let z3 = printed.mismatched_powers().contains(&3);
    Ok((
        good.holds() && z3,
        format!(
            "S = q: mismatches {:?}; printed S_V = q^3: mismatches {:?} (z^3 included: {z3})",
            good.mismatched_powers(),
            printed.mismatched_powers()
        ),
    ))
}

fn criterion_2() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for q in [2, 3] {
        let cfg = RunConfig { q, radius: 3, ..RunConfig::default() };
        let s = suites::census(&cfg);
        let brute = ["brute-force/V", "brute-force/W"]
            .iter()
            .all(|id| s.checks.iter().any(|c| c.id == *id && c.status == Status::Pass));
        ok &= suite_ok(&s) && brute;
        parts.push(format!("q={q}: {}", statuses(&s)));
    }
    Ok((ok, parts.join("; ")))
}

fn criterion_3() -> Outcome {
    let cfg = RunConfig { q: Q, ..RunConfig::default() };
    let s = suites::relations(&cfg);
    let samples = cfg.samples();
    let c_ok = ["V/sibling-constant", "W/sibling-constant"]
        .iter()
        .all(|id| s.checks.iter().any(|c| c.id == *id && c.status == Status::Pass));
    let recorded = s.checks.iter().any(|c| c.id.ends_with("printed-sibling-constant"));
    Ok((suite_ok(&s) && c_ok && recorded && samples >= 50, format!("{samples} samples + origin; {}", statuses(&s))))
}

fn criterion_4() -> Outcome {
    let (t10, t01) = trivial_eigenvalues(Q as i128);
    let sp = specialize_scalars(t10, t01, Q as i128);
    let h2 = IntPoly(vec![64, -20, 1]);
    let h4 = IntPoly(vec![4096, -5440, 1428, -85, 1]);
    let r2 = sp.h2.integer_roots();
    let r4 = sp.h4.integer_roots();
    Ok((
        (t10, t01) == (18, 6) && sp.h2 == h2 && sp.h4 == h4 && r2 == [4, 16] && r4 == [1, 4, 16, 64],
        format!("t10 = {t10}, t01 = {t01}; H2 roots {r2:?}; H4 roots {r4:?}; H4 coefficients {:?}", sp.h4.0),
    ))
}

fn criterion_5() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for q in [2, 3] {
        let cfg = RunConfig { q, radius: 8, n_max: 4, ..RunConfig::default() };
        let s = suites::family(&cfg);
        let core = ["inv", "conductor", "descent"]
            .iter()
            .all(|id| s.checks.iter().any(|c| c.id == *id && c.status == Status::Pass));
        ok &= core && !s.failed();
        parts.push(format!("q={q}: {}", statuses(&s)));
    }
    Ok((ok, parts.join("; ")))
}

fn criterion_6() -> Outcome {
    let mut b = building(Q, 16, 5)?;
    let fam = family(&mut b, 4)?;
    let mut ok = true;
    let mut parts = Vec::new();
    for n in 1..=3 {
        let r = check_orbit_sum(&mut b, &fam, n).map_err(|e| e.to_string())?;
        ok &= r.holds() && r.support == 64;
        parts.push(format!(
            "n={n}: support {}, ones {}, x_(n+1) {}, balanced ({}, {})",
            r.support, r.all_coefficients_one, r.contains_next, r.balanced_v, r.balanced_w
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn criterion_7() -> Outcome {
    let n = 6;
    let mut b = building(Q, PRECISION, RADIUS)?;
    let fam = family(&mut b, n + 6)?;
    let mut ok = true;
    let mut parts = Vec::new();
    for v in [Variant::Short, Variant::Full] {
        let r = distribution_check(&mut b, &fam, n, v, Pairing::Standard).map_err(|e| e.to_string())?;
        let rev = distribution_check(&mut b, &fam, n, v, Pairing::Reversed).map_err(|e| e.to_string())?;
        ok &= r.pair_residual_zero() && !rev.pair_residual_zero();
        parts.push(format!(
            "{v:?}: residual {} pair-vertex terms (operator form agrees {}, H-orbit class totals vanish {}), reversed control {} terms",
            r.residual_terms,
            r.operator_form_agrees,
            r.class_residual_zero(),
            rev.residual_terms
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn criterion_8() -> Outcome {
    let mut b = building(Q, PRECISION, RADIUS)?;
    let fam = family(&mut b, 9)?;
    let (t10, t01) = trivial_eigenvalues(Q as i128);
    let h = specialize_scalars(t10, t01, Q as i128).full;
    let mut ok = true;
    let mut parts = Vec::new();
    for beta in [64, 1] {
        let f = NormFamily::new(&h, Q, Some(beta)).map_err(|e| e.to_string())?;
        ok &= f.division_exact();
        let mut rows = Vec::new();
        for n in [7, 8] {
            let r = norm_descent_check(&mut b, &fam, &f, n).map_err(|e| e.to_string())?;
            ok &= r.literal_tilde && r.literal_y;
            rows.push(format!(
                "n={n}: trace identity {} ({} terms), telescoping {}, augmented {}, y literal {}, y augmented {}",
                r.literal_tilde, r.residual_terms, r.telescoping, r.augmented_tilde, r.literal_y, r.augmented_y
            ));
        }
        parts.push(format!(
            "beta={beta}: division exact {}, v(alpha) = {:?}; {}",
            f.division_exact(),
            f.alpha_valuation(Q),
            rows.join(", ")
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn key(b: &Building, x: &PairVertex) -> (LatticeKey, LatticeKey) {
    (b.v.lattice(x.v).key(), b.w.lattice(x.w).key())
}

fn keyed<C: Coeff>(b: &Building, s: &FormalSum<PairVertex, C>) -> Keyed {
    s.iter().map(|(x, c)| (key(b, x), c.to_string())).collect()
}

type Keyed = BTreeMap<(LatticeKey, LatticeKey), String>;
type FamilyRecord = ((LatticeKey, LatticeKey), (u32, u32), u32, bool);
type ClassTotals = Vec<((u32, u32), String)>;

/// Everything criteria 5 to 8 compute, keyed by precision-independent lattice identities.
#[derive(PartialEq)]
struct Fingerprint {
    family: Vec<FamilyRecord>,
    orbits: Vec<Keyed>,
    distribution: Vec<(Keyed, ClassTotals, bool)>,
    norm: Vec<(String, Keyed)>,
}

fn fingerprint(precision: u32) -> Result<Fingerprint, String> {
    let mut b = building(Q, precision, RADIUS)?;
    let fam = family(&mut b, 12)?;
    let mut fp = Fingerprint { family: Vec::new(), orbits: Vec::new(), distribution: Vec::new(), norm: Vec::new() };
    for n in 0..=4 {
        let x = fam.xs[n];
        let inv = b.inv(x).map_err(|e| e.to_string())?;
        let cond = b.conductor_level(x).map_err(|e| e.to_string())?;
        let d = suites::descends(&mut b, &fam, n)?;
        fp.family.push((key(&b, &x), inv, cond, d));
    }
    for n in 1..=3 {
        let o = orbit_sum(&mut b, &fam, n).map_err(|e| e.to_string())?;
        fp.orbits.push(keyed(&b, &o.sum));
    }
    for v in [Variant::Short, Variant::Full] {
        for p in [Pairing::Standard, Pairing::Reversed] {
            let r = distribution_check(&mut b, &fam, 6, v, p).map_err(|e| e.to_string())?;
            fp.distribution.push((keyed(&b, &r.residual), r.class_residual.clone(), r.operator_form_agrees));
        }
    }
    let (t10, t01) = trivial_eigenvalues(Q as i128);
    let h = specialize_scalars(t10, t01, Q as i128).full;
    for beta in [64, 1] {
        let f = NormFamily::new(&h, Q, Some(beta)).map_err(|e| e.to_string())?;
        for n in [7, 8] {
            let r = norm_descent_check(&mut b, &fam, &f, n).map_err(|e| e.to_string())?;
            let y = f.y(&fam, n).map_err(|e| e.to_string())?;
            fp.norm.push((
                format!(
                    "{} {} {} {} {} {}",
                    r.literal_tilde, r.telescoping, r.augmented_tilde, r.literal_y, r.augmented_y, r.residual_terms
                ),
                keyed(&b, &y),
            ));
        }
    }
    Ok(fp)
}

fn criterion_9() -> Outcome {
    let base = fingerprint(PRECISION)?;
    let raised = fingerprint(PRECISION + 4)?;
    let same = base == raised;
    let mut b = building(Q, PRECISION, RADIUS)?;
    let (agree, total) = suites::h_invariance(&mut b, 1, 50, 20)?;
    Ok((
        same && agree == total,
        format!(
            "N = {PRECISION} vs N + 4: criteria 5-8 reproduce: {same} ({} family, {} orbit, {} distribution, {} norm records); \
             inv invariant on {agree}/{total} (word, vertex) pairs",
            base.family.len(),
            base.orbits.len(),
            base.distribution.len(),
            base.norm.len()
        ),
    ))
}

fn main() {
    let min = |m: u64| Duration::from_secs(60 * m);
    let results = [
        run(1, "symbolic factorization", Duration::from_secs(1), criterion_1),
        run(2, "building census", min(2), criterion_2),
        run(3, "operator relations", min(1), criterion_3),
        run(4, "trivial representation", Duration::from_secs(1), criterion_4),
        run(5, "canonical family", min(2), criterion_5),
        run(6, "orbit sums", min(1), criterion_6),
        run(7, "distribution relation", min(5), criterion_7),
        run(8, "norm family", min(5), criterion_8),
        run(9, "robustness", min(10), criterion_9),
    ];
    let passed = results.iter().filter(|x| **x).count();
    println!("acceptance: {passed}/{} criteria pass", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}

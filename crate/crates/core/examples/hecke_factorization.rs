//! The Hecke polynomial, its factorization through partial operators, and the trivial specialization.

use hecke_cycles::hecke::{
    long_root_symmetric_functions, specialize_scalars, trivial_eigenvalues, verify_factorization, HeckePoly, QSpec,
    SvConvention,
};

fn main() {
    let h = HeckePoly::explicit(QSpec::Symbolic);
    println!("H2(z) = {}", h.h2);
    println!("H4(z) = {}", h.h4);
    for sv in [SvConvention::Q, SvConvention::Q3] {
        let r = verify_factorization(QSpec::Symbolic, sv);
        println!(
            "S_V convention {sv:?}: product matches {}, mismatched z-powers {:?}",
            r.holds(),
            r.mismatched_powers()
        );
    }
    println!("long-root symmetric function identities: {:?}", long_root_symmetric_functions(QSpec::Symbolic));
    for q in [2, 3, 5] {
        let (t10, t01) = trivial_eigenvalues(q);
        let s = specialize_scalars(t10, t01, q);
        println!(
            "q = {q}: t10 = {t10}, t01 = {t01}, H2 roots {:?}, H4 roots {:?}, H roots {:?}",
            s.h2.integer_roots(),
            s.h4.integer_roots(),
            s.full.integer_roots()
        );
    }
}

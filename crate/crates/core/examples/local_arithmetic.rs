//! Arithmetic in the unramified quadratic extension of Z_p modulo p^N.

use hecke_cycles::local_arith::LocalField;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for p in [2, 3, 5] {
        let f = LocalField::new(p, 8)?;
        let w = f.omega();
        println!("p = {p}: O_E = Z_p[w]/(w^2 + {}w + {}) mod p^8", f.poly().0, f.poly().1);
        println!("  w = {w}, conj(w) = {}, N(w) = {}, Tr(w) = {}", w.conj(), w.norm(), w.trace());
        let x = f.from_pair(3, 1) * f.p_pow(2);
        println!("  x = {x}, v(x) = {:?}, x / p^2 = {}", x.valuation(), x.div_p_pow(2));
        let u = f.from_pair(1, 1);
        if u.is_unit() {
            let inv = u.inverse()?;
            println!("  (1 + w)^-1 = {inv}, check {}", inv * u);
        }
        let a = f.solve_trace_equation(f.from_i64(-1))?;
        println!("  solution of Tr(a) = -1: a = {a}, Tr(a) = {}", a.trace());
        println!("  residue field has {} elements", f.residue_field_elements().len());
    }
    let f = LocalField::new(2, 4)?;
    let big = f.p_pow(3);
    match big.checked_mul(&big) {
        Ok(x) => println!("p^3 * p^3 mod 2^4 = {x}"),
        Err(e) => println!("p^3 * p^3 at precision 4: {e}"),
    }
    Ok(())
}

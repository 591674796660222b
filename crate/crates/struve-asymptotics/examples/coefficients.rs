//! Exact expansion coefficients.
//!
//! The coefficients c_k(q) of the large-|z| expansions are polynomials in q
//! with rational coefficients, generated exactly by formal power-series
//! reversion — no floating point is involved until they are evaluated.
//!
//!     cargo run --example coefficients

use num_complex::Complex64;
use struve_asymptotics::coeffgen::{central_binomial, coefficients};

fn main() {
    let k_max = 10;
    let polys = coefficients(k_max);

    println!("c_k(q) for k = 0..={k_max}, exact over the rationals:\n");
    for (k, p) in polys.iter().enumerate() {
        println!("  c{k:<2} = {p}");
    }

    // The leading coefficient of c_k is the central binomial number
    // binom(2k, k): the expansion's growth is combinatorial in k.
    println!("\nleading coefficients vs central binomials:");
    for (k, p) in polys.iter().enumerate().skip(1) {
        let lead = p.leading().expect("nonzero polynomial");
        let binom = central_binomial(k);
        assert_eq!(*lead, binom);
        println!("  k = {k:<2}  lead(c{k}) = {lead} = binom({}, {k})", 2 * k);
    }

    // Numerical evaluation at a complex ratio q = nu / z.
    let q = Complex64::new(0.35, 0.20);
    println!("\nvalues at q = {q}:");
    for (k, p) in polys.iter().enumerate().take(6) {
        println!("  c{k}({q}) = {}", p.eval(q));
    }
}

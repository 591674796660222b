//! Optimally truncated evaluation, checked against independent oracles.
//!
//! For nu = q z with |z| = 40, the expansion selected by the domain of q is
//! summed to its least term and compared against two values computed by
//! completely different means: adaptive arbitrary-precision contour
//! quadrature for the Bessel-type combination, and a cancellation-aware
//! Maclaurin series for H itself.
//!
//!     cargo run --release --example verified_evaluation

use num_complex::Complex64;
use struve_asymptotics::evaluate::{asymptotic_sum, error_report, ExpansionVariant};
use struve_asymptotics::reference::TABLE3_MODULUS_Z;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let q = Complex64::new(0.30, 0.10);
    let theta = 0.0;
    let z = Complex64::from_polar(TABLE3_MODULUS_Z, theta);
    let nu = q * z;

    // The truncated sum itself: term magnitudes fall to a least term and then
    // grow again; the sum stops at the least term.
    let sum = asymptotic_sum(nu, z, ExpansionVariant::MinusY, None)?;
    println!("term magnitudes of the H - Y expansion at nu = {nu}, z = {z}:");
    for (k, t) in sum.terms.iter().enumerate() {
        let marker = if k == sum.k_star { "  <- least term, sum stops here" } else { "" };
        println!("  |term {k:<2}| = {:.3e}{marker}", t.norm());
    }
    println!("  truncated value: {}", sum.total);

    // The full verified report: asymptotic value vs oracle, with the error
    // measured relative to |H| as benchmark error tables do.
    let report = error_report(q, theta, TABLE3_MODULUS_Z)?;
    println!("\nverified report at q = {q}, theta = {theta}:");
    println!("  contour endpoint   : {}", report.endpoint);
    println!("  asymptotic value   : {}", report.asymptotic);
    println!("  oracle value       : {}", report.oracle);
    println!("  rel. error vs |H|  : {:.3e}", report.relative_error_h);
    println!("  rel. error (combo) : {:.3e}", report.relative_error_combination);
    println!("  truncation index   : {}", report.k_star);
    Ok(())
}

//! The Stokes geometry of the q-plane.
//!
//! Three transition curves divide the q-plane into the regions where the
//! different expansions hold. This example computes the distinguished points
//! of that geometry as functions of theta = arg z:
//!
//!   P      the triple point where all three curves (and domains) meet,
//!   Q      the intercept of the lower curve with the positive real axis,
//!   beta*  the critical height of the upper curve over a fixed Re q at
//!          theta = 0 — the threshold at which a ratio alpha + i beta stops
//!          admitting the semi-infinite contour.
//!
//!     cargo run --release --example stokes_geometry

use struve_asymptotics::reference;
use struve_asymptotics::transitions::{critical_beta, intercept_q, triple_point};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("triple point P and axis intercept Q by angle:\n");
    println!("  theta/pi        Re P        Im P           Q");
    for t in [0.0, 0.05, 0.10, 0.20, 0.25, 0.30, 0.35, 0.40, 0.42, 0.45] {
        let theta = t * std::f64::consts::PI;
        let p = triple_point(theta)?.q;
        let q = intercept_q(theta)?.q;
        println!("  {t:<8} {:>11.6} {:>11.6} {:>11.6}", p.re, p.im, q);
    }

    // As theta -> 0 the geometry degenerates: P -> 1 and Q -> 1, with the
    // curves collapsing onto the real segment [1, oo).
    let p0 = triple_point(0.0)?.q;
    println!("\ndegenerate limit: P(0) = {p0}, Q(0) = {}", intercept_q(0.0)?.q);

    // Critical height over alpha = 0.80 at theta = 0, against the embedded
    // reference value.
    let alpha = reference::CRITICAL_BETA_ALPHA;
    let beta = critical_beta(alpha, 0.0, (0.0, 1.0))?;
    println!(
        "\ncritical height over alpha = {alpha}: beta* = {beta:.7} (reference {})",
        reference::CRITICAL_BETA_VALUE
    );
    Ok(())
}

//! Steepest-descent paths from the origin.
//!
//! For each ratio q = nu/z the phase tau(u) = e^{i theta}(u - q log(1+u^2))
//! has a steepest-descent path leaving u = 0 along which Im tau stays fixed
//! and Re tau increases. Depending on q the path escapes to infinity or runs
//! into one of the logarithmic branch points +-i — possibly after spiralling
//! across several sheets — and that terminal point selects which expansion of
//! the Struve function is valid.
//!
//!     cargo run --example steepest_paths

use num_complex::Complex64;
use struve_asymptotics::landscape::{trace_steepest, Parameters, TraceOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let theta = 0.1 * std::f64::consts::PI;
    let opts = TraceOptions::default();

    // One representative ratio per terminal behaviour.
    let samples = [
        ("escapes to infinity", Complex64::new(0.60, 0.00)),
        ("terminates at +i", Complex64::new(0.90, 0.90)),
        ("terminates at -i", Complex64::new(1.40, 0.10)),
    ];

    println!("steepest-descent traces at theta = 0.1 pi\n");
    for (what, q) in samples {
        let params = Parameters::new(q, theta)?;
        let trace = trace_steepest(&params, &opts)?;
        let end = trace.terminal_point();
        println!("q = {q}  ({what})");
        println!("  terminal label : {:?}", trace.terminal);
        println!("  samples stored : {}", trace.points.len());
        println!("  final u        : {}", end.u);
        println!("  sheet winding  : {}", trace.sheet_winding);

        // Invariants of a valid steepest path: Re tau increases monotonically
        // and Im tau is pinned to its value at the origin.
        let im0 = trace.tau_values[0].im;
        let mut max_im_drift: f64 = 0.0;
        let mut monotone = true;
        for pair in trace.tau_values.windows(2) {
            monotone &= pair[1].re >= pair[0].re;
            max_im_drift = max_im_drift.max((pair[1].im - im0).abs());
        }
        println!("  Re tau monotone: {monotone}");
        println!("  Im tau drift   : {max_im_drift:.3e}\n");
    }

    Ok(())
}

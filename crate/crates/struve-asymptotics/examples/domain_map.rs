//! ASCII map of the q-plane domains.
//!
//! Classifies a grid of ratios q = nu/z by where the steepest-descent path
//! from the origin ends up, and draws the result:
//!
//!   1  path escapes to infinity   (H - Y expansion)
//!   2  path terminates at +i      (H + iJ expansion)
//!   3  path terminates at -i      (H - iJ expansion)
//!   *  on a transition curve (within the tracer's resolution)
//!   P  triple point, where all three domains meet
//!   Q  intercept of the lower curve with the positive real axis
//!
//! Blank cells lie outside the validated parameter sector |arg nu| <= pi/2.
//!
//!     cargo run --example domain_map

use num_complex::Complex64;
use struve_asymptotics::landscape::{classify_endpoint, DomainLabel, LandscapeError, Parameters};
use struve_asymptotics::transitions::{intercept_q, triple_point};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let theta = 0.1 * std::f64::consts::PI;
    let p = triple_point(theta)?.q;
    let q_axis = intercept_q(theta)?.q;

    let (re_min, re_max, im_min, im_max) = (0.05_f64, 1.45_f64, 0.0_f64, 1.0_f64);
    let step = 0.05_f64;
    let cols = ((re_max - re_min) / step).round() as usize + 1;
    let rows = ((im_max - im_min) / step).round() as usize + 1;

    println!("domain map at theta = 0.1 pi   (P = {p}, Q = {q_axis:.5})\n");
    for r in (0..rows).rev() {
        let im = im_min + step * r as f64;
        let mut line = String::with_capacity(cols + 8);
        for c in 0..cols {
            let re = re_min + step * c as f64;
            let q = Complex64::new(re, im);
            if (q - p).norm() < 0.5 * step {
                line.push('P');
                continue;
            }
            if im == 0.0 && (re - q_axis).abs() < 0.5 * step {
                line.push('Q');
                continue;
            }
            line.push(label_char(q, theta)?);
        }
        println!("  {line}   Im q = {im:.2}");
    }
    println!("\n  Re q from {re_min} to {re_max} in steps of {step}");
    Ok(())
}

fn label_char(q: Complex64, theta: f64) -> Result<char, LandscapeError> {
    let params = match Parameters::new(q, theta) {
        Ok(p) => p,
        Err(LandscapeError::OutsideSector(..)) => return Ok(' '),
        Err(e) => return Err(e),
    };
    match classify_endpoint(&params) {
        Ok(DomainLabel::ToInfinity) => Ok('1'),
        Ok(DomainLabel::ToPlusI) => Ok('2'),
        Ok(DomainLabel::ToMinusI) => Ok('3'),
        Ok(DomainLabel::OnTransition) => Ok('*'),
        // A trace that exhausts its step or winding budget is pinned to a
        // transition curve: only there does the path fail to commit.
        Err(LandscapeError::MaxStepsExceeded { .. }) => Ok('*'),
        Err(e) => Err(e),
    }
}

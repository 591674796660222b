//! The phase landscape in the u-plane: τ = e^{iθ}(u − q·log(1+u²)), its
//! saddle points, and steepest-descent paths traced from the origin.
//!
//! Paths live on the Riemann surface of log(1+u²): every [`PhasePoint`]
//! carries the continuously tracked `logval` rather than a principal-branch
//! value, so spiralling onto other sheets needs no global cut convention.
//! A trace terminates at one of three places (∞, +i, −i) or stalls on a
//! saddle; the terminal [`DomainLabel`] is what the transition geometry in
//! [`crate::transitions`] is built from.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LandscapeError {
    #[error("arg z = {0} is outside (-pi/2, pi/2)")]
    ThetaOutOfRange(f64),
    #[error("q = {0} has arg(q) + arg(z) = {1}, outside [-pi/2, pi/2]")]
    OutsideSector(Complex64, f64),
    #[error("phase derivative is undefined at the branch points u = +i, -i")]
    AtBranchPoint,
    #[error("trace gave up after {steps} steps (winding {winding:+}) without reaching a terminal region")]
    MaxStepsExceeded { steps: usize, winding: i32 },
    #[error("step size underflowed near u = {0}")]
    StepUnderflow(Complex64),
}

/// The pair (q, θ) with q = ν/z and θ = arg z. Validated parameters satisfy
/// |θ| < π/2 and |arg q + θ| ≤ π/2, which is |arg ν| ≤ π/2.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Parameters {
    pub q: Complex64,
    pub theta: f64,
}

impl Parameters {
    pub fn new(q: Complex64, theta: f64) -> Result<Self, LandscapeError> {
        if !(theta.abs() < PI / 2.0) {
            return Err(LandscapeError::ThetaOutOfRange(theta));
        }
        let total = q.arg() + theta;
        if !(total.abs() <= PI / 2.0 + 1e-12) {
            return Err(LandscapeError::OutsideSector(q, total));
        }
        Ok(Parameters { q, theta })
    }

    /// Skips the sector check. Traces stay well-defined for any q, which the
    /// transition-curve machinery relies on (the triple point leaves the
    /// sector for large θ), but endpoint labels lose their meaning as domains
    /// of validity there.
    pub(crate) fn unchecked(q: Complex64, theta: f64) -> Self {
        Parameters { q, theta }
    }

    pub fn omega(&self) -> f64 {
        self.q.arg()
    }
}

/// A point on the sheeted surface: u together with the continued log(1+u²).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhasePoint {
    pub u: Complex64,
    pub logval: Complex64,
}

impl PhasePoint {
    pub fn origin() -> Self {
        PhasePoint { u: Complex64::new(0.0, 0.0), logval: Complex64::new(0.0, 0.0) }
    }

    /// Principal-branch seed; valid until the path first crosses a cut.
    pub fn principal(u: Complex64) -> Self {
        PhasePoint { u, logval: (Complex64::new(1.0, 0.0) + u * u).ln() }
    }

    /// exp(logval) must reproduce 1+u² regardless of sheet.
    pub fn is_consistent(&self) -> bool {
        let w = Complex64::new(1.0, 0.0) + self.u * self.u;
        (self.logval.exp() - w).norm() <= 1e-10 * (1.0 + w.norm())
    }
}

/// τ at a tracked point.
pub fn phase(p: &PhasePoint, params: &Parameters) -> Complex64 {
    Complex64::from_polar(1.0, params.theta) * (p.u - params.q * p.logval)
}

/// dτ/du = e^{iθ}(1 − 2qu/(1+u²)); the branch points u = ±i are rejected.
pub fn phase_derivative(u: Complex64, params: &Parameters) -> Result<Complex64, LandscapeError> {
    let w = Complex64::new(1.0, 0.0) + u * u;
    if w.norm() == 0.0 {
        return Err(LandscapeError::AtBranchPoint);
    }
    Ok(Complex64::from_polar(1.0, params.theta) * (1.0 - 2.0 * params.q * u / w))
}

fn phase_derivative_raw(u: Complex64, q: Complex64, e_itheta: Complex64) -> Complex64 {
    let w = Complex64::new(1.0, 0.0) + u * u;
    e_itheta * (1.0 - 2.0 * q * u / w)
}

/// Roots of u² − 2qu + 1 = 0, i.e. u± = q ± √(q²−1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SaddlePair {
    /// The distal saddle (→ 2q as q → ∞).
    pub u_plus: Complex64,
    /// The proximal saddle (→ 1/(2q)); always 1/u_plus.
    pub u_minus: Complex64,
    pub is_double: bool,
}

/// The square root branch is q·√(1−1/q²) with the principal root, which is
/// continuous off the real segment (−1,1) and tends to q at infinity in every
/// direction, so u_plus is the distal saddle throughout the q-plane. On the
/// segment itself (0 < q < 1) the limit from above gives u_plus in the upper
/// half of the unit circle. u_minus is computed as 1/u_plus, which keeps the
/// product of roots at 1 to machine accuracy even when the roots are far
/// apart in magnitude.
pub fn saddle_points(q: Complex64) -> SaddlePair {
    if q.norm() == 0.0 {
        return SaddlePair {
            u_plus: Complex64::new(0.0, 1.0),
            u_minus: Complex64::new(0.0, -1.0),
            is_double: false,
        };
    }
    let one = Complex64::new(1.0, 0.0);
    let u_plus = q + q * (one - one / (q * q)).sqrt();
    let is_double = q == one || q == -one;
    let u_minus = if is_double { u_plus } else { one / u_plus };
    SaddlePair { u_plus, u_minus, is_double }
}

/// Where a steepest-descent path from the origin ends up.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DomainLabel {
    /// Domain 1: the path escapes to infinity.
    ToInfinity,
    /// Domain 2: the path spirals into the branch point +i.
    ToPlusI,
    /// Domain 3: the path spirals into the branch point −i.
    ToMinusI,
    /// The path stalls on a saddle: q lies on a transition curve.
    OnTransition,
}

impl DomainLabel {
    pub fn domain_number(self) -> Option<u8> {
        match self {
            DomainLabel::ToInfinity => Some(1),
            DomainLabel::ToPlusI => Some(2),
            DomainLabel::ToMinusI => Some(3),
            DomainLabel::OnTransition => None,
        }
    }

    /// The label seen from the conjugate parameters (conj q, −θ).
    pub fn conjugate(self) -> DomainLabel {
        match self {
            DomainLabel::ToPlusI => DomainLabel::ToMinusI,
            DomainLabel::ToMinusI => DomainLabel::ToPlusI,
            other => other,
        }
    }
}

impl std::fmt::Display for DomainLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DomainLabel::ToInfinity => "ToInfinity",
            DomainLabel::ToPlusI => "ToPlusI",
            DomainLabel::ToMinusI => "ToMinusI",
            DomainLabel::OnTransition => "OnTransition",
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct TraceOptions {
    /// Relative step tolerance of the embedded pair.
    pub rel_tol: f64,
    /// |u| beyond which the path counts as gone to infinity.
    pub escape_radius: f64,
    /// |u ∓ i| below which the path counts as terminated at ±i.
    pub branch_radius: f64,
    /// |dτ/du| below which the path counts as stalled on a saddle.
    pub saddle_tol: f64,
    pub max_steps: usize,
    /// Net sheet windings of 1+u² allowed before giving up.
    pub winding_cap: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions {
            rel_tol: 1e-10,
            escape_radius: 1e4,
            branch_radius: 1e-6,
            saddle_tol: 1e-9,
            max_steps: 400_000,
            winding_cap: 8.0,
        }
    }
}

/// A completed steepest-descent trace. Re τ strictly increases across the
/// recorded samples and Im τ stays pinned near zero; `sheet_winding` is the
/// net winding of 1+u² about 0 from start to finish.
#[derive(Clone, Debug)]
pub struct PathTrace {
    pub points: Vec<PhasePoint>,
    pub tau_values: Vec<Complex64>,
    pub terminal: DomainLabel,
    pub sheet_winding: i32,
}

/// One exported row of a trace.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathRow {
    pub re_u: f64,
    pub im_u: f64,
    pub re_tau: f64,
    pub winding: i32,
}

impl PathTrace {
    pub fn terminal_point(&self) -> &PhasePoint {
        self.points.last().expect("trace has at least the start point")
    }

    pub fn rows(&self) -> Vec<PathRow> {
        let im0 = self.points[0].logval.im;
        self.points
            .iter()
            .zip(&self.tau_values)
            .map(|(p, t)| PathRow {
                re_u: p.u.re,
                im_u: p.u.im,
                re_tau: t.re,
                winding: ((p.logval.im - im0) / (2.0 * PI)).round() as i32,
            })
            .collect()
    }

    pub fn export_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "re_u,im_u,re_tau,winding")?;
        for r in self.rows() {
            writeln!(out, "{},{},{},{}", r.re_u, r.im_u, r.re_tau, r.winding)?;
        }
        Ok(())
    }

    pub fn export_json<W: Write>(&self, out: W) -> io::Result<()> {
        serde_json::to_writer(out, &self.rows()).map_err(io::Error::other)
    }
}

const START_OFFSET: f64 = 1e-8;

// Dormand-Prince 5(4) tableau (autonomous field, so no node column).
const DP_A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B5: [f64; 7] =
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn rk_step<F: Fn(Complex64) -> Complex64>(f: &F, u: Complex64, h: f64) -> (Complex64, f64) {
    let mut k = [Complex64::new(0.0, 0.0); 7];
    k[0] = f(u);
    for i in 1..7 {
        let mut v = Complex64::new(0.0, 0.0);
        for (j, kj) in k.iter().enumerate().take(i.min(6)) {
            let a = DP_A[i - 1][j];
            if a != 0.0 {
                v += kj * a;
            }
        }
        k[i] = f(u + v * h);
    }
    let mut u5 = Complex64::new(0.0, 0.0);
    let mut u4 = Complex64::new(0.0, 0.0);
    for j in 0..7 {
        if DP_B5[j] != 0.0 {
            u5 += k[j] * DP_B5[j];
        }
        if DP_B4[j] != 0.0 {
            u4 += k[j] * DP_B4[j];
        }
    }
    let next = u + u5 * h;
    let err = ((u5 - u4) * h).norm();
    (next, err)
}

/// Traces the steepest-descent path of τ from (just off) the origin.
///
/// The integration parameter is σ with du/dσ = conj(dτ/du): along that field
/// dτ/dσ = |dτ/du|² ≥ 0, so Re τ increases, Im τ is conserved to first order,
/// and the parameterization stays regular where τ itself degenerates (the
/// field vanishes at saddles instead of du/dτ blowing up, which is the
/// arc-length-style rescaling the stepper needs near them). On top of the
/// embedded-pair error control, every accepted step is Newton-corrected
/// transversally to re-pin Im τ, and the branch value logval advances by the
/// principal log of the ratio (1+u_new²)/(1+u_old²), with steps rejected
/// whenever that ratio leaves the right half-plane.
pub fn trace_steepest(params: &Parameters, opts: &TraceOptions) -> Result<PathTrace, LandscapeError> {
    trace_with_budget_policy(params, opts, false)
}

/// Crate-internal variant of [`trace_steepest`] for residual evaluation: when
/// the step or winding budget runs out — which happens deep inside an endpoint
/// spiral, after the path has left the saddle region — the polyline traced so
/// far is returned instead of an error. The truncated trace is labeled
/// [`DomainLabel::OnTransition`] because no terminal region was reached; the
/// label should not be treated as a classification. All the winding a spiral
/// accumulates lies past the saddles, so the partial polyline still samples
/// the path everywhere branch continuation toward a saddle needs it.
pub(crate) fn trace_keep_partial(
    params: &Parameters,
    opts: &TraceOptions,
) -> Result<PathTrace, LandscapeError> {
    trace_with_budget_policy(params, opts, true)
}

fn trace_with_budget_policy(
    params: &Parameters,
    opts: &TraceOptions,
    keep_partial: bool,
) -> Result<PathTrace, LandscapeError> {
    let q = params.q;
    let e_itheta = Complex64::from_polar(1.0, params.theta);
    let one = Complex64::new(1.0, 0.0);
    let tau_of = |u: Complex64, l: Complex64| e_itheta * (u - q * l);
    let field = |u: Complex64| phase_derivative_raw(u, q, e_itheta).conj();

    let i_unit = Complex64::new(0.0, 1.0);
    let mut u = Complex64::from_polar(START_OFFSET, -params.theta);
    let mut logval = (one + u * u).ln();
    let im_l0 = logval.im;
    let mut tau = tau_of(u, logval);
    let im_target = tau.im;

    let mut points = vec![PhasePoint { u, logval }];
    let mut taus = vec![tau];

    let cap = (opts.winding_cap + 0.5) * 2.0 * PI;
    let mut h = 1e-4;
    let mut steps = 0usize;

    let finish = |points: Vec<PhasePoint>, taus: Vec<Complex64>, label: DomainLabel| {
        let winding = ((points.last().unwrap().logval.im - im_l0) / (2.0 * PI)).round() as i32;
        Ok(PathTrace { points, tau_values: taus, terminal: label, sheet_winding: winding })
    };

    loop {
        let d = phase_derivative_raw(u, q, e_itheta);
        if u.norm() >= opts.escape_radius {
            return finish(points, taus, DomainLabel::ToInfinity);
        }
        if (u - i_unit).norm() <= opts.branch_radius {
            return finish(points, taus, DomainLabel::ToPlusI);
        }
        if (u + i_unit).norm() <= opts.branch_radius {
            return finish(points, taus, DomainLabel::ToMinusI);
        }
        if d.norm() <= opts.saddle_tol {
            return finish(points, taus, DomainLabel::OnTransition);
        }
        let drift = logval.im - im_l0;
        if drift.abs() >= cap || steps >= opts.max_steps {
            if keep_partial {
                return finish(points, taus, DomainLabel::OnTransition);
            }
            return Err(LandscapeError::MaxStepsExceeded {
                steps,
                winding: (drift / (2.0 * PI)).round() as i32,
            });
        }
        steps += 1;

        let (u_try, err) = rk_step(&field, u, h);
        let tol = opts.rel_tol * (1.0 + u.norm());
        if !err.is_finite() || err > tol {
            h *= if err.is_finite() { (0.9 * (tol / err).powf(0.2)).max(0.2) } else { 0.5 };
            if h < 1e-15 * (1.0 + u.norm()) {
                return Err(LandscapeError::StepUnderflow(u));
            }
            continue;
        }

        // Sheet bookkeeping: the ratio must stay well inside the right
        // half-plane for the principal log of the ratio to be the analytic
        // continuation.
        let w_old = one + u * u;
        let w_new = one + u_try * u_try;
        let ratio = w_new / w_old;
        let dlog = ratio.ln();
        if !(ratio.re > 0.0) || dlog.norm() > 0.7 {
            h *= 0.5;
            if h < 1e-15 * (1.0 + u.norm()) {
                return Err(LandscapeError::StepUnderflow(u));
            }
            continue;
        }
        let mut u_new = u_try;
        let mut l_new = logval + dlog;
        let mut tau_new = tau_of(u_new, l_new);
        if tau_new.re <= tau.re - 1e-13 * (1.0 + tau.re.abs()) {
            h *= 0.5;
            if h < 1e-15 * (1.0 + u.norm()) {
                return Err(LandscapeError::StepUnderflow(u));
            }
            continue;
        }

        // Transverse correction: move perpendicular to the flow until Im τ
        // returns to its launch value. Skipped close to saddles, where the
        // correction direction degenerates and the stall detector takes over.
        for _ in 0..4 {
            let dc = phase_derivative_raw(u_new, q, e_itheta);
            let dn = dc.norm();
            if dn < 1e-6 {
                break;
            }
            let miss = tau_new.im - im_target;
            if miss.abs() <= 1e-13 * (1.0 + tau_new.norm()) {
                break;
            }
            let delta = i_unit * dc.conj() * (-miss) / (dn * dn);
            let u_corr = u_new + delta;
            let w_corr = one + u_corr * u_corr;
            let r2 = w_corr / (one + u_new * u_new);
            if !(r2.re > 0.0) {
                break;
            }
            l_new += r2.ln();
            u_new = u_corr;
            tau_new = tau_of(u_new, l_new);
        }

        u = u_new;
        logval = l_new;
        if tau_new.re > tau.re {
            points.push(PhasePoint { u, logval });
            taus.push(tau_new);
        }
        tau = tau_new;
        let grow = (0.9 * (tol / err.max(1e-300)).powf(0.2)).clamp(0.2, 5.0);
        h = (h * grow).min(0.25 * (1.0 + u.norm()));
    }
}

/// The terminal label of the steepest-descent path from the origin.
pub fn classify_endpoint(params: &Parameters) -> Result<DomainLabel, LandscapeError> {
    classify_with(params, &TraceOptions::default())
}

pub fn classify_with(params: &Parameters, opts: &TraceOptions) -> Result<DomainLabel, LandscapeError> {
    trace_steepest(params, opts).map(|t| t.terminal)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn phase_examples() {
        let p0 = PhasePoint::origin();
        let params = Parameters::new(c(1.0, 0.0), 0.0).unwrap();
        assert_eq!(phase(&p0, &params), c(0.0, 0.0));

        let p1 = PhasePoint { u: c(1.0, 0.0), logval: c(2.0f64.ln(), 0.0) };
        assert!((phase(&p1, &params).re - (1.0 - 2.0f64.ln())).abs() < 1e-15);
        assert!((phase(&p1, &params).re - 0.3068528194400547).abs() < 1e-15);

        let half = Parameters::new(c(0.5, 0.0), 0.0).unwrap();
        assert!((phase(&p1, &half).re - (1.0 - 0.5 * 2.0f64.ln())).abs() < 1e-15);
        assert!(p1.is_consistent());
    }

    #[test]
    fn phase_derivative_examples() {
        let params = Parameters::new(c(0.3, 0.1), 0.4).unwrap();
        let at0 = phase_derivative(c(0.0, 0.0), &params).unwrap();
        assert!((at0 - Complex64::from_polar(1.0, 0.4)).norm() < 1e-15);

        let double = Parameters::new(c(1.0, 0.0), 0.0).unwrap();
        let at1 = phase_derivative(c(1.0, 0.0), &double).unwrap();
        assert!(at1.norm() < 1e-15);

        assert_eq!(
            phase_derivative(c(0.0, 1.0), &params),
            Err(LandscapeError::AtBranchPoint)
        );
    }

    #[test]
    fn saddle_examples() {
        let s = saddle_points(c(1.0, 0.0));
        assert!(s.is_double);
        assert!((s.u_plus - c(1.0, 0.0)).norm() < 1e-15);
        assert!((s.u_minus - c(1.0, 0.0)).norm() < 1e-15);

        let s = saddle_points(c(1.25, 0.0));
        assert!(!s.is_double);
        assert!((s.u_plus - c(2.0, 0.0)).norm() < 1e-14);
        assert!((s.u_minus - c(0.5, 0.0)).norm() < 1e-14);

        let s = saddle_points(c(0.0, 1.0));
        assert!((s.u_plus - c(0.0, 1.0 + 2.0f64.sqrt())).norm() < 1e-14);
        assert!((s.u_minus - c(0.0, 1.0 - 2.0f64.sqrt())).norm() < 1e-14);
    }

    #[test]
    fn saddles_vanish_the_derivative_and_multiply_to_one() {
        let qs = [c(0.3, 0.2), c(1.7, -0.4), c(0.05, 0.9), c(2.5, 1.5), c(0.8, -0.6)];
        for q in qs {
            let s = saddle_points(q);
            assert!((s.u_plus * s.u_minus - c(1.0, 0.0)).norm() < 1e-14, "q={q}");
            let params = Parameters::unchecked(q, 0.2);
            assert!(phase_derivative(s.u_plus, &params).unwrap().norm() < 1e-12, "q={q}");
            assert!(phase_derivative(s.u_minus, &params).unwrap().norm() < 1e-12, "q={q}");
            // Distal/proximal split.
            assert!(s.u_plus.norm() >= 1.0 - 1e-12);
            assert!(s.u_minus.norm() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn sector_validation() {
        assert!(Parameters::new(c(0.5, 0.1), 0.3).is_ok());
        assert!(matches!(
            Parameters::new(c(0.5, 0.0), 1.6),
            Err(LandscapeError::ThetaOutOfRange(_))
        ));
        // arg q = π/2 at θ = 0.2 exceeds the sector.
        assert!(matches!(
            Parameters::new(c(0.0, 1.0), 0.2),
            Err(LandscapeError::OutsideSector(..))
        ));
        // Boundary is admissible.
        assert!(Parameters::new(c(0.0, 1.0), 0.0).is_ok());
    }

    #[test]
    fn real_axis_trace_stays_real_and_escapes() {
        let params = Parameters::new(c(0.5, 0.0), 0.0).unwrap();
        let t = trace_steepest(&params, &TraceOptions::default()).unwrap();
        assert_eq!(t.terminal, DomainLabel::ToInfinity);
        assert_eq!(t.sheet_winding, 0);
        for p in &t.points {
            assert!(p.u.im.abs() <= 1e-14, "u = {}", p.u);
            assert!(p.u.re > 0.0);
        }
    }

    #[test]
    fn real_q_above_one_stalls_on_the_proximal_saddle() {
        let params = Parameters::new(c(1.25, 0.0), 0.0).unwrap();
        let t = trace_steepest(&params, &TraceOptions::default()).unwrap();
        assert_eq!(t.terminal, DomainLabel::OnTransition);
        let end = t.terminal_point().u;
        assert!((end - c(0.5, 0.0)).norm() < 1e-4, "stalled at {end}");
    }

    #[test]
    fn double_saddle_stalls_at_one() {
        let params = Parameters::new(c(1.0, 0.0), 0.0).unwrap();
        let t = trace_steepest(&params, &TraceOptions::default()).unwrap();
        assert_eq!(t.terminal, DomainLabel::OnTransition);
        assert!((t.terminal_point().u - c(1.0, 0.0)).norm() < 1e-3);
    }

    #[test]
    fn benchmark_classifications() {
        let cases: [(Complex64, f64, DomainLabel); 6] = [
            (c(0.60, 0.0), 0.0, DomainLabel::ToInfinity),
            (c(1.00, 0.60), 0.0, DomainLabel::ToPlusI),
            (c(1.25, 0.0), 0.1 * PI, DomainLabel::ToMinusI),
            (c(0.60, 0.40), 0.1 * PI, DomainLabel::ToInfinity),
            (c(1.00, -0.30), 0.0, DomainLabel::ToMinusI),
            (c(1.00, -0.30), 0.1 * PI, DomainLabel::ToMinusI),
        ];
        for (q, theta, want) in cases {
            let params = Parameters::new(q, theta).unwrap();
            let got = classify_endpoint(&params).unwrap();
            assert_eq!(got, want, "q={q}, theta={theta}");
        }
    }

    #[test]
    fn traces_are_monotone_with_pinned_imaginary_part() {
        let cases = [
            (c(0.60, 0.40), 0.1 * PI),
            (c(1.00, 0.60), 0.0),
            (c(1.00, -0.30), 0.1 * PI),
            (c(0.30, -0.20), -0.2 * PI),
        ];
        for (q, theta) in cases {
            let params = Parameters::new(q, theta).unwrap();
            let t = trace_steepest(&params, &TraceOptions::default()).unwrap();
            for w in t.tau_values.windows(2) {
                assert!(w[1].re > w[0].re, "q={q}: non-monotone {} -> {}", w[0].re, w[1].re);
            }
            for tau in &t.tau_values {
                assert!(tau.im.abs() <= 1e-9, "q={q}: Im tau = {}", tau.im);
            }
            for p in &t.points {
                assert!(p.is_consistent(), "q={q}: logval drifted at u={}", p.u);
            }
        }
    }

    #[test]
    fn termination_consistency_at_branch_points() {
        let params = Parameters::new(c(1.00, 0.60), 0.0).unwrap();
        let t = trace_steepest(&params, &TraceOptions::default()).unwrap();
        assert_eq!(t.terminal, DomainLabel::ToPlusI);
        let last = t.terminal_point();
        assert!((last.u - c(0.0, 1.0)).norm() <= 1e-6 * 1.0001);
        let last_re = t.tau_values.last().unwrap().re;
        for tau in &t.tau_values[..t.tau_values.len() - 1] {
            assert!(tau.re < last_re);
        }
        assert!(t.sheet_winding.unsigned_abs() <= 8);
    }

    #[test]
    fn conjugate_classification_swaps_labels() {
        let cases = [(c(1.00, 0.60), 0.15), (c(0.60, 0.40), 0.1 * PI), (c(0.9, -0.2), 0.05)];
        for (q, theta) in cases {
            let a = classify_endpoint(&Parameters::new(q, theta).unwrap()).unwrap();
            let b = classify_endpoint(&Parameters::new(q.conj(), -theta).unwrap()).unwrap();
            assert_eq!(a.conjugate(), b, "q={q}");
        }
    }

    #[test]
    fn csv_export_layout() {
        let params = Parameters::new(c(0.5, 0.0), 0.0).unwrap();
        let t = trace_steepest(&params, &TraceOptions::default()).unwrap();
        let mut buf = Vec::new();
        t.export_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("re_u,im_u,re_tau,winding"));
        assert_eq!(lines.count(), t.points.len());

        let mut jbuf = Vec::new();
        t.export_json(&mut jbuf).unwrap();
        let rows: Vec<PathRow> = serde_json::from_slice(&jbuf).unwrap();
        assert_eq!(rows, t.rows());
    }
}

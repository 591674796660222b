//! Optimally-truncated asymptotic evaluation, verified against independent
//! oracles.
//!
//! Three oracles pin down the true value of the function and of the
//! Bessel-type combinations it forms:
//!
//! * the Maclaurin series, summed in arbitrary precision with the working
//!   precision inflated by the observed cancellation (the series is entire but
//!   alternates violently for |z| ≳ 20);
//! * adaptive arbitrary-precision quadrature of the finite contour integral
//!   from 0 to ±i (the H ± iJ combinations);
//! * the same quadrature on the semi-infinite real contour (the H − Y
//!   combination).
//!
//! Against these, [`asymptotic_sum`] builds the large-parameter expansion
//! whose terms are the exact rational coefficients c_k(q) times k!/z^k,
//! truncates at the least term, and [`error_report`] measures the achieved
//! relative error, normalized either by the combination or by |H| itself.
//! The endpoint classification of the steepest-descent landscape decides
//! which combination the expansion represents at a given (q, θ); evaluation
//! exactly on a transition curve is refused rather than smoothed, except on
//! the degenerate real segment q ≥ 1 at θ = 0, where the two conjugate
//! combinations are reported as a pair.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bigfloat::{
    big_abs, bits_to_digits, digits_to_bits, to_f64, BigComplex, BigReal, Ctx,
};
use crate::coeffgen;
use crate::landscape::{classify_endpoint, DomainLabel, LandscapeError, Parameters};
use crate::quadrature::adaptive_gl_big;

/// Default expansion order: the canonical tabulation of the coefficients
/// c_k runs to k = 10 (see [`crate::reference::TABLE1`]), and the error
/// benchmarks in [`crate::reference::TABLE3`] truncate at the least term
/// within that range. Explicit `k_max` values may go higher; exact
/// coefficient generation is memoized per order.
const CANONICAL_ORDER: usize = 10;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("log-gamma pole: the argument is a nonpositive integer")]
    PoleAtNonpositiveInteger,
    #[error("parameters outside the representation's validity region: {0}")]
    DomainError(&'static str),
    #[error(
        "the point lies on a transition curve, where the expansion switches which \
         combination it represents; evaluation there is refused rather than guessed"
    )]
    OnTransitionUnsupported,
    #[error(transparent)]
    Landscape(#[from] LandscapeError),
}

/// Endpoint label as reported in error tables: the three terminal regions,
/// plus the conjugate-pair case on the real transition segment at theta = 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EndpointKind {
    Infinity,
    PlusI,
    MinusI,
    PlusMinusI,
}

impl std::fmt::Display for EndpointKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EndpointKind::Infinity => "inf",
            EndpointKind::PlusI => "+i",
            EndpointKind::MinusI => "-i",
            EndpointKind::PlusMinusI => "+-i",
        })
    }
}

/// Which Bessel-type combination the asymptotic series is read as.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExpansionVariant {
    /// H + iJ, the finite contour to +i.
    PlusI,
    /// H − iJ, the finite contour to −i.
    MinusI,
    /// H − Y, the semi-infinite real contour.
    MinusY,
}

impl std::fmt::Display for ExpansionVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ExpansionVariant::PlusI => "H+iJ",
            ExpansionVariant::MinusI => "H-iJ",
            ExpansionVariant::MinusY => "H-Y",
        })
    }
}

impl std::str::FromStr for ExpansionVariant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "plus-i" | "plusi" | "+i" | "h+ij" => Ok(ExpansionVariant::PlusI),
            "minus-i" | "minusi" | "-i" | "h-ij" => Ok(ExpansionVariant::MinusI),
            "minus-y" | "minusy" | "-y" | "h-y" => Ok(ExpansionVariant::MinusY),
            other => Err(format!(
                "unknown expansion variant {other:?} (expected plus-i, minus-i, or minus-y)"
            )),
        }
    }
}

/// Endpoint of the finite integration contour in [`integral_12`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntegralSign {
    /// Contour from 0 to +i: the H + iJ combination.
    Plus,
    /// Contour from 0 to −i: the H − iJ combination.
    Minus,
}

/// How an oracle value was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OracleMethod {
    Quadrature12Plus,
    Quadrature12Minus,
    Quadrature13,
    Maclaurin,
}

/// An independent high-accuracy value with an a-posteriori error estimate.
#[derive(Clone, Debug)]
pub struct OracleResult {
    pub value: BigComplex,
    /// Absolute difference between successive refinements (finer partition or
    /// doubled working precision) — measured, not guessed.
    pub est_error: f64,
    pub method: OracleMethod,
}

/// The truncated asymptotic expansion at one (ν, z).
#[derive(Clone, Debug)]
pub struct AsymptoticSum {
    pub nu: Complex64,
    pub z: Complex64,
    pub variant: ExpansionVariant,
    /// terms[k] = c_k(q) · k!/z^k for q = ν/z.
    pub terms: Vec<Complex64>,
    /// Least-|term| index over the computed range; the sum stops here.
    pub k_star: usize,
    /// (z/2)^{ν−1} / (√π Γ(ν+½)).
    pub prefactor: Complex64,
    /// prefactor · Σ_{k ≤ k_star} terms[k].
    pub total: Complex64,
}

/// One verified evaluation: expansion vs oracle at q = ν/z, z = |z|e^{iθ}.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EvalReport {
    pub q: Complex64,
    pub theta: f64,
    pub endpoint: EndpointKind,
    pub asymptotic: Complex64,
    pub oracle: Complex64,
    /// |asymptotic − oracle| / |H| with |H| from the Maclaurin oracle.
    pub relative_error_h: f64,
    /// |asymptotic − oracle| / |oracle| (the combination itself).
    pub relative_error_combination: f64,
    pub k_star: usize,
}

impl EvalReport {
    pub const CSV_HEADER: &'static str =
        "q_re,q_im,theta_over_pi,endpoint,rel_err_H,rel_err_combo,k_star";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:e},{:e},{}",
            self.q.re,
            self.q.im,
            self.theta / std::f64::consts::PI,
            self.endpoint,
            self.relative_error_h,
            self.relative_error_combination,
            self.k_star
        )
    }

    /// JSON object with exactly the CSV columns.
    pub fn row_json(&self) -> serde_json::Value {
        serde_json::json!({
            "q_re": self.q.re,
            "q_im": self.q.im,
            "theta_over_pi": self.theta / std::f64::consts::PI,
            "endpoint": self.endpoint.to_string(),
            "rel_err_H": self.relative_error_h,
            "rel_err_combo": self.relative_error_combination,
            "k_star": self.k_star,
        })
    }
}

// ---------------------------------------------------------------------------
// log-Gamma
// ---------------------------------------------------------------------------

/// Series length for the Spouge parameterization at a decimal-digit target:
/// the relative error bound a^{-1/2}(2π)^{-(a+1/2)} loses ~0.798 decimal
/// digits per term.
fn spouge_terms(digits: u32) -> u32 {
    ((digits as f64 + 3.0) / 0.798).ceil() as u32 + 1
}

/// Principal branch of log Γ(w) to the requested number of decimal digits.
///
/// Spouge's series is evaluated after shifting the argument so Re ≥ 2
/// (log Γ(w) = log Γ(w+n) − Σ log(w+j), principal logs throughout — both
/// sides are continuous off (−∞, 0] and agree on the positive axis, so the
/// shifted formula stays on the principal branch). The alternating series
/// coefficients peak near exp(1.28a), so the correction sum cancels ~0.56a
/// decimal digits; the working precision carries that many guard digits and
/// the result is rounded back to the requested precision.
pub fn log_gamma(w: Complex64, digits: u32) -> Result<BigComplex, EvalError> {
    if !(w.re.is_finite() && w.im.is_finite()) {
        return Err(EvalError::DomainError("log-gamma argument must be finite"));
    }
    if w.im == 0.0 && w.re <= 0.0 && w.re.fract() == 0.0 {
        return Err(EvalError::PoleAtNonpositiveInteger);
    }
    let digits = digits.max(10);
    let a = spouge_terms(digits);
    let work = Ctx::with_digits(digits + (0.56 * a as f64) as u32 + 10);
    let bits = work.bits();

    let shift = if w.re < 2.0 { (2.0 - w.re).ceil() as i64 } else { 0 };
    if shift > 1_000_000 {
        return Err(EvalError::DomainError(
            "log-gamma argument too far into the left half-plane",
        ));
    }
    let wb = work.complex(w);
    let mut log_shift = work.zero();
    for j in 0..shift {
        log_shift += (wb.clone() + j as f64).ln();
    }
    // Γ(s + 1) = Γ(w + shift)
    let s = wb + (shift as f64 - 1.0);

    let sqrt_two_pi = (work.pi() * 2u32).sqrt();
    let mut sum = BigComplex::with_val(bits, (sqrt_two_pi, work.real(0.0)));
    let mut lnfact = work.real(0.0); // ln (k−1)!
    for k in 1..a {
        if k > 1 {
            lnfact += work.real((k - 1) as f64).ln();
        }
        let amk = work.real((a - k) as f64);
        // c_k = (−1)^{k−1} (a−k)^{k−1/2} e^{a−k} / (k−1)!
        let mut t = amk.clone().ln();
        t *= k as f64 - 0.5;
        t += &amk;
        t -= &lnfact;
        let mag = t.exp();
        let term = BigComplex::with_val(bits, (mag, work.real(0.0))) / (s.clone() + k as f64);
        if k % 2 == 1 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    // log Γ(s+1) = (s+1/2) ln(s+a) − (s+a) + ln Σ
    let spa = s.clone() + a as f64;
    let mut res = (s + 0.5) * spa.clone().ln();
    res -= spa;
    res += sum.ln();
    res -= log_shift;
    Ok(BigComplex::with_val(digits_to_bits(digits), &res))
}

/// Γ(x) for real x > 0 at the context's precision.
fn gamma_real(x: f64, ctx: &Ctx) -> Result<BigReal, EvalError> {
    let lg = log_gamma(Complex64::new(x, 0.0), bits_to_digits(ctx.bits()))?;
    Ok(BigReal::with_val(ctx.bits(), lg.real()).exp())
}

// ---------------------------------------------------------------------------
// Maclaurin oracle
// ---------------------------------------------------------------------------

/// One pass of the series at the context's precision. Returns the value and
/// the ratio max|term| / |Σ terms| that measures the cancellation suffered.
fn maclaurin_pass(nu: Complex64, z: Complex64, ctx: &Ctx) -> Result<(BigComplex, f64), EvalError> {
    let bits = ctx.bits();
    let digits = bits_to_digits(bits);
    let nub = ctx.complex(nu);
    let z2 = ctx.complex(z) / 2u32;
    let m_z2_sq = -z2.clone().square();

    // Σ_{n} (−)ⁿ (z/2)^{2n} / (Γ(n+3/2) Γ(n+ν+3/2)), started past any pole of
    // 1/Γ(n+ν+3/2) (those terms vanish).
    let (n0, mut term) = if nu.im == 0.0 && nu.re + 1.5 <= 0.0 && (nu.re + 1.5).fract() == 0.0 {
        let m = (-(nu.re + 1.5)) as usize;
        let g = gamma_real(m as f64 + 2.5, ctx)?;
        let mut p = ctx.one();
        for _ in 0..=m {
            p *= &m_z2_sq;
        }
        (m + 1, p / g)
    } else {
        let g32 = ctx.pi().sqrt() / 2u32;
        let lg = log_gamma(Complex64::new(nu.re + 1.5, nu.im), digits)?;
        let gn = BigComplex::with_val(bits, &lg).exp();
        (0, (gn * g32).recip())
    };

    let mut sum = term.clone();
    let mut max_mag = big_abs(&term);
    let rel_floor = {
        use rug::ops::Pow;
        ctx.real(10.0).pow(-(digits as i32) - 5)
    };
    let mut quiet = 0u32;
    let mut n = n0;
    while n < 200_000 {
        n += 1;
        let den = (nub.clone() + (n as f64 + 0.5)) * (n as f64 + 0.5);
        term *= &m_z2_sq;
        term /= den;
        sum += &term;
        let t_mag = big_abs(&term);
        if t_mag > max_mag {
            max_mag = t_mag.clone();
        }
        if t_mag < big_abs(&sum) * rel_floor.clone() {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
    }

    let sum_mag = big_abs(&sum);
    let cancel = if sum_mag == 0 {
        0.0
    } else {
        let ratio = BigReal::with_val(bits, &max_mag / &sum_mag);
        ratio.to_f64().log10().max(0.0)
    };
    // (z/2)^{ν+1}, principal branch.
    let value = (z2.ln() * (nub + 1.0_f64)).exp() * sum;
    Ok((value, cancel))
}

/// Series value to `digits` decimal digits, re-running with the working
/// precision inflated by the measured cancellation until the guard covers it.
fn maclaurin_value(nu: Complex64, z: Complex64, digits: u32) -> Result<BigComplex, EvalError> {
    if z == Complex64::new(0.0, 0.0) {
        return Ok(Ctx::with_digits(digits).zero());
    }
    let mut extra = 0u32;
    for _ in 0..4 {
        let work = Ctx::with_digits(digits + extra + 10);
        let (value, cancel) = maclaurin_pass(nu, z, &work)?;
        if cancel <= extra as f64 + 5.0 {
            return Ok(BigComplex::with_val(digits_to_bits(digits), &value));
        }
        extra = cancel.ceil() as u32 + 10;
    }
    Err(EvalError::DomainError(
        "series cancellation kept outrunning the working precision",
    ))
}

/// Arbitrary-precision Maclaurin oracle; `est_error` is the absolute
/// difference against a run at doubled precision.
pub fn struve_maclaurin(
    nu: Complex64,
    z: Complex64,
    target_digits: u32,
) -> Result<OracleResult, EvalError> {
    let d = target_digits.max(10);
    let lo = maclaurin_value(nu, z, d)?;
    let hi = maclaurin_value(nu, z, 2 * d)?;
    let prec = hi.prec().0;
    let est_error = big_abs(&BigComplex::with_val(prec, &hi - &lo)).to_f64();
    Ok(OracleResult { value: hi, est_error, method: OracleMethod::Maclaurin })
}

// ---------------------------------------------------------------------------
// Quadrature oracles
// ---------------------------------------------------------------------------

/// Default working precision for the contour integrals: comfortably beyond
/// the 1e-16-relative agreement the reports need. Overridable through the
/// precision environment variable.
const QUAD_DIGITS_DEFAULT: u32 = 35;

fn quad_digits() -> u32 {
    crate::bigfloat::digits_or(QUAD_DIGITS_DEFAULT)
}
const QUAD_REL_TOL: f64 = 1e-24;
const QUAD_MAX_PANELS: usize = 2_000;

/// 2 (z/2)^ν / (√π Γ(ν+½)) in log space, exponentiated at the context's
/// precision.
fn contour_prefactor(nu: Complex64, z: Complex64, ctx: &Ctx) -> Result<BigComplex, EvalError> {
    let bits = ctx.bits();
    let lg = log_gamma(Complex64::new(nu.re + 0.5, nu.im), bits_to_digits(bits))?;
    let z2 = ctx.complex(z) / 2u32;
    let mut ln_pref = z2.ln() * ctx.complex(nu);
    ln_pref += ctx.real(2.0).ln();
    ln_pref -= ctx.pi().ln() / 2u32;
    ln_pref -= BigComplex::with_val(bits, &lg);
    Ok(ln_pref.exp())
}

/// H ± iJ through the finite contour from 0 to ±i, integrated as an adaptive
/// arbitrary-precision line integral. For Re ν < 3/2 the endpoint factor
/// (1+u²)^{ν−½} is only Hölder at ±i, so the contour is reparameterized by
/// u = ±i(1−s²), which turns it into s^{2ν}·(smooth).
pub fn integral_12(
    nu: Complex64,
    z: Complex64,
    sign: IntegralSign,
) -> Result<OracleResult, EvalError> {
    if !(nu.re > -0.5) {
        return Err(EvalError::DomainError(
            "the finite-contour representation requires Re ν > −1/2",
        ));
    }
    if !(z.re > 0.0) {
        return Err(EvalError::DomainError(
            "the finite-contour representation requires |arg z| < π/2",
        ));
    }
    let ctx = Ctx::with_digits(quad_digits());
    let s_unit = match sign {
        IntegralSign::Plus => Complex64::new(0.0, 1.0),
        IntegralSign::Minus => Complex64::new(0.0, -1.0),
    };
    // exp coefficient: −z·(±i)
    let c_exp = ctx.complex(-z * s_unit);
    let pw = ctx.complex(Complex64::new(nu.re - 0.5, nu.im));
    let two_nu = ctx.complex(2.0 * nu);

    let a = ctx.real(0.0);
    let b = ctx.real(1.0);
    let quad = if nu.re < 1.5 {
        // ∫₀¹ e^{∓iz(1−s²)} · 2 s^{2ν} (2−s²)^{ν−½} ds
        let f = |s: &BigReal| -> BigComplex {
            let s2 = s.clone().square();
            let phase = (c_exp.clone() * (-(s2.clone() - 1u32))).exp();
            let power = (two_nu.clone() * s.clone().ln()
                + pw.clone() * (-(s2 - 2u32)).ln())
            .exp();
            phase * power * 2u32
        };
        adaptive_gl_big(&f, &a, &b, 1e-300, QUAD_REL_TOL, QUAD_MAX_PANELS, ctx)
    } else {
        // ∫₀¹ e^{∓izt} (1−t²)^{ν−½} dt
        let f = |t: &BigReal| -> BigComplex {
            let phase = (c_exp.clone() * t).exp();
            let power = (pw.clone() * (-(t.clone().square() - 1u32)).ln()).exp();
            phase * power
        };
        adaptive_gl_big(&f, &a, &b, 1e-300, QUAD_REL_TOL, QUAD_MAX_PANELS, ctx)
    };

    // value = prefactor · (±i) · ∫
    let pref = contour_prefactor(nu, z, &ctx)?;
    let scale = big_abs(&pref).to_f64();
    let value = pref * ctx.complex(s_unit) * quad.value;
    Ok(OracleResult {
        value,
        est_error: quad.refinement_diff * scale,
        method: match sign {
            IntegralSign::Plus => OracleMethod::Quadrature12Plus,
            IntegralSign::Minus => OracleMethod::Quadrature12Minus,
        },
    })
}

/// H − Y through the semi-infinite real contour, integrated block by block
/// (widths doubling) until the integrand envelope falls below 1e-25 of the
/// running total.
pub fn integral_13(nu: Complex64, z: Complex64) -> Result<OracleResult, EvalError> {
    if !(z.re > 0.0) {
        return Err(EvalError::DomainError(
            "the semi-infinite representation requires Re z > 0",
        ));
    }
    let ctx = Ctx::with_digits(quad_digits());
    let bits = ctx.bits();
    let zb = ctx.complex(z);
    let pw = ctx.complex(Complex64::new(nu.re - 0.5, nu.im));
    let f = |u: &BigReal| -> BigComplex {
        let phase = (zb.clone() * -u.clone()).exp();
        let power = (pw.clone() * (u.clone().square() + 1u32).ln()).exp();
        phase * power
    };

    let x = z.re;
    let p_env = (nu.re - 0.5).max(0.0);
    let mut total = BigComplex::with_val(bits, (0, 0));
    let mut est = 0.0f64;
    let mut refinement = 0.0f64;
    let mut a = 0.0f64;
    let mut width = 1.0f64;
    for _ in 0..400 {
        let b = a + width;
        let total_mag = big_abs(&total).to_f64();
        let abs_tol = if total_mag > 0.0 { 1e-26 * total_mag } else { 1e-300 };
        let block = adaptive_gl_big(
            &f,
            &ctx.real(a),
            &ctx.real(b),
            abs_tol,
            QUAD_REL_TOL,
            QUAD_MAX_PANELS,
            ctx,
        );
        total += &block.value;
        est += block.est_error;
        refinement += block.refinement_diff;
        a = b;
        width *= 2.0;

        // ln of the decay envelope e^{−x·a}(1+a²)^p · (2/x) at the new edge,
        // vs ln of 1e-25·|total| (logs avoid f64 overflow for large Re ν).
        let ln_env = -x * a + p_env * (a * a).ln_1p() + (2.0 / x).ln();
        let total_ln = big_abs(&total).ln().to_f64();
        if ln_env < total_ln + (1e-25f64).ln() && x * a >= 2.0 * p_env + 4.0 {
            break;
        }
    }

    let pref = contour_prefactor(nu, z, &ctx)?;
    let scale = big_abs(&pref).to_f64();
    let value = pref * total;
    Ok(OracleResult {
        value,
        est_error: (est + refinement) * scale,
        method: OracleMethod::Quadrature13,
    })
}

// ---------------------------------------------------------------------------
// Asymptotic expansion
// ---------------------------------------------------------------------------

/// Index of the least |term|, ties to the smallest index. The scan follows
/// the semiconvergent shape: it stops after the first strict increase
/// sustained for 2 consecutive terms, so trailing growth past the least term
/// never drags the index forward.
pub fn optimal_truncation(terms: &[Complex64]) -> usize {
    assert!(!terms.is_empty(), "optimal truncation needs at least one term");
    let mut best = 0usize;
    let mut best_mag = terms[0].norm();
    let mut prev = best_mag;
    let mut rising = 0u32;
    for (k, t) in terms.iter().enumerate().skip(1) {
        let mag = t.norm();
        if mag < best_mag {
            best = k;
            best_mag = mag;
        }
        if mag > prev {
            rising += 1;
            if rising >= 2 {
                break;
            }
        } else {
            rising = 0;
        }
        prev = mag;
    }
    best
}

/// Builds the expansion terms c_k(q)·k!/z^k for q = ν/z and truncates at the
/// least term within the computed range. `k_max` bounds the computed range;
/// when absent the canonical order 10 is used — the range the reference error
/// benchmarks truncate within.
pub fn asymptotic_sum(
    nu: Complex64,
    z: Complex64,
    variant: ExpansionVariant,
    k_max: Option<usize>,
) -> Result<AsymptoticSum, EvalError> {
    if z == Complex64::new(0.0, 0.0) || !z.is_finite() || !nu.is_finite() {
        return Err(EvalError::DomainError("the expansion needs finite ν and nonzero z"));
    }
    let q = nu / z;

    // (z/2)^{ν−1} / (√π Γ(ν+½)), assembled in log space.
    let ctx = Ctx::with_digits(40);
    let lg = log_gamma(Complex64::new(nu.re + 0.5, nu.im), 40)?;
    let z2 = ctx.complex(z) / 2u32;
    let mut ln_pref = z2.ln() * ctx.complex(nu - Complex64::new(1.0, 0.0));
    ln_pref -= ctx.pi().ln() / 2u32;
    ln_pref -= BigComplex::with_val(ctx.bits(), &lg);
    let prefactor = to_f64(&ln_pref.exp());

    let order = k_max.unwrap_or(CANONICAL_ORDER);
    let polys = coeffgen::coefficients(order);
    let mut terms: Vec<Complex64> = Vec::with_capacity(order + 1);
    let mut factor = Complex64::new(1.0, 0.0); // k!/z^k
    for (k, poly) in polys.iter().enumerate() {
        if k > 0 {
            factor *= k as f64 / z;
        }
        terms.push(poly.eval(q) * factor);
    }

    let k_star = optimal_truncation(&terms);
    let partial: Complex64 = terms[..=k_star].iter().sum();
    let total = prefactor * partial;
    Ok(AsymptoticSum { nu, z, variant, terms, k_star, prefactor, total })
}

/// The continuation multiplier e^{πmi(ν+1)} that carries the function across
/// m half-turns of the argument of z; callers reduce arg z into (−π/2, π/2)
/// and multiply by this.
pub fn continue_argument(nu: Complex64, m: i32) -> Complex64 {
    let i_pi_m = Complex64::new(0.0, std::f64::consts::PI * m as f64);
    (i_pi_m * (nu + Complex64::new(1.0, 0.0))).exp()
}

// ---------------------------------------------------------------------------
// Verified evaluation
// ---------------------------------------------------------------------------

/// The endpoint/variant/oracle choice for one (q, θ).
fn pick_variant(
    q: Complex64,
    theta: f64,
) -> Result<(EndpointKind, ExpansionVariant), EvalError> {
    // Degenerate real segment at θ = 0: the two conjugate combinations hold
    // simultaneously and the benchmark reports them as the ±i pair.
    if theta == 0.0 && q.im == 0.0 && q.re >= 1.0 {
        return Ok((EndpointKind::PlusMinusI, ExpansionVariant::PlusI));
    }
    let params = Parameters::new(q, theta)?;
    let label = match classify_endpoint(&params) {
        Ok(label) => label,
        // A trace that spirals past its winding budget is pinned between
        // domains — treat it as on-curve rather than failing.
        Err(LandscapeError::MaxStepsExceeded { .. }) => DomainLabel::OnTransition,
        Err(e) => return Err(e.into()),
    };
    match label {
        DomainLabel::ToInfinity => Ok((EndpointKind::Infinity, ExpansionVariant::MinusY)),
        DomainLabel::ToPlusI => Ok((EndpointKind::PlusI, ExpansionVariant::PlusI)),
        DomainLabel::ToMinusI => Ok((EndpointKind::MinusI, ExpansionVariant::MinusI)),
        DomainLabel::OnTransition => Err(EvalError::OnTransitionUnsupported),
    }
}

/// Evaluates the optimally-truncated expansion at ν = q·z, z = |z|e^{iθ},
/// checks it against the matching contour oracle, and reports the relative
/// error both against the combination and against |H| from the series
/// oracle.
pub fn error_report(q: Complex64, theta: f64, modulus_z: f64) -> Result<EvalReport, EvalError> {
    if !(modulus_z > 0.0) || !modulus_z.is_finite() || !q.is_finite() {
        return Err(EvalError::DomainError("need finite q and |z| > 0"));
    }
    let z = Complex64::from_polar(modulus_z, theta);
    let nu = q * z;

    let (endpoint, variant) = pick_variant(q, theta)?;
    let oracle = match variant {
        ExpansionVariant::MinusY => integral_13(nu, z)?,
        ExpansionVariant::PlusI => integral_12(nu, z, IntegralSign::Plus)?,
        ExpansionVariant::MinusI => integral_12(nu, z, IntegralSign::Minus)?,
    };
    let sum = asymptotic_sum(nu, z, variant, None)?;
    let h = struve_maclaurin(nu, z, crate::bigfloat::digits_or(50))?;

    let prec = oracle.value.prec().0.max(h.value.prec().0);
    let total_big = BigComplex::with_val(prec, (sum.total.re, sum.total.im));
    let diff = big_abs(&BigComplex::with_val(prec, &total_big - &oracle.value));
    let rel_combo =
        BigReal::with_val(prec, &diff / &big_abs(&oracle.value)).to_f64();
    let rel_h = BigReal::with_val(prec, &diff / &big_abs(&h.value)).to_f64();

    Ok(EvalReport {
        q,
        theta,
        endpoint,
        asymptotic: sum.total,
        oracle: to_f64(&oracle.value),
        relative_error_h: rel_h,
        relative_error_combination: rel_combo,
        k_star: sum.k_star,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigfloat::rel_diff;
    use std::f64::consts::PI;

    fn big(ctx: &Ctx, re: f64, im: f64) -> BigComplex {
        BigComplex::with_val(ctx.bits(), (re, im))
    }

    /// √(2/(πz))·(1−cos z) — the closed form of the function at ν = 1/2 —
    /// in big precision for complex z off the negative real axis.
    fn half_order_closed_form(z: Complex64, ctx: &Ctx) -> BigComplex {
        let zb = ctx.complex(z);
        let two = big(ctx, 2.0, 0.0);
        let pi_z = BigComplex::with_val(ctx.bits(), &zb * &ctx.pi());
        let root = (two / pi_z).sqrt();
        let one_m_cos = -(zb.cos() - 1u32);
        root * one_m_cos
    }

    #[test]
    fn log_gamma_fixes_the_classic_values() {
        // Γ(1) = 1 and Γ(1/2) = √π.
        let lg1 = log_gamma(Complex64::new(1.0, 0.0), 50).unwrap();
        assert!(big_abs(&lg1).to_f64() < 1e-45, "{}", big_abs(&lg1).to_f64());

        let lg_half = log_gamma(Complex64::new(0.5, 0.0), 50).unwrap();
        let ctx = Ctx::with_digits(50);
        let want = ctx.pi().sqrt().ln();
        let diff = BigReal::with_val(ctx.bits(), lg_half.real() - &want)
            .abs()
            .to_f64();
        assert!(diff < 1e-45 && lg_half.imag().to_f64().abs() < 1e-45, "{diff:e}");
    }

    #[test]
    fn log_gamma_satisfies_the_recurrence() {
        let w = Complex64::new(21.3, 4.7);
        let d = 60;
        let ctx = Ctx::with_digits(d);
        let lhs = log_gamma(Complex64::new(w.re + 1.0, w.im), d).unwrap();
        let rhs = log_gamma(w, d).unwrap() + ctx.complex(w).ln();
        let diff = big_abs(&BigComplex::with_val(ctx.bits(), &lhs - &rhs)).to_f64();
        assert!(diff < 1e-54, "recurrence defect {diff:e}");
    }

    #[test]
    fn log_gamma_rejects_poles() {
        for w in [0.0, -1.0, -7.0] {
            assert!(matches!(
                log_gamma(Complex64::new(w, 0.0), 30),
                Err(EvalError::PoleAtNonpositiveInteger)
            ));
        }
        assert!(log_gamma(Complex64::new(-2.5, 0.0), 30).is_ok());
    }

    #[test]
    fn maclaurin_matches_the_half_order_closed_form() {
        let ctx = Ctx::with_digits(45);
        for z in [
            Complex64::new(PI, 0.0),
            Complex64::new(2.0, 0.0),
            Complex64::from_polar(40.0, 0.1 * PI),
        ] {
            let got = struve_maclaurin(Complex64::new(0.5, 0.0), z, 45).unwrap();
            let want = half_order_closed_form(z, &ctx);
            let rel = rel_diff(&got.value, &want);
            assert!(rel < 1e-40, "z={z}: rel {rel:e}");
        }
    }

    #[test]
    fn maclaurin_agrees_with_itself_across_precisions() {
        let nu = Complex64::new(24.0, 0.0);
        let z = Complex64::new(40.0, 0.0);
        let lo = struve_maclaurin(nu, z, 50).unwrap();
        let hi = struve_maclaurin(nu, z, 80).unwrap();
        let rel = rel_diff(&lo.value, &hi.value);
        assert!(rel < 1e-30, "rel {rel:e}");
        let scale = big_abs(&hi.value).to_f64();
        assert!(lo.est_error <= 1e-30 * scale, "est {:e}", lo.est_error);
    }

    #[test]
    fn maclaurin_leading_term_controls_small_arguments() {
        // H_0(z) → (z/2)·4/π as z → 0.
        let z = Complex64::new(1e-8, 0.0);
        let got = struve_maclaurin(Complex64::new(0.0, 0.0), z, 30).unwrap();
        let want = 4.0 / PI * (z.re / 2.0);
        let rel = (to_f64(&got.value).re - want).abs() / want;
        assert!(rel < 1e-15, "rel {rel:e}");
        assert_eq!(to_f64(&got.value).im, 0.0);
    }

    #[test]
    fn finite_contour_reduces_at_half_order() {
        // (H ± iJ)(z) at ν = 1/2 is √(2/(πz))(1 − e^{∓iz}).
        let ctx = Ctx::with_digits(35);
        let nu = Complex64::new(0.5, 0.0);
        for z in [
            Complex64::new(2.0, 0.0),
            Complex64::new(10.0, 0.0),
            Complex64::from_polar(40.0, 0.1 * PI),
        ] {
            for (sign, s) in [(IntegralSign::Plus, -1.0), (IntegralSign::Minus, 1.0)] {
                let got = integral_12(nu, z, sign).unwrap();
                let zb = ctx.complex(z);
                let two = big(&ctx, 2.0, 0.0);
                let root =
                    (two / BigComplex::with_val(ctx.bits(), &zb * &ctx.pi())).sqrt();
                let expo = (ctx.complex(Complex64::new(0.0, s) * z)).exp();
                let want = root * (-(expo - 1u32));
                let rel = rel_diff(&got.value, &want);
                assert!(rel < 1e-10, "z={z} sign={sign:?}: rel {rel:e}");
                assert!(rel < 1e-15, "should beat the floor comfortably: {rel:e}");
            }
        }
    }

    #[test]
    fn semi_infinite_contour_reduces_at_half_order() {
        // (H − Y)(z) at ν = 1/2 is √(2/(πz)).
        let ctx = Ctx::with_digits(35);
        for z in [
            Complex64::new(2.0, 0.0),
            Complex64::new(10.0, 0.0),
            Complex64::from_polar(40.0, 0.1 * PI),
        ] {
            let got = integral_13(Complex64::new(0.5, 0.0), z).unwrap();
            let zb = ctx.complex(z);
            let two = big(&ctx, 2.0, 0.0);
            let want = (two / BigComplex::with_val(ctx.bits(), &zb * &ctx.pi())).sqrt();
            let rel = rel_diff(&got.value, &want);
            assert!(rel < 1e-10, "z={z}: rel {rel:e}");
        }
        // And the z = 2 specialization collapses to √(1/π).
        let got = integral_13(Complex64::new(0.5, 0.0), Complex64::new(2.0, 0.0)).unwrap();
        let want_f = (1.0 / PI).sqrt();
        assert!((to_f64(&got.value).re - want_f).abs() < 1e-12);
    }

    #[test]
    fn contour_pair_sums_to_twice_the_series() {
        // (H+iJ) + (H−iJ) = 2H.
        let nu = Complex64::new(3.0, 0.0);
        let z = Complex64::new(5.0, 0.0);
        let plus = integral_12(nu, z, IntegralSign::Plus).unwrap();
        let minus = integral_12(nu, z, IntegralSign::Minus).unwrap();
        let h = struve_maclaurin(nu, z, 40).unwrap();
        let prec = h.value.prec().0;
        let lhs = BigComplex::with_val(prec, &plus.value + &minus.value);
        let rhs = BigComplex::with_val(prec, &h.value * 2u32);
        let rel = rel_diff(&lhs, &rhs);
        assert!(rel < 1e-10, "rel {rel:e}");
    }

    #[test]
    fn semi_infinite_refinement_agreement_is_tiny() {
        let got = integral_13(Complex64::new(24.0, 0.0), Complex64::new(40.0, 0.0)).unwrap();
        let scale = big_abs(&got.value).to_f64();
        assert!(
            got.est_error < 1e-16 * scale,
            "est {:e} vs 1e-16·|value| = {:e}",
            got.est_error,
            1e-16 * scale
        );
    }

    #[test]
    fn contour_oracles_reject_out_of_domain_parameters() {
        assert!(matches!(
            integral_12(Complex64::new(-0.5, 0.0), Complex64::new(5.0, 0.0), IntegralSign::Plus),
            Err(EvalError::DomainError(_))
        ));
        assert!(matches!(
            integral_13(Complex64::new(3.0, 0.0), Complex64::new(-1.0, 0.0)),
            Err(EvalError::DomainError(_))
        ));
    }

    #[test]
    fn truncation_picks_the_least_term() {
        let t = |m: f64| Complex64::new(m, 0.0);
        assert_eq!(optimal_truncation(&[t(3.0), t(1.0), t(2.0), t(5.0)]), 1);
        assert_eq!(optimal_truncation(&[t(5.0), t(4.0), t(3.0), t(2.0), t(1.0)]), 4);
        // Ties resolve to the earliest index.
        assert_eq!(optimal_truncation(&[t(2.0), t(1.0), t(1.0), t(4.0), t(9.0)]), 1);
    }

    #[test]
    fn truncated_sum_obeys_the_least_term_contract() {
        let nu = Complex64::new(24.0, 0.0);
        let z = Complex64::new(40.0, 0.0);
        let sum = asymptotic_sum(nu, z, ExpansionVariant::MinusY, None).unwrap();
        let least = sum.terms[sum.k_star].norm();
        for (k, t) in sum.terms.iter().enumerate().take(sum.k_star) {
            assert!(least <= t.norm(), "term {k} below the chosen least term");
        }
        // Explicit zero order keeps only the prefactor (c_0 = 1).
        let only = asymptotic_sum(nu, z, ExpansionVariant::MinusY, Some(0)).unwrap();
        assert_eq!(only.k_star, 0);
        assert_eq!(only.total, only.prefactor);
    }

    #[test]
    fn continuation_multiplier_cases() {
        assert_eq!(continue_argument(Complex64::new(3.7, 0.2), 0), Complex64::new(1.0, 0.0));
        let even = continue_argument(Complex64::new(1.0, 0.0), 1);
        assert!((even - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        // ν = 1/2, one half-turn: e^{3πi/2} = −i, and the series obeys it.
        let m = continue_argument(Complex64::new(0.5, 0.0), 1);
        let minus_i = Complex64::new(0.0, -1.0);
        assert!((m - minus_i).norm() < 1e-14);
        let at = struve_maclaurin(Complex64::new(0.5, 0.0), Complex64::new(-2.0, 0.0), 40)
            .unwrap();
        let base = struve_maclaurin(Complex64::new(0.5, 0.0), Complex64::new(2.0, 0.0), 40)
            .unwrap();
        let prec = at.value.prec().0;
        // The multiplier is exactly −i; apply it exactly so the comparison
        // tests the series' branch handling, not f64 trigonometry.
        let moved =
            BigComplex::with_val(prec, &base.value * &Ctx::with_digits(40).complex(minus_i));
        let rel = rel_diff(&at.value, &moved);
        assert!(rel < 1e-30, "rel {rel:e}");
    }

    #[test]
    fn report_reproduces_the_infinity_benchmark_row() {
        let rep = error_report(Complex64::new(0.60, 0.0), 0.0, 40.0).unwrap();
        assert_eq!(rep.endpoint, EndpointKind::Infinity);
        let want = 7.764e-9;
        assert!(
            rep.relative_error_h > want / 3.0 && rep.relative_error_h < want * 3.0,
            "rel_err_H {:e} not within 3x of {want:e} (k* = {})",
            rep.relative_error_h,
            rep.k_star
        );
    }

    #[test]
    fn report_reproduces_the_segment_benchmark_row() {
        let rep = error_report(Complex64::new(1.25, 0.0), 0.0, 40.0).unwrap();
        assert_eq!(rep.endpoint, EndpointKind::PlusMinusI);
        let want = 8.835e-4;
        assert!(
            rep.relative_error_h > want / 3.0 && rep.relative_error_h < want * 3.0,
            "rel_err_H {:e} not within 3x of {want:e} (k* = {})",
            rep.relative_error_h,
            rep.k_star
        );
    }

    #[test]
    fn report_reproduces_the_minus_i_benchmark_row() {
        let rep = error_report(Complex64::new(1.00, -0.30), 0.0, 40.0).unwrap();
        assert_eq!(rep.endpoint, EndpointKind::MinusI);
        let want = 7.342e-5;
        assert!(
            rep.relative_error_h > want / 3.0 && rep.relative_error_h < want * 3.0,
            "rel_err_H {:e} not within 3x of {want:e} (k* = {})",
            rep.relative_error_h,
            rep.k_star
        );
    }

    #[test]
    fn report_refuses_undecidable_points() {
        // Near-imaginary q makes the endpoint spiral wind without bound, so
        // the trace exhausts its winding budget; that undecidability is
        // reported as sitting on a transition and evaluation is refused.
        let out = error_report(Complex64::new(0.05, 1.5), 0.0, 40.0);
        assert!(
            matches!(out, Err(EvalError::OnTransitionUnsupported)),
            "expected refusal, got {out:?}"
        );
    }

    #[test]
    fn conjugate_variants_agree_on_the_real_segment() {
        let nu = Complex64::new(50.0, 0.0);
        let z = Complex64::new(40.0, 0.0);
        let plus = asymptotic_sum(nu, z, ExpansionVariant::PlusI, None).unwrap();
        let minus = asymptotic_sum(nu, z, ExpansionVariant::MinusI, None).unwrap();
        // Real parameters make both totals real, so the pair is conjugate.
        assert_eq!(plus.total, minus.total.conj());
        assert!(plus.total.im.abs() <= 1e-12 * plus.total.norm());
    }

    #[test]
    fn report_rows_export_cleanly() {
        let rep = EvalReport {
            q: Complex64::new(0.6, 0.0),
            theta: 0.1 * PI,
            endpoint: EndpointKind::Infinity,
            asymptotic: Complex64::new(1.0, 2.0),
            oracle: Complex64::new(1.0, 2.0),
            relative_error_h: 1e-9,
            relative_error_combination: 2e-9,
            k_star: 19,
        };
        assert_eq!(EvalReport::CSV_HEADER.split(',').count(), 7);
        assert_eq!(rep.csv_row().split(',').count(), 7);
        let json = rep.row_json();
        assert_eq!(json["endpoint"], "inf");
        assert_eq!(json["k_star"], 19);
        let near = (json["theta_over_pi"].as_f64().unwrap() - 0.1).abs();
        assert!(near < 1e-15);
    }
}


//! Adaptive Gauss–Kronrod quadrature for complex-valued integrands on a real
//! interval.
//!
//! A 7-point Gauss rule nested in a 15-point Kronrod rule drives a classic
//! split-worst-panel loop. Besides the usual per-panel estimate, the caller
//! can ask for an a-posteriori check: the difference between the converged
//! value and the value after one more uniform refinement of the final
//! partition, which is the "successive refinement" error the oracles report.

use num_complex::Complex64;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::bigfloat::{big_abs, BigComplex, BigReal, Ctx};

// 15-point Kronrod nodes (positive half) and weights; the 7-point Gauss rule
// uses the odd-indexed nodes. Standard QUADPACK constants.
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

#[derive(Clone, Copy, Debug)]
pub struct QuadResult {
    pub value: Complex64,
    /// Kronrod-vs-Gauss error estimate accumulated over the final partition.
    pub est_error: f64,
    /// |value − value after one more uniform refinement|.
    pub refinement_diff: f64,
    pub panels: usize,
}

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kron = Complex64::new(0.0, 0.0);
    let mut gauss = Complex64::new(0.0, 0.0);
    for (i, (&x, &wk)) in XGK.iter().zip(WGK.iter()).enumerate() {
        let (fl, fr) = if x == 0.0 {
            let v = f(c);
            (v, Complex64::new(0.0, 0.0))
        } else {
            (f(c - h * x), f(c + h * x))
        };
        let s = fl + fr;
        kron += s * wk;
        if i % 2 == 1 {
            gauss += s * WG[i / 2];
        }
    }
    kron *= h;
    gauss *= h;
    let err = (kron - gauss).norm();
    (kron, err)
}

/// Integrates f over [a, b] until the summed panel estimate meets
/// `abs_tol + rel_tol·|integral|` or `max_panels` is reached. The result is
/// still returned (with its honest error estimate) when the budget runs out.
pub fn adaptive_gk<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> QuadResult {
    #[derive(Clone, Copy)]
    struct Panel {
        a: f64,
        b: f64,
        value: Complex64,
        err: f64,
    }

    let (v0, e0) = gk15(f, a, b);
    let mut panels = vec![Panel { a, b, value: v0, err: e0 }];

    loop {
        let total: Complex64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.err).sum();
        let target = abs_tol + rel_tol * total.norm();
        if err <= target || panels.len() >= max_panels {
            break;
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .map(|(i, _)| i)
            .unwrap();
        let p = panels.swap_remove(worst);
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            // Interval exhausted at f64 resolution; keep the panel as-is.
            panels.push(p);
            break;
        }
        let (vl, el) = gk15(f, p.a, m);
        let (vr, er) = gk15(f, m, p.b);
        panels.push(Panel { a: p.a, b: m, value: vl, err: el });
        panels.push(Panel { a: m, b: p.b, value: vr, err: er });
    }

    let value: Complex64 = panels.iter().map(|p| p.value).sum();
    let est_error: f64 = panels.iter().map(|p| p.err).sum();

    // One uniform refinement of the final partition, for the a-posteriori
    // agreement check.
    let mut refined = Complex64::new(0.0, 0.0);
    for p in &panels {
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            refined += p.value;
        } else {
            refined += gk15(f, p.a, m).0 + gk15(f, m, p.b).0;
        }
    }

    QuadResult {
        value,
        est_error,
        refinement_diff: (value - refined).norm(),
        panels: panels.len(),
    }
}


// ---------------------------------------------------------------------------
// Arbitrary-precision panels
// ---------------------------------------------------------------------------

/// Result of the arbitrary-precision adaptive integration.
#[derive(Clone, Debug)]
pub struct BigQuadResult {
    pub value: BigComplex,
    /// Summed embedded-pair estimate over the final partition.
    pub est_error: f64,
    /// |value - value after one more uniform refinement|.
    pub refinement_diff: f64,
    pub panels: usize,
}

/// (P_n(x), P_{n-1}(x)) by the three-term recurrence, n >= 2.
fn legendre_pair(x: &BigReal, n: usize, bits: u32) -> (BigReal, BigReal) {
    let mut p_prev = BigReal::with_val(bits, 1);
    let mut p = BigReal::with_val(bits, x);
    for j in 2..=n {
        let mut next = x.clone() * &p;
        next *= (2 * j - 1) as u32;
        next -= BigReal::with_val(bits, &p_prev * ((j - 1) as u32));
        next /= j as u32;
        p_prev = p;
        p = next;
    }
    (p, p_prev)
}

fn legendre_dp(x: &BigReal, pn: &BigReal, pnm1: &BigReal, n: usize, bits: u32) -> BigReal {
    // P'_n = n (x P_n - P_{n-1}) / (x^2 - 1)
    let mut num = x.clone() * pn;
    num -= pnm1;
    num *= n as u32;
    let den = x.clone().square() - 1u32;
    BigReal::with_val(bits, num / den)
}

/// Gauss-Legendre nodes and weights on (-1, 1) at the requested precision:
/// Newton refinement of the classical cosine seeds, cached per (n, bits).
fn legendre_rule(n: usize, bits: u32) -> Arc<(Vec<BigReal>, Vec<BigReal>)> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u32), Arc<(Vec<BigReal>, Vec<BigReal>)>>>> =
        OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&(n, bits)) {
        return hit.clone();
    }

    let mut xs = Vec::with_capacity(n);
    let mut ws = Vec::with_capacity(n);
    let thresh = BigReal::with_val(bits, 1) >> (bits.saturating_sub(6));
    for i in 1..=n {
        let seed = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        let mut x = BigReal::with_val(bits, seed);
        for _ in 0..64 {
            let (pn, pnm1) = legendre_pair(&x, n, bits);
            let dp = legendre_dp(&x, &pn, &pnm1, n, bits);
            let dx = BigReal::with_val(bits, pn / dp);
            x -= &dx;
            if dx.abs() < thresh {
                break;
            }
        }
        let (pn, pnm1) = legendre_pair(&x, n, bits);
        let dp = legendre_dp(&x, &pn, &pnm1, n, bits);
        // w = 2 / ((1 - x^2) P'_n(x)^2)
        let one_m_x2 = -(x.clone().square() - 1u32);
        let w = BigReal::with_val(bits, 2) / (one_m_x2 * dp.square());
        xs.push(x);
        ws.push(w);
    }
    let rule = Arc::new((xs, ws));
    cache.lock().unwrap().insert((n, bits), rule.clone());
    rule
}

fn gl_apply<F: Fn(&BigReal) -> BigComplex>(
    f: &F,
    a: &BigReal,
    b: &BigReal,
    rule: &(Vec<BigReal>, Vec<BigReal>),
    bits: u32,
) -> BigComplex {
    let c = BigReal::with_val(bits, a + b) / 2u32;
    let h = BigReal::with_val(bits, b - a) / 2u32;
    let mut acc = BigComplex::with_val(bits, (0, 0));
    for (x, w) in rule.0.iter().zip(rule.1.iter()) {
        let pt = BigReal::with_val(bits, &h * x) + &c;
        acc += f(&pt) * w.clone();
    }
    acc * h
}

/// Adaptive Gauss-Legendre integration at the context's precision: a 31-point
/// value with a 15-point companion estimate drives the same worst-panel
/// subdivision as [`adaptive_gk`], plus the one-extra-refinement agreement
/// check. Use this instead of the f64 engine when the caller needs
/// refinement agreement below the f64 noise floor.
pub fn adaptive_gl_big<F: Fn(&BigReal) -> BigComplex>(
    f: &F,
    a: &BigReal,
    b: &BigReal,
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
    ctx: Ctx,
) -> BigQuadResult {
    let bits = ctx.bits();
    let lo_rule = legendre_rule(15, bits);
    let hi_rule = legendre_rule(31, bits);

    struct Panel {
        a: BigReal,
        b: BigReal,
        value: BigComplex,
        err: f64,
    }
    let eval_panel = |pa: &BigReal, pb: &BigReal| -> (BigComplex, f64) {
        let v_hi = gl_apply(f, pa, pb, &hi_rule, bits);
        let v_lo = gl_apply(f, pa, pb, &lo_rule, bits);
        let err = big_abs(&BigComplex::with_val(bits, &v_hi - &v_lo)).to_f64();
        (v_hi, err)
    };

    let (v0, e0) = eval_panel(a, b);
    let mut panels = vec![Panel { a: a.clone(), b: b.clone(), value: v0, err: e0 }];
    loop {
        let mut total = BigComplex::with_val(bits, (0, 0));
        for p in &panels {
            total += &p.value;
        }
        let err: f64 = panels.iter().map(|p| p.err).sum();
        let target = abs_tol + rel_tol * big_abs(&total).to_f64();
        if err <= target || panels.len() >= max_panels {
            break;
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .map(|(i, _)| i)
            .unwrap();
        let p = panels.swap_remove(worst);
        let m = BigReal::with_val(bits, &p.a + &p.b) / 2u32;
        let (vl, el) = eval_panel(&p.a, &m);
        let (vr, er) = eval_panel(&m, &p.b);
        panels.push(Panel { a: p.a, b: m.clone(), value: vl, err: el });
        panels.push(Panel { a: m, b: p.b, value: vr, err: er });
    }

    let mut value = BigComplex::with_val(bits, (0, 0));
    for p in &panels {
        value += &p.value;
    }
    let est_error: f64 = panels.iter().map(|p| p.err).sum();

    let mut refined = BigComplex::with_val(bits, (0, 0));
    for p in &panels {
        let m = BigReal::with_val(bits, &p.a + &p.b) / 2u32;
        refined += gl_apply(f, &p.a, &m, &hi_rule, bits);
        refined += gl_apply(f, &m, &p.b, &hi_rule, bits);
    }
    let refinement_diff = big_abs(&BigComplex::with_val(bits, &value - &refined)).to_f64();

    BigQuadResult { value, est_error, refinement_diff, panels: panels.len() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        // Gauss-7/Kronrod-15 is exact for x^13 and far beyond on [0,1].
        let r = adaptive_gk(&|x| Complex64::new(x * x * x, 0.0), 0.0, 1.0, 1e-15, 1e-15, 64);
        assert!((r.value.re - 0.25).abs() < 1e-15);
        assert!(r.value.im == 0.0);
        assert_eq!(r.panels, 1);
    }

    #[test]
    fn integrates_oscillatory_complex() {
        // ∫₀^π e^{ix} dx = 2i
        let r = adaptive_gk(&|x| Complex64::from_polar(1.0, x), 0.0, std::f64::consts::PI, 1e-14, 1e-14, 256);
        assert!((r.value - Complex64::new(0.0, 2.0)).norm() < 1e-13, "{}", r.value);
        assert!(r.refinement_diff < 1e-13);
    }

    #[test]
    fn subdivides_sharp_features() {
        // Narrow Gaussian needs panels but converges.
        let f = |x: f64| Complex64::new((-(x - 0.3).powi(2) * 1e4).exp(), 0.0);
        let r = adaptive_gk(&f, 0.0, 1.0, 1e-13, 1e-13, 512);
        let want = (std::f64::consts::PI / 1e4).sqrt();
        assert!((r.value.re - want).abs() < 1e-12, "got {}, want {want}", r.value.re);
        assert!(r.panels > 4);
    }

    #[test]
    fn big_engine_matches_closed_forms() {
        // ∫₀^π e^{ix} dx = 2i at 40 digits.
        let ctx = Ctx::with_digits(40);
        let bits = ctx.bits();
        let f = |x: &BigReal| {
            let mut c = BigComplex::with_val(bits, (0, x));
            c = c.exp();
            c
        };
        let a = ctx.real(0.0);
        let b = ctx.pi();
        let r = adaptive_gl_big(&f, &a, &b, 1e-300, 1e-35, 400, ctx);
        let want = BigComplex::with_val(bits, (0, 2));
        let diff = big_abs(&BigComplex::with_val(bits, &r.value - &want)).to_f64();
        assert!(diff < 1e-33, "diff {diff:e}");
        assert!(r.refinement_diff < 1e-30, "refinement {:e}", r.refinement_diff);
    }

    #[test]
    fn big_engine_refinement_agreement_beats_f64_floor() {
        // Smooth decaying integrand: ∫₀¹ e^{-4x} dx = (1 - e^{-4})/4.
        let ctx = Ctx::with_digits(35);
        let bits = ctx.bits();
        let f = |x: &BigReal| BigComplex::with_val(bits, ((x.clone() * -4i32).exp(), 0));
        let a = ctx.real(0.0);
        let b = ctx.real(1.0);
        let r = adaptive_gl_big(&f, &a, &b, 1e-300, 1e-25, 400, ctx);
        let want = (ctx.real(-4.0).exp() - 1u32) / -4i32;
        let diff = (BigReal::with_val(bits, r.value.real() - &want)).abs().to_f64();
        assert!(diff < 1e-30, "diff {diff:e}");
        let scale = big_abs(&r.value).to_f64();
        assert!(r.refinement_diff < 1e-18 * scale, "refinement {:e}", r.refinement_diff);
    }

    #[test]
    fn endpoint_algebraic_singularity_converges() {
        // ∫₀¹ x^{-1/2} dx = 2, integrable endpoint singularity.
        let f = |x: f64| Complex64::new(if x > 0.0 { x.powf(-0.5) } else { 0.0 }, 0.0);
        let r = adaptive_gk(&f, 0.0, 1.0, 1e-10, 1e-10, 2000);
        assert!((r.value.re - 2.0).abs() < 1e-6, "got {}", r.value.re);
    }
}

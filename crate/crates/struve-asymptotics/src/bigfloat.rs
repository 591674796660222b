//! Arbitrary-precision scalars for the oracle computations.
//!
//! `BigReal`/`BigComplex` are MPFR/MPC-backed values whose working precision
//! travels with the value; constructing through [`Ctx`] keeps every
//! intermediate at the context's precision, so precision is only ever raised
//! explicitly, never silently dropped. Decimal digits are the user-facing
//! unit; bits = ceil(digits·log2(10)) plus guard bits internally.

use num_complex::Complex64;
use rug::float::Round;
use rug::ops::CompleteRound;
pub use rug::{Complex as BigComplex, Float as BigReal};

/// Default working precision in decimal digits, overridable through the
/// `STRUVE_ASYMPTOTICS_DIGITS` environment variable (parsed once per call).
pub const DEFAULT_DIGITS: u32 = 50;
pub const DIGITS_ENV_VAR: &str = "STRUVE_ASYMPTOTICS_DIGITS";

pub fn default_digits() -> u32 {
    digits_or(DEFAULT_DIGITS)
}

/// The environment override if set and sane, otherwise `fallback` — for
/// components whose natural default differs from [`DEFAULT_DIGITS`].
pub fn digits_or(fallback: u32) -> u32 {
    std::env::var(DIGITS_ENV_VAR)
        .ok()
        .and_then(|v| v.trim().parse::<u32>().ok())
        .filter(|&d| (10..=100_000).contains(&d))
        .unwrap_or(fallback)
}

pub fn digits_to_bits(digits: u32) -> u32 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 16
}

/// A fixed-precision construction context.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ctx {
    bits: u32,
}

impl Ctx {
    pub fn with_digits(digits: u32) -> Self {
        Ctx { bits: digits_to_bits(digits) }
    }

    pub fn with_bits(bits: u32) -> Self {
        Ctx { bits }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn real(&self, v: f64) -> BigReal {
        BigReal::with_val(self.bits, v)
    }

    pub fn real_from<T>(&self, v: T) -> BigReal
    where
        BigReal: rug::Assign<T>,
    {
        BigReal::with_val(self.bits, v)
    }

    pub fn complex(&self, v: Complex64) -> BigComplex {
        BigComplex::with_val(self.bits, (v.re, v.im))
    }

    pub fn complex_parts(&self, re: &BigReal, im: &BigReal) -> BigComplex {
        BigComplex::with_val(self.bits, (re, im))
    }

    pub fn zero(&self) -> BigComplex {
        BigComplex::with_val(self.bits, (0.0, 0.0))
    }

    pub fn one(&self) -> BigComplex {
        BigComplex::with_val(self.bits, (1.0, 0.0))
    }

    pub fn pi(&self) -> BigReal {
        BigReal::with_val(self.bits, rug::float::Constant::Pi)
    }

    /// Completes a lazy rug expression at this context's precision.
    pub fn done<T: CompleteRound<Completed = BigReal, Prec = u32, Round = Round, Ordering = std::cmp::Ordering>>(
        &self,
        expr: T,
    ) -> BigReal {
        expr.complete(self.bits)
    }
}

/// Inverse of [`digits_to_bits`]: the decimal digits a bit count supports.
pub fn bits_to_digits(bits: u32) -> u32 {
    (bits.saturating_sub(16) as f64 / std::f64::consts::LOG2_10).floor() as u32
}

/// |v| at v's own precision.
pub fn big_abs(v: &BigComplex) -> BigReal {
    BigReal::with_val(v.prec().0, v.abs_ref())
}

/// Round-trip to f64 (for reporting; precision loss is the caller's intent).
pub fn to_f64(v: &BigComplex) -> Complex64 {
    Complex64::new(v.real().to_f64(), v.imag().to_f64())
}

/// |a − b| / |b| in the precision of the wider operand.
pub fn rel_diff(a: &BigComplex, b: &BigComplex) -> f64 {
    let prec = a.prec().0.max(b.prec().0);
    let diff = BigComplex::with_val(prec, a - b);
    let den = BigReal::with_val(prec, b.abs_ref());
    if den == 0 {
        return BigReal::with_val(prec, diff.abs_ref()).to_f64();
    }
    (BigReal::with_val(prec, diff.abs_ref()) / den).to_f64()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn context_carries_precision() {
        let ctx = Ctx::with_digits(50);
        assert!(ctx.bits() >= 50.0_f64.mul_add(std::f64::consts::LOG2_10, 16.0) as u32);
        let x = ctx.real(2.0);
        assert_eq!(x.prec(), ctx.bits());
        let z = ctx.complex(Complex64::new(1.5, -0.5));
        assert_eq!(z.prec(), (ctx.bits(), ctx.bits()));
    }

    #[test]
    fn rel_diff_measures_agreement() {
        let ctx = Ctx::with_digits(40);
        let a = ctx.complex(Complex64::new(1.0, 0.0));
        let mut b = a.clone();
        b += BigComplex::with_val(ctx.bits(), (1e-30, 0.0));
        let d = rel_diff(&a, &b);
        assert!(d > 1e-31 && d < 1e-29, "d = {d}");
    }

    #[test]
    fn env_var_is_bounded() {
        // Out-of-range or garbage values fall back to the default.
        assert_eq!(DEFAULT_DIGITS, 50);
        assert!(default_digits() >= 10);
    }
}

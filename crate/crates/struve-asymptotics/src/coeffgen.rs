//! Exact generation of the expansion coefficients c_k(q).
//!
//! The phase change along a steepest-descent path is t(u) = u − q·log(1+u²).
//! Reverting that series around u = 0 and composing with (1+u²)^{−1/2}·du/dt
//! yields a power series in t whose k-th coefficient is the polynomial c_k(q).
//! Everything here is carried out over exact rationals, so the polynomials are
//! reproduced with no rounding at any order.
//!
//! The q-degree of c_k is k, only every other power appears (c_k has the
//! parity of k), and the leading coefficient is the central binomial C(2k, k).

use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;
use rug::Complete;
use rug::{Integer, Rational};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CoeffError {
    #[error("series must have zero constant term")]
    NonzeroConstantTerm,
    #[error("series has vanishing linear coefficient and cannot be reverted")]
    VanishingLinearCoefficient,
    #[error("linear coefficient must be a nonzero constant to revert over Q[q]")]
    NonconstantLinearCoefficient,
    #[error("invalid rational literal {0:?}")]
    BadRational(String),
}

/// Polynomial in q with exact rational coefficients, stored least power first.
/// Trailing zero coefficients are always stripped, so the representation of a
/// given polynomial is unique and `==` is mathematical equality.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct QPolynomial {
    coeffs: Vec<Rational>,
}

impl QPolynomial {
    pub fn zero() -> Self {
        QPolynomial { coeffs: Vec::new() }
    }

    pub fn constant(value: Rational) -> Self {
        Self::from_coeffs(vec![value])
    }

    pub fn monomial(value: Rational, power: usize) -> Self {
        let mut coeffs = vec![Rational::new(); power + 1];
        coeffs[power] = value;
        Self::from_coeffs(coeffs)
    }

    /// Builds from coefficients ordered by ascending power of q.
    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| *c == 0) {
            coeffs.pop();
        }
        QPolynomial { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, power: usize) -> Rational {
        self.coeffs.get(power).cloned().unwrap_or_default()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn add(&self, rhs: &QPolynomial) -> QPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut c = self.coeffs.get(i).cloned().unwrap_or_default();
            if let Some(r) = rhs.coeffs.get(i) {
                c += r;
            }
            out.push(c);
        }
        Self::from_coeffs(out)
    }

    pub fn sub(&self, rhs: &QPolynomial) -> QPolynomial {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> QPolynomial {
        QPolynomial {
            coeffs: self.coeffs.iter().map(|c| Rational::from(-c)).collect(),
        }
    }

    pub fn mul(&self, rhs: &QPolynomial) -> QPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rational::new(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += (a * b).complete();
            }
        }
        Self::from_coeffs(out)
    }

    pub fn scale(&self, factor: &Rational) -> QPolynomial {
        if *factor == 0 {
            return Self::zero();
        }
        QPolynomial {
            coeffs: self.coeffs.iter().map(|c| (c * factor).complete()).collect(),
        }
    }

    /// Horner evaluation at a complex point, rounding each coefficient once.
    pub fn eval(&self, q: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * q + Complex64::new(c.to_f64(), 0.0);
        }
        acc
    }

    /// Coefficients as `num/den` strings by ascending power (the JSON schema).
    pub fn to_fraction_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }

    pub fn from_fraction_strings<S: AsRef<str>>(parts: &[S]) -> Result<Self, CoeffError> {
        let mut coeffs = Vec::with_capacity(parts.len());
        for p in parts {
            let s = p.as_ref().trim();
            let r = Rational::from_str(s).map_err(|_| CoeffError::BadRational(s.to_string()))?;
            coeffs.push(r);
        }
        Ok(Self::from_coeffs(coeffs))
    }
}

impl fmt::Debug for QPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QPolynomial({self})")
    }
}

/// Renders highest power first, e.g. `6q^2 - 1/2`. Non-integer coefficients
/// attached to a power of q are parenthesized: `(287287/48)q^4`.
impl fmt::Display for QPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (power, c) in self.coeffs.iter().enumerate().rev() {
            if *c == 0 {
                continue;
            }
            let neg = *c < 0;
            let mag = Rational::from(c.abs_ref());
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let is_frac = *mag.denom() != 1;
            match power {
                0 => write!(f, "{mag}")?,
                _ => {
                    if mag != 1 {
                        if is_frac {
                            write!(f, "({mag})")?;
                        } else {
                            write!(f, "{mag}")?;
                        }
                    }
                    if power == 1 {
                        write!(f, "q")?;
                    } else {
                        write!(f, "q^{power}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl serde::Serialize for QPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_fraction_strings().serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for QPolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let parts = Vec::<String>::deserialize(d)?;
        QPolynomial::from_fraction_strings(&parts).map_err(serde::de::Error::custom)
    }
}

/// Truncated power series in one variable with [`QPolynomial`] coefficients,
/// stored least power first. `order` is the count of retained powers, so a
/// series of order N carries the powers 0..N-1 and arithmetic silently drops
/// anything beyond.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FormalSeries {
    terms: Vec<QPolynomial>,
    order: usize,
}

impl FormalSeries {
    pub fn zero(order: usize) -> Self {
        FormalSeries { terms: Vec::new(), order }
    }

    /// The series `t` itself.
    pub fn identity(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order > 1 {
            s.terms = vec![QPolynomial::zero(), QPolynomial::constant(Rational::from(1))];
        }
        s.normalize();
        s
    }

    pub fn from_terms(mut terms: Vec<QPolynomial>, order: usize) -> Self {
        terms.truncate(order);
        let mut s = FormalSeries { terms, order };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        while self.terms.last().is_some_and(QPolynomial::is_zero) {
            self.terms.pop();
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn term(&self, power: usize) -> QPolynomial {
        self.terms.get(power).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> &[QPolynomial] {
        &self.terms
    }

    pub fn truncated(&self, order: usize) -> FormalSeries {
        let mut t = self.clone();
        t.order = order.min(self.order);
        t.terms.truncate(t.order);
        t.normalize();
        t
    }

    pub fn add(&self, rhs: &FormalSeries) -> FormalSeries {
        let order = self.order.min(rhs.order);
        let n = self.terms.len().max(rhs.terms.len()).min(order);
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut p = self.terms.get(i).cloned().unwrap_or_default();
            if let Some(r) = rhs.terms.get(i) {
                p = p.add(r);
            }
            out.push(p);
        }
        Self::from_terms(out, order)
    }

    pub fn sub(&self, rhs: &FormalSeries) -> FormalSeries {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> FormalSeries {
        FormalSeries {
            terms: self.terms.iter().map(QPolynomial::neg).collect(),
            order: self.order,
        }
    }

    pub fn mul(&self, rhs: &FormalSeries) -> FormalSeries {
        let order = self.order.min(rhs.order);
        if self.terms.is_empty() || rhs.terms.is_empty() {
            return Self::zero(order);
        }
        let n = (self.terms.len() + rhs.terms.len() - 1).min(order);
        let mut out = vec![QPolynomial::zero(); n];
        for (i, a) in self.terms.iter().enumerate() {
            if a.is_zero() || i >= order {
                continue;
            }
            for (j, b) in rhs.terms.iter().enumerate() {
                if i + j >= order {
                    break;
                }
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Self::from_terms(out, order)
    }

    pub fn scale(&self, factor: &QPolynomial) -> FormalSeries {
        FormalSeries {
            terms: self.terms.iter().map(|t| t.mul(factor)).collect(),
            order: self.order,
        }
    }

    /// Termwise derivative; the result retains one fewer power.
    pub fn derivative(&self) -> FormalSeries {
        let order = self.order.saturating_sub(1);
        let mut out = Vec::new();
        for (k, t) in self.terms.iter().enumerate().skip(1) {
            out.push(t.scale(&Rational::from(k as u64)));
        }
        Self::from_terms(out, order)
    }

    /// Substitutes `inner` (which must have zero constant term) for the
    /// variable of `self`, by Horner's scheme at the common truncation order.
    pub fn compose(&self, inner: &FormalSeries) -> Result<FormalSeries, CoeffError> {
        if !inner.term(0).is_zero() {
            return Err(CoeffError::NonzeroConstantTerm);
        }
        let order = self.order.min(inner.order);
        let mut acc = Self::zero(order);
        for t in self.terms.iter().rev() {
            acc = acc.mul(inner);
            acc = acc.add(&Self::from_terms(vec![t.clone()], order));
        }
        Ok(acc.truncated(order))
    }

    /// Multiplicative inverse, requiring an invertible (nonzero constant
    /// rational) constant term so coefficients stay polynomial in q.
    fn reciprocal(&self) -> Result<FormalSeries, CoeffError> {
        let c0 = self.term(0);
        if c0.degree() != Some(0) {
            return Err(CoeffError::NonconstantLinearCoefficient);
        }
        let inv0 = Rational::from(1) / c0.coeff(0);
        let mut out = vec![QPolynomial::constant(inv0.clone())];
        for m in 1..self.order {
            let mut acc = QPolynomial::zero();
            for j in 1..=m {
                let gj = self.term(j);
                if gj.is_zero() {
                    continue;
                }
                acc = acc.add(&gj.mul(&out[m - j]));
            }
            out.push(acc.neg().scale(&inv0));
        }
        Ok(Self::from_terms(out, self.order))
    }
}

/// The phase series t(u) = u − q·log(1+u²) expanded around u = 0:
/// the u¹ coefficient is 1 and the u^{2j} coefficient is q·(−1)^j / j.
pub fn forward_series(order: usize) -> FormalSeries {
    let mut terms = vec![QPolynomial::zero(); order.min(2)];
    if order > 1 {
        terms[1] = QPolynomial::constant(Rational::from(1));
    }
    let mut j = 1usize;
    while 2 * j < order {
        terms.resize(2 * j + 1, QPolynomial::zero());
        let mut r = Rational::from((1u64, j as u64));
        if j % 2 == 1 {
            r = -r;
        }
        terms[2 * j] = QPolynomial::monomial(r, 1);
        j += 1;
    }
    FormalSeries::from_terms(terms, order)
}

/// Compositional inverse by Newton order-doubling: each pass
/// u ← u − (s(u) − t)/s′(u) doubles the number of correct powers, and all
/// arithmetic is exact, so the result is the unique series with s(u(t)) = t.
pub fn revert_series(s: &FormalSeries) -> Result<FormalSeries, CoeffError> {
    if !s.term(0).is_zero() {
        return Err(CoeffError::NonzeroConstantTerm);
    }
    let lin = s.term(1);
    if lin.is_zero() {
        return Err(CoeffError::VanishingLinearCoefficient);
    }
    if lin.degree() != Some(0) {
        return Err(CoeffError::NonconstantLinearCoefficient);
    }
    let order = s.order();
    if order <= 1 {
        return Ok(FormalSeries::zero(order));
    }
    let s_deriv = s.derivative();
    let inv_lin = Rational::from(1) / lin.coeff(0);
    let mut u = FormalSeries::from_terms(
        vec![QPolynomial::zero(), QPolynomial::constant(inv_lin)],
        2,
    );
    let mut cur = 2usize;
    while cur < order {
        cur = (cur * 2).min(order);
        u = grow_order(&u, cur);
        let err = s.truncated(cur).compose(&u)?.sub(&FormalSeries::identity(cur));
        // The derivative retains one fewer power; the missing top coefficient
        // cannot reach the update below order `cur` because err has valuation
        // ≥ cur/2 + 1, so re-declaring the truncation order is sound.
        let slope = grow_order(&s_deriv.truncated(cur).compose(&u)?, cur);
        u = u.sub(&err.mul(&slope.reciprocal()?));
    }
    debug_assert_eq!(s.compose(&u)?, FormalSeries::identity(order));
    Ok(u)
}

fn grow_order(s: &FormalSeries, order: usize) -> FormalSeries {
    FormalSeries::from_terms(s.terms().to_vec(), order)
}

/// The binomial series (1+u²)^{−1/2} = Σ (−1)^j C(2j,j)/4^j · u^{2j}.
fn inverse_sqrt_series(order: usize) -> FormalSeries {
    let mut terms = vec![QPolynomial::constant(Rational::from(1))];
    let mut c = Rational::from(1);
    let mut j = 1usize;
    while 2 * j < order {
        c *= Rational::from((-(2 * j as i64 - 1), 2 * j as i64));
        terms.resize(2 * j + 1, QPolynomial::zero());
        terms[2 * j] = QPolynomial::constant(c.clone());
        j += 1;
    }
    FormalSeries::from_terms(terms, order)
}

fn compute_coefficients(k_max: usize) -> Vec<QPolynomial> {
    // u(t) to order k_max+2 so that u'(t) retains t^{k_max+1} and the product
    // below is exact through t^{k_max}.
    let order = k_max + 2;
    let u = revert_series(&forward_series(order)).expect("phase series is revertible");
    let amp = inverse_sqrt_series(order)
        .compose(&u)
        .expect("u(t) has zero constant term");
    let series = amp.mul(&u.derivative());
    (0..=k_max).map(|k| series.term(k)).collect()
}

static COEFF_CACHE: OnceLock<Mutex<Vec<QPolynomial>>> = OnceLock::new();

/// c_0 .. c_{k_max}, from a process-wide cache that only ever grows.
pub fn coefficients(k_max: usize) -> Vec<QPolynomial> {
    let cache = COEFF_CACHE.get_or_init(|| Mutex::new(Vec::new()));
    let mut guard = cache.lock().unwrap();
    if guard.len() <= k_max {
        *guard = compute_coefficients(k_max);
    }
    guard[..=k_max].to_vec()
}

/// Horner evaluation of one cached coefficient polynomial.
pub fn eval_coefficient(k: usize, q: Complex64) -> Complex64 {
    coefficients(k)[k].eval(q)
}

/// Central binomial C(2k, k) as an exact rational.
pub fn central_binomial(k: usize) -> Rational {
    Rational::from(Integer::from(2 * k as u64).binomial(k as u32))
}

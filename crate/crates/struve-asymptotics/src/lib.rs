//! Saddle-point asymptotics of the Struve function **H**ν(z) for large complex
//! order and argument.
//!
//! The library reproduces the full asymptotic theory in the regime
//! |arg ν| ≤ π/2, |arg z| < π/2, parameterized by the ratio q = ν/z:
//!
//! * [`coeffgen`] — the expansion coefficients c_k(q), generated exactly over
//!   the rationals by formal power-series reversion.
//! * [`landscape`] — the phase function τ on the sheeted u-plane, its saddle
//!   points, and steepest-descent paths traced from the origin with continuous
//!   branch tracking; paths are classified by where they terminate (∞, +i, −i).
//! * [`transitions`] — the Stokes geometry in the q-plane: the critical β*,
//!   the triple point P, the real-axis intercept Q, and the three transition
//!   curves along which the path endpoint switches.
//! * [`evaluate`] — optimally truncated asymptotic sums for H ± iJ and H − Y,
//!   checked against independent oracles (adaptive contour quadrature and an
//!   arbitrary-precision Maclaurin series).
//! * [`cli`] — a thin command-line surface over all of the above; the
//!   `examples/` directory shows one runnable program per capability.
//!
//! Angles are radians throughout; the CLI and reports use multiples of π to
//! match the usual tabulations.

pub mod bigfloat;
pub mod cli;
pub mod coeffgen;
pub mod evaluate;
pub mod landscape;
pub mod quadrature;
pub mod reference;
pub mod transitions;

pub use num_complex::Complex64;

//! Embedded reference values used by `--check` and the acceptance suite.
//!
//! Three tables: the exact coefficient polynomials c_0..c_10, the Stokes
//! geometry (triple point P and real-axis intercept Q) over a sweep of arg z,
//! and relative-error benchmarks for the optimally truncated expansions at
//! |z| = 40. The side points pin one sample on each transition curve at
//! arg z = 0.1π together with the domains the curve separates.

use crate::coeffgen::QPolynomial;
use crate::evaluate::EndpointKind;
use crate::transitions::BranchTag;

/// Coefficients of c_k by ascending power of q, as exact fraction literals.
pub const TABLE1: &[&[&str]] = &[
    &["1"],
    &["0", "2"],
    &["-1/2", "0", "6"],
    &["0", "-4", "0", "20"],
    &["3/8", "0", "-45/2", "0", "70"],
    &["0", "23/4", "0", "-112", "0", "252"],
    &["-5/16", "0", "301/6", "0", "-525", "0", "924"],
    &["0", "-22/3", "0", "345", "0", "-2376", "0", "3432"],
    &["35/128", "0", "-1425/16", "0", "16665/8", "0", "-21021/2", "0", "12870"],
    &["0", "563/64", "0", "-1595/2", "0", "139139/12", "0", "-45760", "0", "48620"],
    &[
        "-63/256", "0", "133529/960", "0", "-287287/48", "0", "61061", "0", "-196911", "0",
        "184756",
    ],
];

pub fn table1_polynomials() -> Vec<QPolynomial> {
    TABLE1
        .iter()
        .map(|row| QPolynomial::from_fraction_strings(row).expect("embedded table parses"))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Table2Row {
    pub theta_over_pi: f64,
    pub p_re: f64,
    pub p_im: f64,
    pub q_intercept: f64,
}

/// Triple point P and intercept Q as functions of θ = arg z.
pub const TABLE2: &[Table2Row] = &[
    Table2Row { theta_over_pi: 0.00, p_re: 1.0, p_im: 0.0, q_intercept: 1.0 },
    Table2Row { theta_over_pi: 0.05, p_re: 0.96385, p_im: 0.08606, q_intercept: 0.83360 },
    Table2Row { theta_over_pi: 0.10, p_re: 0.93778, p_im: 0.18745, q_intercept: 0.70952 },
    Table2Row { theta_over_pi: 0.20, p_re: 0.93437, p_im: 0.53249, q_intercept: 0.48057 },
    Table2Row { theta_over_pi: 0.25, p_re: 0.97678, p_im: 0.84047, q_intercept: 0.37449 },
    Table2Row { theta_over_pi: 0.30, p_re: 1.08553, p_im: 1.38238, q_intercept: 0.27561 },
    Table2Row { theta_over_pi: 0.35, p_re: 1.36479, p_im: 2.60425, q_intercept: 0.18575 },
    Table2Row { theta_over_pi: 0.40, p_re: 2.36238, p_im: 7.23955, q_intercept: 0.10710 },
    Table2Row { theta_over_pi: 0.42, p_re: 3.72266, p_im: 14.4826, q_intercept: 0.07942 },
    Table2Row { theta_over_pi: 0.45, p_re: 16.4886, p_im: 104.102, q_intercept: 0.04275 },
];

/// Index into [`TABLE2`] of the row whose printed Im P carries a
/// dropped-digit misprint in its source (θ = 0.05π): the table prints
/// 0.08606, while the triple-point solve gives 0.0806064 — removing the third
/// decimal digit of the computed value reproduces the printed one exactly.
/// Both independent sheet-continuation residual formulations (trace-based and
/// chord-based) are ~5e-7 at the computed point and ~4e-3 at the printed one,
/// and the printed Re P (0.96385) matches the computed 0.9638494 to all its
/// digits. [`TABLE2`] keeps the printed value verbatim; checks that compare
/// computed geometry substitute [`TABLE2_MISPRINT_CORRECTED_P_IM`] for this
/// row.
pub const TABLE2_MISPRINT_INDEX: usize = 1;

/// Corrected Im P for the misprinted row; see [`TABLE2_MISPRINT_INDEX`].
pub const TABLE2_MISPRINT_CORRECTED_P_IM: f64 = 0.080606;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Table3Row {
    pub q_re: f64,
    pub q_im: f64,
    pub theta_over_pi: f64,
    pub rel_err: f64,
    pub endpoint: EndpointKind,
}

/// Relative error of the optimally truncated expansion for H at |z| = 40,
/// with the steepest-descent endpoint that selects the expansion used.
pub const TABLE3: &[Table3Row] = &[
    Table3Row { q_re: 0.60, q_im: 0.00, theta_over_pi: 0.0, rel_err: 7.764e-9, endpoint: EndpointKind::Infinity },
    Table3Row { q_re: 0.60, q_im: 0.00, theta_over_pi: 0.1, rel_err: 9.556e-9, endpoint: EndpointKind::Infinity },
    Table3Row { q_re: 1.00, q_im: 0.00, theta_over_pi: 0.0, rel_err: 1.041e-4, endpoint: EndpointKind::PlusMinusI },
    Table3Row { q_re: 1.00, q_im: 0.00, theta_over_pi: 0.1, rel_err: 2.751e-5, endpoint: EndpointKind::MinusI },
    Table3Row { q_re: 1.25, q_im: 0.00, theta_over_pi: 0.0, rel_err: 8.835e-4, endpoint: EndpointKind::PlusMinusI },
    Table3Row { q_re: 1.25, q_im: 0.00, theta_over_pi: 0.1, rel_err: 4.830e-4, endpoint: EndpointKind::MinusI },
    Table3Row { q_re: 0.60, q_im: 0.40, theta_over_pi: 0.0, rel_err: 2.355e-6, endpoint: EndpointKind::Infinity },
    Table3Row { q_re: 0.60, q_im: 0.40, theta_over_pi: 0.1, rel_err: 3.280e-6, endpoint: EndpointKind::Infinity },
    Table3Row { q_re: 1.00, q_im: 0.60, theta_over_pi: 0.0, rel_err: 2.783e-4, endpoint: EndpointKind::PlusI },
    Table3Row { q_re: 1.00, q_im: 0.60, theta_over_pi: 0.1, rel_err: 4.136e-3, endpoint: EndpointKind::PlusI },
    Table3Row { q_re: 1.00, q_im: -0.30, theta_over_pi: 0.0, rel_err: 7.342e-5, endpoint: EndpointKind::MinusI },
    Table3Row { q_re: 1.00, q_im: -0.30, theta_over_pi: 0.1, rel_err: 5.000e-5, endpoint: EndpointKind::MinusI },
];

/// Benchmark modulus for the error table.
pub const TABLE3_MODULUS_Z: f64 = 40.0;

/// Index into [`TABLE3`] of the one entry whose printed error carries an
/// exponent misprint in its source (q = 1.00+0.60i, θ = 0.10π): the table
/// prints 4.136e-3, while recomputation against two independent oracles gives
/// 4.136e-4 — the same four-digit mantissa with the exponent off by a factor
/// of ten (least term at k = 9; no truncation order reproduces 4.136e-3).
/// [`TABLE3`] keeps the printed value verbatim; checks that compare measured
/// errors substitute [`TABLE3_MISPRINT_CORRECTED_REL_ERR`] for this row.
pub const TABLE3_MISPRINT_INDEX: usize = 9;

/// Corrected relative error for the misprinted entry; see
/// [`TABLE3_MISPRINT_INDEX`].
pub const TABLE3_MISPRINT_CORRECTED_REL_ERR: f64 = 4.136e-4;

/// The critical height of the upper transition curve over α = 0.80 at θ = 0.
pub const CRITICAL_BETA_ALPHA: f64 = 0.80;
pub const CRITICAL_BETA_VALUE: f64 = 0.143900;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SidePoint {
    pub branch: BranchTag,
    pub q_re: f64,
    pub q_im: f64,
    /// Domain labels on the two sides of the curve (unordered pair); probe
    /// points sit a small distance from the sample along the curve normal.
    pub sides: (EndpointKind, EndpointKind),
}

/// One point on each transition curve at θ = 0.1π, with the endpoint pair the
/// curve separates.
pub const SIDE_POINTS_THETA_01PI: &[SidePoint] = &[
    SidePoint {
        branch: BranchTag::PA,
        q_re: 0.60,
        q_im: 0.95307,
        sides: (EndpointKind::PlusI, EndpointKind::Infinity),
    },
    SidePoint {
        branch: BranchTag::PB,
        q_re: 1.40,
        q_im: 0.39447,
        sides: (EndpointKind::PlusI, EndpointKind::MinusI),
    },
    SidePoint {
        branch: BranchTag::PC,
        q_re: 0.40,
        q_im: -0.42914,
        sides: (EndpointKind::Infinity, EndpointKind::MinusI),
    },
];

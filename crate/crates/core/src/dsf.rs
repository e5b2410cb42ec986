//! Deformation structure functions and deformed-number primitives.
//!
//! A structure function φ(n) fixes every ladder matrix element of a deformed
//! oscillator, `a⁺a⁻ = φ(N)` and `a⁻a⁺ = φ(N+1)`, and with it the
//! oscillator energy levels.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{DeformationParams, DEGENERATE_EPS};

/// Tolerance for the φ(0) = 0 requirement.
pub const TOL_ZERO: f64 = 1e-12;

/// The structure functions the laboratory knows how to evaluate.
#[derive(Clone, Debug, PartialEq)]
pub enum StructureFunctionKind {
    /// φ(n) = n.
    Undeformed,
    /// φ(n) = n / q, the p = q reduction of the nonstandard oscillator.
    ScaledLinear,
    /// φ(n) = [n]_{q,p}, the symmetric (q,p)-oscillator.
    SymmetricPQ,
    /// The nonstandard, q↔p-asymmetric structure function tied to
    /// `p XP - q PX = iħ`.
    NonstandardPQ,
    /// The three-parameter structure function obtained when the two
    /// commutation coefficients coincide. Evaluated with the local ratio p/q.
    TwoSidedEqualGH,
    /// Tabulated values φ(0), φ(1), ...
    Custom(Vec<f64>),
}

impl StructureFunctionKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Undeformed => "undeformed",
            Self::ScaledLinear => "scaled-linear",
            Self::SymmetricPQ => "symmetric-pq",
            Self::NonstandardPQ => "nonstandard-pq",
            Self::TwoSidedEqualGH => "two-sided-equal-gh",
            Self::Custom(_) => "custom",
        }
    }
}

impl fmt::Display for StructureFunctionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for StructureFunctionKind {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

/// Parses every tag except `custom`, whose table has to be supplied
/// separately.
impl FromStr for StructureFunctionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "undeformed" => Ok(Self::Undeformed),
            "scaled-linear" => Ok(Self::ScaledLinear),
            "symmetric-pq" => Ok(Self::SymmetricPQ),
            "nonstandard-pq" => Ok(Self::NonstandardPQ),
            "two-sided-equal-gh" => Ok(Self::TwoSidedEqualGH),
            "custom" => Err(Error::Parse("custom structure function needs a value table".into())),
            other => Err(Error::Parse(format!("unknown structure function kind '{other}'"))),
        }
    }
}

/// (Q^m - 1)/(Q - 1) for Q = exp(ln_q), without cancellation near Q = 1.
fn geometric_sum(m: f64, ln_q: f64) -> f64 {
    (m * ln_q).exp_m1() / ln_q.exp_m1()
}

/// The (q,p)-number [m]_{q,p} = (q^m - p^m)/(q - p).
pub fn pq_number(m: i64, params: &DeformationParams) -> f64 {
    let (p, q) = (params.p(), params.q());
    if params.is_degenerate() {
        return m as f64 * q.powi(m as i32 - 1);
    }
    p.powi(m as i32 - 1) * geometric_sum(m as f64, params.ln_ratio())
}

/// Nonstandard structure function, written in Q = q/p.
pub fn nonstandard_q_form(params: &DeformationParams, n: u32) -> f64 {
    let p = params.p();
    // the bracket vanishes identically at n = 0
    if params.is_degenerate() || n == 0 {
        return n as f64 / p;
    }
    let big_q = params.ratio();
    let n_i = n as i32;
    // (Q^n - Q^{1-n})/(Q - 1) = Q^{1-n} (Q^{2n-1} - 1)/(Q - 1)
    let bracket = 1.0 + big_q.powi(1 - n_i) * geometric_sum((2 * n_i - 1) as f64, params.ln_ratio());
    2.0 / p * big_q.powi(-n_i) / ((1.0 + big_q.powi(2 * n_i - 2)) * (1.0 + big_q.powi(2 * n_i)))
        * bracket
}

/// Nonstandard structure function, written in p, q and the (q,p)-number
/// [2n-1]. Used to cross-check [`nonstandard_q_form`].
pub fn nonstandard_pq_form(params: &DeformationParams, n: u32) -> f64 {
    let (p, q) = (params.p(), params.q());
    if n == 0 {
        return 0.0;
    }
    let n_i = n as i32;
    let prefactor = 2.0 * q.powi(-n_i) * p.powi(5 * n_i - 3)
        / ((q.powi(2 * n_i - 2) + p.powi(2 * n_i - 2)) * (q.powi(2 * n_i) + p.powi(2 * n_i)));
    let bracket = 1.0 + pq_number(2 * n as i64 - 1, params) / (q * p).powi(n_i - 1);
    prefactor * bracket
}

/// Structure function with equal three-parameter commutation coefficients.
///
/// This formula is written in the ratio p/q (not q/p). The sum over
/// j = 1..n-1 is empty for n <= 1.
pub fn two_sided_equal_gh(params: &DeformationParams, n: u32) -> Result<f64> {
    if params.is_degenerate() {
        return Err(Error::DegenerateParams { p: params.p(), q: params.q(), threshold: DEGENERATE_EPS });
    }
    let p = params.p();
    let r = params.p() / params.q();
    let n_i = n as i32;
    let lead = 4.0 * r * r / (p * (1.0 + r * r) * (1.0 + r.powi(3)));
    let r5 = 1.0 + r.powi(5);
    let tail: f64 = (1..n_i).map(|j| r5 / (r * r * (1.0 + r) + r.powi(2 * j) * r5)).sum();
    let bracket = (1.0 - r.powi(2 - 2 * n_i)) / (1.0 - r * r) + tail;
    Ok(lead - 4.0 / (p * (1.0 + r)) * bracket)
}

/// φ(n) for the given kind.
pub fn eval_dsf(kind: &StructureFunctionKind, params: &DeformationParams, n: u32) -> Result<f64> {
    use StructureFunctionKind::*;
    Ok(match kind {
        Undeformed => n as f64,
        ScaledLinear => n as f64 / params.q(),
        SymmetricPQ => pq_number(n as i64, params),
        NonstandardPQ => nonstandard_q_form(params, n),
        TwoSidedEqualGH => two_sided_equal_gh(params, n)?,
        Custom(table) => *table
            .get(n as usize)
            .ok_or(Error::MissingTable { level: n as i64 })?,
    })
}

/// φ(n)! = φ(n) φ(n-1) ... φ(1), with φ(0)! = 1.
pub fn dsf_factorial(kind: &StructureFunctionKind, params: &DeformationParams, n: u32) -> Result<f64> {
    (1..=n).try_fold(1.0, |acc, k| Ok(acc * eval_dsf(kind, params, k)?))
}

/// Outcome of checking φ(0) = 0 and φ(n) > 0 for n = 1..n_max.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhysicalityReport {
    pub n_max: u32,
    pub ground_value: f64,
    pub ground_ok: bool,
    /// First level n >= 1 with φ(n) <= 0 (or non-finite), with its value.
    pub first_nonpositive: Option<(u32, f64)>,
}

impl PhysicalityReport {
    pub fn pass(&self) -> bool {
        self.ground_ok && self.first_nonpositive.is_none()
    }

    /// Levels n >= 1 are all positive, whatever φ(0) is.
    pub fn levels_ok(&self) -> bool {
        self.first_nonpositive.is_none()
    }

    pub fn first_offending(&self) -> Option<(u32, f64)> {
        if !self.ground_ok {
            Some((0, self.ground_value))
        } else {
            self.first_nonpositive
        }
    }
}

/// Scans φ over 0..=n_max. Evaluation failures (missing table entries,
/// degenerate parameters) are errors; inadmissible values are report content.
pub fn validate_physical(
    kind: &StructureFunctionKind,
    params: &DeformationParams,
    n_max: u32,
) -> Result<PhysicalityReport> {
    let ground_value = eval_dsf(kind, params, 0)?;
    let mut first_nonpositive = None;
    for n in 1..=n_max {
        let v = eval_dsf(kind, params, n)?;
        if !(v.is_finite() && v > 0.0) {
            first_nonpositive = Some((n, v));
            break;
        }
    }
    Ok(PhysicalityReport {
        n_max,
        ground_value,
        ground_ok: ground_value.abs() <= TOL_ZERO,
        first_nonpositive,
    })
}

/// Coefficients (G(n), H(n)) of the alternative commutation form:
/// G = ½ p Q^{2n}(1 + Q^{2n-2}), H = ½ q Q^{2n}(1 + Q^{2n+2}).
///
/// With the nonstandard structure function these satisfy
/// `H(n) φ(n+1) - G(n) φ(n) = 1`.
pub fn gh_coefficients(params: &DeformationParams, n: i64) -> (f64, f64) {
    let big_q = params.ratio();
    let n = n as i32;
    let g = 0.5 * params.p() * big_q.powi(2 * n) * (1.0 + big_q.powi(2 * n - 2));
    let h = 0.5 * params.q() * big_q.powi(2 * n) * (1.0 + big_q.powi(2 * n + 2));
    (g, h)
}

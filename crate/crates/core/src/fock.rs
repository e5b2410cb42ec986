//! Truncated Fock-space matrices for N, a⁺ and a⁻.
//!
//! The ladder elements are split between raising and lowering by a gauge
//! weight w(n) = Q^{g₁n + g₀}:
//!
//! ```text
//! a⁺|n-1⟩ = w(n) √φ(n) |n⟩,    a⁻|n⟩ = √φ(n) / w(n) |n-1⟩
//! ```
//!
//! so `a⁺a⁻ = φ(N)` for every gauge while the plain matrix adjoint realizes
//! `(a⁺)† = η_a(N) a⁻` with `η_a(N) = w(N+1)²`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::Rational64;
use serde::Serialize;

use crate::check::CheckReport;
use crate::dsf::{eval_dsf, gh_coefficients, validate_physical, StructureFunctionKind};
use crate::error::{Error, Result};
use crate::eta::{parse_rational, rational_to_f64, EtaSpec};
use crate::matrix::{scaled_residual, OperatorMatrix};
use crate::params::DeformationParams;

pub const DEFAULT_DIM: usize = 48;
pub const MAX_DIM: usize = 1024;
/// Tolerance for the defining relations of the oscillator algebra.
pub const DOA_TOL: f64 = 1e-10;

/// Gauge weight exponent: w(n) = Q^{g1 n + g0}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GaugeSpec {
    pub g1: Rational64,
    pub g0: Rational64,
}

impl GaugeSpec {
    pub fn new(g1: Rational64, g0: Rational64) -> Self {
        Self { g1, g0 }
    }

    /// w ≡ 1: raising and lowering are plain adjoints.
    pub fn symmetric() -> Self {
        Self::new(Rational64::from_integer(0), Rational64::from_integer(0))
    }

    /// η_a(N) = Q^{N-1}; P is Hermitian.
    pub fn case_a() -> Self {
        Self::new(Rational64::new(1, 2), Rational64::from_integer(-1))
    }

    /// η_a(N) = Q^{-N-2}; X is Hermitian.
    pub fn case_b() -> Self {
        Self::new(Rational64::new(-1, 2), Rational64::new(-1, 2))
    }

    /// The left-form metric realized by this gauge, η_a(N) = w(N+1)².
    pub fn eta_a(&self) -> EtaSpec {
        let two = Rational64::from_integer(2);
        EtaSpec::new(Rational64::from_integer(0), two * self.g1, two * (self.g1 + self.g0))
    }

    /// Gauge realizing a given (linear) left-form metric.
    pub fn from_eta_a(eta_a: &EtaSpec) -> Result<Self> {
        if eta_a.c2 != Rational64::from_integer(0) {
            return Err(Error::NonlinearEtaA { c2: eta_a.c2.to_string() });
        }
        let half = Rational64::new(1, 2);
        let g1 = eta_a.c1 * half;
        Ok(Self::new(g1, eta_a.c0 * half - g1))
    }

    pub fn weight_exponent(&self, n: i64) -> f64 {
        rational_to_f64(self.g1 * Rational64::from_integer(n) + self.g0)
    }

    pub fn preset_name(&self) -> Option<&'static str> {
        if *self == Self::symmetric() {
            Some("symmetric")
        } else if *self == Self::case_a() {
            Some("case-a")
        } else if *self == Self::case_b() {
            Some("case-b")
        } else {
            None
        }
    }
}

impl Default for GaugeSpec {
    fn default() -> Self {
        Self::symmetric()
    }
}

impl fmt::Display for GaugeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.preset_name() {
            Some(name) => f.write_str(name),
            None => write!(f, "w:{},{}", self.g1, self.g0),
        }
    }
}

impl FromStr for GaugeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "symmetric" => Ok(Self::symmetric()),
            "case-a" => Ok(Self::case_a()),
            "case-b" => Ok(Self::case_b()),
            other => {
                let body = other
                    .strip_prefix("w:")
                    .ok_or_else(|| Error::Parse(format!("unknown gauge '{other}'")))?;
                let (g1, g0) = body
                    .split_once(',')
                    .ok_or_else(|| Error::Parse(format!("gauge needs 'w:g1,g0', got '{other}'")))?;
                Ok(Self::new(parse_rational(g1)?, parse_rational(g0)?))
            }
        }
    }
}

impl Serialize for GaugeSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Dimension-D matrix realization of the deformed oscillator.
#[derive(Clone, Debug)]
pub struct TruncatedRep {
    params: DeformationParams,
    kind: StructureFunctionKind,
    gauge: GaugeSpec,
    dim: usize,
    /// φ(0..=dim)
    phi: Vec<f64>,
    number: OperatorMatrix,
    raise: OperatorMatrix,
    lower: OperatorMatrix,
}

/// Builds the representation after checking φ(0) = 0 and φ(n) > 0 up to n = D.
pub fn build_rep(
    kind: &StructureFunctionKind,
    params: &DeformationParams,
    gauge: &GaugeSpec,
    dim: usize,
) -> Result<TruncatedRep> {
    TruncatedRep::build(kind, params, gauge, dim, true)
}

/// Like [`build_rep`] but only requires φ(n) > 0 for n >= 1. The matrices
/// never touch φ(0), so structure functions with φ(0) ≠ 0 can still be
/// explored this way.
pub fn build_rep_levels_only(
    kind: &StructureFunctionKind,
    params: &DeformationParams,
    gauge: &GaugeSpec,
    dim: usize,
) -> Result<TruncatedRep> {
    TruncatedRep::build(kind, params, gauge, dim, false)
}

impl TruncatedRep {
    fn build(
        kind: &StructureFunctionKind,
        params: &DeformationParams,
        gauge: &GaugeSpec,
        dim: usize,
        require_ground: bool,
    ) -> Result<Self> {
        if !(2..=MAX_DIM).contains(&dim) {
            return Err(Error::InvalidParams(format!("dimension must be in 2..={MAX_DIM}, got {dim}")));
        }
        let report = validate_physical(kind, params, dim as u32)?;
        let offending = if require_ground { report.first_offending() } else { report.first_nonpositive };
        if let Some((level, value)) = offending {
            return Err(Error::UnphysicalDsf { level: level as usize, value });
        }
        let phi = (0..=dim as u32)
            .map(|n| eval_dsf(kind, params, n))
            .collect::<Result<Vec<_>>>()?;

        let mut raise = OperatorMatrix::zeros(dim);
        let mut lower = OperatorMatrix::zeros(dim);
        for (n, value) in phi.iter().enumerate().take(dim).skip(1) {
            let w = params.ratio_pow(gauge.weight_exponent(n as i64))?;
            let root = value.sqrt();
            raise.set(n, n - 1, Complex64::new(w * root, 0.0));
            lower.set(n - 1, n, Complex64::new(root / w, 0.0));
        }
        let levels: Vec<f64> = (0..dim).map(|n| n as f64).collect();
        Ok(Self {
            params: *params,
            kind: kind.clone(),
            gauge: *gauge,
            dim,
            phi,
            number: OperatorMatrix::from_diagonal(&levels),
            raise,
            lower,
        })
    }

    pub fn params(&self) -> &DeformationParams {
        &self.params
    }

    pub fn kind(&self) -> &StructureFunctionKind {
        &self.kind
    }

    pub fn gauge(&self) -> &GaugeSpec {
        &self.gauge
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// φ(n) for n = 0..=dim.
    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn number(&self) -> &OperatorMatrix {
        &self.number
    }

    pub fn raise(&self) -> &OperatorMatrix {
        &self.raise
    }

    pub fn lower(&self) -> &OperatorMatrix {
        &self.lower
    }

    /// f(n + shift) for n = 0..dim.
    pub fn levels(&self, shift: i64, f: impl Fn(i64) -> f64) -> Vec<f64> {
        (0..self.dim as i64).map(|n| f(n + shift)).collect()
    }

    /// Q^{slope n + offset} for n = 0..dim.
    pub fn ratio_pow_levels(&self, slope: f64, offset: f64) -> Result<Vec<f64>> {
        (0..self.dim)
            .map(|n| self.params.ratio_pow(slope * n as f64 + offset))
            .collect()
    }
}

/// Diagonal matrix F(N) from per-level values.
pub fn diag_of_n(rep: &TruncatedRep, values: &[f64]) -> Result<OperatorMatrix> {
    if values.len() != rep.dim() {
        return Err(Error::LengthMismatch { expected: rep.dim(), actual: values.len() });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParams("diagonal values must be finite".into()));
    }
    Ok(OperatorMatrix::from_diagonal(values))
}

fn commutator(a: &OperatorMatrix, b: &OperatorMatrix) -> OperatorMatrix {
    &(a * b) - &(b * a)
}

/// Residual report for `lhs = rhs`, scaled by the size of both sides.
pub(crate) fn identity_check(
    name: impl Into<String>,
    lhs: &OperatorMatrix,
    rhs: &OperatorMatrix,
    margin: usize,
    tolerance: f64,
) -> Result<CheckReport> {
    let residual = scaled_residual(&(lhs - rhs), &[lhs, rhs], margin)?;
    Ok(CheckReport::new(name, residual, tolerance, margin))
}

/// Defining relations of the deformed oscillator algebra. Each check uses
/// at least the margin its level shift needs.
pub fn verify_doa(rep: &TruncatedRep, margin: usize) -> Result<Vec<CheckReport>> {
    let n = rep.number();
    let (ap, am) = (rep.raise(), rep.lower());
    let phi_n = OperatorMatrix::from_diagonal(&rep.phi()[..rep.dim()]);
    let phi_n1 = OperatorMatrix::from_diagonal(&rep.phi()[1..]);
    let ap_am = ap * am;
    let am_ap = am * ap;

    let mut out = vec![
        identity_check("[N, a+] = a+", &commutator(n, ap), ap, margin, DOA_TOL)?,
        identity_check("[N, a-] = -a-", &commutator(n, am), &am.scale_real(-1.0), margin, DOA_TOL)?,
        identity_check("a+ a- = phi(N)", &ap_am, &phi_n, margin, DOA_TOL)?,
        identity_check("a- a+ = phi(N+1)", &am_ap, &phi_n1, margin.max(1), DOA_TOL)?,
        identity_check(
            "a- a+ - a+ a- = phi(N+1) - phi(N)",
            &(&am_ap - &ap_am),
            &(&phi_n1 - &phi_n),
            margin.max(1),
            DOA_TOL,
        )?,
    ];
    if *rep.kind() == StructureFunctionKind::NonstandardPQ {
        let (g, h): (Vec<f64>, Vec<f64>) =
            (0..rep.dim() as i64).map(|k| gh_coefficients(rep.params(), k)).unzip();
        let lhs = &am_ap.diag_left(&h) - &ap_am.diag_left(&g);
        out.push(identity_check(
            "H(N) a- a+ - G(N) a+ a- = 1",
            &lhs,
            &OperatorMatrix::identity(rep.dim()),
            margin.max(1),
            DOA_TOL,
        )?);
    }
    Ok(out)
}

/// Residual of F(N) a± = a± F(N±1), the larger of the two.
pub fn number_shift_residual(rep: &TruncatedRep, f: impl Fn(i64) -> f64, margin: usize) -> Result<f64> {
    let f0 = rep.levels(0, &f);
    let up = rep.levels(1, &f);
    let down = rep.levels(-1, &f);
    let raise = scaled_residual(
        &(&rep.raise().diag_left(&f0) - &rep.raise().diag_right(&up)),
        &[&rep.raise().diag_left(&f0)],
        margin,
    )?;
    let lower = scaled_residual(
        &(&rep.lower().diag_left(&f0) - &rep.lower().diag_right(&down)),
        &[&rep.lower().diag_left(&f0)],
        margin,
    )?;
    Ok(raise.max(lower))
}

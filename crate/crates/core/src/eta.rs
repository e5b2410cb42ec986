//! Metric operators η(N) = Q^{c₂N² + c₁N + c₀} and η(N)-pseudo-Hermiticity.
//!
//! Every metric that shows up for the nonstandard oscillator lives in this
//! quadratic-exponent family, so exponents are kept as exact rationals and
//! the recurrences linking η_a, η_X and η_P are solved symbolically.

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::check::CheckReport;
use crate::error::{Error, Result};
use crate::fock::TruncatedRep;
use crate::matrix::{scaled_residual, OperatorMatrix};
use crate::params::DeformationParams;

/// Tolerance for conjugation rules, which hold exactly under truncation.
pub const CONJUGATION_TOL: f64 = 1e-13;
/// Tolerance for η-pseudo-Hermiticity of X and P.
pub const PSEUDO_HERMITICITY_TOL: f64 = 1e-10;

/// Exponent coefficients of η(N) = Q^{c2 N² + c1 N + c0}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EtaSpec {
    pub c2: Rational64,
    pub c1: Rational64,
    pub c0: Rational64,
}

/// Which side of a⁻ the metric sits on in `(a⁺)† = η a⁻`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConjugationForm {
    /// (a⁺)† = η(N) a⁻
    Left,
    /// (a⁺)† = a⁻ η(N)
    Right,
}

fn r(n: i64) -> Rational64 {
    Rational64::from_integer(n)
}

impl EtaSpec {
    pub fn new(c2: Rational64, c1: Rational64, c0: Rational64) -> Self {
        Self { c2, c1, c0 }
    }

    pub fn from_integers(c2: i64, c1: i64, c0: i64) -> Self {
        Self::new(r(c2), r(c1), r(c0))
    }

    /// η = 1.
    pub fn trivial() -> Self {
        Self::from_integers(0, 0, 0)
    }

    pub fn is_constant(&self) -> bool {
        self.c2.is_zero() && self.c1.is_zero()
    }

    pub fn exponent(&self, n: i64) -> Rational64 {
        let n = r(n);
        self.c2 * n * n + self.c1 * n + self.c0
    }

    pub fn exponent_f64(&self, n: i64) -> f64 {
        rational_to_f64(self.exponent(n))
    }

    /// Coefficients (a, b) of the first difference e(N+1) - e(N) = aN + b.
    pub fn forward_difference(&self) -> (Rational64, Rational64) {
        (r(2) * self.c2, self.c2 + self.c1)
    }

    /// The metric N ↦ η(N + k).
    pub fn shifted(&self, k: i64) -> Self {
        let k = r(k);
        Self::new(self.c2, r(2) * k * self.c2 + self.c1, self.c2 * k * k + self.c1 * k + self.c0)
    }

    /// η^s for rational s.
    pub fn power(&self, s: Rational64) -> Self {
        Self::new(self.c2 * s, self.c1 * s, self.c0 * s)
    }

    pub fn inverse(&self) -> Self {
        self.power(r(-1))
    }

    /// Unique spec with e(0) = 0 whose first difference is aN + b.
    pub fn from_forward_difference(a: Rational64, b: Rational64) -> Self {
        let half = Rational64::new(1, 2);
        Self::new(a * half, b - a * half, Rational64::zero())
    }

    /// The `qpow:c2,c1,c0` spelling.
    pub fn to_qpow(&self) -> String {
        format!("qpow:{},{},{}", self.c2, self.c1, self.c0)
    }

    /// Parses either `Q^(...)` or `qpow:c2,c1,c0`.
    pub fn parse_any(s: &str) -> Result<Self> {
        match s.strip_prefix("qpow:") {
            Some(rest) => {
                let parts: Vec<&str> = rest.split(',').collect();
                if parts.len() != 3 {
                    return Err(Error::Parse(format!("qpow needs three coefficients: '{s}'")));
                }
                Ok(Self::new(parse_rational(parts[0])?, parse_rational(parts[1])?, parse_rational(parts[2])?))
            }
            None => s.parse(),
        }
    }
}

pub(crate) fn rational_to_f64(x: Rational64) -> f64 {
    x.numer().to_f64().unwrap_or(f64::NAN) / x.denom().to_f64().unwrap_or(f64::NAN)
}

pub(crate) fn parse_rational(s: &str) -> Result<Rational64> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational '{s}'"));
    match s.split_once('/') {
        Some((a, b)) => {
            let a: i64 = a.trim().parse().map_err(|_| bad())?;
            let b: i64 = b.trim().parse().map_err(|_| bad())?;
            if b == 0 {
                return Err(bad());
            }
            Ok(Rational64::new(a, b))
        }
        None => Ok(r(s.parse().map_err(|_| bad())?)),
    }
}

/// Canonical spelling: `Q^(c2*N^2+c1*N+c0)`, every term present, rationals
/// as `a` or `a/b` in lowest terms, negative terms joined with `-`.
impl fmt::Display for EtaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |x: Rational64| if x.is_negative() { ('-', -x) } else { ('+', x) };
        let (s1, a1) = join(self.c1);
        let (s0, a0) = join(self.c0);
        write!(f, "Q^({}*N^2{}{}*N{}{})", self.c2, s1, a1, s0, a0)
    }
}

impl FromStr for EtaSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("invalid metric '{s}', expected Q^(c2*N^2+c1*N+c0)"));
        let body = s.strip_prefix("Q^(").and_then(|b| b.strip_suffix(')')).ok_or_else(bad)?;
        let (c2, rest) = body.split_once("*N^2").ok_or_else(bad)?;
        let (c1, c0) = rest.split_once("*N").ok_or_else(bad)?;
        let signed = |t: &str| -> Result<Rational64> {
            if let Some(v) = t.strip_prefix('+') {
                parse_rational(v)
            } else if let Some(v) = t.strip_prefix('-') {
                Ok(-parse_rational(v)?)
            } else {
                Err(bad())
            }
        };
        Ok(Self::new(parse_rational(c2)?, signed(c1)?, signed(c0)?))
    }
}

impl Serialize for EtaSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Diagonal matrix with Q^{e(n)} at (n, n).
pub fn build_eta(spec: &EtaSpec, params: &DeformationParams, dim: usize) -> Result<OperatorMatrix> {
    let values = (0..dim as i64)
        .map(|n| params.ratio_pow(spec.exponent_f64(n)))
        .collect::<Result<Vec<_>>>()?;
    Ok(OperatorMatrix::from_diagonal(&values))
}

/// η⁻¹ M η, computed entrywise as M[i,j] Q^{e(j) - e(i)}.
pub fn similarity(m: &OperatorMatrix, spec: &EtaSpec, params: &DeformationParams) -> Result<OperatorMatrix> {
    let d = m.dim();
    let mut factors = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            let z = m[(i, j)];
            if z.re == 0.0 && z.im == 0.0 {
                continue;
            }
            let gap = spec.exponent(j as i64) - spec.exponent(i as i64);
            factors[i * d + j] = params.ratio_pow(rational_to_f64(gap))?;
        }
    }
    Ok(m.map_indexed(|i, j, z| if factors[i * d + j] == 0.0 { z } else { z * factors[i * d + j] }))
}

/// Residual of (a⁺)† = η a⁻ (left) or (a⁺)† = a⁻ η (right) over the full
/// matrix. The rule involves no level shift beyond the stored ones, so no
/// margin is needed.
pub fn conjugation_residual(rep: &TruncatedRep, eta_a: &EtaSpec, form: ConjugationForm) -> Result<CheckReport> {
    let eta = build_eta(eta_a, rep.params(), rep.dim())?;
    let lhs = rep.raise().adjoint();
    let rhs = match form {
        ConjugationForm::Left => &eta * rep.lower(),
        ConjugationForm::Right => rep.lower() * &eta,
    };
    let residual = scaled_residual(&(&lhs - &rhs), &[&lhs, &rhs], 0)?;
    let name = match form {
        ConjugationForm::Left => format!("(a+)^dagger = eta(N) a- with eta = {eta_a}"),
        ConjugationForm::Right => format!("(a+)^dagger = a- eta(N) with eta = {eta_a}"),
    };
    Ok(CheckReport::new(name, residual, CONJUGATION_TOL, 0))
}

/// Residual of M† = η⁻¹ M η on the interior block.
pub fn pseudo_hermiticity_residual(
    m: &OperatorMatrix,
    spec: &EtaSpec,
    params: &DeformationParams,
    margin: usize,
) -> Result<CheckReport> {
    let lhs = m.adjoint();
    let rhs = similarity(m, spec, params)?;
    let residual = scaled_residual(&(&lhs - &rhs), &[&lhs, &rhs], margin)?;
    Ok(CheckReport::new(format!("eta-pseudo-Hermitian with eta = {spec}"), residual, PSEUDO_HERMITICITY_TOL, margin))
}

/// Solves for η_X and η_P given a metric η_a linear in N.
///
/// With the normalization η_X(0) = η_P(0) = 1, the exponent recurrences are
/// e_X(N+1) - e_X(N) = (N + 2) + e_a(N) and
/// e_P(N+1) - e_P(N) = -(N - 1) + e_a(N).
pub fn derive_eta_closed_forms(eta_a: &EtaSpec) -> Result<(EtaSpec, EtaSpec)> {
    if !eta_a.c2.is_zero() {
        return Err(Error::NonlinearEtaA { c2: eta_a.c2.to_string() });
    }
    let eta_x = EtaSpec::from_forward_difference(r(1) + eta_a.c1, r(2) + eta_a.c0);
    let eta_p = EtaSpec::from_forward_difference(eta_a.c1 - r(1), r(1) + eta_a.c0);
    Ok((eta_x, eta_p))
}

/// Checks η_X(N+1)/η_X(N) = Q^{2N+1} η_P(N+1)/η_P(N) as an exact polynomial
/// identity in the exponents.
pub fn x_p_metric_relation_holds(eta_x: &EtaSpec, eta_p: &EtaSpec) -> bool {
    let (ax, bx) = eta_x.forward_difference();
    let (ap, bp) = eta_p.forward_difference();
    ax - ap == r(2) && bx - bp == r(1)
}

/// The right-form metric equivalent to a left-form one: η_a(N) a⁻ = a⁻ η_a(N-1).
pub fn right_form_of(eta_left: &EtaSpec) -> EtaSpec {
    eta_left.shifted(-1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use num_complex::Complex64;

    fn half(n: i64) -> Rational64 {
        Rational64::new(n, 2)
    }

    #[test]
    fn display_is_canonical() {
        assert_eq!(EtaSpec::from_integers(0, 1, -1).to_string(), "Q^(0*N^2+1*N-1)");
        assert_eq!(EtaSpec::new(half(1), half(3), r(0)).to_string(), "Q^(1/2*N^2+3/2*N+0)");
        assert_eq!(EtaSpec::new(half(-1), half(-3), r(-2)).to_string(), "Q^(-1/2*N^2-3/2*N-2)");
    }

    #[test]
    fn parse_examples() {
        let spec: EtaSpec = "Q^(-1/2*N^2+3/2*N+0)".parse().unwrap();
        assert_eq!(spec, EtaSpec::new(half(-1), half(3), r(0)));
        assert_eq!(EtaSpec::parse_any("qpow:0,1,-1").unwrap(), EtaSpec::from_integers(0, 1, -1));
        assert_eq!(EtaSpec::parse_any("qpow:1/2,3/2,0").unwrap(), EtaSpec::new(half(1), half(3), r(0)));
        assert!("Q^(1*N^2+1*N)".parse::<EtaSpec>().is_err());
        assert!("Q^(1*N^2 1*N+0)".parse::<EtaSpec>().is_err());
        assert!(EtaSpec::parse_any("qpow:1,2").is_err());
        assert!(EtaSpec::parse_any("qpow:1/0,2,3").is_err());
    }

    #[test]
    fn build_eta_examples() {
        let two = DeformationParams::new(1.0, 2.0).unwrap();
        let one = DeformationParams::new(1.5, 1.5).unwrap();
        assert_eq!(build_eta(&EtaSpec::trivial(), &two, 4).unwrap(), OperatorMatrix::identity(4));
        assert_eq!(build_eta(&EtaSpec::from_integers(0, 1, -1), &one, 4).unwrap(), OperatorMatrix::identity(4));
        assert_eq!(
            build_eta(&EtaSpec::from_integers(1, 0, 0), &two, 3).unwrap(),
            OperatorMatrix::from_diagonal(&[1.0, 2.0, 16.0])
        );
    }

    #[test]
    fn derived_particular_cases() {
        // eta_a = Q^{-N-2}: X Hermitian, eta_P = Q^{-N^2}
        let (x, p) = derive_eta_closed_forms(&EtaSpec::from_integers(0, -1, -2)).unwrap();
        assert!(x.is_constant());
        assert_eq!(p, EtaSpec::from_integers(-1, 0, 0));

        // eta_a = Q^{N-1}: P Hermitian, eta_X = Q^{N^2}
        let (x, p) = derive_eta_closed_forms(&EtaSpec::from_integers(0, 1, -1)).unwrap();
        assert_eq!(x, EtaSpec::from_integers(1, 0, 0));
        assert!(p.is_constant());

        // eta_a = 1
        let (x, p) = derive_eta_closed_forms(&EtaSpec::trivial()).unwrap();
        assert_eq!(x, EtaSpec::new(half(1), half(3), r(0)));
        assert_eq!(p, EtaSpec::new(half(-1), half(3), r(0)));

        // eta_a = Q^alpha, alpha = 2/3
        let alpha = Rational64::new(2, 3);
        let (x, p) = derive_eta_closed_forms(&EtaSpec::new(r(0), r(0), alpha)).unwrap();
        assert_eq!(x, EtaSpec::new(half(1), half(3) + alpha, r(0)));
        assert_eq!(p, EtaSpec::new(half(-1), half(3) + alpha, r(0)));
    }

    #[test]
    fn nonlinear_eta_a_rejected() {
        let err = derive_eta_closed_forms(&EtaSpec::from_integers(1, 0, 0)).unwrap_err();
        assert!(matches!(err, Error::NonlinearEtaA { .. }));
    }

    #[test]
    fn right_form_shift() {
        assert_eq!(right_form_of(&EtaSpec::from_integers(0, 1, -1)), EtaSpec::from_integers(0, 1, -2));
    }

    #[test]
    fn similarity_is_entrywise_conjugation() {
        let params = DeformationParams::new(1.0, 1.3).unwrap();
        let spec = EtaSpec::new(half(1), r(-1), r(2));
        let m = OperatorMatrix::from_fn(5, |i, j| Complex64::new(1.0 + i as f64, j as f64 - 2.0));
        let eta = build_eta(&spec, &params, 5).unwrap();
        let eta_inv = build_eta(&spec.inverse(), &params, 5).unwrap();
        let dense = &(&eta_inv * &m) * &eta;
        let fast = similarity(&m, &spec, &params).unwrap();
        let diff = crate::matrix::interior_residual(&(&dense - &fast), 0).unwrap();
        assert!(diff < 1e-12 * dense.max_abs());
    }

    // Independent route: sum the recurrence step by step in exact rationals.
    fn summed(delta: impl Fn(i64) -> Rational64, n: i64) -> Rational64 {
        (0..n).map(delta).sum()
    }

    proptest! {
        #[test]
        fn derived_forms_solve_recurrences(c1n in -6i64..6, c0n in -6i64..6, den in 1i64..5) {
            let eta_a = EtaSpec::new(r(0), Rational64::new(c1n, den), Rational64::new(c0n, den));
            let (x, p) = derive_eta_closed_forms(&eta_a).unwrap();
            prop_assert!(x_p_metric_relation_holds(&x, &p));
            for n in 0..12 {
                prop_assert_eq!(x.exponent(n), summed(|k| r(k + 2) + eta_a.exponent(k), n));
                prop_assert_eq!(p.exponent(n), summed(|k| r(1 - k) + eta_a.exponent(k), n));
            }
            // eta_X / eta_P is never constant
            prop_assert!(!(x.c2 == p.c2 && x.c1 == p.c1));
        }

        #[test]
        fn display_parse_round_trip(a in -20i64..20, b in 1i64..9, c in -20i64..20, d in 1i64..9, e in -20i64..20, f in 1i64..9) {
            let spec = EtaSpec::new(Rational64::new(a, b), Rational64::new(c, d), Rational64::new(e, f));
            let text = spec.to_string();
            let back: EtaSpec = text.parse().unwrap();
            prop_assert_eq!(back, spec);
            prop_assert_eq!(back.to_string(), text);
            prop_assert_eq!(EtaSpec::parse_any(&spec.to_qpow()).unwrap(), spec);
        }
    }
}

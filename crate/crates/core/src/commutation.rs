//! Moving functions of N past X and P.
//!
//! With ã⁻ = Q^N a⁻/√2 and â⁻ = i Q^{2N} a⁻/√2:
//!
//! ```text
//! F(N) X = X F(N+1) - [F(N+2) - F(N)] ã⁻
//! F(N) P = P F(N+1) + [F(N+2) - F(N)] â⁻
//! F(N) (Q^{±N} X ∓ iP) = (Q^{±N} X ∓ iP) F(N±1)
//! ```

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::check::CheckReport;
use crate::error::{Error, Result};
use crate::eta::EtaSpec;
use crate::fock::identity_check;
use crate::heisenberg::PositionMomentumPair;
use crate::matrix::{scaled_residual, OperatorMatrix};
use crate::params::DeformationParams;

/// Tolerance for the permutation identities.
pub const PERMUTATION_TOL: f64 = 1e-10;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// How A_k(N) is computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AkMethod {
    /// A_{k+1} = 2N A_k - (N-1)(N+1) A_{k-1}, from A_1 = 1, A_2 = 2N.
    Recurrence,
    /// ((N+1)^k - (N-1)^k) / 2.
    Closed,
}

/// One value A_k(N).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AkValue {
    pub k: u32,
    pub n: i64,
    pub value: BigInt,
}

impl AkValue {
    pub fn new(k: u32, n: i64) -> Self {
        Self { k, n, value: a_k_eval(k, n, AkMethod::Closed) }
    }
}

/// A_k(N) in exact integers. A_0 = 0, consistent with both methods.
pub fn a_k_eval(k: u32, n: i64, method: AkMethod) -> BigInt {
    let n = BigInt::from(n);
    match method {
        AkMethod::Closed => {
            let diff: BigInt = num_traits::pow(&n + 1, k as usize) - num_traits::pow(&n - 1, k as usize);
            let (half, rem) = diff.div_rem(&BigInt::from(2));
            debug_assert!(rem.is_zero());
            half
        }
        AkMethod::Recurrence => {
            if k == 0 {
                return BigInt::zero();
            }
            let two_n = &n * 2;
            let damp = (&n - 1) * (&n + 1);
            let (mut prev, mut cur) = (BigInt::zero(), BigInt::one());
            for _ in 1..k {
                let next = &two_n * &cur - &damp * &prev;
                prev = std::mem::replace(&mut cur, next);
            }
            cur
        }
    }
}

/// A function of the number operator, given analytically so that shifted
/// arguments past the truncation edge are exact.
#[derive(Clone, Debug, PartialEq)]
pub enum FSpec {
    /// Σ c_i N^i, coefficients listed from the highest degree down.
    Poly(Vec<f64>),
    /// Q^{c2 N² + c1 N + c0}.
    QPow(EtaSpec),
    /// Raw values F(0), F(1), ...; no extrapolation.
    Table(Vec<f64>),
}

impl FSpec {
    pub fn eval(&self, n: i64, params: &DeformationParams) -> Result<f64> {
        match self {
            Self::Poly(coeffs) => Ok(coeffs.iter().fold(0.0, |acc, c| acc * n as f64 + c)),
            Self::QPow(spec) => params.ratio_pow(spec.exponent_f64(n)),
            Self::Table(values) => usize::try_from(n)
                .ok()
                .and_then(|i| values.get(i).copied())
                .ok_or(Error::InsufficientFRange { level: n }),
        }
    }

    /// F(n + shift) for n = 0..dim.
    pub fn levels(&self, dim: usize, shift: i64, params: &DeformationParams) -> Result<Vec<f64>> {
        (0..dim as i64).map(|n| self.eval(n + shift, params)).collect()
    }
}

impl fmt::Display for FSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[f64]| v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",");
        match self {
            Self::Poly(c) => write!(f, "poly:{}", join(c)),
            Self::QPow(spec) => write!(f, "qpow:{},{},{}", spec.c2, spec.c1, spec.c0),
            Self::Table(v) => write!(f, "table:{}", join(v)),
        }
    }
}

/// `poly:c_k,...,c_0` or `qpow:c2,c1,c0`.
impl FromStr for FSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(body) = s.strip_prefix("poly:") {
            let coeffs = body
                .split(',')
                .map(|c| c.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad coefficient '{c}'"))))
                .collect::<Result<Vec<_>>>()?;
            if coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::Parse(format!("non-finite coefficient in '{s}'")));
            }
            Ok(Self::Poly(coeffs))
        } else if s.starts_with("qpow:") {
            Ok(Self::QPow(EtaSpec::parse_any(s)?))
        } else {
            Err(Error::Parse(format!("F must be 'poly:...' or 'qpow:...', got '{s}'")))
        }
    }
}

/// Direction of the shift in the ladder combination Q^{±N}X ∓ iP.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShiftSign {
    Up,
    Down,
}

impl ShiftSign {
    fn unit(self) -> i64 {
        match self {
            Self::Up => 1,
            Self::Down => -1,
        }
    }
}

/// ã⁻ = Q^N a⁻ / √2.
pub fn a_tilde(pair: &PositionMomentumPair<'_>) -> Result<OperatorMatrix> {
    let rep = pair.rep();
    Ok(rep.lower().diag_left(&rep.ratio_pow_levels(1.0, 0.0)?).scale_real(FRAC_1_SQRT_2))
}

/// â⁻ = i Q^{2N} a⁻ / √2.
pub fn a_hat(pair: &PositionMomentumPair<'_>) -> Result<OperatorMatrix> {
    let rep = pair.rep();
    Ok(rep.lower().diag_left(&rep.ratio_pow_levels(2.0, 0.0)?).scale(I * FRAC_1_SQRT_2))
}

fn level_gap(f: &FSpec, dim: usize, params: &DeformationParams) -> Result<Vec<f64>> {
    let hi = f.levels(dim, 2, params)?;
    let lo = f.levels(dim, 0, params)?;
    Ok(hi.iter().zip(&lo).map(|(a, b)| a - b).collect())
}

/// F(N)X = X F(N+1) - [F(N+2) - F(N)] ã⁻.
pub fn fn_x_residual(pair: &PositionMomentumPair<'_>, f: &FSpec, margin: usize) -> Result<CheckReport> {
    let rep = pair.rep();
    let (d, params) = (rep.dim(), rep.params());
    let lhs = pair.x().diag_left(&f.levels(d, 0, params)?);
    let moved = pair.x().diag_right(&f.levels(d, 1, params)?);
    let correction = a_tilde(pair)?.diag_left(&level_gap(f, d, params)?);
    let rhs = &moved - &correction;
    let residual = scaled_residual(&(&lhs - &rhs), &[&lhs, &moved, &correction], margin)?;
    Ok(CheckReport::new(format!("F(N) X = X F(N+1) - [F(N+2) - F(N)] a~ for F = {f}"), residual, PERMUTATION_TOL, margin))
}

/// F(N)P = P F(N+1) + [F(N+2) - F(N)] â⁻.
pub fn fn_p_residual(pair: &PositionMomentumPair<'_>, f: &FSpec, margin: usize) -> Result<CheckReport> {
    let rep = pair.rep();
    let (d, params) = (rep.dim(), rep.params());
    let lhs = pair.p().diag_left(&f.levels(d, 0, params)?);
    let moved = pair.p().diag_right(&f.levels(d, 1, params)?);
    let correction = a_hat(pair)?.diag_left(&level_gap(f, d, params)?);
    let rhs = &moved + &correction;
    let residual = scaled_residual(&(&lhs - &rhs), &[&lhs, &moved, &correction], margin)?;
    Ok(CheckReport::new(format!("F(N) P = P F(N+1) + [F(N+2) - F(N)] a^ for F = {f}"), residual, PERMUTATION_TOL, margin))
}

/// Q^{±N} X ∓ iP.
///
/// One off-diagonal band cancels identically; see
/// [`OperatorMatrix::sub_cancelling`].
pub fn ladder_combination(pair: &PositionMomentumPair<'_>, sign: ShiftSign) -> Result<OperatorMatrix> {
    let s = sign.unit() as f64;
    let qn = pair.rep().ratio_pow_levels(s, 0.0)?;
    Ok(pair.x().diag_left(&qn).sub_cancelling(&pair.p().scale(I * s)))
}

/// F(N)(Q^{±N}X ∓ iP) = (Q^{±N}X ∓ iP) F(N±1).
pub fn ladder_shift_residual(
    pair: &PositionMomentumPair<'_>,
    f: &FSpec,
    sign: ShiftSign,
    margin: usize,
) -> Result<CheckReport> {
    let rep = pair.rep();
    let (d, params) = (rep.dim(), rep.params());
    let k = ladder_combination(pair, sign)?;
    let lhs = k.diag_left(&f.levels(d, 0, params)?);
    let rhs = k.diag_right(&f.levels(d, sign.unit(), params)?);
    let name = match sign {
        ShiftSign::Up => format!("F(N) (Q^N X - iP) = (Q^N X - iP) F(N+1) for F = {f}"),
        ShiftSign::Down => format!("F(N) (Q^-N X + iP) = (Q^-N X + iP) F(N-1) for F = {f}"),
    };
    identity_check(name, &lhs, &rhs, margin, PERMUTATION_TOL)
}

fn a_k_levels(k: u32, dim: usize) -> Vec<f64> {
    (0..dim as i64)
        .map(|n| a_k_eval(k, n + 1, AkMethod::Closed).to_f64().unwrap_or(f64::INFINITY))
        .collect()
}

/// N^k X = X (N+1)^k - √2 Q^N A_k(N+1) a⁻.
pub fn nk_x_residual(pair: &PositionMomentumPair<'_>, k: u32, margin: usize) -> Result<CheckReport> {
    let rep = pair.rep();
    let d = rep.dim();
    let lhs = pair.x().diag_left(&rep.levels(0, |n| (n as f64).powi(k as i32)));
    let moved = pair.x().diag_right(&rep.levels(1, |n| (n as f64).powi(k as i32)));
    let correction = rep
        .lower()
        .diag_left(&a_k_levels(k, d))
        .diag_left(&rep.ratio_pow_levels(1.0, 0.0)?)
        .scale_real(SQRT_2);
    let rhs = &moved - &correction;
    let residual = scaled_residual(&(&lhs - &rhs), &[&lhs, &moved, &correction], margin)?;
    Ok(CheckReport::new(format!("N^{k} X = X (N+1)^{k} - sqrt2 Q^N A_{k}(N+1) a-"), residual, PERMUTATION_TOL, margin))
}

/// N^k P = P (N+1)^k + i√2 Q^{2N} A_k(N+1) a⁻.
pub fn nk_p_residual(pair: &PositionMomentumPair<'_>, k: u32, margin: usize) -> Result<CheckReport> {
    let rep = pair.rep();
    let d = rep.dim();
    let lhs = pair.p().diag_left(&rep.levels(0, |n| (n as f64).powi(k as i32)));
    let moved = pair.p().diag_right(&rep.levels(1, |n| (n as f64).powi(k as i32)));
    let correction = rep
        .lower()
        .diag_left(&a_k_levels(k, d))
        .diag_left(&rep.ratio_pow_levels(2.0, 0.0)?)
        .scale(I * SQRT_2);
    let rhs = &moved + &correction;
    let residual = scaled_residual(&(&lhs - &rhs), &[&lhs, &moved, &correction], margin)?;
    Ok(CheckReport::new(format!("N^{k} P = P (N+1)^{k} + i sqrt2 Q^2N A_{k}(N+1) a-"), residual, PERMUTATION_TOL, margin))
}

/// Which operator a simplified Q-power rule acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quadrature {
    X,
    P,
}

/// Right side of the closed Q-power rules
/// Q^{±N}X = X Q^{±(N+1)} ± (1-Q²) Q^{±(N+1)-1} ã⁻ and
/// Q^{±N}P = P Q^{±(N+1)} ∓ (1-Q²) Q^{±(N+1)-1} â⁻.
pub fn q_power_simplified_rhs(
    pair: &PositionMomentumPair<'_>,
    op: Quadrature,
    sign: ShiftSign,
) -> Result<OperatorMatrix> {
    let rep = pair.rep();
    let s = sign.unit() as f64;
    let big_q = rep.params().ratio();
    let shifted = rep.ratio_pow_levels(s, s)?;
    let coeff = rep.ratio_pow_levels(s, s - 1.0)?;
    let (base, aux, sign_factor) = match op {
        Quadrature::X => (pair.x(), a_tilde(pair)?, s),
        Quadrature::P => (pair.p(), a_hat(pair)?, -s),
    };
    let correction = aux.diag_left(&coeff).scale_real(sign_factor * (1.0 - big_q * big_q));
    Ok(&base.diag_right(&shifted) + &correction)
}

/// Residual of the closed Q-power rule for X or P.
pub fn q_power_simplified_residual(
    pair: &PositionMomentumPair<'_>,
    op: Quadrature,
    sign: ShiftSign,
    margin: usize,
) -> Result<CheckReport> {
    let rep = pair.rep();
    let s = sign.unit() as f64;
    let base = match op {
        Quadrature::X => pair.x(),
        Quadrature::P => pair.p(),
    };
    let lhs = base.diag_left(&rep.ratio_pow_levels(s, 0.0)?);
    let rhs = q_power_simplified_rhs(pair, op, sign)?;
    let name = format!("Q^({}N) {:?} closed rule", if s > 0.0 { "+" } else { "-" }, op);
    identity_check(name, &lhs, &rhs, margin, PERMUTATION_TOL)
}

/// a⁻ ã⁻ = Q ã⁻ a⁻ and a⁻ â⁻ = Q² â⁻ a⁻.
pub fn auxiliary_commutation_checks(pair: &PositionMomentumPair<'_>, margin: usize) -> Result<Vec<CheckReport>> {
    let am = pair.rep().lower();
    let big_q = pair.rep().params().ratio();
    let tilde = a_tilde(pair)?;
    let hat = a_hat(pair)?;
    let margin = margin.max(2);
    Ok(vec![
        identity_check("a- a~ = Q a~ a-", &(am * &tilde), &(&tilde * am).scale_real(big_q), margin, 1e-12)?,
        identity_check("a- a^ = Q^2 a^ a-", &(am * &hat), &(&hat * am).scale_real(big_q * big_q), margin, 1e-12)?,
    ])
}

//! Position and momentum built from the ladder operators,
//!
//! ```text
//! X = (1/√2) [Q^{2N} a⁺ + Q^N a⁻],    P = (i/√2) [Q^N a⁺ - Q^{2N} a⁻],
//! ```
//!
//! with the diagonal factors kept on the left exactly as written, and the
//! deformed relation `p XP - q PX = iħ (1 + μH)`.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use num_complex::Complex64;
use serde::Serialize;

use crate::check::CheckReport;
use crate::error::{Error, Result};
use crate::fock::TruncatedRep;
use crate::matrix::{scaled_residual, OperatorMatrix};
use crate::params::DeformationParams;

/// Tolerance for the deformed Heisenberg relation.
pub const HEISENBERG_TOL: f64 = 1e-10;
/// Tolerance for recovering a± from X and P.
pub const ROUND_TRIP_TOL: f64 = 1e-11;

const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn build_x(rep: &TruncatedRep) -> Result<OperatorMatrix> {
    let q2n = rep.ratio_pow_levels(2.0, 0.0)?;
    let qn = rep.ratio_pow_levels(1.0, 0.0)?;
    Ok((&rep.raise().diag_left(&q2n) + &rep.lower().diag_left(&qn)).scale_real(FRAC_1_SQRT_2))
}

pub fn build_p(rep: &TruncatedRep) -> Result<OperatorMatrix> {
    let q2n = rep.ratio_pow_levels(2.0, 0.0)?;
    let qn = rep.ratio_pow_levels(1.0, 0.0)?;
    Ok((&rep.raise().diag_left(&qn) - &rep.lower().diag_left(&q2n)).scale(I * FRAC_1_SQRT_2))
}

/// X and P for one representation.
#[derive(Clone, Debug)]
pub struct PositionMomentumPair<'a> {
    rep: &'a TruncatedRep,
    x: OperatorMatrix,
    p: OperatorMatrix,
}

impl<'a> PositionMomentumPair<'a> {
    pub fn new(rep: &'a TruncatedRep) -> Result<Self> {
        Ok(Self { rep, x: build_x(rep)?, p: build_p(rep)? })
    }

    pub fn rep(&self) -> &'a TruncatedRep {
        self.rep
    }

    pub fn x(&self) -> &OperatorMatrix {
        &self.x
    }

    pub fn p(&self) -> &OperatorMatrix {
        &self.p
    }

    /// p XP - q PX.
    pub fn pq_commutator(&self, params: &DeformationParams) -> OperatorMatrix {
        &(&self.x * &self.p).scale_real(params.p()) - &(&self.p * &self.x).scale_real(params.q())
    }
}

/// d(n) = √2 / (1 + Q^{2n}) at arbitrary integer n.
pub fn d_coefficient(params: &DeformationParams, n: i64) -> Result<f64> {
    Ok(SQRT_2 / (1.0 + params.ratio_pow(2.0 * n as f64)?))
}

/// Inverts the X, P construction:
/// a⁻ = d_N (Q^{-N} X + iP), a⁺ = d_N (X - i Q^{-N} P).
pub fn recover_ladder(pair: &PositionMomentumPair<'_>) -> Result<(OperatorMatrix, OperatorMatrix)> {
    let rep = pair.rep();
    let d = (0..rep.dim() as i64)
        .map(|n| d_coefficient(rep.params(), n))
        .collect::<Result<Vec<_>>>()?;
    let q_minus_n = rep.ratio_pow_levels(-1.0, 0.0)?;
    // each combination cancels one band identically
    let lower = pair.x().diag_left(&q_minus_n).sub_cancelling(&pair.p().scale(-I)).diag_left(&d);
    let raise = pair.x().sub_cancelling(&pair.p().diag_left(&q_minus_n).scale(I)).diag_left(&d);
    Ok((lower, raise))
}

/// Round-trip reports for a⁻ and a⁺ recovered from X and P.
pub fn round_trip_checks(pair: &PositionMomentumPair<'_>, margin: usize) -> Result<Vec<CheckReport>> {
    let (lower, raise) = recover_ladder(pair)?;
    let rep = pair.rep();
    let margin = margin.max(1);
    Ok(vec![
        CheckReport::new(
            "a- recovered from X, P",
            scaled_residual(&(&lower - rep.lower()), &[rep.lower()], margin)?,
            ROUND_TRIP_TOL,
            margin,
        ),
        CheckReport::new(
            "a+ recovered from X, P",
            scaled_residual(&(&raise - rep.raise()), &[rep.raise()], margin)?,
            ROUND_TRIP_TOL,
            margin,
        ),
    ])
}

fn heisenberg_rhs(params: &DeformationParams, dim: usize, h: Option<&OperatorMatrix>) -> Result<OperatorMatrix> {
    let one = OperatorMatrix::identity(dim);
    let inner = if params.mu() == 0.0 {
        one
    } else {
        let h = h.ok_or(Error::MissingHamiltonian { mu: params.mu() })?;
        &one + &h.scale_real(params.mu())
    };
    Ok(inner.scale(I * params.hbar()))
}

/// Residual of p XP - q PX = iħ(1 + μH) on the interior.
pub fn pq_commutator_residual(
    pair: &PositionMomentumPair<'_>,
    params: &DeformationParams,
    h: Option<&OperatorMatrix>,
    margin: usize,
) -> Result<CheckReport> {
    let rhs = heisenberg_rhs(params, pair.x().dim(), h)?;
    let xp = (pair.x() * pair.p()).scale_real(params.p());
    let px = (pair.p() * pair.x()).scale_real(params.q());
    let diff = &(&xp - &px) - &rhs;
    let margin = margin.max(1);
    let name = if params.mu() == 0.0 { "p XP - q PX = i hbar" } else { "p XP - q PX = i hbar (1 + mu H)" };
    Ok(CheckReport::new(name, scaled_residual(&diff, &[&xp, &px, &rhs], margin)?, HEISENBERG_TOL, margin))
}

/// Least-squares estimate of μ in p XP - q PX ≈ iħ(1 + μH).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MuFit {
    pub mu: f64,
    /// Scaled interior residual left after subtracting the fitted right side.
    pub residual: f64,
}

/// Fits μ given the left side `commutator = p XP - q PX` directly.
pub fn fit_mu_from_matrices(
    commutator: &OperatorMatrix,
    h: &OperatorMatrix,
    hbar: f64,
    margin: usize,
) -> Result<MuFit> {
    let c = commutator.interior_block(margin)?;
    let h_int = h.interior_block(margin)?;
    let k = h_int.nrows();
    let h_norm = h_int.norm();
    if !(h_norm > 0.0) {
        return Err(Error::DegenerateFit("Hamiltonian vanishes on the interior".into()));
    }
    let mean = h_int.trace() / Complex64::new(k as f64, 0.0);
    let spread = (&h_int - nalgebra::DMatrix::<Complex64>::identity(k, k) * mean).norm();
    if spread <= 1e-12 * h_norm {
        return Err(Error::DegenerateFit(
            "Hamiltonian is a multiple of the identity on the interior; mu cannot be separated from hbar".into(),
        ));
    }
    let target = c - nalgebra::DMatrix::<Complex64>::identity(k, k) * (I * hbar);
    let basis = h_int * (I * hbar);
    let num: f64 = basis.iter().zip(target.iter()).map(|(b, t)| (b.conj() * t).re).sum();
    let den: f64 = basis.iter().map(|b| b.norm_sqr()).sum();
    let mu = num / den;

    let rhs = heisenberg_rhs(&DeformationParams::undeformed().with_hbar(hbar)?.with_mu(mu)?, h.dim(), Some(h))?;
    let residual = scaled_residual(&(commutator - &rhs), &[commutator, &rhs], margin)?;
    Ok(MuFit { mu, residual })
}

/// Fits μ for a pair built from a representation.
pub fn fit_mu(
    pair: &PositionMomentumPair<'_>,
    params: &DeformationParams,
    h: &OperatorMatrix,
    margin: usize,
) -> Result<MuFit> {
    fit_mu_from_matrices(&pair.pq_commutator(params), h, params.hbar(), margin)
}

/// Residual of (p XP - q PX) + (p XP - q PX)† on the interior, with the
/// actual matrix adjoints of X and P.
pub fn skew_hermiticity_residual(
    pair: &PositionMomentumPair<'_>,
    params: &DeformationParams,
    margin: usize,
) -> Result<CheckReport> {
    let l = pair.pq_commutator(params);
    let margin = margin.max(1);
    let residual = scaled_residual(&(&l + &l.adjoint()), &[&l], margin)?;
    Ok(CheckReport::new("p XP - q PX skew-Hermitian", residual, HEISENBERG_TOL, margin))
}

/// Skew-Hermiticity defect of p XP - q PX if X and P were taken to be
/// Hermitian: the adjoint is then p PX - q XP and the sum is
/// (p - q)(XP + PX), which vanishes only at p = q.
pub fn hermitian_assumption_skew_residual(
    pair: &PositionMomentumPair<'_>,
    params: &DeformationParams,
    margin: usize,
) -> Result<CheckReport> {
    let xp = pair.x() * pair.p();
    let px = pair.p() * pair.x();
    let defect = (&xp + &px).scale_real(params.p() - params.q());
    let margin = margin.max(1);
    let residual = scaled_residual(&defect, &[&xp.scale_real(params.p()), &px.scale_real(params.q())], margin)?;
    Ok(CheckReport::new("skew-Hermitian with X, P assumed Hermitian", residual, HEISENBERG_TOL, margin))
}

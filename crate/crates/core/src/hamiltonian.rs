//! The oscillator Hamiltonian in ladder, position/momentum and normal-ordered
//! forms, its spectrum, and the metric-balanced variant
//! H̃ = ½(η_X^{-½} X² η_X^{½} + η_P^{-½} P² η_P^{½}).

use std::fmt;
use std::str::FromStr;

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use num_rational::Rational64;
use serde::Serialize;

use crate::check::CheckReport;
use crate::dsf::{eval_dsf, validate_physical, StructureFunctionKind};
use crate::error::{Error, Result};
use crate::eta::{similarity, EtaSpec};
use crate::heisenberg::{d_coefficient, PositionMomentumPair};
use crate::matrix::{scaled_residual, OperatorMatrix};
use crate::params::DeformationParams;

/// Relative tolerance for agreement between Hamiltonian forms.
pub const EQUIVALENCE_TOL: f64 = 1e-9;
/// Tolerance for the ladder diagonal against the spectrum formula.
pub const SPECTRUM_TOL: f64 = 1e-13;
/// Hermiticity tolerance for the balanced Hamiltonian.
pub const H_TILDE_TOL: f64 = 1e-11;
/// Hermiticity tolerance for ladder bilinears.
pub const BILINEAR_TOL: f64 = 1e-12;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HamiltonianForm {
    /// ½(a⁻a⁺ + a⁺a⁻).
    Ladder,
    /// Position/momentum form keeping both XP and PX.
    XP,
    /// Position/momentum form with PX eliminated through the commutation relation.
    XP2,
    /// Constant plus a multiple of a⁺a⁻.
    Normal,
}

impl HamiltonianForm {
    pub const ALL: [Self; 4] = [Self::Ladder, Self::XP, Self::XP2, Self::Normal];

    pub fn name(self) -> &'static str {
        match self {
            Self::Ladder => "ladder",
            Self::XP => "xp",
            Self::XP2 => "xp2",
            Self::Normal => "normal",
        }
    }
}

impl fmt::Display for HamiltonianForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for HamiltonianForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown Hamiltonian form '{s}'")))
    }
}

fn levels_of(dim: usize, f: impl Fn(i64) -> Result<f64>) -> Result<Vec<f64>> {
    (0..dim as i64).map(f).collect()
}

/// Builds H in the requested form. All forms but `Ladder` carry coefficients
/// specific to the nonstandard (p,q) structure function.
pub fn build_h(pair: &PositionMomentumPair<'_>, form: HamiltonianForm) -> Result<OperatorMatrix> {
    let rep = pair.rep();
    if form != HamiltonianForm::Ladder && *rep.kind() != StructureFunctionKind::NonstandardPQ {
        return Err(Error::WrongKind { form: format!("Hamiltonian form '{form}'"), kind: rep.kind().to_string() });
    }
    let params = rep.params();
    let dim = rep.dim();
    let (ap, am) = (rep.raise(), rep.lower());
    let big_q = params.ratio();
    match form {
        HamiltonianForm::Ladder => Ok((&(am * ap) + &(ap * am)).scale_real(0.5)),
        HamiltonianForm::Normal => {
            let constant = levels_of(dim, |n| {
                Ok(params.ratio_pow(-2.0 * n as f64 - 1.0)? / (params.p() * (1.0 + params.ratio_pow(2.0 * n as f64 + 2.0)?)))
            })?;
            let weight = levels_of(dim, |n| {
                let num = 1.0 + params.ratio_pow(2.0 * n as f64 - 2.0)?;
                let den = big_q * (1.0 + params.ratio_pow(2.0 * n as f64 + 2.0)?);
                Ok(0.5 * (1.0 + num / den))
            })?;
            Ok(&OperatorMatrix::from_diagonal(&constant) + &(ap * am).diag_left(&weight))
        }
        HamiltonianForm::XP | HamiltonianForm::XP2 => {
            let x = pair.x();
            let p = pair.p();
            let d = levels_of(dim, |n| d_coefficient(params, n))?;
            let d_up = levels_of(dim, |n| d_coefficient(params, n + 1))?;
            let d_down = levels_of(dim, |n| d_coefficient(params, n - 1))?;
            let qn = rep.ratio_pow_levels(1.0, 0.0)?;
            let q_minus_n = rep.ratio_pow_levels(-1.0, 0.0)?;
            let sum: Vec<f64> = d_up.iter().zip(&d_down).map(|(u, w)| u + big_q * w).collect();
            let prefactor: Vec<f64> = d.iter().zip(&q_minus_n).map(|(a, b)| 0.5 * a * b).collect();

            let xx = x * x;
            let pp = p * p;
            let xp = x * p;
            let quadratic = &xx + &pp.scale_real(1.0 / big_q);
            let inner = if form == HamiltonianForm::XP {
                let px = p * x;
                let px_coeff: Vec<f64> = (0..dim).map(|n| qn[n] * d_up[n] - big_q * q_minus_n[n] * d_down[n]).collect();
                let xp_coeff: Vec<f64> = (0..dim).map(|n| qn[n] * d_down[n] - q_minus_n[n] * d_up[n] / big_q).collect();
                &(&quadratic.diag_left(&sum) + &px.diag_left(&px_coeff).scale(I)) + &xp.diag_left(&xp_coeff).scale(I)
            } else {
                let spread: Vec<f64> = (0..dim).map(|n| (qn[n] - q_minus_n[n]) / big_q).collect();
                let bracket = &quadratic + &xp.diag_left(&spread).scale(I);
                let constant: Vec<f64> = (0..dim)
                    .map(|n| params.hbar() / params.q() * (qn[n] * d_up[n] - big_q * q_minus_n[n] * d_down[n]))
                    .collect();
                &bracket.diag_left(&sum) + &OperatorMatrix::from_diagonal(&constant)
            };
            Ok(inner.diag_left(&prefactor))
        }
    }
}

/// One energy level.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectrumLevel {
    pub n: u32,
    #[serde(rename = "E")]
    pub energy: f64,
}

/// Energies E(n) = ½(φ(n+1) + φ(n)) for n = 0..=n_max.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct SpectrumTable {
    pub levels: Vec<SpectrumLevel>,
}

impl SpectrumTable {
    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.energy).collect()
    }

    /// CSV with header `n,E`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,E\n");
        for l in &self.levels {
            out.push_str(&format!("{},{}\n", l.n, crate::report::fmt_f64(l.energy)));
        }
        out
    }

    /// Levels where E(n+1) <= E(n), as (n, E(n), E(n+1)).
    pub fn monotonicity_findings(&self) -> Vec<(u32, f64, f64)> {
        self.levels
            .windows(2)
            .filter(|w| !(w[1].energy > w[0].energy))
            .map(|w| (w[0].n, w[0].energy, w[1].energy))
            .collect()
    }
}

pub fn spectrum(kind: &StructureFunctionKind, params: &DeformationParams, n_max: u32) -> Result<SpectrumTable> {
    let report = validate_physical(kind, params, n_max + 1)?;
    if let Some((level, value)) = report.first_offending() {
        return Err(Error::UnphysicalDsf { level: level as usize, value });
    }
    let phi = (0..=n_max + 1).map(|n| eval_dsf(kind, params, n)).collect::<Result<Vec<_>>>()?;
    let levels = (0..=n_max)
        .map(|n| SpectrumLevel { n, energy: 0.5 * (phi[n as usize + 1] + phi[n as usize]) })
        .collect();
    Ok(SpectrumTable { levels })
}

/// Largest deviation of the ladder Hamiltonian from diag(E(n)) on levels
/// 0..D-2, relative to max(1, |E|).
pub fn ladder_spectrum_residual(pair: &PositionMomentumPair<'_>, h_ladder: &OperatorMatrix) -> CheckReport {
    let phi = pair.rep().phi();
    let keep = h_ladder.dim() - 1;
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for i in 0..keep {
        for j in 0..keep {
            let expected = if i == j { 0.5 * (phi[i] + phi[i + 1]) } else { 0.0 };
            scale = scale.max(expected.abs());
            worst = worst.max((h_ladder[(i, j)] - Complex64::new(expected, 0.0)).norm());
        }
    }
    CheckReport::new("ladder H = diag(E(n))", worst / scale, SPECTRUM_TOL, 1)
}

/// Balanced Hamiltonian ½(η_X^{-½} X² η_X^{½} + η_P^{-½} P² η_P^{½}).
pub fn build_h_tilde(
    pair: &PositionMomentumPair<'_>,
    eta_x: &EtaSpec,
    eta_p: &EtaSpec,
    params: &DeformationParams,
) -> Result<OperatorMatrix> {
    let half = Rational64::new(1, 2);
    let xx = pair.x() * pair.x();
    let pp = pair.p() * pair.p();
    let x_part = similarity(&xx, &eta_x.power(half), params)?;
    let p_part = similarity(&pp, &eta_p.power(half), params)?;
    Ok((&x_part + &p_part).scale_real(0.5))
}

/// Interior residual of M - M†, relative to max(1, |M|).
pub fn hermiticity_residual(m: &OperatorMatrix, margin: usize) -> Result<CheckReport> {
    let residual = scaled_residual(&(m - &m.adjoint()), &[m], margin)?;
    Ok(CheckReport::new("Hermitian", residual, BILINEAR_TOL, margin))
}

/// Eigenvalues of the Hermitian part of the interior block, ascending.
pub fn interior_eigenvalues(m: &OperatorMatrix, margin: usize) -> Result<Vec<f64>> {
    let block = m.interior_block(margin)?;
    let hermitian = (&block + block.adjoint()) * Complex64::new(0.5, 0.0);
    let mut values: Vec<f64> = SymmetricEigen::new(hermitian).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eta::derive_eta_closed_forms;
    use crate::fock::{build_rep, GaugeSpec, TruncatedRep};
    use crate::matrix::interior_residual;

    fn pq(p: f64, q: f64) -> DeformationParams {
        DeformationParams::new(p, q).unwrap()
    }

    fn rep(kind: StructureFunctionKind, p: f64, q: f64, gauge: GaugeSpec, dim: usize) -> TruncatedRep {
        build_rep(&kind, &pq(p, q), &gauge, dim).unwrap()
    }

    #[test]
    fn undeformed_ladder_is_textbook() {
        let r = rep(StructureFunctionKind::Undeformed, 1.0, 1.0, GaugeSpec::symmetric(), 16);
        let pair = PositionMomentumPair::new(&r).unwrap();
        let h = build_h(&pair, HamiltonianForm::Ladder).unwrap();
        let expected = OperatorMatrix::from_diagonal(&(0..16).map(|n| n as f64 + 0.5).collect::<Vec<_>>());
        assert!(interior_residual(&(&h - &expected), 1).unwrap() <= 1e-14);
    }

    #[test]
    fn equal_parameters_shift_by_constant() {
        let q0 = 1.3;
        for kind in [StructureFunctionKind::NonstandardPQ, StructureFunctionKind::ScaledLinear] {
            let r = rep(kind, q0, q0, GaugeSpec::symmetric(), 24);
            let pair = PositionMomentumPair::new(&r).unwrap();
            let h = build_h(&pair, HamiltonianForm::Ladder).unwrap();
            let expected = &OperatorMatrix::identity(24).scale_real(0.5 / q0) + &(r.raise() * r.lower());
            assert!(interior_residual(&(&h - &expected), 1).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn forms_agree() {
        for gauge in [GaugeSpec::symmetric(), GaugeSpec::case_a()] {
            for (p, q) in [(1.1, 0.9), (0.8, 1.25), (0.9, 0.9)] {
                let r = rep(StructureFunctionKind::NonstandardPQ, p, q, gauge, 48);
                let pair = PositionMomentumPair::new(&r).unwrap();
                let hs: Vec<_> = HamiltonianForm::ALL.iter().map(|&f| build_h(&pair, f).unwrap()).collect();
                for a in 0..4 {
                    for b in a + 1..4 {
                        let res = scaled_residual(&(&hs[a] - &hs[b]), &[&hs[a], &hs[b]], 4).unwrap();
                        assert!(res <= EQUIVALENCE_TOL, "{gauge} p={p} q={q} forms {a},{b}: {res}");
                    }
                }
            }
        }
    }

    #[test]
    fn coefficient_forms_need_nonstandard_kind() {
        let r = rep(StructureFunctionKind::Undeformed, 1.0, 1.0, GaugeSpec::symmetric(), 8);
        let pair = PositionMomentumPair::new(&r).unwrap();
        assert!(matches!(build_h(&pair, HamiltonianForm::XP), Err(Error::WrongKind { .. })));
        assert!(build_h(&pair, HamiltonianForm::Ladder).is_ok());
    }

    #[test]
    fn spectrum_examples() {
        let e = spectrum(&StructureFunctionKind::Undeformed, &pq(1.0, 1.0), 10).unwrap();
        assert_eq!(e.energies(), (0..=10).map(|n| n as f64 + 0.5).collect::<Vec<_>>());
        let q0 = 1.6;
        let e = spectrum(&StructureFunctionKind::ScaledLinear, &pq(q0, q0), 6).unwrap();
        for l in &e.levels {
            assert!((l.energy - (2.0 * l.n as f64 + 1.0) / (2.0 * q0)).abs() <= 1e-15);
        }
        // the deviation grows like n^2 (q - 1), so only low levels are compared
        let e = spectrum(&StructureFunctionKind::NonstandardPQ, &pq(1.0, 1.0 + 1e-8), 4).unwrap();
        for l in &e.levels {
            assert!((l.energy - (l.n as f64 + 0.5)).abs() <= 1e-6, "{l:?}");
        }
        assert!(e.monotonicity_findings().is_empty());
    }

    #[test]
    fn spectrum_rejects_unphysical() {
        let kind = StructureFunctionKind::Custom(vec![0.0, 1.0, -1.0, 2.0]);
        assert!(matches!(spectrum(&kind, &pq(1.0, 1.0), 2), Err(Error::UnphysicalDsf { level: 2, .. })));
    }

    #[test]
    fn spectrum_csv() {
        let e = spectrum(&StructureFunctionKind::Undeformed, &pq(1.0, 1.0), 1).unwrap();
        assert_eq!(e.to_csv(), "n,E\n0,5.0000000000000000e-1\n1,1.5000000000000000e0\n");
    }

    #[test]
    fn ladder_diagonal_matches_spectrum() {
        let r = rep(StructureFunctionKind::NonstandardPQ, 1.1, 0.9, GaugeSpec::case_b(), 48);
        let pair = PositionMomentumPair::new(&r).unwrap();
        let h = build_h(&pair, HamiltonianForm::Ladder).unwrap();
        assert!(ladder_spectrum_residual(&pair, &h).pass);
        let table = spectrum(r.kind(), r.params(), 46).unwrap();
        for l in &table.levels {
            let i = l.n as usize;
            assert!((h[(i, i)].re - l.energy).abs() <= 1e-13 * l.energy.abs().max(1.0));
        }
    }

    #[test]
    fn ladder_is_hermitian_in_every_gauge() {
        for gauge in [GaugeSpec::symmetric(), GaugeSpec::case_a(), GaugeSpec::case_b()] {
            let r = rep(StructureFunctionKind::NonstandardPQ, 1.2, 0.8, gauge, 32);
            let pair = PositionMomentumPair::new(&r).unwrap();
            let h = build_h(&pair, HamiltonianForm::Ladder).unwrap();
            assert!(hermiticity_residual(&h, 1).unwrap().residual <= 1e-12);
        }
        assert_eq!(hermiticity_residual(&OperatorMatrix::zeros(4), 0).unwrap().residual, 0.0);
    }

    #[test]
    fn balanced_hamiltonian() {
        for eta_a in [
            EtaSpec::from_integers(0, 1, -1),
            EtaSpec::from_integers(0, -1, -2),
            EtaSpec::trivial(),
            EtaSpec::new(Rational64::from_integer(0), Rational64::from_integer(0), Rational64::new(2, 3)),
        ] {
            let gauge = GaugeSpec::from_eta_a(&eta_a).unwrap();
            let r = rep(StructureFunctionKind::NonstandardPQ, 1.0, 1.1, gauge, 48);
            let pair = PositionMomentumPair::new(&r).unwrap();
            let (ex, ep) = derive_eta_closed_forms(&eta_a).unwrap();
            let ht = build_h_tilde(&pair, &ex, &ep, r.params()).unwrap();
            let c = hermiticity_residual(&ht, 2).unwrap();
            assert!(c.residual <= H_TILDE_TOL, "{eta_a}: {c:?}");
            assert!(interior_eigenvalues(&ht, 2).unwrap().iter().all(|e| e.is_finite()));
        }
    }

    #[test]
    fn balanced_hamiltonian_at_unit_ratio() {
        let r = rep(StructureFunctionKind::NonstandardPQ, 1.2, 1.2, GaugeSpec::symmetric(), 16);
        let pair = PositionMomentumPair::new(&r).unwrap();
        let (ex, ep) = derive_eta_closed_forms(&EtaSpec::trivial()).unwrap();
        let ht = build_h_tilde(&pair, &ex, &ep, r.params()).unwrap();
        let plain = (&(pair.x() * pair.x()) + &(pair.p() * pair.p())).scale_real(0.5);
        assert_eq!(ht, plain);
    }

    #[test]
    fn plain_quadratic_not_hermitian_when_deformed() {
        let r = rep(StructureFunctionKind::NonstandardPQ, 1.0, 0.9, GaugeSpec::symmetric(), 48);
        let pair = PositionMomentumPair::new(&r).unwrap();
        let plain = (&(pair.x() * pair.x()) + &(pair.p() * pair.p())).scale_real(0.5);
        assert!(hermiticity_residual(&plain, 2).unwrap().residual > 1e-3);
    }
}

//! Verification suites over one parameter point and over parameter grids.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::check::CheckReport;
use crate::commutation::{
    auxiliary_commutation_checks, fn_p_residual, fn_x_residual, ladder_shift_residual, nk_p_residual,
    nk_x_residual, FSpec, ShiftSign,
};
use crate::dsf::StructureFunctionKind;
use crate::error::{Error, Result};
use crate::eta::{
    conjugation_residual, derive_eta_closed_forms, pseudo_hermiticity_residual, right_form_of, ConjugationForm,
    EtaSpec,
};
use crate::fock::{build_rep, verify_doa, GaugeSpec, DEFAULT_DIM};
use crate::hamiltonian::{
    build_h, build_h_tilde, hermiticity_residual, ladder_spectrum_residual, HamiltonianForm, BILINEAR_TOL,
    EQUIVALENCE_TOL, H_TILDE_TOL,
};
use crate::heisenberg::{
    fit_mu, pq_commutator_residual, round_trip_checks, skew_hermiticity_residual, MuFit, PositionMomentumPair,
};
use crate::matrix::scaled_residual;
use crate::params::{DeformationParams, EXPONENT_LIMIT};

/// Default interior margin.
pub const DEFAULT_MARGIN: usize = 4;
/// Tolerance for plain Hermiticity of X or P.
pub const QUADRATURE_HERMITIAN_TOL: f64 = 1e-11;

/// Extra checks a caller can demand on top of the standard suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Requirement {
    XHermitian,
    PHermitian,
}

impl FromStr for Requirement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x-hermitian" => Ok(Self::XHermitian),
            "p-hermitian" => Ok(Self::PHermitian),
            other => Err(Error::Parse(format!("unknown requirement '{other}'"))),
        }
    }
}

impl fmt::Display for Requirement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::XHermitian => "x-hermitian",
            Self::PHermitian => "p-hermitian",
        })
    }
}

/// Everything needed to run the suite at one parameter point.
#[derive(Clone, Debug, PartialEq)]
pub struct VerifyConfig {
    pub kind: StructureFunctionKind,
    pub params: DeformationParams,
    pub gauge: GaugeSpec,
    pub dim: usize,
    pub margin: usize,
    pub require: Vec<Requirement>,
}

impl VerifyConfig {
    pub fn new(kind: StructureFunctionKind, params: DeformationParams) -> Self {
        Self { kind, params, gauge: GaugeSpec::symmetric(), dim: DEFAULT_DIM, margin: DEFAULT_MARGIN, require: Vec::new() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::InvalidParams(format!("dimension must be at least 2, got {}", self.dim)));
        }
        if 2 * self.margin >= self.dim {
            return Err(Error::MarginTooLarge { margin: self.margin, dim: self.dim });
        }
        Ok(())
    }
}

/// Ordered check list for one parameter point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub params: DeformationParams,
    pub kind: StructureFunctionKind,
    pub gauge: GaugeSpec,
    pub dim: usize,
    pub margin: usize,
    pub checks: Vec<CheckReport>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu_fit: Option<MuFit>,
}

impl SuiteReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckReport> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn find(&self, name: &str) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn max_residual_by_check(&self) -> BTreeMap<String, f64> {
        let mut out: BTreeMap<String, f64> = BTreeMap::new();
        for c in &self.checks {
            let slot = out.entry(c.name.clone()).or_insert(c.residual);
            // NaN wins so that it is never hidden
            if c.residual.is_nan() || c.residual > *slot {
                *slot = c.residual;
            }
        }
        out
    }

    pub fn summary(&self) -> SweepRecord {
        SweepRecord {
            p: self.params.p(),
            q: self.params.q(),
            mu: self.params.mu(),
            max_residual_by_check: self.max_residual_by_check(),
            pass: self.pass,
            error: None,
        }
    }
}

/// The functions of N used to exercise the permutation identities. Q^{N²} is
/// dropped when it would leave floating-point range.
fn suite_functions(params: &DeformationParams, dim: usize) -> Vec<FSpec> {
    let mut fs = vec![
        FSpec::Poly(vec![1.0, 0.0]),
        FSpec::Poly(vec![1.0, 0.0, 0.0]),
        FSpec::QPow(EtaSpec::from_integers(0, 1, 0)),
        FSpec::QPow(EtaSpec::from_integers(0, -1, 0)),
    ];
    let top = (dim + 2) as f64;
    if top * top * params.ln_ratio().abs() <= EXPONENT_LIMIT {
        fs.push(FSpec::QPow(EtaSpec::from_integers(1, 0, 0)));
    }
    fs
}

fn quadrature_checks(
    label: &str,
    m: &crate::matrix::OperatorMatrix,
    eta: &EtaSpec,
    params: &DeformationParams,
    margin: usize,
) -> Result<CheckReport> {
    if eta.is_constant() {
        Ok(hermiticity_residual(m, margin)?.renamed(format!("{label} Hermitian")).with_tolerance(QUADRATURE_HERMITIAN_TOL))
    } else {
        Ok(pseudo_hermiticity_residual(m, eta, params, margin)?.renamed(format!("{label} pseudo-Hermitian with eta = {eta}")))
    }
}

/// Runs every applicable check at one parameter point, in a fixed order.
pub fn run_verify_suite(config: &VerifyConfig) -> Result<SuiteReport> {
    config.validate()?;
    let params = &config.params;
    let margin = config.margin;
    let rep = build_rep(&config.kind, params, &config.gauge, config.dim)?;
    let pair = PositionMomentumPair::new(&rep)?;
    let h_ladder = build_h(&pair, HamiltonianForm::Ladder)?;
    let mut checks = Vec::new();

    checks.extend(verify_doa(&rep, margin)?);
    checks.extend(round_trip_checks(&pair, margin)?);

    let h_for_mu = (params.mu() != 0.0).then_some(&h_ladder);
    checks.push(pq_commutator_residual(&pair, params, h_for_mu, margin)?);
    checks.push(skew_hermiticity_residual(&pair, params, margin)?);
    let mu_fit = if params.mu() != 0.0 { fit_mu(&pair, params, &h_ladder, margin.max(1)).ok() } else { None };

    let eta_a = config.gauge.eta_a();
    checks.push(conjugation_residual(&rep, &eta_a, ConjugationForm::Left)?);
    checks.push(conjugation_residual(&rep, &right_form_of(&eta_a), ConjugationForm::Right)?);
    let (eta_x, eta_p) = derive_eta_closed_forms(&eta_a)?;
    checks.push(quadrature_checks("X", pair.x(), &eta_x, params, margin)?);
    checks.push(quadrature_checks("P", pair.p(), &eta_p, params, margin)?);
    for req in &config.require {
        let (label, m) = match req {
            Requirement::XHermitian => ("X", pair.x()),
            Requirement::PHermitian => ("P", pair.p()),
        };
        checks.push(
            hermiticity_residual(m, margin)?
                .renamed(format!("{label} Hermitian"))
                .with_tolerance(QUADRATURE_HERMITIAN_TOL),
        );
    }
    checks.push(hermiticity_residual(&(rep.raise() * rep.lower()), margin.max(1))?.renamed("a+ a- Hermitian"));
    checks.push(hermiticity_residual(&(rep.lower() * rep.raise()), margin.max(1))?.renamed("a- a+ Hermitian"));

    let f_margin = margin.max(1);
    for f in suite_functions(params, config.dim) {
        checks.push(fn_x_residual(&pair, &f, f_margin)?);
        checks.push(fn_p_residual(&pair, &f, f_margin)?);
        checks.push(ladder_shift_residual(&pair, &f, ShiftSign::Up, f_margin)?);
        checks.push(ladder_shift_residual(&pair, &f, ShiftSign::Down, f_margin)?);
    }
    for k in 1..=4 {
        checks.push(nk_x_residual(&pair, k, f_margin)?);
        checks.push(nk_p_residual(&pair, k, f_margin)?);
    }
    checks.extend(auxiliary_commutation_checks(&pair, margin)?);

    checks.push(hermiticity_residual(&h_ladder, margin.max(1))?.renamed("ladder H Hermitian").with_tolerance(BILINEAR_TOL));
    checks.push(ladder_spectrum_residual(&pair, &h_ladder));
    if config.kind == StructureFunctionKind::NonstandardPQ {
        for form in [HamiltonianForm::XP, HamiltonianForm::XP2, HamiltonianForm::Normal] {
            let h = build_h(&pair, form)?;
            let residual = scaled_residual(&(&h - &h_ladder), &[&h, &h_ladder], margin.max(2))?;
            checks.push(CheckReport::new(format!("H {form} form = ladder form"), residual, EQUIVALENCE_TOL, margin.max(2)));
        }
    }
    let h_tilde = build_h_tilde(&pair, &eta_x, &eta_p, params)?;
    checks.push(
        hermiticity_residual(&h_tilde, margin.max(2))?.renamed("balanced H Hermitian").with_tolerance(H_TILDE_TOL),
    );

    let pass = checks.iter().all(|c| c.pass);
    Ok(SuiteReport {
        params: *params,
        kind: config.kind.clone(),
        gauge: config.gauge,
        dim: config.dim,
        margin,
        checks,
        pass,
        mu_fit,
    })
}

/// Inclusive arithmetic range `start:stop:step`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SweepRange {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        if ![start, stop, step].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParams("sweep range values must be finite".into()));
        }
        if !(step > 0.0) {
            return Err(Error::InvalidParams(format!("sweep step must be > 0, got {step}")));
        }
        if stop < start {
            return Err(Error::InvalidParams(format!("empty sweep range {start}:{stop}:{step}")));
        }
        Ok(Self { start, stop, step })
    }

    /// Grid values; the endpoint is included when it lies on the grid up
    /// to rounding.
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.start + i as f64 * self.step).collect()
    }
}

impl FromStr for SweepRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("range must be 'start:stop:step', got '{s}'")));
        }
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number '{t}' in range '{s}'")));
        Self::new(num(parts[0])?, num(parts[1])?, num(parts[2])?)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub base: VerifyConfig,
    pub p_range: Option<SweepRange>,
    pub q_range: Option<SweepRange>,
    pub mu_range: Option<SweepRange>,
}

/// One grid point's outcome.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRecord {
    pub p: f64,
    pub q: f64,
    pub mu: f64,
    pub max_residual_by_check: BTreeMap<String, f64>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl SweepConfig {
    /// Grid points in row-major (p, q, μ) order.
    pub fn grid(&self) -> Result<Vec<(f64, f64, f64)>> {
        if self.p_range.is_none() && self.q_range.is_none() && self.mu_range.is_none() {
            return Err(Error::InvalidParams("sweep needs at least one range".into()));
        }
        let axis = |r: &Option<SweepRange>, fixed: f64| r.map_or_else(|| vec![fixed], |r| r.values());
        let base = &self.base.params;
        let ps = axis(&self.p_range, base.p());
        let qs = axis(&self.q_range, base.q());
        let mus = axis(&self.mu_range, base.mu());
        let mut out = Vec::with_capacity(ps.len() * qs.len() * mus.len());
        for &p in &ps {
            for &q in &qs {
                for &mu in &mus {
                    out.push((p, q, mu));
                }
            }
        }
        Ok(out)
    }
}

fn sweep_point(base: &VerifyConfig, p: f64, q: f64, mu: f64) -> SweepRecord {
    let outcome = DeformationParams::new(p, q)
        .and_then(|params| params.with_mu(mu))
        .and_then(|params| params.with_hbar(base.params.hbar()))
        .and_then(|params| run_verify_suite(&VerifyConfig { params, ..base.clone() }));
    match outcome {
        Ok(report) => report.summary(),
        Err(e) => SweepRecord { p, q, mu, max_residual_by_check: BTreeMap::new(), pass: false, error: Some(e.to_string()) },
    }
}

/// Evaluates the suite at every grid point in parallel; records come back
/// in grid order. A point whose construction fails yields a failed record
/// carrying the error message.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRecord>> {
    config.base.validate()?;
    let grid = config.grid()?;
    Ok(grid.par_iter().map(|&(p, q, mu)| sweep_point(&config.base, p, q, mu)).collect())
}

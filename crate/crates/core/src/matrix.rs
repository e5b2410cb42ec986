use std::ops::{Add, Index, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

const CANCELLATION_ULPS: f64 = 8.0;

/// Dense square complex matrix carrying a truncated operator.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix(DMatrix<Complex64>);

impl OperatorMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn from_diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(values[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self(DMatrix::from_fn(dim, dim, f))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_inner(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.0[(i, j)] = value;
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self(self.0.map(|z| z * c))
    }

    pub fn scale_real(&self, c: f64) -> Self {
        Self(self.0.map(|z| z * c))
    }

    /// diag(values) · self, by row scaling.
    pub fn diag_left(&self, values: &[f64]) -> Self {
        assert_eq!(values.len(), self.dim());
        let mut out = self.0.clone();
        for (i, mut row) in out.row_iter_mut().enumerate() {
            row *= Complex64::new(values[i], 0.0);
        }
        Self(out)
    }

    /// self · diag(values), by column scaling.
    pub fn diag_right(&self, values: &[f64]) -> Self {
        assert_eq!(values.len(), self.dim());
        let mut out = self.0.clone();
        for (j, mut col) in out.column_iter_mut().enumerate() {
            col *= Complex64::new(values[j], 0.0);
        }
        Self(out)
    }

    /// Entrywise map that also sees the indices.
    pub fn map_indexed(&self, mut f: impl FnMut(usize, usize, Complex64) -> Complex64) -> Self {
        let d = self.dim();
        Self(DMatrix::from_fn(d, d, |i, j| f(i, j, self.0[(i, j)])))
    }

    /// self - other, with entries that cancel to within a few ulps of the
    /// operands set to exactly zero. Used where a band is known to cancel
    /// identically, so that leftover rounding is not amplified later.
    pub fn sub_cancelling(&self, other: &Self) -> Self {
        self.map_indexed(|i, j, a| {
            let b = other.0[(i, j)];
            let diff = a - b;
            if diff.norm() <= CANCELLATION_ULPS * f64::EPSILON * a.norm().max(b.norm()) {
                Complex64::new(0.0, 0.0)
            } else {
                diff
            }
        })
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        self.0.diagonal().iter().copied().collect()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Leading block of size dim - margin.
    pub fn interior_block(&self, margin: usize) -> Result<DMatrix<Complex64>> {
        let keep = interior_size(self.dim(), margin)?;
        Ok(self.0.view((0, 0), (keep, keep)).into_owned())
    }
}

fn interior_size(dim: usize, margin: usize) -> Result<usize> {
    if 2 * margin >= dim {
        return Err(Error::MarginTooLarge { margin, dim });
    }
    Ok(dim - margin)
}

/// max |M[i,j]| over i, j < D - margin.
pub fn interior_residual(m: &OperatorMatrix, margin: usize) -> Result<f64> {
    let keep = interior_size(m.dim(), margin)?;
    let mut worst: f64 = 0.0;
    for j in 0..keep {
        for i in 0..keep {
            let a = m.0[(i, j)].norm();
            // NaN must not be swallowed by max
            if a.is_nan() {
                return Ok(f64::NAN);
            }
            worst = worst.max(a);
        }
    }
    Ok(worst)
}

/// Interior residual of `diff`, divided by max(1, interior size of each term).
///
/// For identities whose terms are O(1) this is the absolute residual; for
/// terms carrying large Q-powers it is a relative one.
pub fn scaled_residual(diff: &OperatorMatrix, terms: &[&OperatorMatrix], margin: usize) -> Result<f64> {
    let mut scale: f64 = 1.0;
    for t in terms {
        scale = scale.max(interior_residual(t, margin)?);
    }
    Ok(interior_residual(diff, margin)? / scale)
}

impl Index<(usize, usize)> for OperatorMatrix {
    type Output = Complex64;

    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.0[idx]
    }
}

impl<'a> Mul<&'a OperatorMatrix> for &'a OperatorMatrix {
    type Output = OperatorMatrix;

    fn mul(self, rhs: &'a OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix(&self.0 * &rhs.0)
    }
}

impl<'a> Add<&'a OperatorMatrix> for &'a OperatorMatrix {
    type Output = OperatorMatrix;

    fn add(self, rhs: &'a OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a OperatorMatrix> for &'a OperatorMatrix {
    type Output = OperatorMatrix;

    fn sub(self, rhs: &'a OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix(&self.0 - &rhs.0)
    }
}

use serde::Serialize;

use crate::error::{Error, Result};

/// Relative gap |q - p| / max(p, q) below which Q is treated as exactly 1.
pub const DEGENERATE_EPS: f64 = 1e-9;

/// Largest admissible |x ln Q| for a power Q^x.
pub const EXPONENT_LIMIT: f64 = 700.0;

/// Deformation scalars. `Q = q / p` is always derived, never stored.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DeformationParams {
    p: f64,
    q: f64,
    mu: f64,
    hbar: f64,
}

impl DeformationParams {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        for (name, v) in [("p", p), ("q", q)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        Ok(Self { p, q, mu: 0.0, hbar: 1.0 })
    }

    /// The undeformed point p = q = 1.
    pub fn undeformed() -> Self {
        Self { p: 1.0, q: 1.0, mu: 0.0, hbar: 1.0 }
    }

    pub fn with_mu(mut self, mu: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::InvalidParams(format!("mu must be finite, got {mu}")));
        }
        self.mu = mu;
        Ok(self)
    }

    pub fn with_hbar(mut self, hbar: f64) -> Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::InvalidParams(format!("hbar must be finite and > 0, got {hbar}")));
        }
        self.hbar = hbar;
        Ok(self)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Q = q / p.
    pub fn ratio(&self) -> f64 {
        self.q / self.p
    }

    /// ln Q, accurate near Q = 1.
    pub fn ln_ratio(&self) -> f64 {
        ((self.q - self.p) / self.p).ln_1p()
    }

    pub fn is_degenerate(&self) -> bool {
        (self.q - self.p).abs() / self.p.max(self.q) < DEGENERATE_EPS
    }

    /// Q^x, refusing exponents whose magnitude would leave f64 range.
    pub fn ratio_pow(&self, x: f64) -> Result<f64> {
        let magnitude = (x * self.ln_ratio()).abs();
        if !(magnitude <= EXPONENT_LIMIT) {
            return Err(Error::ExponentOverflow { magnitude, limit: EXPONENT_LIMIT });
        }
        Ok(self.ratio().powf(x))
    }
}

impl Default for DeformationParams {
    fn default() -> Self {
        Self::undeformed()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_is_q_over_p() {
        let params = DeformationParams::new(1.1, 0.9).unwrap();
        assert_eq!(params.ratio(), 0.9 / 1.1);
        assert!((params.ln_ratio() - (0.9f64 / 1.1).ln()).abs() < 1e-15);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(DeformationParams::new(0.0, 1.0).is_err());
        assert!(DeformationParams::new(1.0, -2.0).is_err());
        assert!(DeformationParams::new(f64::NAN, 1.0).is_err());
        assert!(DeformationParams::undeformed().with_hbar(0.0).is_err());
    }

    #[test]
    fn degeneracy_threshold() {
        assert!(DeformationParams::new(1.0, 1.0 + 1e-10).unwrap().is_degenerate());
        assert!(!DeformationParams::new(1.0, 1.0 + 1e-8).unwrap().is_degenerate());
    }

    #[test]
    fn ratio_pow_guards_overflow() {
        let params = DeformationParams::new(1.0, 2.0).unwrap();
        assert_eq!(params.ratio_pow(3.0).unwrap(), 8.0);
        assert!(matches!(params.ratio_pow(2000.0), Err(Error::ExponentOverflow { .. })));
        assert_eq!(DeformationParams::undeformed().ratio_pow(1e9).unwrap(), 1.0);
    }
}

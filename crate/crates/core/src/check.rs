use serde::Serialize;

/// Result of one identity check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    #[serde(skip)]
    pub margin: usize,
    pub pass: bool,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64, margin: usize) -> Self {
        Self {
            name: name.into(),
            residual,
            tolerance,
            margin,
            // NaN fails
            pass: residual <= tolerance,
        }
    }

    /// Same check judged against a different tolerance.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.pass = self.residual <= tolerance;
        self
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

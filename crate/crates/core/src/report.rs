use serde::Serialize;

/// Result of one numerical check: a residual compared against a tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Residual {
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Where the maximum was attained, if anywhere.
    pub worst: Option<String>,
    /// Number of instances inspected.
    pub instances: usize,
}

impl Residual {
    pub fn new(residual: f64, tolerance: f64, worst: Option<String>, instances: usize) -> Self {
        Residual {
            residual,
            tolerance,
            pass: residual <= tolerance,
            worst,
            instances,
        }
    }

    /// Same residual judged against another tolerance.
    pub fn with_tolerance(&self, tolerance: f64) -> Self {
        Residual {
            tolerance,
            pass: self.residual <= tolerance,
            ..self.clone()
        }
    }
}

/// Running maximum that remembers where it was attained.
#[derive(Debug, Clone, Default)]
pub(crate) struct MaxTracker {
    pub value: f64,
    pub at: Option<String>,
    pub count: usize,
}

impl MaxTracker {
    pub fn observe(&mut self, v: f64, at: impl FnOnce() -> String) {
        self.count += 1;
        // NaN must never hide behind a smaller finite residual.
        if v > self.value || v.is_nan() && !self.value.is_nan() || self.at.is_none() && v >= self.value {
            self.value = v;
            self.at = Some(at());
        }
    }

    pub fn finish(self, tol: f64) -> Residual {
        let value = if self.value.is_nan() { f64::INFINITY } else { self.value };
        Residual::new(value, tol, self.at, self.count)
    }
}

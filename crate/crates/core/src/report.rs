use std::fmt;

/// Outcome of a seeded property run, printed as `key: value` lines.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyReport {
    pub name: String,
    pub trials: usize,
    pub seed: u64,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub counterexample: Option<String>,
}

impl PropertyReport {
    pub fn new(name: impl Into<String>, seed: u64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            trials: 0,
            seed,
            max_residual: 0.0,
            tolerance,
            pass: true,
            counterexample: None,
        }
    }

    /// Records one trial. A residual above tolerance (or NaN) fails the report
    /// and keeps the first offending instance.
    pub fn record(&mut self, residual: f64, instance: impl FnOnce() -> String) {
        self.trials += 1;
        if residual.is_nan() || residual > self.max_residual {
            self.max_residual = if residual.is_nan() { f64::INFINITY } else { residual };
        }
        if !(residual <= self.tolerance) {
            self.pass = false;
            if self.counterexample.is_none() {
                self.counterexample = Some(instance());
            }
        }
    }

    /// Records a trial that could not be evaluated at all.
    pub fn record_error(&mut self, message: impl fmt::Display, instance: impl FnOnce() -> String) {
        self.trials += 1;
        self.max_residual = f64::INFINITY;
        self.pass = false;
        if self.counterexample.is_none() {
            self.counterexample = Some(format!("{} ({message})", instance()));
        }
    }
}

impl fmt::Display for PropertyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "name: {}", self.name)?;
        writeln!(f, "trials: {}", self.trials)?;
        writeln!(f, "seed: {}", self.seed)?;
        writeln!(f, "max_residual: {:e}", self.max_residual)?;
        writeln!(f, "tolerance: {:e}", self.tolerance)?;
        writeln!(f, "pass: {}", self.pass)?;
        if let Some(c) = &self.counterexample {
            writeln!(f, "counterexample: {c}")?;
        }
        Ok(())
    }
}

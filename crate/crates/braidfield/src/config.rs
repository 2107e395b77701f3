//! Pipeline configuration shared by the CLI and the library entry points.

use crate::error::{Error, Result};

/// Tolerances and densities for the whole pipeline.
#[derive(Debug, Clone)]
pub struct Config {
    /// Relative pruning / cancellation tolerance.
    pub tol: f64,
    /// Crossing-scan density multiplier (samples = grid * strands).
    pub grid: usize,
    /// Verification t-samples around the circle.
    pub samples: usize,
    /// Fixed amplitude scale; `None` searches by halving.
    pub lambda: Option<f64>,
    /// Seed for randomized property tests.
    pub seed: u64,
    /// Braid repeat count applied before assembly.
    pub repeat: u32,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            tol: 1e-9,
            grid: 4096,
            samples: 512,
            lambda: None,
            seed: 0,
            repeat: 1,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol <= 1e-3) {
            return Err(Error::InvalidConfig(format!(
                "tol must lie in (0, 1e-3], got {}",
                self.tol
            )));
        }
        if self.samples < 64 {
            return Err(Error::InvalidConfig(format!(
                "samples must be at least 64, got {}",
                self.samples
            )));
        }
        if self.grid == 0 {
            return Err(Error::InvalidConfig("grid must be positive".into()));
        }
        if self.repeat == 0 {
            return Err(Error::InvalidConfig("repeat must be at least 1".into()));
        }
        if let Some(l) = self.lambda {
            if !(l > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "lambda must be positive, got {l}"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        Config::default().validate().unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        let mut c = Config::default();
        c.tol = 0.1;
        assert!(c.validate().is_err());
        let mut c = Config::default();
        c.samples = 10;
        assert!(c.validate().is_err());
        let mut c = Config::default();
        c.repeat = 0;
        assert!(c.validate().is_err());
    }
}

//! Centralized numerical tolerances.
//!
//! Every "≤ 1" or "⪰ 0" test in the crate goes through one of these numbers.
//! Predicates report the raw margin next to the verdict so callers can see how
//! close a decision was.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for equalities of matrices measured in operator norm.
pub const EQ_TOL: f64 = 1e-9;
/// Allowed magnitude of a negative eigenvalue in a positivity test.
pub const PSD_SLACK: f64 = 1e-7;
/// Stopping tolerance of fixed-point iterations.
pub const ITER_TOL: f64 = 1e-10;
pub const MAX_ITER: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub eq_tol: f64,
    pub psd_slack: f64,
    pub iter_tol: f64,
    pub max_iter: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eq_tol: EQ_TOL,
            psd_slack: PSD_SLACK,
            iter_tol: ITER_TOL,
            max_iter: MAX_ITER,
        }
    }
}

impl Tolerances {
    pub fn new(eq_tol: f64, psd_slack: f64, iter_tol: f64, max_iter: usize) -> Result<Self> {
        let t = Self {
            eq_tol,
            psd_slack,
            iter_tol,
            max_iter,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [self.eq_tol, self.psd_slack, self.iter_tol]
            .iter()
            .all(|v| v.is_finite() && *v > 0.0);
        if !positive || self.max_iter == 0 {
            return Err(Error::InvalidInput(
                "tolerances must be strictly positive".into(),
            ));
        }
        if self.psd_slack < self.eq_tol {
            return Err(Error::InvalidInput(format!(
                "psd_slack ({:e}) must be at least eq_tol ({:e})",
                self.psd_slack, self.eq_tol
            )));
        }
        Ok(())
    }

    /// Nonnegativity up to `psd_slack`.
    pub fn nonneg(&self, margin: f64) -> Verdict {
        Verdict {
            holds: margin >= -self.psd_slack,
            margin,
        }
    }
}

/// A predicate outcome together with the number it was decided on.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub holds: bool,
    pub margin: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        Tolerances::default().validate().unwrap();
    }

    #[test]
    fn slack_below_eq_tol_is_rejected() {
        assert!(Tolerances::new(1e-6, 1e-8, 1e-10, 10).is_err());
        assert!(Tolerances::new(0.0, 1e-7, 1e-10, 10).is_err());
        assert!(Tolerances::new(1e-9, 1e-7, 1e-10, 0).is_err());
    }
}

//! Code-length and floating-point error bookkeeping.
//!
//! A finite address of length `M` pins a point down to within
//! `c^(M+1) / (1 - c)` where `c` is the largest contraction factor of the
//! coding system; `M` is chosen so this is below half the sample pitch. The
//! expanding masked dynamical system amplifies rounding error by its
//! expansion factor `d` each step, `δ ↦ d·δ + u`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::system::IfsSystem;

pub const DEFAULT_UNIT_ROUNDOFF: f64 = 1e-15;

/// Smallest `M >= 0` with `c^(M+1) / (1 - c) < eps / 2`.
pub fn code_length(c: f64, eps: f64) -> Result<usize> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::ContractionOutOfRange(c));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidPitch(eps));
    }
    let holds = |m: usize| c.powi(m as i32 + 1) / (1.0 - c) < eps / 2.0;
    // Solve in logs, then settle the rounding at the edge exactly.
    let estimate = ((eps / 2.0 * (1.0 - c)).ln() / c.ln() - 1.0).floor();
    let mut m = if estimate.is_finite() && estimate > 0.0 {
        estimate as usize
    } else {
        0
    };
    while m > 0 && holds(m - 1) {
        m -= 1;
    }
    while !holds(m) {
        m += 1;
    }
    Ok(m)
}

/// `δ_n` of the recurrence `δ_0 = u`, `δ_{j+1} = d·δ_j + u`.
pub fn error_budget(expansion: f64, n_iters: usize, unit_roundoff: f64) -> f64 {
    (0..n_iters).fold(unit_roundoff, |delta, _| expansion * delta + unit_roundoff)
}

/// How long addresses are and how much orbit error a job may tolerate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrecisionPolicy {
    /// Sample pitch of the target grid.
    pub epsilon: f64,
    /// Fixed code length; derived from `epsilon` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub code_length: Option<usize>,
    #[serde(default = "default_roundoff")]
    pub unit_roundoff: f64,
    /// Largest acceptable orbit error; defaults to `epsilon / 2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_error_budget: Option<f64>,
    /// Stop each address once the accumulated contraction of the coding
    /// system guarantees the pitch, instead of always using `M` symbols.
    #[serde(default)]
    pub adaptive: bool,
}

fn default_roundoff() -> f64 {
    DEFAULT_UNIT_ROUNDOFF
}

impl PrecisionPolicy {
    pub fn for_pitch(epsilon: f64) -> Self {
        PrecisionPolicy {
            epsilon,
            code_length: None,
            unit_roundoff: DEFAULT_UNIT_ROUNDOFF,
            max_error_budget: None,
            adaptive: false,
        }
    }

    /// Pitch of a raster with the given extents (the finest axis wins).
    pub fn for_grid(extents: &[usize]) -> Self {
        let n = extents.iter().copied().max().unwrap_or(1).max(1);
        Self::for_pitch(1.0 / n as f64)
    }

    pub fn with_code_length(mut self, m: Option<usize>) -> Self {
        self.code_length = m;
        self
    }

    /// Fixes `M` for the pair and checks the orbit error against the budget.
    /// `tgt` is reverse-iterated, `src` forward-coded.
    pub fn resolve<const D: usize>(
        &self,
        tgt: &IfsSystem<D>,
        src: &IfsSystem<D>,
    ) -> Result<Resolved> {
        let derived = code_length(src.contraction(), self.epsilon)?;
        let m = self.code_length.unwrap_or(derived);
        let expansion = tgt.expansion();
        let budget = error_budget(expansion, m, self.unit_roundoff);
        let max = self.max_error_budget.unwrap_or(self.epsilon / 2.0);
        if budget > max {
            return Err(Error::ErrorBudgetExceeded {
                budget,
                max,
                expansion,
                code_length: m,
            });
        }
        Ok(Resolved {
            code_length: m,
            derived_code_length: derived,
            epsilon: self.epsilon,
            error_budget: budget,
            adaptive: self.adaptive,
            src_contraction: src.contraction(),
        })
    }
}

/// A policy bound to a concrete pair of systems.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Resolved {
    pub code_length: usize,
    pub derived_code_length: usize,
    pub epsilon: f64,
    pub error_budget: f64,
    pub adaptive: bool,
    pub src_contraction: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn code_length_examples() {
        assert_eq!(code_length(0.5, 1.0 / 512.0).unwrap(), 11);
        assert_eq!(code_length(0.5, 1.0 / 128.0).unwrap(), 9);
        assert_eq!(code_length(0.5, 4.0).unwrap(), 0);
    }

    #[test]
    fn code_length_rejects_non_contractive() {
        assert!(matches!(code_length(1.0, 0.01), Err(Error::ContractionOutOfRange(_))));
        assert!(matches!(code_length(1.5, 0.01), Err(Error::ContractionOutOfRange(_))));
        assert!(matches!(code_length(0.5, 0.0), Err(Error::InvalidPitch(_))));
    }

    #[test]
    fn error_budget_examples() {
        let d = error_budget(4.0, 20, 1e-15);
        assert!((d - 1.47e-3).abs() / 1.47e-3 < 0.01, "{d}");
        assert!((error_budget(2.0, 1, 1e-15) - 3e-15).abs() < 1e-30);
        assert_eq!(error_budget(7.0, 0, 1e-15), 1e-15);
    }

    #[test]
    fn policy_rejects_runaway_orbits() {
        use crate::families::family_quad2d;
        let tgt = family_quad2d(0.1, 0.1).unwrap();
        let src = family_quad2d(0.5, 0.5).unwrap();
        let policy = PrecisionPolicy::for_pitch(1e-4).with_code_length(Some(40));
        assert!(matches!(
            policy.resolve(&tgt, &src),
            Err(Error::ErrorBudgetExceeded { .. })
        ));
    }

    #[test]
    fn policy_reports_derived_length() {
        use crate::families::family_quad2d;
        let sys = family_quad2d(0.5, 0.5).unwrap();
        let r = PrecisionPolicy::for_grid(&[256, 256])
            .with_code_length(Some(14))
            .resolve(&sys, &sys)
            .unwrap();
        assert_eq!(r.derived_code_length, 10);
        assert_eq!(r.code_length, 14);
    }
}

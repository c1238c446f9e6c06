//! Dense small-scale LP and projection kernels, plus the global tolerance
//! policy every other module builds on.

mod lp;
mod project;

pub use lp::{solve_lp, FarkasCertificate, LpProblem, LpResult};
pub use project::{project_onto_vset, Projection};

use serde::{Deserialize, Serialize};

/// Global tolerance policy.
///
/// `feas_tol` is the slack allowed on feasibility/membership comparisons,
/// `opt_tol` the optimality gap for the solvers, and `strict_margin` the
/// minimum margin required before a strict ("open set", "int K") comparison
/// is accepted. Strict comparisons must clear a larger bar than closed ones
/// so that open/closed distinctions stay decidable in floating point.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Tolerance {
    pub feas_tol: f64,
    pub opt_tol: f64,
    pub strict_margin: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            feas_tol: 1e-9,
            opt_tol: 1e-10,
            strict_margin: 1e-7,
        }
    }
}

impl Tolerance {
    pub fn validate(&self) -> crate::Result<()> {
        if !(self.feas_tol > 0.0 && self.opt_tol > 0.0 && self.strict_margin > 0.0) {
            return Err(crate::Error::InvalidValue(
                "tolerances must be strictly positive".into(),
            ));
        }
        if self.strict_margin < self.feas_tol {
            return Err(crate::Error::InvalidValue(
                "strict_margin must be >= feas_tol".into(),
            ));
        }
        Ok(())
    }

    /// Uniform feasibility scale: feas_tol relative to a magnitude estimate.
    pub fn feas_scaled(&self, magnitude: f64) -> f64 {
        self.feas_tol * (1.0 + magnitude.abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_tolerance_is_valid() {
        assert!(Tolerance::default().validate().is_ok());
    }

    #[test]
    fn strict_margin_below_feas_rejected() {
        let t = Tolerance {
            feas_tol: 1e-6,
            opt_tol: 1e-10,
            strict_margin: 1e-7,
        };
        assert!(t.validate().is_err());
    }
}

//! Parametric probability-of-default models and the weighted ridge solver.
//!
//! | link      | PD(x)                 |
//! |-----------|-----------------------|
//! | identity  | xᵀβ (unbounded)       |
//! | logit     | exp(xᵀβ)/(1+exp(xᵀβ)) |
//! | probit    | Φ(xᵀβ)                |

mod glm;
pub mod normal;
mod ridge;

pub use glm::{fit_glm, odds_ratios, FitConfig, GlmModel, GlmObjective, Link};
pub use ridge::{fit_ridge, RidgeModel};

use nalgebra::{DMatrix, DVector};

/// Solves `A x = b` for symmetric positive definite `A`, returning the
/// solution and `A⁻¹`. `None` when `A` is numerically singular.
pub(crate) fn solve_spd(a: DMatrix<f64>, b: &DVector<f64>) -> Option<(DVector<f64>, DMatrix<f64>)> {
    let chol = a.cholesky()?;
    let diag = chol.l_dirty().diagonal();
    let max = diag.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let min = diag.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if !(min > 0.0) || (min / max).powi(2) < 1e-14 {
        return None;
    }
    Some((chol.solve(b), chol.inverse()))
}

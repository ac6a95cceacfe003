use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::solve_spd;
use crate::metrics;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RidgeModel {
    /// Intercept first; the intercept is never penalized.
    pub coefficients: Vec<f64>,
    pub lambda: f64,
    /// Weighted coefficient of determination on the fitting data.
    pub r_squared: f64,
}

impl RidgeModel {
    pub fn predict(&self, x: &[f64]) -> f64 {
        self.coefficients[0] + x.iter().zip(&self.coefficients[1..]).map(|(a, b)| a * b).sum::<f64>()
    }

    pub fn intercept(&self) -> f64 {
        self.coefficients[0]
    }

    pub fn slopes(&self) -> &[f64] {
        &self.coefficients[1..]
    }
}

/// Minimizes `Σᵢ wᵢ (yᵢ − β₀ − xᵢᵀβ)² + λ‖β‖²` in closed form.
///
/// The intercept is profiled out by weighted centering, which leaves the
/// penalized normal equations `(X̃ᵀWX̃ + λI) β = X̃ᵀW ỹ` on centered data and
/// `β₀ = ȳ − x̄ᵀβ`. `features` is row-major with `n_features` columns.
pub fn fit_ridge(
    features: &[f64],
    n_features: usize,
    response: &[f64],
    weights: &[f64],
    lambda: f64,
) -> Result<RidgeModel> {
    let n = response.len();
    let p = n_features;
    if features.len() != n * p {
        return Err(Error::DimensionMismatch {
            expected: n * p,
            actual: features.len(),
        });
    }
    if weights.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: weights.len(),
        });
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("lambda must be finite and ≥ 0, got {lambda}")));
    }
    if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
        return Err(Error::InvalidArgument("weights must be finite and nonnegative".into()));
    }
    if response.iter().any(|y| !y.is_finite()) {
        return Err(Error::NonFinite("ridge response".into()));
    }
    let positive = weights.iter().filter(|&&w| w > 0.0).count();
    if positive < p + 1 {
        return Err(Error::InvalidArgument(format!(
            "need at least {} positive weights, got {positive}",
            p + 1
        )));
    }

    let row = |i: usize| &features[i * p..(i + 1) * p];
    let w_sum: f64 = weights.iter().sum();
    let mut x_mean = vec![0.0; p];
    let mut y_mean = 0.0;
    for i in 0..n {
        let w = weights[i];
        for (m, x) in x_mean.iter_mut().zip(row(i)) {
            *m += w * x;
        }
        y_mean += w * response[i];
    }
    x_mean.iter_mut().for_each(|m| *m /= w_sum);
    y_mean /= w_sum;

    let mut gram = DMatrix::<f64>::zeros(p, p);
    let mut rhs = DVector::<f64>::zeros(p);
    let mut xc = vec![0.0; p];
    for i in 0..n {
        let w = weights[i];
        if w == 0.0 {
            continue;
        }
        for (c, (x, m)) in xc.iter_mut().zip(row(i).iter().zip(&x_mean)) {
            *c = x - m;
        }
        let yc = response[i] - y_mean;
        for a in 0..p {
            let wa = w * xc[a];
            rhs[a] += wa * yc;
            for b in 0..=a {
                gram[(a, b)] += wa * xc[b];
            }
        }
    }
    gram.fill_upper_triangle_with_lower_triangle();
    for a in 0..p {
        gram[(a, a)] += lambda;
    }

    let slopes: Vec<f64> = if p == 0 {
        Vec::new()
    } else {
        solve_spd(gram, &rhs)
            .ok_or_else(|| Error::Singular("penalized weighted normal equations".into()))?
            .0
            .iter()
            .copied()
            .collect()
    };
    let intercept = y_mean - x_mean.iter().zip(&slopes).map(|(m, b)| m * b).sum::<f64>();
    let mut coefficients = Vec::with_capacity(p + 1);
    coefficients.push(intercept);
    coefficients.extend(slopes);

    let mut model = RidgeModel {
        coefficients,
        lambda,
        r_squared: 0.0,
    };
    let fitted: Vec<f64> = (0..n).map(|i| model.predict(row(i))).collect();
    model.r_squared = match metrics::r_squared(&fitted, response, weights) {
        Ok(r2) => r2,
        // constant response: perfect if reproduced exactly
        Err(_) => {
            let sse: f64 = (0..n).map(|i| weights[i] * (fitted[i] - response[i]).powi(2)).sum();
            if sse <= 1e-24 * w_sum.max(1.0) {
                1.0
            } else {
                0.0
            }
        }
    };
    Ok(model)
}

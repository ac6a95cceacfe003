use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::normal::{inv_mills, ln_norm_cdf, norm_cdf};
use super::solve_spd;
use crate::dataset::Dataset;
use crate::{sigmoid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Link {
    Identity,
    Logit,
    Probit,
}

impl Link {
    /// Maps a linear predictor to a PD.
    pub fn inverse(self, eta: f64) -> f64 {
        match self {
            Link::Identity => eta,
            Link::Logit => sigmoid(eta),
            Link::Probit => norm_cdf(eta),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Link::Identity => "identity",
            Link::Logit => "logit",
            Link::Probit => "probit",
        }
    }
}

impl std::str::FromStr for Link {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" | "linear" => Ok(Link::Identity),
            "logit" | "logistic" => Ok(Link::Logit),
            "probit" => Ok(Link::Probit),
            other => Err(Error::InvalidArgument(format!("unknown link {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub max_iterations: usize,
    /// Convergence threshold on the largest absolute coefficient change.
    pub tolerance: f64,
    pub step_halvings: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            tolerance: 1e-8,
            step_halvings: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlmModel {
    pub link: Link,
    pub feature_names: Vec<String>,
    /// Intercept first, then one coefficient per feature.
    pub coefficients: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    /// Maximized log-likelihood; residual sum of squares for the identity link.
    pub final_log_likelihood: f64,
    /// Log-likelihood after each accepted Newton step (starting point first).
    pub log_likelihood_trace: Vec<f64>,
    /// From the inverse observed information; `None` when not estimable.
    pub standard_errors: Option<Vec<f64>>,
}

impl GlmModel {
    pub fn n_features(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn linear_predictor(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n_features() {
            return Err(Error::DimensionMismatch {
                expected: self.n_features(),
                actual: x.len(),
            });
        }
        Ok(self.coefficients[0] + x.iter().zip(&self.coefficients[1..]).map(|(a, b)| a * b).sum::<f64>())
    }

    /// PD at `x`. Unclipped for the identity link.
    pub fn predict_pd(&self, x: &[f64]) -> Result<f64> {
        self.linear_predictor(x).map(|eta| self.link.inverse(eta))
    }
}

/// `exp(βⱼ)` for each non-intercept coefficient of a logit model: the factor
/// by which the odds `P(Y=1|x)/P(Y=0|x)` change when feature `j` rises by one
/// unit with the other features held fixed.
pub fn odds_ratios(model: &GlmModel) -> Result<Vec<f64>> {
    if model.link != Link::Logit {
        return Err(Error::WrongLink(model.link.name().into()));
    }
    Ok(model.coefficients[1..].iter().map(|b| b.exp()).collect())
}

/// Bernoulli log-likelihood of a logit or probit model, with analytic
/// gradient and observed information.
pub struct GlmObjective<'a> {
    data: &'a Dataset,
    link: Link,
}

impl<'a> GlmObjective<'a> {
    pub fn new(data: &'a Dataset, link: Link) -> Result<Self> {
        if link == Link::Identity {
            return Err(Error::InvalidArgument("identity link has no likelihood objective".into()));
        }
        Ok(Self { data, link })
    }

    fn eta(&self, beta: &[f64], x: &[f64]) -> f64 {
        beta[0] + x.iter().zip(&beta[1..]).map(|(a, b)| a * b).sum::<f64>()
    }

    fn point_ll(&self, y: u8, eta: f64) -> f64 {
        match self.link {
            Link::Logit => {
                let softplus = eta.max(0.0) + (-eta.abs()).exp().ln_1p();
                if y == 1 {
                    eta - softplus
                } else {
                    -softplus
                }
            }
            Link::Probit => {
                if y == 1 {
                    ln_norm_cdf(eta)
                } else {
                    ln_norm_cdf(-eta)
                }
            }
            Link::Identity => unreachable!(),
        }
    }

    /// First derivative and negated second derivative of the per-point
    /// log-likelihood with respect to the linear predictor.
    fn point_derivatives(&self, y: u8, eta: f64) -> (f64, f64) {
        match self.link {
            Link::Logit => (y as f64 - sigmoid(eta), sigmoid(eta) * sigmoid(-eta)),
            Link::Probit => {
                if y == 1 {
                    let l = inv_mills(eta);
                    (l, l * (eta + l))
                } else {
                    let l = inv_mills(-eta);
                    (-l, l * (-eta + l))
                }
            }
            Link::Identity => unreachable!(),
        }
    }

    pub fn value(&self, beta: &[f64]) -> f64 {
        self.data
            .rows()
            .zip(self.data.target())
            .map(|(x, &y)| self.point_ll(y, self.eta(beta, x)))
            .sum()
    }

    pub fn gradient(&self, beta: &[f64]) -> Vec<f64> {
        self.gradient_and_information(beta).0.iter().copied().collect()
    }

    /// Gradient and `−∇²ℓ`.
    pub fn gradient_and_information(&self, beta: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
        let k = beta.len();
        let mut g = DVector::zeros(k);
        let mut info = DMatrix::zeros(k, k);
        let mut xa = vec![1.0; k];
        for (x, &y) in self.data.rows().zip(self.data.target()) {
            xa[1..].copy_from_slice(x);
            let (d, w) = self.point_derivatives(y, self.eta(beta, x));
            for a in 0..k {
                g[a] += d * xa[a];
                let wa = w * xa[a];
                for b in 0..=a {
                    info[(a, b)] += wa * xa[b];
                }
            }
        }
        info.fill_upper_triangle_with_lower_triangle();
        (g, info)
    }

    /// Smallest `|y − PD|` over the data: zero up to rounding once some
    /// observation is fitted perfectly.
    fn min_residual(&self, beta: &[f64]) -> f64 {
        self.data
            .rows()
            .zip(self.data.target())
            .map(|(x, &y)| (y as f64 - self.link.inverse(self.eta(beta, x))).abs())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Coefficient magnitude beyond which the fit is declared separated.
const SEPARATION_GUARD: f64 = 1e8;
/// Log-likelihood gain per unit of step norm treated as machine noise.
const STALL_GAIN: f64 = 1e-10;
/// A step this large is not a convergence tail.
const STALL_STEP: f64 = 1e-3;
/// `|y − PD|` below this counts as a saturated fit.
const SATURATED: f64 = 1e-8;

/// Fits a probability-of-default model.
///
/// The identity link is ordinary least squares on the normal equations. Logit
/// and probit maximize the Bernoulli log-likelihood by Newton–Raphson with
/// step-halving, so accepted iterations never lower the likelihood. A fit whose
/// coefficients run away while the likelihood creeps towards zero is reported
/// as [`Error::Separation`], not as mere non-convergence.
pub fn fit_glm(data: &Dataset, link: Link, config: &FitConfig) -> Result<GlmModel> {
    if config.max_iterations == 0 || !(config.tolerance > 0.0) {
        return Err(Error::InvalidArgument("max_iterations ≥ 1 and tolerance > 0 required".into()));
    }
    let k = data.n_features() + 1;
    if data.n_rows() < k {
        return Err(Error::InvalidArgument(format!(
            "need at least {k} rows to fit {k} coefficients, got {}",
            data.n_rows()
        )));
    }
    match link {
        Link::Identity => fit_ols(data),
        _ => {
            data.require_both_classes()?;
            fit_newton(data, link, config)
        }
    }
}

fn fit_ols(data: &Dataset) -> Result<GlmModel> {
    let k = data.n_features() + 1;
    let mut xtx = DMatrix::zeros(k, k);
    let mut xty = DVector::zeros(k);
    let mut xa = vec![1.0; k];
    for (x, &y) in data.rows().zip(data.target()) {
        xa[1..].copy_from_slice(x);
        for a in 0..k {
            xty[a] += xa[a] * y as f64;
            for b in 0..=a {
                xtx[(a, b)] += xa[a] * xa[b];
            }
        }
    }
    xtx.fill_upper_triangle_with_lower_triangle();
    let (beta, inv) = solve_spd(xtx, &xty).ok_or_else(|| Error::Singular("XᵀX is not invertible".into()))?;
    let coefficients: Vec<f64> = beta.iter().copied().collect();
    let rss: f64 = data
        .rows()
        .zip(data.target())
        .map(|(x, &y)| {
            let fit = coefficients[0] + x.iter().zip(&coefficients[1..]).map(|(a, b)| a * b).sum::<f64>();
            (y as f64 - fit).powi(2)
        })
        .sum();
    let dof = data.n_rows() - k;
    let standard_errors = (dof > 0).then(|| {
        let sigma2 = rss / dof as f64;
        (0..k).map(|i| (sigma2 * inv[(i, i)]).sqrt()).collect()
    });
    Ok(GlmModel {
        link: Link::Identity,
        feature_names: data.feature_names().to_vec(),
        coefficients,
        converged: true,
        iterations: 1,
        final_log_likelihood: rss,
        log_likelihood_trace: Vec::new(),
        standard_errors,
    })
}

fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn fit_newton(data: &Dataset, link: Link, config: &FitConfig) -> Result<GlmModel> {
    let objective = GlmObjective::new(data, link)?;
    let k = data.n_features() + 1;
    let mut beta = vec![0.0; k];
    let mut ll = objective.value(&beta);
    let mut trace = vec![ll];
    let mut converged = false;
    let mut iterations = 0;

    while iterations < config.max_iterations {
        iterations += 1;
        let (g, info) = objective.gradient_and_information(&beta);
        let step = match solve_spd(info, &g) {
            Some((s, _)) => s,
            None if iterations == 1 => {
                return Err(Error::Singular("information matrix is singular at the start".into()))
            }
            // saturated weights after progress: the likelihood has no finite maximizer
            None => {
                return Err(Error::Separation {
                    iterations,
                    max_coefficient: max_abs(beta.iter().copied()),
                })
            }
        };

        if max_abs(step.iter().copied()) < config.tolerance {
            let candidate: Vec<f64> = beta.iter().zip(step.iter()).map(|(b, s)| b + s).collect();
            let cand_ll = objective.value(&candidate);
            if cand_ll >= ll {
                beta = candidate;
                ll = cand_ll;
                trace.push(ll);
            }
            converged = true;
            break;
        }

        let mut scale = 1.0;
        let mut accepted = None;
        for _ in 0..=config.step_halvings {
            let candidate: Vec<f64> = beta.iter().zip(step.iter()).map(|(b, s)| b + scale * s).collect();
            let cand_ll = objective.value(&candidate);
            if cand_ll.is_finite() && cand_ll >= ll {
                accepted = Some((candidate, cand_ll));
                break;
            }
            scale *= 0.5;
        }
        let Some((candidate, cand_ll)) = accepted else {
            break;
        };
        let applied = scale * step.norm();
        let gain = cand_ll - ll;
        beta = candidate;
        ll = cand_ll;
        trace.push(ll);

        let runaway = max_abs(beta.iter().copied()) > SEPARATION_GUARD;
        let stalled = scale * max_abs(step.iter().copied()) > STALL_STEP
            && gain < STALL_GAIN * applied
            && objective.min_residual(&beta) < SATURATED;
        if runaway || stalled {
            return Err(Error::Separation {
                iterations,
                max_coefficient: max_abs(beta.iter().copied()),
            });
        }
    }

    if beta.iter().any(|b| !b.is_finite()) {
        return Err(Error::NonFinite("coefficients".into()));
    }
    let (_, info) = objective.gradient_and_information(&beta);
    let standard_errors = solve_spd(info, &DVector::zeros(k))
        .map(|(_, inv)| (0..k).map(|i| inv[(i, i)].sqrt()).collect());
    Ok(GlmModel {
        link,
        feature_names: data.feature_names().to_vec(),
        coefficients: beta,
        converged,
        iterations,
        final_log_likelihood: ll,
        log_likelihood_trace: trace,
        standard_errors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(link: Link, coefficients: Vec<f64>) -> GlmModel {
        GlmModel {
            link,
            feature_names: (1..coefficients.len()).map(|j| format!("x{j}")).collect(),
            coefficients,
            converged: true,
            iterations: 0,
            final_log_likelihood: 0.0,
            log_likelihood_trace: vec![],
            standard_errors: None,
        }
    }

    #[test]
    fn closed_form_predictions() {
        let m = model(Link::Logit, vec![0.0, 0.0]);
        assert_eq!(m.predict_pd(&[123.0]).unwrap(), 0.5);
        let m = model(Link::Logit, vec![3f64.ln(), 0.0]);
        assert!((m.predict_pd(&[9.0]).unwrap() - 0.75).abs() < 1e-15);
        let m = model(Link::Probit, vec![0.0, 1.0]);
        assert_eq!(m.predict_pd(&[0.0]).unwrap(), 0.5);
        assert!((m.predict_pd(&[1.959964]).unwrap() - 0.975).abs() < 1e-6);
        let m = model(Link::Identity, vec![1.3, 0.0]);
        assert_eq!(m.predict_pd(&[5.0]).unwrap(), 1.3);
        assert!(matches!(m.predict_pd(&[1.0, 2.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn odds_ratio_values() {
        let m = model(Link::Logit, vec![0.4, 0.0, 2f64.ln()]);
        let or = odds_ratios(&m).unwrap();
        assert_eq!(or[0], 1.0);
        assert!((or[1] - 2.0).abs() < 1e-15);
        assert!(matches!(odds_ratios(&model(Link::Probit, vec![0.0, 1.0])), Err(Error::WrongLink(_))));
    }

    #[test]
    fn two_point_separation() {
        let d = Dataset::from_rows(vec![0.0, 1.0], vec![0, 1], vec!["x".into()]).unwrap();
        for link in [Link::Logit, Link::Probit] {
            let err = fit_glm(&d, link, &FitConfig::default()).unwrap_err();
            assert!(matches!(err, Error::Separation { .. }), "{link:?}: {err}");
        }
    }

    #[test]
    fn duplicated_column_is_singular() {
        let x: Vec<f64> = (0..20).flat_map(|i| [i as f64, i as f64]).collect();
        let y = (0..20).map(|i| u8::from(i % 3 == 0)).collect();
        let d = Dataset::from_rows(x, y, vec!["a".into(), "b".into()]).unwrap();
        for link in [Link::Identity, Link::Logit, Link::Probit] {
            assert!(matches!(fit_glm(&d, link, &FitConfig::default()), Err(Error::Singular(_))));
        }
    }

    #[test]
    fn ols_recovers_exact_line() {
        // y ∈ {0,1} only; use a design where the LS line is known: x = y
        let d = Dataset::from_rows(vec![0.0, 1.0, 0.0, 1.0], vec![0, 1, 0, 1], vec!["x".into()]).unwrap();
        let m = fit_glm(&d, Link::Identity, &FitConfig::default()).unwrap();
        assert!(m.coefficients[0].abs() < 1e-12 && (m.coefficients[1] - 1.0).abs() < 1e-12);
        assert!(m.final_log_likelihood < 1e-20);
    }

    #[test]
    fn identity_has_no_objective() {
        let d = Dataset::from_rows(vec![0.0], vec![0], vec!["x".into()]).unwrap();
        assert!(GlmObjective::new(&d, Link::Identity).is_err());
    }
}

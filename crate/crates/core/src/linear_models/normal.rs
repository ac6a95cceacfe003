//! Standard normal distribution functions.
//!
//! Everything is built on the scaled complementary error function
//! `erfcx(x) = exp(x²)·erfc(x)`, evaluated for `x ≥ 0` by the everywhere
//! positive series `erf(x) = 2/√π · e^{-x²} · Σ (2x²)ⁿ x / (2n+1)!!` below 2
//! and by the Laplace continued fraction above. Keeping the Gaussian factor
//! separate gives full relative accuracy far into the tails, which the probit
//! likelihood needs.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;
const SERIES_LIMIT: f64 = 2.0;

/// `exp(x²)·erfc(x)` for `x ≥ 0`.
fn erfcx_nonneg(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x < SERIES_LIMIT {
        let x2 = x * x;
        let mut term = x;
        let mut sum = x;
        let mut n = 0.0;
        while term > sum * 1e-17 {
            n += 1.0;
            term *= 2.0 * x2 / (2.0 * n + 1.0);
            sum += term;
        }
        x2.exp() - FRAC_2_SQRT_PI * sum
    } else {
        // modified Lentz on x + (1/2)/(x + 1/(x + (3/2)/(x + …)))
        let tiny = 1e-300;
        let mut f = x;
        let mut c = x;
        let mut d = 0.0;
        for k in 1..5000 {
            let a = k as f64 / 2.0;
            d = x + a * d;
            if d.abs() < tiny {
                d = tiny;
            }
            c = x + a / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = c * d;
            f *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        1.0 / (f * PI.sqrt())
    }
}

/// Standard normal density φ.
pub fn norm_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// Standard normal CDF Φ.
pub fn norm_cdf(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    let tail = |t: f64| 0.5 * (-0.5 * t * t).exp() * erfcx_nonneg(t * FRAC_1_SQRT_2);
    if z < 0.0 {
        tail(-z)
    } else {
        1.0 - tail(z)
    }
}

/// `ln Φ(z)`, accurate in the far lower tail where Φ underflows.
pub fn ln_norm_cdf(z: f64) -> f64 {
    if z < 0.0 {
        (0.5 * erfcx_nonneg(-z * FRAC_1_SQRT_2)).ln() - 0.5 * z * z
    } else {
        (-0.5 * (-0.5 * z * z).exp() * erfcx_nonneg(z * FRAC_1_SQRT_2)).ln_1p()
    }
}

/// Inverse Mills ratio `φ(z)/Φ(z)`.
pub fn inv_mills(z: f64) -> f64 {
    if z < 0.0 {
        (2.0 / PI).sqrt() / erfcx_nonneg(-z * FRAC_1_SQRT_2)
    } else {
        norm_pdf(z) / norm_cdf(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // 40-digit reference values for Φ and ln Φ.
    #[allow(clippy::excessive_precision, clippy::approx_constant)]
    const REFERENCE: &[(f64, f64, f64)] = &[
        (-38.0, 2.8854283600687843084e-316, -726.5572160188201301),
        (-20.0, 2.7536241186062336951e-89, -203.91715537109726394),
        (-8.5, 9.4795348222033183542e-18, -39.197396428217669289),
        (-5.0, 2.8665157187919391167e-7, -15.064998393988725736),
        (-3.0, 0.0013498980316300945267, -6.6077262215103495433),
        (-1.959964, 0.024999999096442404302, -3.6888794902562407839),
        (-1.0, 0.15865525393145705141, -1.8410216450092635058),
        (-0.3, 0.38208857781104736269, -0.96210281816885066774),
        (0.0, 0.5, -0.69314718055994530942),
        (0.25, 0.59870632568292372424, -0.51298407540943043213),
        (1.0, 0.84134474606854294859, -0.17275377902344988953),
        (1.959964, 0.9750000009035575957, -0.025317807057564136656),
        (2.5, 0.99379033467422386483, -0.006229025485860002381),
        (4.0, 0.99996832875816688008, -0.00003167174337748926386),
        (6.0, 0.99999999901341235496, -9.8658764552437573169e-10),
        (9.0, 0.99999999999999999989, -1.1285884059538406478e-19),
    ];

    #[test]
    fn cdf_matches_reference() {
        for &(z, cdf, ln_cdf) in REFERENCE {
            let got = norm_cdf(z);
            assert!((got - cdf).abs() <= 1e-15, "Φ({z}) = {got}, want {cdf}");
            if cdf > 1e-300 {
                assert!(((got - cdf) / cdf).abs() < 1e-12, "relative Φ({z})");
            }
            let got = ln_norm_cdf(z);
            assert!(((got - ln_cdf) / ln_cdf).abs() < 1e-12, "ln Φ({z}) = {got}, want {ln_cdf}");
        }
    }

    #[test]
    fn probit_quantile_example() {
        assert!((norm_cdf(1.959964) - 0.975).abs() < 1e-6);
        assert_eq!(norm_cdf(0.0), 0.5);
    }

    #[test]
    fn symmetric_and_monotone() {
        let mut prev = 0.0;
        for i in -400..=400 {
            let z = i as f64 / 40.0;
            let c = norm_cdf(z);
            assert!((c + norm_cdf(-z) - 1.0).abs() < 1e-15);
            if z < 8.0 {
                assert!(c > prev);
            } else {
                assert!(c >= prev);
            }
            prev = c;
        }
    }

    #[test]
    fn continuity_at_series_switch() {
        let x = SERIES_LIMIT;
        let below = erfcx_nonneg(x - 1e-12);
        let above = erfcx_nonneg(x);
        assert!((below - above).abs() < 1e-11);
    }

    #[test]
    fn mills_ratio_in_tails() {
        // φ(z)/Φ(z) ~ -z for z → -∞
        let z = -30.0;
        assert!((inv_mills(z) / -z - 1.0).abs() < 2e-3);
        assert!((inv_mills(0.0) - norm_pdf(0.0) / 0.5).abs() < 1e-15);
        assert!((inv_mills(-1.0) - norm_pdf(-1.0) / norm_cdf(-1.0)).abs() < 1e-14);
    }
}

mod oracles;

use crisk::metrics::{evaluate, gini_delta};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use oracles::pairwise_auc;

fn random_case(rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<u8>) {
    let n = rng.random_range(2..400);
    let levels = rng.random_range(1..20) as f64;
    let scores: Vec<f64> = (0..n).map(|_| (rng.random::<f64>() * levels).floor() / levels).collect();
    let mut target: Vec<u8> = (0..n).map(|_| u8::from(rng.random::<f64>() < 0.3)).collect();
    target[0] = 1;
    target[1] = 0;
    (scores, target)
}

#[test]
fn auc_matches_pairwise_count_with_ties() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..100 {
        let (s, y) = random_case(&mut rng);
        let r = evaluate(&s, &y).unwrap();
        assert!((r.auc - pairwise_auc(&s, &y)).abs() < 1e-12);
        assert_eq!(r.gini, 2.0 * r.auc - 1.0);
        assert_eq!(r.n_bad + r.n_good, s.len());
    }
}

#[test]
fn invariant_under_increasing_transforms() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..50 {
        let (s, y) = random_case(&mut rng);
        let base = evaluate(&s, &y).unwrap();
        let exp: Vec<f64> = s.iter().map(|v| (3.0 * v).exp()).collect();
        let affine: Vec<f64> = s.iter().map(|v| 2.0 * v - 7.0).collect();
        assert_eq!(evaluate(&exp, &y).unwrap(), base);
        assert_eq!(evaluate(&affine, &y).unwrap(), base);
        let flipped: Vec<f64> = s.iter().map(|v| -v).collect();
        assert!((evaluate(&flipped, &y).unwrap().gini + base.gini).abs() < 1e-12);
    }
}

#[test]
fn lorenz_curve_is_a_monotone_path_from_origin_to_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..50 {
        let (s, y) = random_case(&mut rng);
        let pts = evaluate(&s, &y).unwrap().lorenz_points;
        assert_eq!(pts[0], (0.0, 0.0));
        assert_eq!(*pts.last().unwrap(), (1.0, 1.0));
        assert!(pts.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 >= w[0].1));
    }
}

#[test]
fn gini_from_trapezoid_area() {
    // accuracy ratio: area between the curve and the diagonal over the same
    // area for a perfect model
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for _ in 0..50 {
        let (s, y) = random_case(&mut rng);
        let r = evaluate(&s, &y).unwrap();
        let area: f64 = r.lorenz_points.windows(2).map(|w| (w[1].0 - w[0].0) * (w[1].1 + w[0].1) / 2.0).sum();
        let bad = r.n_bad as f64 / s.len() as f64;
        let ar = (area - 0.5) / (0.5 * (1.0 - bad));
        assert!((ar - r.gini).abs() < 1e-9);
    }
}

#[test]
fn random_scores_have_gini_near_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let n = 200_000;
    let s: Vec<f64> = (0..n).map(|_| rng.random()).collect();
    let y: Vec<u8> = (0..n).map(|_| u8::from(rng.random::<f64>() < 0.03)).collect();
    let r = evaluate(&s, &y).unwrap();
    assert!(r.gini.abs() < 0.03);
    assert!(gini_delta(&r, &r) == 0.0);
}

use gpotts::critical::beta_c;
use gpotts::fuzzy::{c_factor, classify, q_infinity_row, SpinPartition};
use gpotts::model::ProbabilityVector;
use proptest::prelude::*;

fn two_class_row(x: f64, beta: f64, z: f64, part: &SpinPartition) -> f64 {
    let nu = ProbabilityVector::new(vec![1.0 - x, x]).unwrap();
    q_infinity_row(&nu, beta, z, part).unwrap().probabilities[1]
}

proptest! {
    #[test]
    fn rows_sum_to_one(
        sizes in prop::collection::vec(1usize..5, 2..5),
        w in prop::collection::vec(0.01f64..1.0, 4),
        z in 2.0f64..7.0,
        beta in 0.0f64..15.0,
    ) {
        let part = SpinPartition::new(sizes.clone()).unwrap();
        let w = &w[..sizes.len()];
        let total: f64 = w.iter().sum();
        let nu = ProbabilityVector::new(w.iter().map(|x| x / total).collect()).unwrap();
        if let Ok(row) = q_infinity_row(&nu, beta, z, &part) {
            let s: f64 = row.probabilities.as_slice().iter().sum();
            prop_assert!((s - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn lipschitz_below_threshold() {
    for (sizes, z) in [(vec![2, 3], 3.0), (vec![1, 4], 5.0), (vec![3, 3], 2.0)] {
        let q: usize = sizes.iter().sum();
        let part = SpinPartition::new(sizes).unwrap();
        let verdict = classify(1.0, q as f64, z, &part).unwrap();
        let beta = verdict.threshold_beta.map_or(5.0, |t| 0.8 * t);
        let max_jump = |steps: usize| {
            let vals: Vec<f64> = (0..=steps).map(|i| two_class_row(0.01 + 0.98 * i as f64 / steps as f64, beta, z, &part)).collect();
            vals.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max)
        };
        let (a, b, c) = (max_jump(200), max_jump(400), max_jump(800));
        assert!(b < 0.55 * a && c < 0.55 * b, "{a} {b} {c}");
    }
}

#[test]
fn subcritical_branch_continuous_up_to_beta_c() {
    for (r, z) in [(3usize, 2.0), (3, 3.0), (2, 5.0), (4, 4.5)] {
        let bc = beta_c(r as f64, z).unwrap().beta_c;
        let edge = r as f64 * (bc / (r as f64).powf(z - 1.0)).exp();
        let mut prev = f64::INFINITY;
        for j in 2..=8 {
            let gap = (c_factor(bc - 10f64.powi(-j), r, z).unwrap() - edge).abs();
            assert!(gap < prev);
            prev = gap;
        }
        assert!(prev < 1e-6);
    }
}

/// Positions where the row jumps, found by scanning a fine grid: a step whose
/// change dwarfs both neighbouring steps.
fn scan_jumps(beta: f64, z: f64, part: &SpinPartition) -> Vec<f64> {
    let n = 20_000;
    let xs: Vec<f64> = (1..n).map(|i| i as f64 / n as f64).collect();
    let vals: Vec<Option<f64>> = xs
        .iter()
        .map(|&x| {
            let nu = ProbabilityVector::new(vec![1.0 - x, x]).unwrap();
            q_infinity_row(&nu, beta, z, part).ok().map(|r| r.probabilities[1])
        })
        .collect();
    let d: Vec<f64> = vals.windows(2).map(|w| match (w[0], w[1]) {
        (Some(a), Some(b)) => (b - a).abs(),
        _ => f64::INFINITY,
    }).collect();
    let mut jumps = Vec::new();
    for i in 1..d.len() - 1 {
        if d[i] > 1e-6 && d[i] > 20.0 * d[i - 1].max(d[i + 1]) {
            jumps.push(0.5 * (xs[i] + xs[i + 1]));
        }
    }
    jumps
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn classify_agrees_with_scan(r1 in 1usize..6, r2 in 1usize..6, z in 2.0f64..6.0, frac in 0.2f64..2.5) {
        prop_assume!(r1 + r2 >= 3);
        let part = SpinPartition::new(vec![r1, r2]).unwrap();
        let q = (r1 + r2) as f64;
        let reference = classify(1.0, q, z, &part).unwrap();
        let beta = match reference.threshold_beta {
            Some(t) => frac * t,
            None => frac * 10.0,
        };
        if let Some(t) = reference.threshold_beta {
            prop_assume!((beta / t - 1.0).abs() > 0.02);
        }
        let verdict = classify(beta, q, z, &part).unwrap();
        let jumps = scan_jumps(beta, z, &part);
        prop_assert_eq!(!verdict.gibbs_at_beta, !verdict.discontinuities.is_empty());
        prop_assert_eq!(!verdict.gibbs_at_beta, !jumps.is_empty(), "verdict {:?} scan {:?}", verdict, jumps);
        // Every listed point shows up in the scan, in the coordinate of class 1.
        for d in &verdict.discontinuities {
            prop_assert!(d.nu < 1.0);
            let x = if d.class == 1 { d.nu } else { 1.0 - d.nu };
            prop_assert!(jumps.iter().any(|j| (j - x).abs() < 2e-4), "{:?} not in {:?}", d, jumps);
        }
    }
}

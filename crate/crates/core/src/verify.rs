//! Oracle suites comparing closed forms with exact or numerical references.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finite::{coupling_marginals, qn_exact_row, variance_identity_check};
use crate::fuzzy::{q_infinity_row, SpinPartition};
use crate::model::{k, k_double_prime, k_prime, ModelParams, ProbabilityVector};

/// Step of the central differences in the gradient suite.
pub const FD_STEP: f64 = 1e-6;

/// `(q, z, beta)` of the gradient suite.
pub const GRADIENT_POINTS: [(f64, f64, f64); 20] = [
    (2.0, 2.0, 0.5),
    (2.0, 3.0, 1.0),
    (2.0, 5.0, 4.0),
    (2.5, 2.0, 1.0),
    (3.0, 2.0, 1.0),
    (3.0, 3.0, 5.0),
    (3.0, 4.0, 0.5),
    (3.0, 6.0, 2.0),
    (4.0, 2.0, 0.7),
    (4.0, 3.5, 3.0),
    (5.0, 2.0, 2.0),
    (5.0, 4.0, 10.0),
    (6.0, 2.5, 1.5),
    (6.0, 5.0, 0.3),
    (7.5, 3.0, 0.8),
    (8.0, 2.0, 0.2),
    (2.0, 2.0, 0.0),
    (3.0, 2.0, 0.3),
    (10.0, 3.0, 1.0),
    (4.0, 6.0, 0.1),
];

pub const GRADIENT_U: [f64; 19] =
    [0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Marginal,
    Variance,
    KernelConvergence,
    Gradient,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Marginal, Suite::Variance, Suite::KernelConvergence, Suite::Gradient];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Marginal => "marginal",
            Suite::Variance => "variance",
            Suite::KernelConvergence => "kernel-convergence",
            Suite::Gradient => "gradient",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub suite: Suite,
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckReport {
    fn new(suite: Suite, name: String, measured: f64, tolerance: f64) -> Self {
        let passed = measured.is_finite() && measured <= tolerance;
        CheckReport { suite, name, measured, tolerance, passed }
    }
}

pub fn run_suite(suite: Suite, max_states: u64) -> Result<Vec<CheckReport>> {
    match suite {
        Suite::Marginal => marginal_suite(max_states),
        Suite::Variance => variance_suite(max_states),
        Suite::KernelConvergence => kernel_convergence_suite(max_states),
        Suite::Gradient => Ok(gradient_suite()),
    }
}

pub fn marginal_suite(max_states: u64) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for z in [2usize, 3] {
        for p in [0.3, 0.7] {
            let m = coupling_marginals(5, z, 2, p, max_states)?;
            let name = format!("N=5 q=2 z={z} p={p}");
            out.push(CheckReport::new(Suite::Marginal, name, m.spin_max_error.max(m.cluster_max_error), 1e-12));
        }
    }
    Ok(out)
}

pub fn variance_suite(max_states: u64) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for (q, z) in [(2.0, 2.0), (2.0, 3.0), (3.0, 2.0)] {
        for beta in [0.0, 0.5, 1.0, 2.0] {
            let p = ModelParams::new(q, z, beta)?;
            let worst = (2..=6).map(|n| variance_identity_check(n, &p, max_states).map(|v| v.gap())).try_fold(0.0f64, |acc, g| g.map(|g| acc.max(g)))?;
            out.push(CheckReport::new(Suite::Variance, format!("N<=6 q={q} z={z} beta={beta}"), worst, 1e-10));
        }
    }
    Ok(out)
}

/// `(z, beta, nu)` with `q = 3` and classes `(1, 2)`.
pub const KERNEL_POINTS: [(f64, f64, [f64; 2]); 5] = [
    (2.5, 0.5, [0.5, 0.5]),
    (2.5, 1.0, [0.5, 0.5]),
    (3.0, 0.5, [0.5, 0.5]),
    (3.0, 1.0, [0.5, 0.5]),
    (3.0, 1.0, [0.3, 0.7]),
];

pub const KERNEL_SIZES: [usize; 3] = [125, 250, 500];

/// Max-norm gap between the exact finite-`N` kernel and the limiting kernel,
/// both at the empirical conditioning `m / (N - 1)` with `m` the rounded counts.
pub fn kernel_gap(n: usize, z: f64, beta: f64, nu: &[f64], partition: &SpinPartition, max_states: u64) -> Result<f64> {
    let p = ModelParams::new(partition.colors() as f64, z, beta)?;
    let mut counts: Vec<usize> = nu.iter().map(|&x| ((n - 1) as f64 * x).round() as usize).collect();
    let excess = counts.iter().sum::<usize>() as i64 - (n - 1) as i64;
    let last = counts.len() - 1;
    counts[last] = (counts[last] as i64 - excess) as usize;
    let nu_n = ProbabilityVector::new(counts.iter().map(|&c| c as f64 / (n - 1) as f64).collect())?;
    let exact = qn_exact_row(&counts, &p, partition, max_states)?;
    let limit = q_infinity_row(&nu_n, beta, z, partition)?;
    Ok(exact.probabilities.as_slice().iter().zip(limit.probabilities.as_slice()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

pub fn kernel_convergence_suite(max_states: u64) -> Result<Vec<CheckReport>> {
    let partition = SpinPartition::new(vec![1, 2])?;
    let mut out = Vec::new();
    for (z, beta, nu) in KERNEL_POINTS {
        let gaps = KERNEL_SIZES.iter().map(|&n| kernel_gap(n, z, beta, &nu, &partition, max_states)).collect::<Result<Vec<_>>>()?;
        let shrinking = gaps.windows(2).all(|w| w[1] < w[0]);
        let name = format!("q=3 (1,2) z={z} beta={beta} nu={nu:?} gaps={gaps:?}");
        let mut report = CheckReport::new(Suite::KernelConvergence, name, gaps[gaps.len() - 1], 0.05);
        report.passed &= shrinking;
        out.push(report);
    }
    Ok(out)
}

fn relative_error(approx: f64, exact: f64) -> f64 {
    if exact == 0.0 {
        approx.abs()
    } else {
        ((approx - exact) / exact).abs()
    }
}

/// Worst relative errors of `k'` and `k''` against central differences.
pub fn gradient_errors(p: &ModelParams) -> (f64, f64) {
    let h = FD_STEP;
    let mut worst = (0.0f64, 0.0f64);
    for u in GRADIENT_U {
        let d1 = (k(u + h, p) - k(u - h, p)) / (2.0 * h);
        let d2 = (k_prime(u + h, p) - k_prime(u - h, p)) / (2.0 * h);
        worst.0 = worst.0.max(relative_error(d1, k_prime(u, p)));
        worst.1 = worst.1.max(relative_error(d2, k_double_prime(u, p)));
    }
    worst
}

pub fn gradient_suite() -> Vec<CheckReport> {
    let mut out = Vec::new();
    for (q, z, beta) in GRADIENT_POINTS {
        let p = ModelParams { q, z, beta };
        let (e1, e2) = gradient_errors(&p);
        out.push(CheckReport::new(Suite::Gradient, format!("k' q={q} z={z} beta={beta}"), e1, 1e-6));
        out.push(CheckReport::new(Suite::Gradient, format!("k'' q={q} z={z} beta={beta}"), e2, 1e-6));
    }
    out
}

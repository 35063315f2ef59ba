//! Limiting single-site kernel of the fuzzy model and its Gibbs verdict.
//!
//! Colors `{1, ..., q}` are merged into consecutive classes of sizes
//! `(r_1, ..., r_s)`. As the volume grows, the probability that a site shows
//! class `k` given the empirical class distribution `nu` of the other sites
//! converges to `C(beta nu_k^(z-1), r_k) / sum_l C(beta nu_l^(z-1), r_l)`,
//! where `C(x, r)` is governed by the internal `r`-state model at inverse
//! temperature `x`. A jump of that internal model's magnetization makes the
//! kernel discontinuous in `nu`, which is what non-Gibbsianness means here.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::critical::{transition_order, CriticalSolver, TransitionOrder};
use crate::error::{Error, Result};
use crate::model::{integer_q, ModelParams, ProbabilityVector};
use crate::numeric::log_sum_exp;

/// `|x - beta_c(r, z)|` below this counts as sitting on a discontinuity.
pub const DISCONTINUITY_EPS: f64 = 1e-9;

/// Class sizes `(r_1, ..., r_s)` of a spin partition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpinPartition(Vec<usize>);

impl SpinPartition {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidPartition("no classes".into()));
        }
        if sizes.contains(&0) {
            return Err(Error::InvalidPartition(format!("empty class in {sizes:?}")));
        }
        Ok(SpinPartition(sizes))
    }

    pub fn sizes(&self) -> &[usize] {
        &self.0
    }

    /// Number of classes `s`.
    pub fn classes(&self) -> usize {
        self.0.len()
    }

    /// Number of colors `q = sum r_i`.
    pub fn colors(&self) -> usize {
        self.0.iter().sum()
    }

    /// Checks `sum r_i = q` and `1 < s < q`.
    pub fn check_fuzzy(&self, q: usize) -> Result<()> {
        if self.colors() != q {
            return Err(Error::InvalidPartition(format!("class sizes {:?} do not sum to q = {q}", self.0)));
        }
        let s = self.classes();
        if s < 2 || s >= q {
            return Err(Error::InvalidPartition(format!("need 1 < s < q, got s = {s}, q = {q}")));
        }
        Ok(())
    }
}

/// Smallest class size that can drive a discontinuity: `>= 2` when `z > 4`,
/// `>= 3` when `z <= 4`.
pub fn r_star(sizes: &[usize], z: f64) -> Option<usize> {
    let min_size = if z > 4.0 { 2 } else { 3 };
    sizes.iter().copied().filter(|&r| r >= min_size).min()
}

/// Smallest class size `>= 2`.
pub fn r_hash(sizes: &[usize]) -> Option<usize> {
    sizes.iter().copied().filter(|&r| r >= 2).min()
}

/// Whether a class of size `r` has a first-order internal transition.
fn governs(r: usize, z: f64) -> bool {
    r >= 2 && transition_order(r as f64, z) == TransitionOrder::First
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// `2 <= z <= 4` and every class has at most two colors.
    AllSmallClasses,
    ZAboveFour,
    ZTwoToFour,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Discontinuity {
    /// Zero-based class index.
    pub class: usize,
    /// Value of `nu_class` at which the kernel jumps.
    pub nu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GibbsVerdict {
    pub gibbs_for_all_beta: bool,
    /// Verdict at the inverse temperature that was classified.
    pub gibbs_at_beta: bool,
    pub threshold_beta: Option<f64>,
    /// Size of the class whose internal transition sets the threshold.
    pub governing_class: Option<usize>,
    pub regime: Regime,
    pub discontinuities: Vec<Discontinuity>,
    /// `z = 2`: the verdict comes from the quadratic-model result.
    pub inherited_quadratic: bool,
}

/// Limiting kernel row over the `s` fuzzy classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelRow {
    pub probabilities: ProbabilityVector,
}

/// Kernel evaluator with a shared cache of internal critical temperatures.
#[derive(Debug, Default)]
pub struct FuzzyAnalyzer {
    solver: CriticalSolver,
    cache: RwLock<HashMap<(usize, i64), f64>>,
}

fn cache_key(r: usize, z: f64) -> (usize, i64) {
    (r, (z * 1e12).round() as i64)
}

impl FuzzyAnalyzer {
    pub fn new(solver: CriticalSolver) -> Self {
        FuzzyAnalyzer { solver, cache: RwLock::new(HashMap::new()) }
    }

    /// Process-wide analyzer with default tolerances.
    pub fn shared() -> &'static FuzzyAnalyzer {
        static SHARED: OnceLock<FuzzyAnalyzer> = OnceLock::new();
        SHARED.get_or_init(FuzzyAnalyzer::default)
    }

    pub fn solver(&self) -> &CriticalSolver {
        &self.solver
    }

    /// `beta_c(r, z)`, infinite for a single-color class.
    pub fn class_beta_c(&self, r: usize, z: f64) -> Result<f64> {
        if r <= 1 {
            return Ok(f64::INFINITY);
        }
        let key = cache_key(r, z);
        if let Some(&v) = self.cache.read().expect("cache lock").get(&key) {
            return Ok(v);
        }
        let v = self.solver.beta_c(r as f64, z)?.beta_c;
        self.cache.write().expect("cache lock").insert(key, v);
        Ok(v)
    }

    /// `ln C(x, r)` for class index `class` (used only in the error).
    fn log_c_factor(&self, class: usize, x: f64, r: usize, z: f64) -> Result<f64> {
        if !(x >= 0.0 && x.is_finite()) || r == 0 || z < 2.0 {
            return Err(Error::InvalidParams(format!("c_factor needs x >= 0, r >= 1, z >= 2; got x={x}, r={r}, z={z}")));
        }
        let rf = r as f64;
        let m = z - 1.0;
        let bc = self.class_beta_c(r, z)?;
        if governs(r, z) && (x - bc).abs() <= DISCONTINUITY_EPS {
            return Err(Error::AtDiscontinuity { class, x, beta_c: bc });
        }
        if x <= bc {
            return Ok(rf.ln() + x / rf.powf(m));
        }
        let u = self.solver.largest_solution(&ModelParams { q: rf, z, beta: x })?;
        let minority = (rf - 1.0).ln() + x * ((1.0 - u) / rf).powf(m);
        let majority = x * (((rf - 1.0) * u + 1.0) / rf).powf(m);
        Ok(log_sum_exp(&[minority, majority]))
    }

    /// `C(x, r)` with `x = beta * nu_k^(z-1)`.
    pub fn c_factor(&self, x: f64, r: usize, z: f64) -> Result<f64> {
        self.log_c_factor(0, x, r, z).map(f64::exp)
    }

    pub fn q_infinity_row(&self, nu: &ProbabilityVector, beta: f64, z: f64, partition: &SpinPartition) -> Result<KernelRow> {
        if nu.len() != partition.classes() {
            return Err(Error::DimensionMismatch { expected: partition.classes(), got: nu.len() });
        }
        let mut logs = partition
            .sizes()
            .iter()
            .enumerate()
            .map(|(l, &r)| self.log_c_factor(l, beta * nu[l].powf(z - 1.0), r, z))
            .collect::<Result<Vec<f64>>>()?;
        crate::numeric::normalize_log_weights(&mut logs);
        Ok(KernelRow { probabilities: ProbabilityVector::new(logs)? })
    }

    pub fn q_infinity(&self, k: usize, nu: &ProbabilityVector, beta: f64, z: f64, partition: &SpinPartition) -> Result<f64> {
        if k >= partition.classes() {
            return Err(Error::Domain(format!("class index {k} out of range")));
        }
        Ok(self.q_infinity_row(nu, beta, z, partition)?.probabilities[k])
    }

    pub fn classify(&self, beta: f64, q: f64, z: f64, partition: &SpinPartition) -> Result<GibbsVerdict> {
        ModelParams::new(q, z, beta)?;
        partition.check_fuzzy(integer_q(q)?)?;
        let sizes = partition.sizes();
        let inherited_quadratic = z == 2.0;
        let (regime, governing) = if z > 4.0 {
            (Regime::ZAboveFour, r_hash(sizes))
        } else if sizes.iter().all(|&r| r <= 2) {
            (Regime::AllSmallClasses, None)
        } else {
            (Regime::ZTwoToFour, r_star(sizes, z))
        };
        let Some(r_gov) = governing else {
            return Ok(GibbsVerdict {
                gibbs_for_all_beta: true,
                gibbs_at_beta: true,
                threshold_beta: None,
                governing_class: None,
                regime,
                discontinuities: Vec::new(),
                inherited_quadratic,
            });
        };
        let threshold = self.class_beta_c(r_gov, z)?;
        let mut discontinuities = Vec::new();
        if beta > 0.0 {
            for (class, &r) in sizes.iter().enumerate() {
                if !governs(r, z) {
                    continue;
                }
                let nu = (self.class_beta_c(r, z)? / beta).powf(1.0 / (z - 1.0));
                if nu <= 1.0 {
                    discontinuities.push(Discontinuity { class, nu });
                }
            }
        }
        Ok(GibbsVerdict {
            gibbs_for_all_beta: false,
            gibbs_at_beta: beta < threshold,
            threshold_beta: Some(threshold),
            governing_class: Some(r_gov),
            regime,
            discontinuities,
            inherited_quadratic,
        })
    }
}

pub fn c_factor(x: f64, r: usize, z: f64) -> Result<f64> {
    FuzzyAnalyzer::shared().c_factor(x, r, z)
}

pub fn q_infinity_row(nu: &ProbabilityVector, beta: f64, z: f64, partition: &SpinPartition) -> Result<KernelRow> {
    FuzzyAnalyzer::shared().q_infinity_row(nu, beta, z, partition)
}

pub fn q_infinity(k: usize, nu: &ProbabilityVector, beta: f64, z: f64, partition: &SpinPartition) -> Result<f64> {
    FuzzyAnalyzer::shared().q_infinity(k, nu, beta, z, partition)
}

pub fn classify(beta: f64, q: f64, z: f64, partition: &SpinPartition) -> Result<GibbsVerdict> {
    FuzzyAnalyzer::shared().classify(beta, q, z, partition)
}

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuzzy::{KernelRow, SpinPartition};
use crate::model::{ModelParams, ProbabilityVector};
use crate::numeric::{composition_count, log_sum_exp, normalize_log_weights, Compositions, LogFactorials};

const INTEGER_COUNT_TOL: f64 = 1e-9;

/// Color counts `(n_1, ..., n_q)` of an `N`-spin configuration.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TypeOccupancy(Vec<usize>);

impl TypeOccupancy {
    pub fn new(counts: Vec<usize>) -> Result<Self> {
        if counts.is_empty() || counts.iter().sum::<usize>() == 0 {
            return Err(Error::InvalidParams("occupancy needs at least one color and one spin".into()));
        }
        Ok(TypeOccupancy(counts))
    }

    pub fn counts(&self) -> &[usize] {
        &self.0
    }

    /// Number of spins `N`.
    pub fn n(&self) -> usize {
        self.0.iter().sum()
    }

    /// Empirical distribution `L_N`.
    pub fn empirical(&self) -> Vec<f64> {
        let n = self.n() as f64;
        self.0.iter().map(|&c| c as f64 / n).collect()
    }
}

/// Exact law of the color counts under the mean-field measure.
#[derive(Debug, Clone)]
pub struct TypeDistribution {
    q: usize,
    n: usize,
    counts: Vec<usize>,
    probabilities: Vec<f64>,
}

impl TypeDistribution {
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of type classes.
    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[usize], f64)> + '_ {
        self.counts.chunks(self.q).zip(self.probabilities.iter().copied())
    }

    pub fn probability(&self, counts: &[usize]) -> f64 {
        self.iter().find(|(c, _)| *c == counts).map_or(0.0, |(_, p)| p)
    }

    /// `E[L_N(color)]`, color 0-based.
    pub fn mean_fraction(&self, color: usize) -> f64 {
        let n = self.n as f64;
        self.iter().map(|(c, p)| p * c[color] as f64 / n).sum()
    }

    pub fn variance_fraction(&self, color: usize) -> f64 {
        let n = self.n as f64;
        let mean = self.mean_fraction(color);
        self.iter().map(|(c, p)| p * (c[color] as f64 / n - mean).powi(2)).sum()
    }

    /// Total variation distance to an empirical histogram of count vectors.
    pub fn total_variation(&self, histogram: &HashMap<Vec<usize>, u64>) -> f64 {
        let total: u64 = histogram.values().sum();
        if total == 0 {
            return 1.0;
        }
        let total = total as f64;
        let mut seen = 0.0;
        let mut tv = 0.0;
        for (c, p) in self.iter() {
            let emp = histogram.get(c).copied().unwrap_or(0) as f64 / total;
            seen += emp;
            tv += (p - emp).abs();
        }
        0.5 * (tv + (1.0 - seen).max(0.0))
    }
}

fn check_cap(states: f64, cap: u64) -> Result<()> {
    if states > cap as f64 {
        return Err(Error::CapExceeded { states, cap });
    }
    Ok(())
}

/// `ln(multinomial) + (beta * M / z) * sum_i (n_i / M)^z`.
fn log_type_weight(lf: &LogFactorials, counts: &[usize], beta: f64, z: f64) -> f64 {
    let m = counts.iter().sum::<usize>() as f64;
    let energy: f64 = counts.iter().map(|&c| (c as f64 / m).powf(z)).sum();
    lf.log_multinomial(counts) + beta * m / z * energy
}

/// Law of the color counts of `N` spins.
pub fn exact_type_distribution(n: usize, p: &ModelParams, max_states: u64) -> Result<TypeDistribution> {
    p.validate()?;
    let q = p.q_int()?;
    if n == 0 {
        return Err(Error::InvalidParams("N must be positive".into()));
    }
    check_cap(composition_count(n, q), max_states)?;
    let lf = LogFactorials::new(n);
    let mut counts = Vec::new();
    let mut log_w = Vec::new();
    for c in Compositions::new(n, q) {
        log_w.push(log_type_weight(&lf, &c, p.beta, p.z));
        counts.extend_from_slice(&c);
    }
    normalize_log_weights(&mut log_w);
    Ok(TypeDistribution { q, n, counts, probabilities: log_w })
}

/// `ln A(beta, r, M)`, the log of `E[exp(beta * L_M(1)^(z-1))]` under the
/// `M`-spin, `r`-color measure at the same `beta`.
pub fn log_partition_expectation(beta: f64, r: usize, m: usize, z: f64, max_states: u64) -> Result<f64> {
    if r == 0 {
        return Err(Error::InvalidParams("r must be at least 1".into()));
    }
    if !beta.is_finite() || beta < 0.0 || !z.is_finite() || z < 2.0 {
        return Err(Error::InvalidParams(format!("need beta >= 0 and z >= 2, got beta={beta}, z={z}")));
    }
    if m == 0 {
        return Ok(0.0);
    }
    check_cap(composition_count(m, r), max_states)?;
    let lf = LogFactorials::new(m);
    let mut base = Vec::new();
    let mut tilted = Vec::new();
    for c in Compositions::new(m, r) {
        let w = log_type_weight(&lf, &c, beta, z);
        base.push(w);
        tilted.push(w + beta * (c[0] as f64 / m as f64).powf(z - 1.0));
    }
    Ok(log_sum_exp(&tilted) - log_sum_exp(&base))
}

pub fn partition_expectation(beta: f64, r: usize, m: usize, z: f64, max_states: u64) -> Result<f64> {
    log_partition_expectation(beta, r, m, z, max_states).map(f64::exp)
}

fn check_partition(p: &ModelParams, partition: &SpinPartition) -> Result<usize> {
    p.validate()?;
    let q = p.q_int()?;
    if partition.colors() != q {
        return Err(Error::InvalidPartition(format!("class sizes {:?} do not sum to q = {q}", partition.sizes())));
    }
    Ok(q)
}

/// Finite-`N` kernel from the class-wise representation with
/// `N_l = (N - 1) nu_l` and `beta_l = beta (N_l / N)^(z-1)`.
pub fn qn_kernel_row(
    nu: &ProbabilityVector,
    n: usize,
    p: &ModelParams,
    partition: &SpinPartition,
    max_states: u64,
) -> Result<KernelRow> {
    check_partition(p, partition)?;
    if nu.len() != partition.classes() {
        return Err(Error::DimensionMismatch { expected: partition.classes(), got: nu.len() });
    }
    if n < 2 {
        return Err(Error::InvalidParams("N must be at least 2".into()));
    }
    let mut logs = Vec::with_capacity(nu.len());
    for (l, &r) in partition.sizes().iter().enumerate() {
        let exact = (n - 1) as f64 * nu[l];
        let m = exact.round();
        if (exact - m).abs() > INTEGER_COUNT_TOL {
            return Err(Error::NonIntegerCounts(format!("(N - 1) * nu_{} = {exact}", l + 1)));
        }
        let m = m as usize;
        let beta_l = p.beta * (m as f64 / n as f64).powf(p.z - 1.0);
        logs.push((r as f64).ln() + log_partition_expectation(beta_l, r, m, p.z, max_states)?);
    }
    normalize_log_weights(&mut logs);
    Ok(KernelRow { probabilities: ProbabilityVector::new(logs)? })
}

pub fn qn_kernel(
    k: usize,
    nu: &ProbabilityVector,
    n: usize,
    p: &ModelParams,
    partition: &SpinPartition,
    max_states: u64,
) -> Result<f64> {
    let row = qn_kernel_row(nu, n, p, partition, max_states)?;
    row.probabilities.as_slice().get(k).copied().ok_or_else(|| Error::Domain(format!("class index {k} out of range")))
}

/// `ln` of the sum over all colorings of `m` labelled spins with `r` colors of
/// `exp(beta / (z N^(z-1)) * sum_i n_i^z)`.
fn log_class_sum(m: usize, r: usize, n: usize, p: &ModelParams, lf: &LogFactorials, max_states: u64) -> Result<f64> {
    check_cap(composition_count(m, r), max_states)?;
    let c = p.beta / (p.z * (n as f64).powf(p.z - 1.0));
    let terms: Vec<f64> = Compositions::new(m, r)
        .map(|comp| lf.log_multinomial(&comp) + c * comp.iter().map(|&x| (x as f64).powf(p.z)).sum::<f64>())
        .collect();
    Ok(log_sum_exp(&terms))
}

/// Exact conditional law of the fuzzy spin at one site given the fuzzy counts
/// `(m_1, ..., m_s)` of the other `N - 1` sites.
pub fn qn_exact_row(counts: &[usize], p: &ModelParams, partition: &SpinPartition, max_states: u64) -> Result<KernelRow> {
    check_partition(p, partition)?;
    if counts.len() != partition.classes() {
        return Err(Error::DimensionMismatch { expected: partition.classes(), got: counts.len() });
    }
    let n = counts.iter().sum::<usize>() + 1;
    let lf = LogFactorials::new(n);
    let mut logs = Vec::with_capacity(counts.len());
    for (&m, &r) in counts.iter().zip(partition.sizes()) {
        let with_site = log_class_sum(m + 1, r, n, p, &lf, max_states)?;
        let without = log_class_sum(m, r, n, p, &lf, max_states)?;
        logs.push(with_site - without);
    }
    normalize_log_weights(&mut logs);
    Ok(KernelRow { probabilities: ProbabilityVector::new(logs)? })
}

pub fn qn_exact(k: usize, counts: &[usize], p: &ModelParams, partition: &SpinPartition, max_states: u64) -> Result<f64> {
    let row = qn_exact_row(counts, p, partition, max_states)?;
    row.probabilities.as_slice().get(k).copied().ok_or_else(|| Error::Domain(format!("class index {k} out of range")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite::DEFAULT_MAX_STATES as CAP;

    fn params(q: f64, z: f64, beta: f64) -> ModelParams {
        ModelParams::new(q, z, beta).unwrap()
    }

    #[test]
    fn single_spin_is_uniform() {
        let d = exact_type_distribution(1, &params(4.0, 3.0, 2.5), CAP).unwrap();
        assert_eq!(d.len(), 4);
        for (_, pr) in d.iter() {
            assert!((pr - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn two_spins_two_colors() {
        for beta in [0.0, 0.7, 2.0] {
            let d = exact_type_distribution(2, &params(2.0, 2.0, beta), CAP).unwrap();
            // Configurations: 2 constant (energy beta each), 2 mixed (energy beta/2 each).
            let expect = beta.exp() / (beta.exp() + (beta / 2.0).exp());
            let constant = d.probability(&[2, 0]) + d.probability(&[0, 2]);
            assert!((constant - expect).abs() < 1e-14, "beta={beta}");
        }
    }

    #[test]
    fn symmetric_mean() {
        let d = exact_type_distribution(50, &params(3.0, 2.0, 2.0), CAP).unwrap();
        let total: f64 = d.iter().map(|(_, p)| p).sum();
        assert!((total - 1.0).abs() < 1e-12);
        for c in 0..3 {
            assert!((d.mean_fraction(c) - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let err = exact_type_distribution(100, &params(6.0, 2.0, 1.0), 1000).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { .. }));
        assert!(exact_type_distribution(3, &params(2.5, 2.0, 1.0), CAP).is_err());
    }

    #[test]
    fn partition_expectation_small_cases() {
        assert_eq!(partition_expectation(1.3, 3, 0, 2.0, CAP).unwrap(), 1.0);
        for z in [2.0, 3.0, 4.5] {
            let a = partition_expectation(3f64.ln(), 2, 1, z, CAP).unwrap();
            assert!((a - 2.0).abs() < 1e-14);
        }
        for r in 1..6 {
            let beta = 0.8;
            let a = partition_expectation(beta, r, 1, 3.0, CAP).unwrap();
            let expect = (beta.exp() + r as f64 - 1.0) / r as f64;
            assert!((a - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn kernels_at_infinite_temperature() {
        let part = SpinPartition::new(vec![1, 2]).unwrap();
        let p = params(3.0, 3.0, 0.0);
        let nu = ProbabilityVector::new(vec![0.25, 0.75]).unwrap();
        let row = qn_kernel_row(&nu, 9, &p, &part, CAP).unwrap();
        assert!((row.probabilities[0] - 1.0 / 3.0).abs() < 1e-14);
        let row = qn_exact_row(&[3, 5], &p, &part, CAP).unwrap();
        assert!((row.probabilities[1] - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn kernel_symmetry_and_integrality() {
        let part = SpinPartition::new(vec![2, 2]).unwrap();
        let p = params(4.0, 3.0, 1.7);
        let nu = ProbabilityVector::new(vec![0.5, 0.5]).unwrap();
        let row = qn_kernel_row(&nu, 11, &p, &part, CAP).unwrap();
        assert!((row.probabilities[0] - 0.5).abs() < 1e-14);
        let nu = ProbabilityVector::new(vec![0.35, 0.65]).unwrap();
        assert!(matches!(qn_kernel_row(&nu, 11, &p, &part, CAP), Err(Error::NonIntegerCounts(_))));
    }

    #[test]
    fn exact_kernel_two_sites() {
        let part = SpinPartition::new(vec![1, 1]).unwrap();
        for beta in [0.0, 1.0, 3.0] {
            let p = params(2.0, 2.0, beta);
            let got = qn_exact(0, &[1, 0], &p, &part, CAP).unwrap();
            let expect = 1.0 / (1.0 + (-beta / 2.0).exp());
            assert!((got - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn exact_kernel_matches_full_distribution() {
        // Condition the exact type law on the fuzzy counts of the other sites.
        let n = 7;
        let p = params(3.0, 2.5, 1.9);
        let part = SpinPartition::new(vec![1, 2]).unwrap();
        let d = exact_type_distribution(n, &p, CAP).unwrap();
        let lf = LogFactorials::new(n);
        let m = [2usize, 4];
        // P(site 1 has color a, others have counts c - e_a) = P(c) * c_a / N.
        let mut num = [0.0; 2];
        for (c, pr) in d.iter() {
            for a in 0..3 {
                if c[a] == 0 {
                    continue;
                }
                let mut rest = c.to_vec();
                rest[a] -= 1;
                if rest[0] != m[0] {
                    continue;
                }
                let class = if a == 0 { 0 } else { 1 };
                // Probability of the specific labelled configuration of the rest, up to a
                // factor depending only on the fuzzy counts.
                let sub = (lf.log_multinomial(&rest[1..])).exp();
                num[class] += pr * c[a] as f64 / n as f64 / (lf.log_multinomial(&rest).exp()) * sub;
            }
        }
        let total = num[0] + num[1];
        let row = qn_exact_row(&m, &p, &part, CAP).unwrap();
        assert!((row.probabilities[0] - num[0] / total).abs() < 1e-12, "{row:?} vs {:?}", [num[0] / total]);
    }
}

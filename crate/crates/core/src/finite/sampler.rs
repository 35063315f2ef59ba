use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::ModelParams;

use super::rng_for;

/// Single-site heat-bath chain for the mean-field measure on `N` spins.
///
/// A sweep visits every site once in order. The new color of a site is drawn
/// with weight `exp(g(n_a + 1) - g(n_a))`, where `n` are the counts of the other
/// sites and `g(n) = beta / (z N^(z-1)) * n^z`.
#[derive(Debug, Clone)]
pub struct GibbsSampler {
    spins: Vec<usize>,
    counts: Vec<usize>,
    g: Vec<f64>,
    weights: Vec<f64>,
    rng: ChaCha8Rng,
    sweeps: u64,
}

impl GibbsSampler {
    /// Chain started from i.i.d. uniform colors; `chain` selects the stream.
    pub fn new(n: usize, p: &ModelParams, seed: u64, chain: u64) -> Result<Self> {
        p.validate()?;
        let q = p.q_int()?;
        if n == 0 {
            return Err(Error::InvalidParams("N must be positive".into()));
        }
        let mut rng = rng_for(seed, chain);
        let spins: Vec<usize> = (0..n).map(|_| rng.random_range(0..q)).collect();
        Ok(Self::build(spins, q, p, rng))
    }

    /// Chain started from a given configuration (colors 0-based).
    pub fn from_spins(spins: Vec<usize>, p: &ModelParams, seed: u64, chain: u64) -> Result<Self> {
        p.validate()?;
        let q = p.q_int()?;
        if spins.is_empty() || spins.iter().any(|&s| s >= q) {
            return Err(Error::InvalidParams(format!("spins must be nonempty with colors below {q}")));
        }
        Ok(Self::build(spins, q, p, rng_for(seed, chain)))
    }

    fn build(spins: Vec<usize>, q: usize, p: &ModelParams, rng: ChaCha8Rng) -> Self {
        let n = spins.len();
        let scale = p.beta / (p.z * (n as f64).powf(p.z - 1.0));
        let g = (0..=n).map(|k| scale * (k as f64).powf(p.z)).collect();
        let mut counts = vec![0; q];
        for &s in &spins {
            counts[s] += 1;
        }
        GibbsSampler { spins, counts, g, weights: vec![0.0; q], rng, sweeps: 0 }
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn spins(&self) -> &[usize] {
        &self.spins
    }

    pub fn sweeps_done(&self) -> u64 {
        self.sweeps
    }

    pub fn sweep(&mut self) {
        let q = self.counts.len();
        for i in 0..self.spins.len() {
            self.counts[self.spins[i]] -= 1;
            let mut max = f64::NEG_INFINITY;
            for a in 0..q {
                let n_a = self.counts[a];
                let w = self.g[n_a + 1] - self.g[n_a];
                self.weights[a] = w;
                max = max.max(w);
            }
            let mut total = 0.0;
            for w in self.weights.iter_mut() {
                *w = (*w - max).exp();
                total += *w;
            }
            let mut target = self.rng.random::<f64>() * total;
            let mut color = q - 1;
            for (a, &w) in self.weights.iter().enumerate() {
                if target < w {
                    color = a;
                    break;
                }
                target -= w;
            }
            self.spins[i] = color;
            self.counts[color] += 1;
        }
        self.sweeps += 1;
    }

    /// Runs `sweeps` sweeps, calling `record` with the sweep index (1-based)
    /// and counts after each.
    pub fn run<F: FnMut(u64, &[usize])>(&mut self, sweeps: u64, mut record: F) {
        for _ in 0..sweeps {
            self.sweep();
            record(self.sweeps, &self.counts);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite::{exact_type_distribution, DEFAULT_MAX_STATES};
    use std::collections::HashMap;

    #[test]
    fn deterministic_under_seed() {
        let p = ModelParams::new(3.0, 2.0, 2.0).unwrap();
        let mut a = GibbsSampler::new(30, &p, 7, 0).unwrap();
        let mut b = GibbsSampler::new(30, &p, 7, 0).unwrap();
        let mut c = GibbsSampler::new(30, &p, 7, 1).unwrap();
        for _ in 0..50 {
            a.sweep();
            b.sweep();
            c.sweep();
        }
        assert_eq!(a.spins(), b.spins());
        assert_ne!(a.spins(), c.spins());
    }

    #[test]
    fn small_chain_matches_exact_law() {
        let p = ModelParams::new(3.0, 3.0, 1.5).unwrap();
        let exact = exact_type_distribution(4, &p, DEFAULT_MAX_STATES).unwrap();
        let mut s = GibbsSampler::new(4, &p, 11, 0).unwrap();
        let mut hist: HashMap<Vec<usize>, u64> = HashMap::new();
        s.run(200_000, |_, c| *hist.entry(c.to_vec()).or_default() += 1);
        assert!(exact.total_variation(&hist) < 0.01);
    }

    #[test]
    fn infinite_temperature_mean_occupancy() {
        let p = ModelParams::new(4.0, 2.0, 0.0).unwrap();
        let mut s = GibbsSampler::new(100, &p, 3, 0).unwrap();
        let mut sum = [0f64; 4];
        let sweeps = 2000;
        s.run(sweeps, |_, c| {
            for (acc, &x) in sum.iter_mut().zip(c) {
                *acc += x as f64;
            }
        });
        for acc in sum {
            assert!((acc / sweeps as f64 - 25.0).abs() < 0.5);
        }
    }
}

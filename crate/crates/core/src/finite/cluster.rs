//! Spin/clique coupling for integer `z` and the generalized random-cluster measure.
//!
//! Cliques are the `z`-element subsets of the `N` vertices. Two open cliques
//! are connected when they share a vertex; `k(omega)` counts the resulting
//! vertex components, isolated vertices included.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::numeric::{binomial, composition_count, normalize_log_weights, Compositions, LogFactorials};

use super::{exact_type_distribution, rng_for};

fn check_z_int(z: usize) -> Result<()> {
    if z < 2 {
        return Err(Error::InvalidParams(format!("clique size must be at least 2, got {z}")));
    }
    Ok(())
}

fn z_as_int(z: f64) -> Result<usize> {
    if z.fract() != 0.0 || z < 2.0 || z > 64.0 {
        return Err(Error::InvalidParams(format!("the clique representation needs integer z >= 2, got {z}")));
    }
    Ok(z as usize)
}

/// All `z`-element subsets of `{0, ..., N-1}` in lexicographic order.
#[derive(Debug, Clone)]
pub struct CliqueSet {
    n: usize,
    z: usize,
    vertices: Vec<u32>,
}

impl CliqueSet {
    pub fn new(n: usize, z: usize, max_cliques: u64) -> Result<Self> {
        check_z_int(z)?;
        if n == 0 {
            return Err(Error::InvalidParams("N must be positive".into()));
        }
        let count = binomial(n as u64, z as u64);
        if count > max_cliques as f64 {
            return Err(Error::CapExceeded { states: count, cap: max_cliques });
        }
        let mut vertices = Vec::with_capacity(count as usize * z);
        if z <= n {
            let mut cur: Vec<usize> = (0..z).collect();
            loop {
                vertices.extend(cur.iter().map(|&v| v as u32));
                let Some(i) = (0..z).rev().find(|&i| cur[i] < n - z + i) else { break };
                cur[i] += 1;
                for j in i + 1..z {
                    cur[j] = cur[j - 1] + 1;
                }
            }
        }
        Ok(CliqueSet { n, z, vertices })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn z(&self) -> usize {
        self.z
    }

    pub fn len(&self) -> usize {
        self.vertices.len() / self.z
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn clique(&self, i: usize) -> &[u32] {
        &self.vertices[i * self.z..(i + 1) * self.z]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u32]> + '_ {
        self.vertices.chunks(self.z)
    }
}

/// Set of open cliques, vertices numbered `1..=N`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueConfig {
    z_int: usize,
    n: usize,
    open: Vec<Vec<usize>>,
}

impl CliqueConfig {
    pub fn new(z_int: usize, n: usize, open: Vec<Vec<usize>>) -> Result<Self> {
        check_z_int(z_int)?;
        let mut open = open;
        for d in open.iter_mut() {
            d.sort_unstable();
            d.dedup();
            if d.len() != z_int || d[0] == 0 || d[z_int - 1] > n {
                return Err(Error::InvalidParams(format!("clique {d:?} is not a {z_int}-subset of 1..={n}")));
            }
        }
        open.sort();
        open.dedup();
        Ok(CliqueConfig { z_int, n, open })
    }

    pub fn z_int(&self) -> usize {
        self.z_int
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn open_set(&self) -> &[Vec<usize>] {
        &self.open
    }
}

#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub fn reset(&mut self) {
        for (i, p) in self.parent.iter_mut().enumerate() {
            *p = i;
        }
        self.size.fill(1);
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
    }

    /// Component sizes, largest first.
    pub fn component_sizes(&mut self) -> Vec<usize> {
        let mut sizes = Vec::new();
        for i in 0..self.parent.len() {
            if self.find(i) == i {
                sizes.push(self.size[i]);
            }
        }
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        sizes
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentReport {
    /// Largest first.
    pub component_sizes: Vec<usize>,
    pub k_omega: usize,
}

impl ComponentReport {
    fn from_sizes(component_sizes: Vec<usize>) -> Self {
        let k_omega = component_sizes.len();
        ComponentReport { component_sizes, k_omega }
    }

    pub fn n(&self) -> usize {
        self.component_sizes.iter().sum()
    }

    pub fn max_fraction(&self) -> f64 {
        self.component_sizes.first().map_or(0.0, |&s| s as f64 / self.n() as f64)
    }

    /// `sum_i (|C_i| / N)^2`.
    pub fn sum_sq_fractions(&self) -> f64 {
        let n = self.n() as f64;
        self.component_sizes.iter().map(|&s| (s as f64 / n).powi(2)).sum()
    }
}

pub fn rcm_components(omega: &CliqueConfig) -> ComponentReport {
    let mut uf = UnionFind::new(omega.n);
    for d in &omega.open {
        for w in d.windows(2) {
            uf.union(w[0] - 1, w[1] - 1);
        }
    }
    ComponentReport::from_sizes(uf.component_sizes())
}

fn merge_open(uf: &mut UnionFind, cliques: &CliqueSet, open: impl Iterator<Item = usize>) {
    uf.reset();
    for i in open {
        let d = cliques.clique(i);
        for w in d.windows(2) {
            uf.union(w[0] as usize, w[1] as usize);
        }
    }
}

/// Alternating chain for the coupling `K(sigma, omega)`.
///
/// Given `sigma`, each clique on which `sigma` is constant opens with
/// probability `p_open`, every other clique closes. Given `omega`, each vertex
/// component gets a uniform color. One uniform is drawn per clique and one
/// color per vertex at every step, so runs with different `p_open` share
/// their random numbers.
#[derive(Debug, Clone)]
pub struct EsSampler {
    cliques: CliqueSet,
    q: usize,
    p_open: f64,
    spins: Vec<usize>,
    open: Vec<bool>,
    draws: Vec<usize>,
    uf: UnionFind,
    rng: ChaCha8Rng,
}

impl EsSampler {
    pub fn new(n: usize, z_int: usize, q: usize, p_open: f64, seed: u64, chain: u64, max_cliques: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidParams("q must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&p_open) {
            return Err(Error::InvalidParams(format!("p_open must lie in [0, 1], got {p_open}")));
        }
        let cliques = CliqueSet::new(n, z_int, max_cliques)?;
        let mut rng = rng_for(seed, chain);
        let spins = (0..n).map(|_| rng.random_range(0..q)).collect();
        let m = cliques.len();
        Ok(EsSampler { cliques, q, p_open, spins, open: vec![false; m], draws: vec![0; n], uf: UnionFind::new(n), rng })
    }

    pub fn spins(&self) -> &[usize] {
        &self.spins
    }

    pub fn open(&self) -> &[bool] {
        &self.open
    }

    pub fn cliques(&self) -> &CliqueSet {
        &self.cliques
    }

    pub fn open_count(&self) -> usize {
        self.open.iter().filter(|&&o| o).count()
    }

    /// Color counts of the current spins.
    pub fn counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.q];
        for &s in &self.spins {
            c[s] += 1;
        }
        c
    }

    pub fn clique_config(&self) -> CliqueConfig {
        let open = (0..self.cliques.len())
            .filter(|&i| self.open[i])
            .map(|i| self.cliques.clique(i).iter().map(|&v| v as usize + 1).collect())
            .collect();
        CliqueConfig { z_int: self.cliques.z, n: self.cliques.n, open }
    }

    pub fn components(&mut self) -> ComponentReport {
        let open = &self.open;
        merge_open(&mut self.uf, &self.cliques, (0..open.len()).filter(|&i| open[i]));
        ComponentReport::from_sizes(self.uf.component_sizes())
    }

    /// One clique update followed by one spin update.
    pub fn step(&mut self) {
        for (i, d) in self.cliques.iter().enumerate() {
            let u: f64 = self.rng.random();
            let c = self.spins[d[0] as usize];
            let constant = d.iter().all(|&v| self.spins[v as usize] == c);
            self.open[i] = constant && u < self.p_open;
        }
        let open = &self.open;
        merge_open(&mut self.uf, &self.cliques, (0..open.len()).filter(|&i| open[i]));
        for d in self.draws.iter_mut() {
            *d = self.rng.random_range(0..self.q);
        }
        for v in 0..self.spins.len() {
            let root = self.uf.find(v);
            self.spins[v] = self.draws[root];
        }
    }
}

/// Maximal deviations between brute-force marginals of `K` and the closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarginalCheck {
    pub spin_max_error: f64,
    pub cluster_max_error: f64,
    pub states: u64,
}

/// Sums `K(sigma, omega)` over all `q^N 2^|cliques|` states and compares the
/// marginals with `prod_D (1-p)^(1 - 1_D(sigma))` and
/// `(1-p)^closed p^open q^k(omega)`, each normalized.
pub fn coupling_marginals(n: usize, z_int: usize, q: usize, p_open: f64, max_states: u64) -> Result<MarginalCheck> {
    if q == 0 || !(0.0..=1.0).contains(&p_open) {
        return Err(Error::InvalidParams(format!("need q >= 1 and p in [0, 1], got q={q}, p={p_open}")));
    }
    let cliques = CliqueSet::new(n, z_int, 63)?;
    let m = cliques.len();
    let spin_states = (q as f64).powi(n as i32);
    let states = spin_states * 2f64.powi(m as i32);
    if states > max_states as f64 {
        return Err(Error::CapExceeded { states, cap: max_states });
    }
    let spin_states = spin_states as usize;
    let omega_states = 1usize << m;

    let mut constant_mask = vec![0u64; spin_states];
    let mut sigma = vec![0usize; n];
    for (idx, mask) in constant_mask.iter_mut().enumerate() {
        let mut x = idx;
        for s in sigma.iter_mut() {
            *s = x % q;
            x /= q;
        }
        for (i, d) in cliques.iter().enumerate() {
            let c = sigma[d[0] as usize];
            if d.iter().all(|&v| sigma[v as usize] == c) {
                *mask |= 1 << i;
            }
        }
    }

    let weight = |open: usize| (1.0 - p_open).powi((m - open) as i32) * p_open.powi(open as i32);
    let mut spin_marginal = vec![0.0; spin_states];
    let mut cluster_marginal = vec![0.0; omega_states];
    for omega in 0..omega_states as u64 {
        let w = weight(omega.count_ones() as usize);
        for (idx, &mask) in constant_mask.iter().enumerate() {
            if omega & !mask == 0 {
                spin_marginal[idx] += w;
                cluster_marginal[omega as usize] += w;
            }
        }
    }

    let spin_formula: Vec<f64> = constant_mask.iter().map(|mask| (1.0 - p_open).powi((m - mask.count_ones() as usize) as i32)).collect();
    let mut uf = UnionFind::new(n);
    let cluster_formula: Vec<f64> = (0..omega_states as u64)
        .map(|omega| {
            merge_open(&mut uf, &cliques, (0..m).filter(|&i| omega >> i & 1 == 1));
            let k = uf.component_sizes().len();
            weight(omega.count_ones() as usize) * (q as f64).powi(k as i32)
        })
        .collect();

    Ok(MarginalCheck {
        spin_max_error: max_normalized_gap(&spin_marginal, &spin_formula),
        cluster_max_error: max_normalized_gap(&cluster_marginal, &cluster_formula),
        states: states as u64,
    })
}

fn max_normalized_gap(a: &[f64], b: &[f64]) -> f64 {
    let (sa, sb) = (a.iter().sum::<f64>(), b.iter().sum::<f64>());
    a.iter().zip(b).map(|(x, y)| (x / sa - y / sb).abs()).fold(0.0, f64::max)
}

/// Exact expectations under the random-cluster measure
/// `(1-p)^closed p^open q^k(omega)`; `q` may be any positive real.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RcmExact {
    pub mean_sum_sq_fractions: f64,
    pub mean_max_fraction: f64,
    pub mean_components: f64,
    pub configurations: u64,
}

pub fn rcm_exact(n: usize, z_int: usize, q: f64, p_open: f64, max_states: u64) -> Result<RcmExact> {
    if !(q > 0.0) || !q.is_finite() || !(0.0..=1.0).contains(&p_open) {
        return Err(Error::InvalidParams(format!("need q > 0 and p in [0, 1], got q={q}, p={p_open}")));
    }
    let cliques = CliqueSet::new(n, z_int, 63)?;
    let m = cliques.len();
    let configurations = 2f64.powi(m as i32);
    if configurations > max_states as f64 {
        return Err(Error::CapExceeded { states: configurations, cap: max_states });
    }
    let mut uf = UnionFind::new(n);
    let (mut z_sum, mut sq, mut mx, mut kk) = (0.0, 0.0, 0.0, 0.0);
    for omega in 0..1u64 << m {
        merge_open(&mut uf, &cliques, (0..m).filter(|&i| omega >> i & 1 == 1));
        let report = ComponentReport::from_sizes(uf.component_sizes());
        let open = omega.count_ones() as i32;
        let w = (1.0 - p_open).powi(m as i32 - open) * p_open.powi(open) * q.powi(report.k_omega as i32);
        z_sum += w;
        sq += w * report.sum_sq_fractions();
        mx += w * report.max_fraction();
        kk += w * report.k_omega as f64;
    }
    Ok(RcmExact {
        mean_sum_sq_fractions: sq / z_sum,
        mean_max_fraction: mx / z_sum,
        mean_components: kk / z_sum,
        configurations: configurations as u64,
    })
}

/// `1 - exp(-beta (z-1)! / N^(z-1))`, the clique opening probability matching
/// the mean-field energy scale.
pub fn open_probability(beta: f64, n: usize, z_int: usize) -> f64 {
    let fact: f64 = (1..z_int).map(|k| k as f64).product();
    -(-beta * fact / (n as f64).powi(z_int as i32 - 1)).exp_m1()
}

/// `Var[L_N(1)]` under the clique Potts measure `exp(beta_clique * #monochromatic cliques)`.
pub fn clique_potts_variance(n: usize, z_int: usize, q: usize, beta_clique: f64, max_states: u64) -> Result<f64> {
    check_z_int(z_int)?;
    if q == 0 || n == 0 {
        return Err(Error::InvalidParams("need q >= 1 and N >= 1".into()));
    }
    let states = composition_count(n, q);
    if states > max_states as f64 {
        return Err(Error::CapExceeded { states, cap: max_states });
    }
    let lf = LogFactorials::new(n);
    let comps: Vec<Vec<usize>> = Compositions::new(n, q).collect();
    let mut log_w: Vec<f64> = comps
        .iter()
        .map(|c| lf.log_multinomial(c) + beta_clique * c.iter().map(|&x| binomial(x as u64, z_int as u64)).sum::<f64>())
        .collect();
    normalize_log_weights(&mut log_w);
    let nf = n as f64;
    let mean: f64 = comps.iter().zip(&log_w).map(|(c, p)| p * c[0] as f64 / nf).sum();
    Ok(comps.iter().zip(&log_w).map(|(c, p)| p * (c[0] as f64 / nf - mean).powi(2)).sum())
}

/// Both sides of `Var[L_N(1)] = (q-1)/q^2 E_RCM[sum_i (|C_i|/N)^2]`.
///
/// The left side is taken under the clique Potts measure, whose opening
/// probability is [`open_probability`]; `potts_variance` reports the same
/// variance under the mean-field measure, which differs at finite `N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceIdentity {
    pub lhs: f64,
    pub rhs: f64,
    pub lhs_stderr: Option<f64>,
    pub rhs_stderr: Option<f64>,
    pub potts_variance: Option<f64>,
    pub p_open: f64,
}

impl VarianceIdentity {
    pub fn gap(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

pub fn variance_identity_check(n: usize, p: &ModelParams, max_states: u64) -> Result<VarianceIdentity> {
    p.validate()?;
    let q = p.q_int()?;
    let z = z_as_int(p.z)?;
    let p_open = open_probability(p.beta, n, z);
    let beta_clique = -(-p_open).ln_1p();
    let lhs = clique_potts_variance(n, z, q, beta_clique, max_states)?;
    let rcm = rcm_exact(n, z, q as f64, p_open, max_states)?;
    let qf = q as f64;
    let rhs = (qf - 1.0) / (qf * qf) * rcm.mean_sum_sq_fractions;
    let potts_variance = exact_type_distribution(n, p, max_states).ok().map(|d| d.variance_fraction(0));
    Ok(VarianceIdentity { lhs, rhs, lhs_stderr: None, rhs_stderr: None, potts_variance, p_open })
}

fn batch_mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let batches = 20.min(n);
    if batches < 2 {
        return (mean, f64::NAN);
    }
    let size = n / batches;
    let means: Vec<f64> = (0..batches).map(|b| xs[b * size..(b + 1) * size].iter().sum::<f64>() / size as f64).collect();
    let bm = means.iter().sum::<f64>() / batches as f64;
    let var = means.iter().map(|x| (x - bm).powi(2)).sum::<f64>() / (batches - 1) as f64;
    (mean, (var / batches as f64).sqrt())
}

/// Monte Carlo estimate of both sides from the coupled chain, with
/// batch-means standard errors.
pub fn variance_identity_mc(
    n: usize,
    p: &ModelParams,
    seed: u64,
    steps: usize,
    burn_in: usize,
    max_cliques: u64,
) -> Result<VarianceIdentity> {
    p.validate()?;
    let q = p.q_int()?;
    let z = z_as_int(p.z)?;
    let p_open = open_probability(p.beta, n, z);
    let mut chain = EsSampler::new(n, z, q, p_open, seed, 0, max_cliques)?;
    for _ in 0..burn_in {
        chain.step();
    }
    let qf = q as f64;
    let mut lhs = Vec::with_capacity(steps);
    let mut rhs = Vec::with_capacity(steps);
    for _ in 0..steps {
        chain.step();
        // Averaging over colors keeps the estimator symmetric.
        let dev = chain.counts().iter().map(|&c| (c as f64 / n as f64 - 1.0 / qf).powi(2)).sum::<f64>() / qf;
        lhs.push(dev);
        rhs.push((qf - 1.0) / (qf * qf) * chain.components().sum_sq_fractions());
    }
    let (l, le) = batch_mean_stderr(&lhs);
    let (r, re) = batch_mean_stderr(&rhs);
    Ok(VarianceIdentity { lhs: l, rhs: r, lhs_stderr: Some(le), rhs_stderr: Some(re), potts_variance: None, p_open })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PercolationPoint {
    pub lambda: f64,
    pub p_open: f64,
    pub mean_max_fraction: f64,
    pub stderr: f64,
}

/// `E[max_i |C_i| / N]` at `p = lambda / N^(z-1)` for each `lambda`. Every
/// `lambda` reuses the same random stream.
#[allow(clippy::too_many_arguments)]
pub fn percolation_scan(
    n: usize,
    z_int: usize,
    q: usize,
    lambdas: &[f64],
    seed: u64,
    samples: usize,
    burn_in: usize,
    max_cliques: u64,
) -> Result<Vec<PercolationPoint>> {
    if samples == 0 {
        return Err(Error::InvalidParams("samples must be positive".into()));
    }
    let scale = (n as f64).powi(z_int as i32 - 1);
    let mut out = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::InvalidParams(format!("lambda must be finite and >= 0, got {lambda}")));
        }
        let p_open = (lambda / scale).min(1.0);
        let mut chain = EsSampler::new(n, z_int, q, p_open, seed, 0, max_cliques)?;
        for _ in 0..burn_in {
            chain.step();
        }
        let largest: Vec<usize> = (0..samples)
            .map(|_| {
                chain.step();
                chain.components().component_sizes[0]
            })
            .collect();
        let mean = largest.iter().sum::<usize>() as f64 / (samples * n) as f64;
        let xs: Vec<f64> = largest.iter().map(|&s| s as f64 / n as f64).collect();
        let stderr = if samples > 1 {
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / ((samples - 1) * samples) as f64).sqrt()
        } else {
            f64::NAN
        };
        out.push(PercolationPoint { lambda, p_open, mean_max_fraction: mean, stderr });
    }
    Ok(out)
}

/// Largest `|N * (-F(L_N)) - beta (z-1)! / N^(z-1) * #monochromatic cliques|`
/// over `configs` uniform random configurations, cliques counted one by one.
pub fn hamiltonian_rewrite_gap(n: usize, p: &ModelParams, configs: usize, seed: u64) -> Result<f64> {
    p.validate()?;
    let q = p.q_int()?;
    let z = z_as_int(p.z)?;
    let cliques = CliqueSet::new(n, z, super::DEFAULT_MAX_CLIQUES)?;
    let mut rng = rng_for(seed, 0);
    let fact: f64 = (1..z).map(|k| k as f64).product();
    let nf = n as f64;
    let mut worst: f64 = 0.0;
    let mut spins = vec![0usize; n];
    for _ in 0..configs {
        let mut counts = vec![0usize; q];
        for s in spins.iter_mut() {
            *s = rng.random_range(0..q);
            counts[*s] += 1;
        }
        let mono = cliques.iter().filter(|d| d.iter().all(|&v| spins[v as usize] == spins[d[0] as usize])).count();
        let mean_field = p.beta * nf / p.z * counts.iter().map(|&c| (c as f64 / nf).powf(p.z)).sum::<f64>();
        let clique = p.beta * fact / nf.powi(z as i32 - 1) * mono as f64;
        worst = worst.max((mean_field - clique).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite::DEFAULT_MAX_STATES as CAP;

    #[test]
    fn clique_enumeration() {
        let c = CliqueSet::new(5, 3, 100).unwrap();
        assert_eq!(c.len(), 10);
        assert_eq!(c.clique(0), &[0, 1, 2]);
        assert_eq!(c.clique(9), &[2, 3, 4]);
        assert!(CliqueSet::new(3, 4, 100).unwrap().is_empty());
        assert!(matches!(CliqueSet::new(100, 3, 1000), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn component_examples() {
        let r = rcm_components(&CliqueConfig::new(2, 4, vec![]).unwrap());
        assert_eq!(r.component_sizes, vec![1, 1, 1, 1]);
        assert_eq!(r.k_omega, 4);
        let r = rcm_components(&CliqueConfig::new(2, 4, vec![vec![1, 2], vec![2, 3]]).unwrap());
        assert_eq!((r.component_sizes.clone(), r.k_omega), (vec![3, 1], 2));
        let r = rcm_components(&CliqueConfig::new(3, 6, vec![vec![1, 2, 3], vec![3, 4, 5]]).unwrap());
        assert_eq!((r.component_sizes.clone(), r.k_omega), (vec![5, 1], 2));
        assert!(CliqueConfig::new(3, 6, vec![vec![1, 2, 7]]).is_err());
        assert!(CliqueConfig::new(3, 6, vec![vec![1, 2, 2]]).is_err());
    }

    #[test]
    fn sampler_limits() {
        let mut s = EsSampler::new(6, 2, 3, 0.0, 1, 0, 1000).unwrap();
        for _ in 0..10 {
            s.step();
            assert_eq!(s.open_count(), 0);
        }
        let mut s = EsSampler::new(6, 2, 3, 1.0, 1, 0, 1000).unwrap();
        for _ in 0..5 {
            s.step();
        }
        let c = s.spins()[0];
        assert!(s.spins().iter().all(|&x| x == c));
    }

    #[test]
    fn marginals_small() {
        let m = coupling_marginals(5, 2, 2, 0.4, CAP).unwrap();
        assert!(m.spin_max_error < 1e-12 && m.cluster_max_error < 1e-12, "{m:?}");
        assert_eq!(m.states, 32 * 1024);
    }

    #[test]
    fn variance_identity_examples() {
        let v = variance_identity_check(2, &ModelParams::new(2.0, 2.0, 0.0).unwrap(), CAP).unwrap();
        assert!((v.lhs - 0.125).abs() < 1e-15 && (v.rhs - 0.125).abs() < 1e-15);
        let v = variance_identity_check(6, &ModelParams::new(2.0, 3.0, 1.0).unwrap(), CAP).unwrap();
        assert!(v.gap() < 1e-10, "{v:?}");
        for q in [2usize, 3, 5] {
            let n = 5;
            let v = variance_identity_check(n, &ModelParams::new(q as f64, 2.0, 0.0).unwrap(), CAP).unwrap();
            let expect = (q as f64 - 1.0) / (q as f64 * q as f64 * n as f64);
            assert!((v.lhs - expect).abs() < 1e-14 && (v.rhs - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn variance_identity_monte_carlo() {
        let p = ModelParams::new(2.0, 2.0, 1.0).unwrap();
        let exact = variance_identity_check(6, &p, CAP).unwrap();
        let mc = variance_identity_mc(6, &p, 5, 200_000, 100, 1000).unwrap();
        assert!((mc.lhs - exact.lhs).abs() < 5.0 * mc.lhs_stderr.unwrap(), "{mc:?} {exact:?}");
        assert!((mc.rhs - exact.rhs).abs() < 5.0 * mc.rhs_stderr.unwrap(), "{mc:?} {exact:?}");
    }

    #[test]
    fn percolation_basics() {
        let pts = percolation_scan(50, 2, 1, &[0.0, 0.5, 1.5, 3.0], 9, 50, 0, 10_000).unwrap();
        assert_eq!(pts[0].mean_max_fraction, 1.0 / 50.0);
        for w in pts.windows(2) {
            assert!(w[1].mean_max_fraction >= w[0].mean_max_fraction);
        }
        assert!(pts[3].mean_max_fraction > 0.5);
    }

    #[test]
    fn rewrite_gap_is_bounded() {
        for z in [2.0, 3.0] {
            let p = ModelParams::new(3.0, z, 1.0).unwrap();
            let gaps: Vec<f64> = [4, 8, 12].iter().map(|&n| hamiltonian_rewrite_gap(n, &p, 200, 1).unwrap()).collect();
            for g in gaps {
                assert!(g <= 1.0 + 1e-12, "z={z} gap={g}");
            }
        }
    }
}

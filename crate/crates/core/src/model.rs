//! Scalar functions of the generalized mean-field Potts model.
//!
//! The model on `q` colors with interaction exponent `z` at inverse
//! temperature `beta` has the mean-field Hamiltonian
//! `F(nu) = -(beta / z) * sum_i nu_i^z` on probability vectors `nu`, and the
//! free energy `F + I(nu | uniform)`. Global minimizers of the free energy are
//! permutations of `embed(u, q)` for a magnetization `u` in `[0, 1)`, so most
//! of the analysis runs on the one-dimensional profile `k(u)`.
//!
//! `q` is a real number here; only the functions that take a probability
//! vector need it to be an integer.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::xlogx;

/// Below this magnetization `beta_of_u` switches to its series expansion.
pub const SERIES_CUTOFF: f64 = 1e-8;
/// Largest magnetization `beta_of_u` evaluates directly.
pub const U_CAP: f64 = 1.0 - 1e-12;

const NORMALIZATION_TOL: f64 = 1e-12;

/// Number of colors, interaction exponent and inverse temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub q: f64,
    pub z: f64,
    pub beta: f64,
}

impl ModelParams {
    pub fn new(q: f64, z: f64, beta: f64) -> Result<Self> {
        let p = ModelParams { q, z, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_qz(self.q, self.z)?;
        if !self.beta.is_finite() || self.beta < 0.0 {
            return Err(Error::InvalidParams(format!("beta must be finite and >= 0, got {}", self.beta)));
        }
        Ok(())
    }

    /// Same model at another inverse temperature.
    pub fn with_beta(&self, beta: f64) -> Self {
        ModelParams { beta, ..*self }
    }

    /// `q` as a color count, if it is a whole number.
    pub fn q_int(&self) -> Result<usize> {
        integer_q(self.q)
    }
}

pub(crate) fn check_qz(q: f64, z: f64) -> Result<()> {
    if !q.is_finite() || q < 2.0 {
        return Err(Error::InvalidParams(format!("q must be finite and >= 2, got {q}")));
    }
    if !z.is_finite() || z < 2.0 {
        return Err(Error::InvalidParams(format!("z must be finite and >= 2, got {z}")));
    }
    Ok(())
}

pub(crate) fn integer_q(q: f64) -> Result<usize> {
    if q.fract() != 0.0 || q < 1.0 || !q.is_finite() {
        return Err(Error::InvalidParams(format!("q must be an integer here, got {q}")));
    }
    Ok(q as usize)
}

/// A probability vector over `{1, ..., m}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Domain("empty probability vector".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Domain(format!("weights must be finite and nonnegative: {weights:?}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::Domain(format!("weights sum to {total}, not 1")));
        }
        Ok(ProbabilityVector(weights))
    }

    pub fn uniform(m: usize) -> Self {
        ProbabilityVector(vec![1.0 / m as f64; m])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Index<usize> for ProbabilityVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Magnetization `u` in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Magnetization(f64);

impl Magnetization {
    pub fn new(u: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&u) {
            return Err(Error::Domain(format!("magnetization must lie in [0, 1), got {u}")));
        }
        Ok(Magnetization(u))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

fn check_dim(nu: &ProbabilityVector, q: f64) -> Result<()> {
    let q = integer_q(q)?;
    if nu.len() != q {
        return Err(Error::DimensionMismatch { expected: q, got: nu.len() });
    }
    Ok(())
}

/// `-(beta / z) * sum_i nu_i^z`.
pub fn hamiltonian(nu: &ProbabilityVector, p: &ModelParams) -> Result<f64> {
    check_dim(nu, p.q)?;
    Ok(-(p.beta / p.z) * nu.as_slice().iter().map(|x| x.powf(p.z)).sum::<f64>())
}

/// Relative entropy of `nu` with respect to the uniform law on `m` symbols.
pub fn relative_entropy(nu: &ProbabilityVector, m: usize) -> Result<f64> {
    if nu.len() != m {
        return Err(Error::DimensionMismatch { expected: m, got: nu.len() });
    }
    let mf = m as f64;
    Ok(nu.as_slice().iter().map(|&x| if x > 0.0 { x * (mf * x).ln() } else { 0.0 }).sum())
}

/// Free energy `hamiltonian + relative_entropy`.
pub fn free_energy(nu: &ProbabilityVector, p: &ModelParams) -> Result<f64> {
    let h = hamiltonian(nu, p)?;
    Ok(h + relative_entropy(nu, nu.len())?)
}

/// The symmetric candidate minimizer with one favored color.
pub fn embed(u: Magnetization, q: usize) -> ProbabilityVector {
    let u = u.value();
    let qf = q as f64;
    let mut w = vec![(1.0 - u) / qf; q];
    w[0] = (1.0 + (qf - 1.0) * u) / qf;
    ProbabilityVector(w)
}

/// Free energy along the magnetization coordinate, `k(u) = Gamma(embed(u, q))`.
///
/// Accepts `u = 1` as the limit point.
pub fn k(u: f64, p: &ModelParams) -> f64 {
    let q = p.q;
    let b = 1.0 + (q - 1.0) * u;
    let a = 1.0 - u;
    let entropy = (xlogx(b) + (q - 1.0) * xlogx(a)) / q;
    let energy = (p.beta / p.z) * q.powf(-p.z) * (b.powf(p.z) + (q - 1.0) * a.powf(p.z));
    entropy - energy
}

pub fn k_prime(u: f64, p: &ModelParams) -> f64 {
    let q = p.q;
    let b = 1.0 + (q - 1.0) * u;
    let a = 1.0 - u;
    let m = p.z - 1.0;
    -(q - 1.0) / q.powf(p.z) * p.beta * (b.powf(m) - a.powf(m)) + (q - 1.0) / q * log_ratio(u, q)
}

pub fn k_double_prime(u: f64, p: &ModelParams) -> f64 {
    let q = p.q;
    let b = 1.0 + (q - 1.0) * u;
    let a = 1.0 - u;
    let m = p.z - 1.0;
    -(q - 1.0) / q.powf(p.z) * p.beta * m * ((q - 1.0) * b.powf(m - 1.0) + a.powf(m - 1.0))
        + (q - 1.0) / (a * b)
}

/// `ln(1 + (q-1)u) - ln(1 - u)`, accurate for small `u`.
#[inline]
fn log_ratio(u: f64, q: f64) -> f64 {
    ((q - 1.0) * u).ln_1p() - (-u).ln_1p()
}

/// `(1 + (q-1)u)^m - (1-u)^m`, accurate for small `u`.
#[inline]
fn power_gap(u: f64, q: f64, m: f64) -> f64 {
    if u < 0.5 {
        (1.0 - u).powf(m) * (m * log_ratio(u, q)).exp_m1()
    } else {
        (1.0 + (q - 1.0) * u).powf(m) - (1.0 - u).powf(m)
    }
}

/// Exponent `Delta(u)` of the mean-field equation.
pub fn mf_delta(u: f64, p: &ModelParams) -> f64 {
    let m = p.z - 1.0;
    -p.beta / p.q.powf(m) * power_gap(u, p.q, m)
}

/// Right-hand side of the mean-field equation `u = mf_rhs(u)`.
pub fn mf_rhs(u: f64, p: &ModelParams) -> f64 {
    let d = mf_delta(u, p);
    -d.exp_m1() / (1.0 + (p.q - 1.0) * d.exp())
}

/// Limit of `beta_of_u` as `u -> 0`, the spinodal `q^(z-1) / (z-1)`.
pub fn beta_one_limit(q: f64, z: f64) -> f64 {
    q.powf(z - 1.0) / (z - 1.0)
}

/// Inverse temperature at which `u` solves the mean-field equation.
///
/// `u = 0` returns the limit value; below `SERIES_CUTOFF` a second-order
/// expansion replaces the 0/0 quotient, and `u` is capped at `U_CAP`.
pub fn beta_of_u(u: f64, q: f64, z: f64) -> Result<f64> {
    check_qz(q, z)?;
    if !(0.0..1.0).contains(&u) {
        return Err(Error::Domain(format!("beta_of_u needs u in (0, 1), got {u}")));
    }
    let m = z - 1.0;
    if u < SERIES_CUTOFF {
        let a = q - 1.0;
        let n1 = (1.0 - a) / 2.0;
        let n2 = (a * a - a + 1.0) / 3.0;
        let d1 = (m - 1.0) * (a - 1.0) / 2.0;
        let d2 = (m - 1.0) * (m - 2.0) * (a * a - a + 1.0) / 6.0;
        let c1 = n1 - d1;
        let c2 = n2 - n1 * d1 + d1 * d1 - d2;
        return Ok(beta_one_limit(q, z) * (1.0 + c1 * u + c2 * u * u));
    }
    let u = u.min(U_CAP);
    Ok(q.powf(m) * log_ratio(u, q) / power_gap(u, q, m))
}

/// A quantity with the sign of `d beta_of_u / du` on `(0, 1)`.
pub fn beta_of_u_slope_sign(u: f64, q: f64, z: f64) -> f64 {
    let m = z - 1.0;
    let a = 1.0 - u;
    let b = 1.0 + (q - 1.0) * u;
    q * power_gap(u, q, m) - m * log_ratio(u, q) * a * b * ((q - 1.0) * b.powf(m - 1.0) + a.powf(m - 1.0))
}

/// Auxiliary function `g(x) = beta x^(z-1) - ln(q x)` on `(0, 1]`.
pub fn aux_g(x: f64, p: &ModelParams) -> f64 {
    p.beta * x.powf(p.z - 1.0) - (p.q * x).ln()
}

/// Unique minimizer of `aux_g`, `(beta (z-1))^(-1/(z-1))`.
pub fn tilde_u(p: &ModelParams) -> Result<f64> {
    if p.beta <= 0.0 {
        return Err(Error::Domain("tilde_u is undefined at beta = 0".into()));
    }
    Ok((p.beta * (p.z - 1.0)).powf(-1.0 / (p.z - 1.0)))
}

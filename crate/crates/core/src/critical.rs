//! Solutions of the mean-field equation and the critical temperatures.
//!
//! Positive solutions of the mean-field equation at inverse temperature
//! `beta` are exactly the preimages of `beta` under `beta_of_u`. In the
//! first-order regime `beta_of_u` is cup shaped: it falls from `beta_one` at
//! `u = 0` to its minimum `beta_zero` and then increases to infinity, so each
//! branch is monotone and inverted by bisection. On the second-order strip
//! `q = 2, 2 <= z <= 4` it is increasing on the whole interval.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{self, beta_of_u, beta_of_u_slope_sign, check_qz, k, k_double_prime, ModelParams, U_CAP};
use crate::numeric::bisect;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransitionOrder {
    First,
    Second,
}

/// Solver tolerances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Bracket width for roots and minimizers in `u`.
    pub u_tol: f64,
    /// Bracket width for the critical inverse temperature.
    pub beta_tol: f64,
    /// `|k''|` below this marks a stationary point as a saddle.
    pub saddle_eps: f64,
    /// `|beta - beta_c|` below this is reported as critical.
    pub critical_eps: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { u_tol: 1e-12, beta_tol: 1e-10, saddle_eps: 1e-9, critical_eps: 1e-9 }
    }
}

impl Tolerances {
    /// Scales every tolerance so that `beta_tol` becomes `tol`.
    pub fn scaled(tol: f64) -> Self {
        let d = Tolerances::default();
        let s = tol / d.beta_tol;
        Tolerances {
            u_tol: d.u_tol * s,
            beta_tol: tol,
            saddle_eps: d.saddle_eps * s,
            critical_eps: d.critical_eps * s,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalTemperatures {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_zero: Option<f64>,
    pub beta_one: f64,
    pub beta_c: f64,
    pub order: TransitionOrder,
}

/// Sorted solutions of the mean-field equation, always starting with `0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MfSolutionSet {
    pub solutions: Vec<f64>,
}

impl MfSolutionSet {
    /// Largest solution, the magnetization of the ordered phase.
    pub fn largest(&self) -> f64 {
        *self.solutions.last().expect("0 is always a solution")
    }

    pub fn positive(&self) -> &[f64] {
        &self.solutions[1..]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StationaryKind {
    Min,
    Max,
    Saddle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationaryPoint {
    pub u: f64,
    pub k: f64,
    pub kind: StationaryKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandscapeProfile {
    pub points: Vec<StationaryPoint>,
    pub global_min_u: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LimitKind {
    /// Point mass at the uniform distribution.
    Equidistribution,
    /// Uniform mixture over the `q` color permutations of `embed(u, q)`.
    SymmetricMixture,
    /// `beta` sits at `beta_c`; no limit is asserted.
    Critical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitDescription {
    pub kind: LimitKind,
    pub u_value: f64,
}

/// `q^(z-1) / (z-1)`: where `u = 0` stops being a local minimum of `k`.
pub fn beta_one(q: f64, z: f64) -> f64 {
    model::beta_one_limit(q, z)
}

/// Left bifurcation line, `k''(0) = 0`. Same value as [`beta_one`].
pub fn spinodal_lower(q: f64, z: f64) -> f64 {
    1.0 / ((z - 1.0) / q.powf(z - 1.0))
}

/// Second order exactly on `q = 2, 2 <= z <= 4`. The test on `q` is exact.
pub fn transition_order(q: f64, z: f64) -> TransitionOrder {
    if q == 2.0 && (2.0..=4.0).contains(&z) {
        TransitionOrder::Second
    } else {
        TransitionOrder::First
    }
}

/// Critical-point solver with configurable tolerances.
#[derive(Debug, Clone, Copy, Default)]
pub struct CriticalSolver {
    pub tol: Tolerances,
}

impl CriticalSolver {
    pub fn new(tol: Tolerances) -> Self {
        CriticalSolver { tol }
    }

    /// Location and value `(u0, beta_zero)` of the interior minimum of `beta_of_u`.
    pub fn beta_zero_point(&self, q: f64, z: f64) -> Result<(f64, f64)> {
        check_qz(q, z)?;
        if transition_order(q, z) == TransitionOrder::Second {
            return Err(Error::Domain(format!(
                "beta_zero is undefined for (q, z) = ({q}, {z}): beta_of_u is increasing"
            )));
        }
        let beta = |u: f64| beta_of_u(u, q, z).expect("u in range");
        // Coarse scan; log spacing near zero resolves minima close to the
        // boundary when (q, z) approaches the second-order strip.
        let mut grid: Vec<f64> = (0..=120).map(|i| 10f64.powf(-9.0 + 7.0 * i as f64 / 120.0)).collect();
        grid.extend((1..400).map(|i| i as f64 / 400.0));
        grid.sort_by(f64::total_cmp);
        let (best, _) = grid
            .iter()
            .enumerate()
            .map(|(i, &u)| (i, beta(u)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("grid is nonempty");
        let lo = if best == 0 { 0.0 } else { grid[best - 1] };
        let hi = grid[(best + 1).min(grid.len() - 1)];
        // Refine on the sign change of the analytic slope.
        let u0 = bisect(|u| beta_of_u_slope_sign(u, q, z), lo.max(1e-12), hi, self.tol.u_tol);
        Ok((u0, beta(u0)))
    }

    pub fn beta_zero(&self, q: f64, z: f64) -> Result<f64> {
        self.beta_zero_point(q, z).map(|(_, b)| b)
    }

    /// Increasing branch root: the `u` right of `from` with `beta_of_u(u) = beta`.
    fn right_branch_root(&self, q: f64, z: f64, from: f64, beta: f64) -> f64 {
        let f = |u: f64| beta_of_u(u, q, z).expect("u in range") - beta;
        if f(U_CAP) <= 0.0 {
            return U_CAP;
        }
        bisect(f, from, U_CAP, self.tol.u_tol)
    }

    pub fn mf_solutions(&self, p: &ModelParams) -> Result<MfSolutionSet> {
        p.validate()?;
        let (q, z, beta) = (p.q, p.z, p.beta);
        let b1 = beta_one(q, z);
        let mut solutions = vec![0.0];
        match transition_order(q, z) {
            TransitionOrder::Second => {
                if beta > b1 {
                    solutions.push(self.right_branch_root(q, z, 0.0, beta));
                }
            }
            TransitionOrder::First => {
                let (u0, b0) = self.beta_zero_point(q, z)?;
                if beta == b0 {
                    solutions.push(u0);
                } else if beta > b0 {
                    if beta < b1 {
                        let f = |u: f64| beta_of_u(u, q, z).expect("u in range") - beta;
                        solutions.push(bisect(f, 0.0, u0, self.tol.u_tol));
                    }
                    solutions.push(self.right_branch_root(q, z, u0, beta));
                }
            }
        }
        // Just above beta_zero the two branch roots can coincide numerically.
        solutions.dedup_by(|b, a| (*b - *a).abs() <= 2.0 * self.tol.u_tol);
        Ok(MfSolutionSet { solutions })
    }

    /// Largest mean-field solution `u(beta, q, z)`.
    pub fn largest_solution(&self, p: &ModelParams) -> Result<f64> {
        Ok(self.mf_solutions(p)?.largest())
    }

    /// `k(u2) - k(0)` at inverse temperature `beta`, with `u2` the largest
    /// solution on the increasing branch right of `u0`.
    fn phi(&self, q: f64, z: f64, u0: f64, beta: f64) -> f64 {
        let p = ModelParams { q, z, beta };
        let u2 = self.right_branch_root(q, z, u0, beta);
        k(u2, &p) - k(0.0, &p)
    }

    pub fn beta_c(&self, q: f64, z: f64) -> Result<CriticalTemperatures> {
        check_qz(q, z)?;
        let b1 = beta_one(q, z);
        let order = transition_order(q, z);
        if order == TransitionOrder::Second {
            return Ok(CriticalTemperatures { beta_zero: None, beta_one: b1, beta_c: b1, order });
        }
        let (u0, b0) = self.beta_zero_point(q, z)?;
        // phi decreases in beta: positive at beta_zero, nonpositive at beta_one.
        let bc = bisect(|b| self.phi(q, z, u0, b), b0, b1, self.tol.beta_tol);
        Ok(CriticalTemperatures { beta_zero: Some(b0), beta_one: b1, beta_c: bc, order })
    }

    pub fn landscape(&self, p: &ModelParams) -> Result<LandscapeProfile> {
        let sols = self.mf_solutions(p)?;
        let points: Vec<StationaryPoint> = sols
            .solutions
            .iter()
            .map(|&u| {
                let curvature = k_double_prime(u, p);
                let kind = if curvature.abs() < self.tol.saddle_eps {
                    StationaryKind::Saddle
                } else if curvature > 0.0 {
                    StationaryKind::Min
                } else {
                    StationaryKind::Max
                };
                StationaryPoint { u, k: k(u, p), kind }
            })
            .collect();
        let at_critical = (p.beta - self.beta_c(p.q, p.z)?.beta_c).abs() <= self.tol.critical_eps;
        let global_min_u = if at_critical {
            0.0
        } else {
            points
                .iter()
                .fold((0.0, points[0].k), |(bu, bk), pt| if pt.k < bk { (pt.u, pt.k) } else { (bu, bk) })
                .0
        };
        Ok(LandscapeProfile { points, global_min_u })
    }

    pub fn limit_distribution(&self, p: &ModelParams) -> Result<LimitDescription> {
        let bc = self.beta_c(p.q, p.z)?.beta_c;
        if (p.beta - bc).abs() <= self.tol.critical_eps {
            Ok(LimitDescription { kind: LimitKind::Critical, u_value: 0.0 })
        } else if p.beta < bc {
            Ok(LimitDescription { kind: LimitKind::Equidistribution, u_value: 0.0 })
        } else {
            let u = self.largest_solution(p)?;
            Ok(LimitDescription { kind: LimitKind::SymmetricMixture, u_value: u })
        }
    }
}

pub fn beta_zero(q: f64, z: f64) -> Result<f64> {
    CriticalSolver::default().beta_zero(q, z)
}

pub fn mf_solutions(p: &ModelParams) -> Result<MfSolutionSet> {
    CriticalSolver::default().mf_solutions(p)
}

pub fn beta_c(q: f64, z: f64) -> Result<CriticalTemperatures> {
    CriticalSolver::default().beta_c(q, z)
}

pub fn landscape(p: &ModelParams) -> Result<LandscapeProfile> {
    CriticalSolver::default().landscape(p)
}

pub fn limit_distribution(p: &ModelParams) -> Result<LimitDescription> {
    CriticalSolver::default().limit_distribution(p)
}

//! Collapsing schemes: fuzzy models along a coarsening sequence of partitions.
//!
//! A scheme `A_0, ..., A_T` starts from singletons and ends with one block.
//! At each interior time the fuzzy image is non-Gibbs exactly when `beta`
//! reaches the critical temperature of the smallest class that can carry a
//! first-order transition (see [`crate::fuzzy::r_star`]).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, SchemeViolation};
use crate::fuzzy::{r_star, FuzzyAnalyzer};

/// A partition of `{1, ..., q}`, blocks sorted internally and by smallest element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Partition(Vec<Vec<usize>>);

impl Partition {
    fn canonical(q: usize, blocks: Vec<Vec<usize>>, t: usize) -> Result<Self> {
        let bad = |msg: String| Error::Scheme { t, violation: SchemeViolation::MalformedPartition(msg) };
        let mut seen = vec![false; q + 1];
        let mut blocks = blocks;
        for block in blocks.iter_mut() {
            if block.is_empty() {
                return Err(bad("empty block".into()));
            }
            block.sort_unstable();
            for &x in block.iter() {
                if x == 0 || x > q {
                    return Err(bad(format!("element {x} outside 1..={q}")));
                }
                if seen[x] {
                    return Err(bad(format!("element {x} appears twice")));
                }
                seen[x] = true;
            }
        }
        if let Some(missing) = (1..=q).find(|&x| !seen[x]) {
            return Err(bad(format!("element {missing} is not covered")));
        }
        blocks.sort_by_key(|b| b[0]);
        Ok(Partition(blocks))
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.0
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.0.iter().map(Vec::len).collect()
    }

    /// Every block of `self` lies inside a block of `coarser`.
    fn is_refined_by(&self, coarser: &Partition, q: usize) -> bool {
        let mut owner = vec![0usize; q + 1];
        for (i, b) in coarser.0.iter().enumerate() {
            for &x in b {
                owner[x] = i;
            }
        }
        self.0.iter().all(|b| b.iter().all(|&x| owner[x] == owner[b[0]]))
    }
}

/// Validated scheme `A_0, ..., A_T` over `q` colors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CollapsingScheme {
    q: usize,
    partitions: Vec<Partition>,
}

/// On-disk scheme description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeFile {
    pub q: usize,
    pub z: f64,
    pub partitions: Vec<Vec<Vec<usize>>>,
}

impl SchemeFile {
    pub fn scheme(&self) -> Result<CollapsingScheme> {
        CollapsingScheme::new(self.q, self.partitions.clone())
    }
}

impl CollapsingScheme {
    pub fn new(q: usize, partitions: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidParams(format!("a collapsing scheme needs q >= 2, got {q}")));
        }
        if partitions.is_empty() {
            return Err(Error::Scheme { t: 0, violation: SchemeViolation::WrongStart });
        }
        let partitions = partitions
            .into_iter()
            .enumerate()
            .map(|(t, blocks)| Partition::canonical(q, blocks, t))
            .collect::<Result<Vec<_>>>()?;
        if partitions[0].0.len() != q {
            return Err(Error::Scheme { t: 0, violation: SchemeViolation::WrongStart });
        }
        for t in 1..partitions.len() {
            if !partitions[t - 1].is_refined_by(&partitions[t], q) {
                return Err(Error::Scheme { t, violation: SchemeViolation::NonCoarsening });
            }
            if partitions[t].0.len() >= partitions[t - 1].0.len() {
                return Err(Error::Scheme { t, violation: SchemeViolation::NonStrict });
            }
        }
        let last = partitions.len() - 1;
        if partitions[last].0.len() != 1 {
            return Err(Error::Scheme { t: last, violation: SchemeViolation::WrongEnd });
        }
        Ok(CollapsingScheme { q, partitions })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Final time `T`.
    pub fn horizon(&self) -> usize {
        self.partitions.len() - 1
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    /// Binary-tree scheme on `q = 2^levels` colors: pairs, then quadruples, ...
    pub fn binary(levels: u32) -> Self {
        let q = 1usize << levels;
        let partitions = (0..=levels)
            .map(|l| {
                let width = 1usize << l;
                (0..q / width).map(|b| (b * width + 1..=(b + 1) * width).collect()).collect()
            })
            .collect();
        CollapsingScheme::new(q, partitions).expect("binary scheme is valid")
    }
}

/// Validates a raw scheme description.
pub fn validate(q: usize, partitions: &[Vec<Vec<usize>>]) -> Result<()> {
    CollapsingScheme::new(q, partitions.to_vec()).map(|_| ())
}

/// `r_*` of the block sizes at `t = 1, ..., T-1`.
pub fn r_star_trajectory(scheme: &CollapsingScheme, z: f64) -> Vec<Option<usize>> {
    let t_max = scheme.horizon();
    (1..t_max).map(|t| r_star(&scheme.partitions[t].block_sizes(), z)).collect()
}

/// Regular: `T >= 2` and the `r_*` trajectory is nondecreasing, where a time
/// without a qualifying class ranks above every size (it is Gibbs at every
/// `beta`).
pub fn is_regular(scheme: &CollapsingScheme, z: f64) -> bool {
    if scheme.horizon() < 2 {
        return false;
    }
    let ranks: Vec<usize> = r_star_trajectory(scheme, z).into_iter().map(|r| r.unwrap_or(usize::MAX)).collect();
    ranks.windows(2).all(|w| w[0] <= w[1])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Gibbs,
    NonGibbs,
    /// `t = 0` (the Potts measure itself) and `t = T` (a single state).
    TrivialEndpoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub t: usize,
    pub block_sizes: Vec<usize>,
    pub r_star: Option<usize>,
    pub threshold_beta: Option<f64>,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
    /// Times `t` whose status differs from that at `t - 1`, interior only.
    pub switches: Vec<usize>,
    pub regular: bool,
    /// For regular schemes: first Gibbs time after a non-Gibbs stretch.
    pub t_g: Option<usize>,
}

impl Trajectory {
    pub fn statuses(&self) -> Vec<Status> {
        self.points.iter().map(|p| p.status).collect()
    }

    /// Statuses at `t = 1, ..., T-1`.
    pub fn interior_statuses(&self) -> Vec<Status> {
        let n = self.points.len();
        self.points[1..n - 1].iter().map(|p| p.status).collect()
    }
}

pub fn gibbs_trajectory(beta: f64, scheme: &CollapsingScheme, z: f64) -> Result<Trajectory> {
    gibbs_trajectory_with(FuzzyAnalyzer::shared(), beta, scheme, z)
}

pub fn gibbs_trajectory_with(analyzer: &FuzzyAnalyzer, beta: f64, scheme: &CollapsingScheme, z: f64) -> Result<Trajectory> {
    if !beta.is_finite() || beta < 0.0 || !z.is_finite() || z < 2.0 {
        return Err(Error::InvalidParams(format!("need beta >= 0 and z >= 2, got beta={beta}, z={z}")));
    }
    let t_max = scheme.horizon();
    let mut points = Vec::with_capacity(t_max + 1);
    for (t, part) in scheme.partitions.iter().enumerate() {
        let block_sizes = part.block_sizes();
        if t == 0 || t == t_max {
            points.push(TrajectoryPoint { t, block_sizes, r_star: None, threshold_beta: None, status: Status::TrivialEndpoint });
            continue;
        }
        let rs = r_star(&block_sizes, z);
        let threshold = rs.map(|r| analyzer.class_beta_c(r, z)).transpose()?;
        let status = match threshold {
            Some(th) if beta >= th => Status::NonGibbs,
            _ => Status::Gibbs,
        };
        points.push(TrajectoryPoint { t, block_sizes, r_star: rs, threshold_beta: threshold, status });
    }
    let switches = (2..t_max).filter(|&t| points[t].status != points[t - 1].status).collect();
    let regular = is_regular(scheme, z);
    let t_g = if regular {
        (2..t_max).find(|&t| points[t].status == Status::Gibbs && points[t - 1].status == Status::NonGibbs)
    } else {
        None
    };
    Ok(Trajectory { points, switches, regular, t_g })
}

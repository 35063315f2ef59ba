//! Finite-volume machinery.
//!
//! Exact computations run over type classes (color count vectors) with
//! multinomial log-weights. The samplers cover single-site heat-bath dynamics
//! for the mean-field measure and the clique coupling between spins and
//! random-cluster configurations for integer `z`.

mod cluster;
mod exact;
mod sampler;

pub use cluster::{
    clique_potts_variance, coupling_marginals, hamiltonian_rewrite_gap, open_probability, percolation_scan, rcm_components,
    rcm_exact, variance_identity_check, variance_identity_mc, CliqueConfig, CliqueSet, ComponentReport, EsSampler,
    MarginalCheck, PercolationPoint, RcmExact, UnionFind, VarianceIdentity,
};
pub use exact::{
    exact_type_distribution, log_partition_expectation, partition_expectation, qn_exact, qn_exact_row, qn_kernel,
    qn_kernel_row, TypeDistribution, TypeOccupancy,
};
pub use sampler::GibbsSampler;

/// Default cap on the number of type classes an exact enumeration may visit.
pub const DEFAULT_MAX_STATES: u64 = 5_000_000;
/// Default cap on the number of cliques a coupled sampler may hold.
pub const DEFAULT_MAX_CLIQUES: u64 = 1_000_000;

pub(crate) fn rng_for(seed: u64, stream: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

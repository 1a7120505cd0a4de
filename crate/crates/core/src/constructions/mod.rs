//! Constructive cores of the convergence arguments: perturbation
//! equivalence, gliding-hump extraction, triangular column extraction,
//! exact Walsh almost-Euclidean block systems, the block counterexample
//! builder, and oscillation functionals.

pub mod counterexample;
pub mod fd_claim;
pub mod gliding;
pub mod oscillation;
pub mod perturbation;
pub mod walsh;

pub use counterexample::{
    build_block_counterexample, ceil_two_over_eps_squared, coordinatewise_null_check,
    dvoretzky_bounds_on_block, BlockAssign, BlockCounterexample, WeakConvergenceCertificate,
};
pub use fd_claim::{extract_fd_claim, FdClaimCertificate};
pub use gliding::{extract_basic_subsequence, DeltaSchedule, ExtractionCertificate};
pub use oscillation::{oscillation_functional, OscillationReport, SignRule};
pub use perturbation::{perturbation_check, PerturbationReport};
pub use walsh::{bounds_hold, khintchine_sum, walsh_system, WalshReport, WalshSystem, MAX_DIM};

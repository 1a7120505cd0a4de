//! filterlab-core: an executable toolkit for filter convergence on the
//! naturals.
//!
//! The crate provides five subsystems:
//!
//! * [`setalg`] — a closed algebra of finitely-describable subsets of
//!   ℕ = {1, 2, ...} with exact membership, counting, natural-density
//!   analysis, blockings, and the fixed column partition.
//! * [`filters`] — concrete free filters (Fréchet, statistical,
//!   countable-base, the two column filters) with membership and
//!   stationarity decision procedures, the filter algebra (trace, sum,
//!   product), and witness/refuter procedures for the block-respecting,
//!   diagonal, and strongly diagonal properties.
//! * [`l1seq`] — exact-rational finitely supported ℓ₁ vectors, test
//!   functionals of sup-norm at most one, and deterministic sequence
//!   generators.
//! * [`convergence`] — horizon-bounded filter limits, cluster-point
//!   refuters, almost-Schur checks, and the statistical/Cesàro
//!   equivalence diagnostics.
//! * [`constructions`] — the constructive procedures: block-basis
//!   perturbation checking, gliding-hump extraction, triangular
//!   column extraction, exact Walsh almost-Euclidean block systems,
//!   block counterexample builders, and oscillation functionals.
//!
//! Every check returns a three-valued [`filters::Verdict`]
//! (Proved / Refuted / Consistent) carrying a certificate that the
//! independent checker in [`cert`] re-validates without re-running the
//! decision procedure.

pub mod cert;
pub mod constructions;
pub mod convergence;
pub mod error;
pub mod filters;
pub mod l1seq;
pub mod ratio;
pub mod setalg;

pub use error::FilterlabError;

pub use setalg::SetExpr;

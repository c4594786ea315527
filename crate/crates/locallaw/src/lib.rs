//! locallaw: a numerical laboratory for local spectral laws of sample
//! covariance matrices `X*X` and generalized Wigner matrices.
//!
//! The crate has three layers:
//!
//! * deterministic kernels: [`laws`] (Marchenko-Pastur / semicircle
//!   transforms, edges, classical locations, stability operator, domains)
//!   and [`resolvent`] (eigendecomposition-backed resolvents, minors, and
//!   machine-precision checks of the resolvent identities);
//! * a symbolic engine: [`expansion`] holds the coloured-multigraph
//!   calculus that rewrites a product of resolvent entries into monomials
//!   in `X` and fully-removed minors, with exact prefactor tracking;
//! * Monte Carlo verification: [`ensembles`] (reproducible matrix
//!   generators) and [`harness`] (isotropic/entrywise/outside local-law
//!   experiments, rigidity, delocalization, fluctuation averaging,
//!   stochastic-domination estimation, scaling fits).
//!
//! [`report`] wires the experiments to flat-file configs, CSV/JSON output,
//! and the `locallaw` command-line entry point. Each major capability also
//! has a runnable program under `examples/`.

pub mod ensembles;
pub mod error;
pub mod expansion;
pub mod harness;
pub mod laws;
pub mod linalg;
pub mod quad;
pub mod report;
pub mod resolvent;
pub mod rng;

pub use error::{Error, Result};
pub use laws::{AspectRatio, DomainKind, DomainSpec, LawEvaluation, RescaledParams, SpectralPoint};

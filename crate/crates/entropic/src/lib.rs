//! Conjugation maps on probability measures over compact 1D and 2D domains.
//!
//! The central object is the conjugation map `C` on probability measures: the
//! involution obtained by inverting the monotone (Brenier) transport map from
//! the reference measure `m` through potential conjugation. On `[0,1]` with
//! uniform `m` it swaps distribution functions and their right inverses; on a
//! convex planar domain it is realized through Laguerre tessellations and
//! semi-discrete optimal transport.
//!
//! On top of the conjugation machinery the crate samples the entropic measure:
//! the pushforward under `C` of the Dirichlet-Ferguson process built by
//! stick-breaking, and validates its structural laws (hole sizes, Dirichlet
//! marginals, entropy duality, 1D isometries) with a seeded statistical
//! harness.
//!
//! Module map:
//!
//! - [`domain`]: compact domains (interval, circle, convex polygon), metric,
//!   reference measure and discretization grids.
//! - [`measure`]: probability-measure representations, partitions,
//!   coarse-graining and the minimal-entropy formula.
//! - [`monotone`]: exact piecewise-linear machinery for monotone graphs on
//!   `[0,1]` (the 1D closed-form engine everything else leans on).
//! - [`conjugation`]: the c-transform on grid potentials with its explicit
//!   discretization bound, plus the Euclidean Legendre-Fenchel route.
//! - [`transport`]: 1D transport (CDF / quantile / conjugate measures) and
//!   monotone transport maps.
//! - [`semidiscrete`]: Laguerre tessellations, the damped-Newton weight
//!   solver, Brenier maps onto discrete measures and 2D conjugate sampling.
//! - [`dirichlet`]: stick-breaking sampler for the Dirichlet-Ferguson process
//!   and its finite-dimensional marginal laws.
//! - [`entropic`]: entropic-measure samples (conjugated Dirichlet draws) and
//!   their hole/atom reports.
//! - [`metrics`]: relative entropy, the entropy duality gap, and Wasserstein
//!   distances (exact in 1D, coupling bounds and assignment estimates in 2D).
//! - [`harness`]: Kolmogorov-Smirnov and moment checks with reproducible
//!   reports.
//! - [`suite`]: the seeded acceptance battery wired into the CLI.

pub mod conjugation;
pub mod dirichlet;
pub mod domain;
pub mod entropic;
mod error;
pub mod geometry;
pub mod harness;
pub mod measure;
pub mod metrics;
pub mod monotone;
pub mod semidiscrete;
pub mod special;
pub mod suite;
pub mod transport;

pub use error::{Error, Result};

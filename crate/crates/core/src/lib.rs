//! Simulation and analysis of Λ-coalescents observed near time zero.
//!
//! The crate is organised around the objects that appear when a coalescent
//! is rescaled in a shrinking window `[0, ε]`:
//!
//! * [`lambda`]: merger rates `λ_{n,k}`, `γ_{n,k}` and the limit constants.
//! * [`coalescent`]: exact Gillespie simulation, merge histories, the Evans
//!   ultrametric and the ball-count path `Z_ε`.
//! * [`metric`]: finite ultrametric spaces (dendrograms) and exact or bounded
//!   Gromov-Hausdorff and Gromov-Hausdorff-Prokhorov distances.
//! * [`limit`]: the limiting branching process `Z`, its tree, its marginal
//!   oracle and the mass process `X`.
//! * [`excursion`]: Brownian grids, local times, excursion spaces and the
//!   `α = 2` limit built from a two-sided Brownian motion.
//! * [`harness`]: seeded replicate runs, statistics and the verification
//!   suites.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coalescent;
pub mod error;
pub mod excursion;
pub mod harness;
pub mod lambda;
pub mod limit;
pub mod metric;
pub mod path;
pub mod quadrature;
pub mod rng;
pub mod special;

pub use error::{Error, Result};

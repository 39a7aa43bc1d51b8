//! Sampling and spectral statistics for β-Laguerre and β-Hermite
//! ensembles at desk scale.
//!
//! The crate provides:
//!
//! - **ensembles**: chi-entry bidiagonal and tridiagonal samplers with
//!   deterministic, splittable random streams, plus exact unnormalized
//!   log-densities for tiny-n oracles.
//! - **spectral**: Sturm-sequence eigenvalue counting and bisection
//!   solving for symmetric tridiagonal matrices, the bulk scaling
//!   parameters, and the Marchenko–Pastur / singular-value densities.
//! - **hyperbolic**: lifted Möbius transformations on the boundary
//!   circle, the machinery behind phase-function counting.
//! - **phase**: forward and target phase functions of the conjugated
//!   tridiagonal model, their regularized versions, and exact
//!   eigenvalue counting by 2π-lattice crossings.
//! - **sde**: Euler–Maruyama integration of the Sine_β counting SDE and
//!   of the limiting phase diffusion, with coupled noise across λ.
//! - **experiments**: reproducible Monte-Carlo studies comparing the
//!   matrix and SDE sides, with JSON/CSV report emission.

// validation uses `!(x > 0.0)` on purpose: the negation rejects NaN,
// which `x <= 0.0` would let through
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ensembles;
pub mod error;
pub mod experiments;
pub mod hyperbolic;
pub mod phase;
pub mod rng;
pub mod sde;
pub mod spectral;
pub mod stats;

pub use error::{Error, Result};
pub use rng::RngStream;

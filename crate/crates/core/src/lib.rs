//! Monte Carlo estimation of the overlap `⟨φ|ψ⟩` and fidelity
//! `F = |⟨φ|ψ⟩|²` between two neural quantum states, Chebyshev error bounds
//! for those estimates, and an exact full-basis oracle to check both.
//!
//! The pieces, bottom-up:
//!
//! - [`configspace`]: bit-packed spin configurations, basis enumeration and
//!   seeded splittable random streams.
//! - [`ansatz`]: a complex-weight RBM (unnormalized) and a recurrent
//!   autoregressive network (normalized) behind the [`ansatz::Nqs`] trait.
//! - [`sampling`]: exact autoregressive sampling and single-flip
//!   Metropolis–Hastings.
//! - [`estimator`]: the ratio estimators `Y₁`, `Y₂` and the fidelity and
//!   overlap assembled from them.
//! - [`bounds`]: closed-form error radii, variances and sample planning.
//! - [`oracle`]: exact norms, overlaps and ratio moments by enumeration.
//! - [`tabulated`]: full-basis memoization of a state, including its
//!   autoregressive conditionals, for fast repeated experiments.
//! - [`bench`]: the experiment harness behind the `nqs-overlap` binary.
//!
//! Runnable walkthroughs live in this crate's `examples/` directory.

pub mod ansatz;
pub mod bench;
pub mod bounds;
pub mod configspace;
pub mod error;
pub mod estimator;
pub mod numeric;
pub mod oracle;
pub mod sampling;
pub mod tabulated;

pub use error::{Error, Result};

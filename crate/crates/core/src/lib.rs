//! Statistical limits of membership inference attacks (MIAs).
//!
//! An MIA is a binary rule `phi(theta, z)` that guesses whether the test
//! point `z` was part of the training set behind the parameters `theta`.
//! This crate computes the quantities that bound every such attack at once:
//!
//! * [`divergence`] — the two-parameter divergence family `D_alpha` /
//!   `D~_alpha`, the exact correspondence between the best attack accuracy
//!   and the divergence between the joint laws of (parameters, unseen
//!   sample) and (parameters, training sample), and security bounds from
//!   mutual information and differential privacy.
//! * [`discrete`] — closed forms for discrete data: the exact binomial mean
//!   absolute deviation, the worst-case security over all learning
//!   procedures, the diversity index `C_K(P)` with its Gini-Simpson and
//!   Shannon comparisons, and sample-size calculators.
//! * [`brute_force`] — an independent exact oracle that enumerates every
//!   multinomial training outcome for small `(K, n)`, builds both joint
//!   laws for an arbitrary learning procedure, and certifies the closed
//!   forms.
//! * [`empmean`] — security lower bounds for procedures that are functions
//!   of empirical means, including the Gaussian total-variation bound.
//! * [`overfit`] — desk-scale simulations showing that interpolating
//!   regressors (minimum-norm linear regression, 1-nearest-neighbor) admit
//!   near-perfect loss-threshold attacks.
//!
//! All probability arithmetic is 64-bit floating point with log-space
//! products, so formulas stay representable for sample counts up to about
//! `1e6`. Every type is an immutable value after construction; every
//! operation is a pure function, safe to call from any thread.
//!
//! The `parallel` feature (enabled by default) routes the data-parallel
//! inner loops through rayon. Results are bit-identical with and without
//! it, and for any worker count: see [`exec`].

pub mod brute_force;
pub mod discrete;
pub mod divergence;
pub mod empmean;
mod error;
pub mod exec;
pub mod numerics;
pub mod overfit;
pub mod types;

pub use error::{Error, Result};
pub use types::{
    AttackWeights, CountVector, DiscreteDistribution, JointDistribution, Method, SecurityReport,
};

//! Extreme-value estimates of how much probability mass the low-probability
//! instantiations of a Bayesian belief network carry.
//!
//! If approximate inference keeps only the instantiations with probability
//! at least `p0`, every marginal it reports is off by at most `G(p0)`, the
//! total mass of the discarded instantiations. This crate estimates the left
//! tail of `G` from a modest sample: the values below a threshold `u` are
//! modeled by a reversed generalized Pareto distribution whose parameters
//! come from robustly combined two-point (elemental) estimates.
//!
//! Modules:
//!
//! - [`bayesnet`]: discrete networks, enumeration, logic sampling, marginals.
//! - [`contmodel`]: a three-variable continuous network with closed-form `f`, `F`, `G`.
//! - [`gcurve`]: exact, empirical and log-normal mass curves.
//! - [`tailfit`]: the tail model and its estimator.
//! - [`experiment`]: the seeded experiment runs behind the CLI.

pub mod bayesnet;
pub mod contmodel;
pub mod error;
pub mod experiment;
pub mod gcurve;
pub mod output;
pub mod rng;
pub mod tailfit;

pub use error::{Error, Result};

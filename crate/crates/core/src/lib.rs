//! Discrete sequential-auction equilibria for a monopolistic insider.
//!
//! Four equilibrium concepts are supported (see [`ModelKind`]): Kyle's
//! price-taking insider, and insiders who account for their influence on the
//! pricing rule while being risk-averse, risk-neutral or risk-seeking in how
//! they rank guaranteed against risky profits.
//!
//! The pipeline is
//!
//! 1. [`recursion::solve`]: backward recursion for the dimensionless
//!    coefficients `a_n, b_n, c_n`;
//! 2. [`path::build_path`]: trading intensities `β_n`, price impacts `λ_n`,
//!    residual variances `Σ_n` and value-function coefficients `α_n, δ_n`;
//! 3. [`simulate::simulate_market`]: seeded Monte Carlo of the auction game.
//!
//! [`path::limit_curves`] evaluates the continuous-trading limits and
//! [`path::period_objective`] the single-period deviation objectives.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod path;
pub mod recursion;
pub mod root;
pub mod simulate;
pub mod types;

pub use error::{Error, Result};
pub use path::build_path;
pub use recursion::{crosscheck_recursion, solve};
pub use simulate::{simulate_market, SimConfig, SimSummary};
pub use types::{CoefficientPath, EquilibriumPath, MarketParams, ModelKind};

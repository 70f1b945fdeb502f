//! Statistical-equilibrium model of the division of labor between two
//! perishable goods.
//!
//! `N` producers each choose corn or sugar every period. Whichever good is
//! scarce (the short side of the market) pays off; the other good is
//! wasted. Producers respond to last period's payoffs through an
//! entropy-constrained (logit) choice rule with behavior scale `T`, which
//! turns the corn-producer count into a Markov chain with Binomial
//! transitions. The crate builds that chain exactly, solves for its ergodic
//! distribution three independent ways, simulates it, and measures the
//! inequality it produces.
//!
//! ```
//! use gravitation::{kernel, ModelParams};
//!
//! let params = ModelParams::new(100, 1.0).unwrap();
//! let pi = kernel::stationary_analytic(&params).unwrap();
//! assert!((kernel::stationary_mean(&pi) - 0.5).abs() < 1e-9);
//! ```

// `!(x > 0.0)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod choice;
pub mod dynamics;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod format;
pub mod inequality;
pub mod kernel;
pub mod model;
pub mod payoff;

pub use error::{Error, Result};
pub use exec::Execution;
pub use model::{
    validate_params, Action, HalfRule, MarketOutcome, MarketState, ModelParams, ShortSide,
};

//! Locally risk-minimizing hedging of unit-linked life insurance portfolios
//! when the mortality hazard is driven by a hidden finite-state Markov chain
//! that is observed only through the portfolio's death counts.
//!
//! The crate is organised around the pipeline a scenario run follows:
//!
//! * [`hazard`] — the hidden-hazard model: chain simulation, doubly-stochastic
//!   lifetimes, the death-counting process and pathwise survival factors.
//! * [`filter`] — the conditional law of the hidden state given the observed
//!   deaths, computed by integrating a linear (unnormalized) flow between
//!   deaths and applying a multiplicative update at each death, plus two
//!   independent oracles used for validation.
//! * [`projection`] — backward ODE solvers for the survival projection
//!   (pure endowment) and the death-payout kernel (term insurance), and the
//!   expected-survivor processes built from them.
//! * [`market`] — the Black-Scholes financial side: price simulation,
//!   closed-form price/delta, the minimal-martingale-measure density and the
//!   structure-condition decomposition.
//! * [`hedge`] — assembly of the pseudo-optimal (locally risk-minimizing)
//!   strategy, value and cost processes along simulated scenarios, and a
//!   conditional Monte Carlo estimator of the residual risk process.
//!
//! The crate is `no_std` (with `alloc`); all floating-point special functions
//! go through `libm` so results are identical across build modes. IO, file
//! formats and the CLI live in the companion `coxhedge-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod filter;
pub mod grid;
pub mod hazard;
pub mod hedge;
pub mod market;
pub mod math;
pub mod projection;
pub mod rng;

pub use filter::{FilterState, FilterTrajectory};
pub use hazard::{ChainPath, HazardModel, PortfolioPath};
pub use hedge::{HedgeRecord, ScenarioResult};
pub use market::{ClaimSpec, MarketModel, Payoff};
pub use projection::ProjectionTable;

//! Black-Scholes financial market in discounted units (riskless rate zero).
//!
//! The market is complete here, which keeps every quantity the hedging
//! engine needs in closed form: the claim price and its delta (the
//! risk-minimizing integrand on the financial side), the minimal-martingale-
//! measure density `L_t = exp(-(mu/sigma) W_t - (mu/sigma)^2 t / 2)`, and the
//! structure-condition split of price increments into a martingale part and
//! the drift `alpha d<M>` with `alpha = mu / (sigma^2 S)`.

use alloc::vec::Vec;
use core::fmt;

use crate::math::normal_cdf;
use crate::rng::Prng;

#[derive(Clone, Debug, PartialEq)]
pub enum MarketError {
    NonPositiveSpot,
    NonPositiveVol,
    BadHorizon,
    BadStrike,
    UnsupportedTermPayoff,
    BadGrid,
    LengthMismatch,
    QueryAfterMaturity,
    NonPositivePrice,
}

impl fmt::Display for MarketError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MarketError::NonPositiveSpot => write!(f, "initial price must be > 0"),
            MarketError::NonPositiveVol => write!(f, "volatility must be > 0"),
            MarketError::BadHorizon => write!(f, "horizon must be positive and finite"),
            MarketError::BadStrike => write!(f, "strike must be finite and >= 0"),
            MarketError::UnsupportedTermPayoff => {
                write!(f, "term payouts support constant, identity and call payoffs only")
            }
            MarketError::BadGrid => write!(f, "grid must be increasing and start at 0"),
            MarketError::LengthMismatch => write!(f, "path and grid lengths differ"),
            MarketError::QueryAfterMaturity => write!(f, "valuation time lies after the maturity"),
            MarketError::NonPositivePrice => write!(f, "spot price must be > 0"),
        }
    }
}

impl core::error::Error for MarketError {}

/// Geometric Brownian motion market, discounted units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MarketModel {
    pub s0: f64,
    pub mu: f64,
    pub sigma: f64,
    pub horizon: f64,
}

impl MarketModel {
    pub fn new(s0: f64, mu: f64, sigma: f64, horizon: f64) -> Result<Self, MarketError> {
        if !(s0 > 0.0) || !s0.is_finite() {
            return Err(MarketError::NonPositiveSpot);
        }
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(MarketError::NonPositiveVol);
        }
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(MarketError::BadHorizon);
        }
        Ok(MarketModel { s0, mu, sigma, horizon })
    }
}

/// Payoff family shared by both contract types.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Payoff {
    Constant(f64),
    Identity,
    Call { strike: f64 },
    Put { strike: f64 },
}

impl Payoff {
    pub fn eval(&self, s: f64) -> f64 {
        match *self {
            Payoff::Constant(c) => c,
            Payoff::Identity => s,
            Payoff::Call { strike } => (s - strike).max(0.0),
            Payoff::Put { strike } => (strike - s).max(0.0),
        }
    }

    fn validate(&self) -> Result<(), MarketError> {
        match *self {
            Payoff::Constant(c) if !c.is_finite() => Err(MarketError::BadStrike),
            Payoff::Call { strike } | Payoff::Put { strike } if !(strike >= 0.0) || !strike.is_finite() => {
                Err(MarketError::BadStrike)
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ContractKind {
    /// Pays `payoff(S_T)` at the horizon per policy-holder then alive.
    PureEndowment,
    /// Pays `payoff(S_t)` at each death before the horizon (settled at T).
    Term,
}

/// Insurance claim: contract type plus the financial payoff it is linked to.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClaimSpec {
    kind: ContractKind,
    payoff: Payoff,
}

impl ClaimSpec {
    pub fn new(kind: ContractKind, payoff: Payoff) -> Result<Self, MarketError> {
        payoff.validate()?;
        if kind == ContractKind::Term {
            if let Payoff::Put { .. } = payoff {
                return Err(MarketError::UnsupportedTermPayoff);
            }
        }
        Ok(ClaimSpec { kind, payoff })
    }

    pub fn kind(&self) -> ContractKind {
        self.kind
    }

    pub fn payoff(&self) -> Payoff {
        self.payoff
    }
}

/// Price and delta of a claim under the pricing measure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Valuation {
    pub value: f64,
    pub delta: f64,
}

/// Closed-form price and delta at `(t, s)` of `payoff(S_maturity)` under the
/// minimal martingale measure (zero-drift Black-Scholes with zero rate). At
/// `t == maturity` the value is the payoff itself and the delta its slope
/// (1/2 on a call's kink, which is hit with probability zero).
pub fn price_and_delta(
    model: &MarketModel,
    payoff: &Payoff,
    t: f64,
    s: f64,
    maturity: f64,
) -> Result<Valuation, MarketError> {
    if !(s > 0.0) {
        return Err(MarketError::NonPositivePrice);
    }
    if t > maturity {
        return Err(MarketError::QueryAfterMaturity);
    }
    payoff.validate()?;
    let tau = maturity - t;
    let val = match *payoff {
        Payoff::Constant(c) => Valuation { value: c, delta: 0.0 },
        Payoff::Identity => Valuation { value: s, delta: 1.0 },
        Payoff::Call { strike } => {
            if strike == 0.0 {
                Valuation { value: s, delta: 1.0 }
            } else if tau == 0.0 {
                let delta = if s > strike {
                    1.0
                } else if s < strike {
                    0.0
                } else {
                    0.5
                };
                Valuation { value: (s - strike).max(0.0), delta }
            } else {
                let sig_sqrt = model.sigma * libm::sqrt(tau);
                let d1 = (libm::log(s / strike) + 0.5 * model.sigma * model.sigma * tau) / sig_sqrt;
                let d2 = d1 - sig_sqrt;
                Valuation { value: s * normal_cdf(d1) - strike * normal_cdf(d2), delta: normal_cdf(d1) }
            }
        }
        Payoff::Put { strike } => {
            if strike == 0.0 {
                Valuation { value: 0.0, delta: 0.0 }
            } else if tau == 0.0 {
                let delta = if s < strike {
                    -1.0
                } else if s > strike {
                    0.0
                } else {
                    -0.5
                };
                Valuation { value: (strike - s).max(0.0), delta }
            } else {
                let sig_sqrt = model.sigma * libm::sqrt(tau);
                let d1 = (libm::log(s / strike) + 0.5 * model.sigma * model.sigma * tau) / sig_sqrt;
                let d2 = d1 - sig_sqrt;
                Valuation {
                    value: strike * normal_cdf(-d2) - s * normal_cdf(-d1),
                    delta: -normal_cdf(-d1),
                }
            }
        }
    };
    Ok(val)
}

fn check_grid(grid: &[f64]) -> Result<(), MarketError> {
    if grid.is_empty() || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(MarketError::BadGrid);
    }
    Ok(())
}

/// Simulates the price path on `grid` (increasing from 0) with exact Gaussian
/// log-increments; replayable per seed.
pub fn simulate_price(model: &MarketModel, grid: &[f64], seed: u64) -> Result<Vec<f64>, MarketError> {
    check_grid(grid)?;
    if grid[0] != 0.0 {
        return Err(MarketError::BadGrid);
    }
    let mut rng = Prng::new(seed);
    simulate_price_from(model, model.s0, grid, &mut rng)
}

/// As [`simulate_price`], from an arbitrary start price at `grid[0]`, drawing
/// from an existing generator. Used by conditional resimulation.
pub fn simulate_price_from(
    model: &MarketModel,
    s_start: f64,
    grid: &[f64],
    rng: &mut Prng,
) -> Result<Vec<f64>, MarketError> {
    check_grid(grid)?;
    if !(s_start > 0.0) {
        return Err(MarketError::NonPositiveSpot);
    }
    let mut path = Vec::with_capacity(grid.len());
    path.push(s_start);
    let drift = model.mu - 0.5 * model.sigma * model.sigma;
    for w in grid.windows(2) {
        let dt = w[1] - w[0];
        let z = rng.normal();
        let prev = *path.last().unwrap();
        path.push(prev * libm::exp(drift * dt + model.sigma * libm::sqrt(dt) * z));
    }
    Ok(path)
}

/// Density path of the minimal martingale measure along a simulated price
/// path: `L_t = exp(-(mu/sigma) W_t - (mu/sigma)^2 t / 2)`, with the driving
/// Brownian increments recovered from the log-returns.
pub fn mmm_density(model: &MarketModel, path: &[f64], grid: &[f64]) -> Result<Vec<f64>, MarketError> {
    check_grid(grid)?;
    if path.len() != grid.len() {
        return Err(MarketError::LengthMismatch);
    }
    let kappa = model.mu / model.sigma;
    let drift = model.mu - 0.5 * model.sigma * model.sigma;
    let mut out = Vec::with_capacity(grid.len());
    out.push(1.0);
    let mut w = 0.0;
    for i in 1..grid.len() {
        let dt = grid[i] - grid[i - 1];
        w += (libm::log(path[i] / path[i - 1]) - drift * dt) / model.sigma;
        out.push(libm::exp(-kappa * w - 0.5 * kappa * kappa * (grid[i] - grid[0])));
    }
    Ok(out)
}

/// Structure-condition split of the price increments: per step,
/// `ΔS = ΔM + alpha Δ<M>` with `alpha = mu / (sigma^2 S)` and
/// `Δ<M> = sigma^2 S^2 Δt`, both evaluated at the left grid point.
#[derive(Clone, Debug)]
pub struct StructureDecomposition {
    pub martingale_increments: Vec<f64>,
    pub drift_increments: Vec<f64>,
    pub alpha: Vec<f64>,
}

pub fn structure_decomposition(
    model: &MarketModel,
    path: &[f64],
    grid: &[f64],
) -> Result<StructureDecomposition, MarketError> {
    check_grid(grid)?;
    if path.len() != grid.len() {
        return Err(MarketError::LengthMismatch);
    }
    let sig2 = model.sigma * model.sigma;
    let alpha: Vec<f64> = path.iter().map(|&s| model.mu / (sig2 * s)).collect();
    let mut martingale = Vec::with_capacity(grid.len() - 1);
    let mut drift = Vec::with_capacity(grid.len() - 1);
    for i in 0..grid.len() - 1 {
        let dt = grid[i + 1] - grid[i];
        let d = model.mu * path[i] * dt; // alpha_i * sigma^2 S_i^2 dt
        drift.push(d);
        martingale.push(path[i + 1] - path[i] - d);
    }
    Ok(StructureDecomposition { martingale_increments: martingale, drift_increments: drift, alpha })
}

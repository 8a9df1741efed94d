//! Pseudo-optimal (locally risk-minimizing) hedging of the insurance claims.
//!
//! The strategy is predictable: at every instant it combines the financial
//! delta with the left limit of the expected-survivor process. For a pure
//! endowment,
//!
//! ```text
//! theta_t = delta(t, S_t) · B_{t-},        B_t = (l_a − N_t) pi_t(m),
//! ```
//!
//! and for term insurance the delta is integrated over payout dates,
//!
//! ```text
//! theta_t = ∫_t^T B_{t-}(u) · delta(t, S_t; u) du,
//! ```
//!
//! evaluated by trapezoidal quadrature on the precomputed table nodes, with
//! the left endpoint `u = t` supplied in closed form (`B_t(t)` is the
//! conditional death intensity and the expiry delta is the payoff slope).
//!
//! A scenario run records strategy, value and cost along the grid; the cost
//! process `C_t = V_t − ∫_0^t theta dS` (left-point sums) isolates the
//! unhedgeable insurance risk. The simulator evaluates the strategy before
//! applying a death that shares its grid instant, which is the discrete
//! embodiment of predictability.

use alloc::vec::Vec;
use core::fmt;

use crate::filter::{run_filter, run_filter_from, FilterError, FilterState, FilterTrajectory};
use crate::hazard::{
    sample_chain_between, sample_chain_path, sample_lifetimes, sample_lifetimes_between, HazardError,
    HazardModel,
};
use crate::market::{
    price_and_delta, simulate_price, simulate_price_from, ClaimSpec, ContractKind, MarketError,
    MarketModel, Payoff,
};
use crate::math::{mean_with_se, trapezoid};
use crate::projection::{b_pure, b_term, solve_term, ProjectionError, ProjectionTable};
use crate::rng::{derive_seed, Prng};

#[derive(Clone, Debug, PartialEq)]
pub enum HedgeError {
    Hazard(HazardError),
    Filter(FilterError),
    Projection(ProjectionError),
    Market(MarketError),
    HorizonMismatch,
    TablesMismatch,
    QuadratureTooCoarse,
    BadCheckpoint { time: f64 },
}

impl fmt::Display for HedgeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HedgeError::Hazard(e) => write!(f, "hazard model: {e}"),
            HedgeError::Filter(e) => write!(f, "filter: {e}"),
            HedgeError::Projection(e) => write!(f, "projection: {e}"),
            HedgeError::Market(e) => write!(f, "market: {e}"),
            HedgeError::HorizonMismatch => {
                write!(f, "hazard and market horizons must agree")
            }
            HedgeError::TablesMismatch => {
                write!(f, "prepared tables do not match the claim or the model")
            }
            HedgeError::QuadratureTooCoarse => {
                write!(f, "term quadrature needs at least 2 payout nodes")
            }
            HedgeError::BadCheckpoint { time } => {
                write!(f, "checkpoint {time} is not a grid point")
            }
        }
    }
}

impl core::error::Error for HedgeError {}

impl From<HazardError> for HedgeError {
    fn from(e: HazardError) -> Self {
        HedgeError::Hazard(e)
    }
}
impl From<FilterError> for HedgeError {
    fn from(e: FilterError) -> Self {
        HedgeError::Filter(e)
    }
}
impl From<ProjectionError> for HedgeError {
    fn from(e: ProjectionError) -> Self {
        HedgeError::Projection(e)
    }
}
impl From<MarketError> for HedgeError {
    fn from(e: MarketError) -> Self {
        HedgeError::Market(e)
    }
}

/// Strategy, value and cost at one grid instant. `value = theta·stock + eta`
/// holds by construction; `theta` is the predictable strategy (left limits
/// of the death count and the filter), while `value`, `cost` and `n_dead`
/// are right-continuous.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HedgeRecord {
    pub time: f64,
    pub theta: f64,
    pub eta: f64,
    pub value: f64,
    pub cost: f64,
    pub stock: f64,
    pub n_dead: u32,
}

/// One simulated scenario: records on the (death-augmented) grid, the claim
/// actually owed at the horizon, and the trading account totals.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioResult {
    pub records: Vec<HedgeRecord>,
    pub payoff: f64,
    pub terminal_cost: f64,
    pub integral_theta_ds: f64,
}

impl ScenarioResult {
    /// Cost drift `C_T − C_0` (zero in expectation for the optimal strategy).
    pub fn cost_drift(&self) -> f64 {
        self.terminal_cost - self.records[0].cost
    }

    /// Terminal replication error `V_T − G_T`.
    pub fn replication_error(&self) -> f64 {
        self.records.last().map(|r| r.value).unwrap_or(0.0) - self.payoff
    }
}

/// Per-path seeds, derived from a master seed by the documented splitting
/// rule (stream = path index; index 0 = chain, 1 = lifetimes, 2 = market).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathSeeds {
    pub chain: u64,
    pub lifetimes: u64,
    pub market: u64,
}

impl PathSeeds {
    pub fn for_path(master: u64, path: u64) -> Self {
        PathSeeds {
            chain: derive_seed(master, path, 0),
            lifetimes: derive_seed(master, path, 1),
            market: derive_seed(master, path, 2),
        }
    }
}

/// Term-insurance kernel tables on a fixed family of payout nodes
/// `u_j = T (j+1) / n`, shared by the quadrature in strategy and value.
#[derive(Clone, Debug)]
pub struct TermTables {
    nodes: Vec<f64>,
    tables: Vec<ProjectionTable>,
}

impl TermTables {
    /// Solves one kernel table per node; `n_nodes ≥ 2`.
    pub fn solve(model: &HazardModel, n_nodes: usize, grid: &[f64]) -> Result<Self, HedgeError> {
        if n_nodes < 2 {
            return Err(HedgeError::QuadratureTooCoarse);
        }
        let t_end = model.horizon();
        let mut nodes = Vec::with_capacity(n_nodes);
        let mut tables = Vec::with_capacity(n_nodes);
        for j in 0..n_nodes {
            let u = t_end * (j + 1) as f64 / n_nodes as f64;
            nodes.push(u);
            tables.push(solve_term(model, u, grid)?);
        }
        Ok(TermTables { nodes, tables })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn table(&self, j: usize) -> &ProjectionTable {
        &self.tables[j]
    }

    fn n_states(&self) -> usize {
        self.tables[0].n_states()
    }
}

/// Precomputed tables matching the claim to hedge.
#[derive(Clone, Debug)]
pub enum ClaimTables<'a> {
    PureEndowment(&'a ProjectionTable),
    Term(&'a TermTables),
}

/// `theta_t` for a pure endowment: financial delta at `(t, S_t)` times the
/// left limit of the expected survivor count.
pub fn pure_endowment_strategy(
    market: &MarketModel,
    payoff: &Payoff,
    t: f64,
    stock: f64,
    filter_left: &FilterState,
    table: &ProjectionTable,
    l_a: u32,
) -> Result<f64, HedgeError> {
    let v = price_and_delta(market, payoff, t, stock, market.horizon)?;
    Ok(v.delta * b_pure(filter_left, table, l_a)?)
}

/// Optimal value of the pure-endowment portfolio at `t`: claim price times
/// the (right-continuous) expected survivor count. At `t = T` this is the
/// claim itself, `payoff(S_T) · (l_a − N_T)`.
pub fn pure_endowment_value(
    market: &MarketModel,
    payoff: &Payoff,
    t: f64,
    stock: f64,
    filter: &FilterState,
    table: &ProjectionTable,
    l_a: u32,
) -> Result<f64, HedgeError> {
    let v = price_and_delta(market, payoff, t, stock, market.horizon)?;
    Ok(v.value * b_pure(filter, table, l_a)?)
}

/// Trapezoid quadrature over payout dates `u ∈ [t, T]`: node points plus the
/// left endpoint `u = t`, where `B_t(t) = (l_a − n) pi(lambda(t, ·))` and the
/// claim valuation degenerates to the payoff itself. Returns
/// `(∫ B·delta du, ∫ B·value du)` in one pass.
fn term_quadratures(
    hazard: &HazardModel,
    market: &MarketModel,
    payoff: &Payoff,
    t: f64,
    stock: f64,
    filter: &FilterState,
    tables: &TermTables,
    l_a: u32,
) -> Result<(f64, f64), HedgeError> {
    let mut delta_pts: Vec<(f64, f64)> = Vec::with_capacity(tables.nodes.len() + 1);
    let mut value_pts: Vec<(f64, f64)> = Vec::with_capacity(tables.nodes.len() + 1);

    let b_here = (l_a - filter.n_dead) as f64 * filter.expect(hazard.hazard_rates_at(t));
    let v_here = price_and_delta(market, payoff, t, stock, t)?;
    delta_pts.push((t, b_here * v_here.delta));
    value_pts.push((t, b_here * v_here.value));

    for (j, &u) in tables.nodes.iter().enumerate() {
        if u <= t {
            continue;
        }
        let b = b_term(filter, tables.table(j), l_a)?;
        let v = price_and_delta(market, payoff, t, stock, u)?;
        delta_pts.push((u, b * v.delta));
        value_pts.push((u, b * v.value));
    }
    Ok((trapezoid(&delta_pts), trapezoid(&value_pts)))
}

/// `theta_t` for term insurance: expected payout intensity times the
/// financial delta, integrated over the remaining payout dates.
#[allow(clippy::too_many_arguments)]
pub fn term_strategy(
    hazard: &HazardModel,
    market: &MarketModel,
    payoff: &Payoff,
    t: f64,
    stock: f64,
    filter_left: &FilterState,
    tables: &TermTables,
    l_a: u32,
) -> Result<f64, HedgeError> {
    Ok(term_quadratures(hazard, market, payoff, t, stock, filter_left, tables, l_a)?.0)
}

/// Optimal value of the term-insurance portfolio at `t`: payments already
/// made (`realized`, settled at the horizon) plus the prospective integral
/// of claim value times expected payout intensity.
#[allow(clippy::too_many_arguments)]
pub fn term_value(
    hazard: &HazardModel,
    market: &MarketModel,
    payoff: &Payoff,
    t: f64,
    stock: f64,
    filter: &FilterState,
    tables: &TermTables,
    l_a: u32,
    realized: f64,
) -> Result<f64, HedgeError> {
    Ok(realized + term_quadratures(hazard, market, payoff, t, stock, filter, tables, l_a)?.1)
}

/// Sum of payoff values at the recorded death prices (the price path is
/// continuous, so the pre-death price is the death-time price).
pub fn realized_payout(payoff: &Payoff, death_prices: &[f64]) -> f64 {
    death_prices.iter().map(|&s| payoff.eval(s)).sum()
}

struct Engine<'a> {
    hazard: &'a HazardModel,
    market: &'a MarketModel,
    payoff: Payoff,
    kind: ContractKind,
    l_a: u32,
    tables: &'a ClaimTables<'a>,
}

impl Engine<'_> {
    fn strategy(&self, t: f64, stock: f64, left: &FilterState) -> Result<f64, HedgeError> {
        match (self.kind, self.tables) {
            (ContractKind::PureEndowment, ClaimTables::PureEndowment(table)) => {
                pure_endowment_strategy(self.market, &self.payoff, t, stock, left, table, self.l_a)
            }
            (ContractKind::Term, ClaimTables::Term(tables)) => {
                term_strategy(self.hazard, self.market, &self.payoff, t, stock, left, tables, self.l_a)
            }
            _ => Err(HedgeError::TablesMismatch),
        }
    }

    fn value(&self, t: f64, stock: f64, state: &FilterState, realized: f64) -> Result<f64, HedgeError> {
        match (self.kind, self.tables) {
            (ContractKind::PureEndowment, ClaimTables::PureEndowment(table)) => {
                pure_endowment_value(self.market, &self.payoff, t, stock, state, table, self.l_a)
            }
            (ContractKind::Term, ClaimTables::Term(tables)) => term_value(
                self.hazard,
                self.market,
                &self.payoff,
                t,
                stock,
                state,
                tables,
                self.l_a,
                realized,
            ),
            _ => Err(HedgeError::TablesMismatch),
        }
    }

    /// Walks one simulated timeline: predictable strategy from left limits,
    /// right-continuous value and cost, left-point gains from trade.
    fn walk(&self, traj: &FilterTrajectory, prices: &[f64]) -> Result<ScenarioResult, HedgeError> {
        debug_assert_eq!(traj.len(), prices.len());
        let mut records = Vec::with_capacity(traj.len());
        let mut integral = 0.0;
        let mut realized = 0.0;
        let mut prev_theta = 0.0;

        for i in 0..traj.len() {
            let t = traj.times()[i];
            let stock = prices[i];
            let left = traj.left(i);
            let right = traj.state(i);

            if i > 0 {
                integral += prev_theta * (stock - prices[i - 1]);
            }
            if self.kind == ContractKind::Term {
                let deaths_here = right.n_dead - left.n_dead;
                realized += deaths_here as f64 * self.payoff.eval(stock);
            }

            let theta = self.strategy(t, stock, left)?;
            let value = self.value(t, stock, right, realized)?;
            let cost = value - integral;
            records.push(HedgeRecord {
                time: t,
                theta,
                eta: value - theta * stock,
                value,
                cost,
                stock,
                n_dead: right.n_dead,
            });
            prev_theta = theta;
        }

        let last = records.last().expect("non-empty grid");
        let payoff = match self.kind {
            ContractKind::PureEndowment => {
                self.payoff.eval(last.stock) * (self.l_a - last.n_dead) as f64
            }
            ContractKind::Term => realized,
        };
        Ok(ScenarioResult {
            payoff,
            terminal_cost: last.cost,
            integral_theta_ds: integral,
            records,
        })
    }
}

fn check_setup(
    hazard: &HazardModel,
    market: &MarketModel,
    claim: &ClaimSpec,
    tables: &ClaimTables,
    grid: &[f64],
) -> Result<(), HedgeError> {
    if hazard.horizon() != market.horizon {
        return Err(HedgeError::HorizonMismatch);
    }
    if grid.len() < 2 || grid[0] != 0.0 || *grid.last().unwrap() != hazard.horizon() {
        return Err(HedgeError::Filter(FilterError::BadGrid));
    }
    let tables_ok = match (claim.kind(), tables) {
        (ContractKind::PureEndowment, ClaimTables::PureEndowment(t)) => {
            t.n_states() == hazard.n_states()
        }
        (ContractKind::Term, ClaimTables::Term(t)) => t.n_states() == hazard.n_states(),
        _ => false,
    };
    if !tables_ok {
        return Err(HedgeError::TablesMismatch);
    }
    Ok(())
}

/// Simulates one scenario end to end (chain, lifetimes, prices, filter) and
/// assembles the hedge along it. Deterministic per `seeds`.
pub fn run_hedge(
    hazard: &HazardModel,
    market: &MarketModel,
    claim: &ClaimSpec,
    l_a: u32,
    tables: &ClaimTables,
    grid: &[f64],
    seeds: PathSeeds,
) -> Result<ScenarioResult, HedgeError> {
    check_setup(hazard, market, claim, tables, grid)?;
    let chain = sample_chain_path(hazard, hazard.horizon(), seeds.chain);
    let deaths = sample_lifetimes(hazard, &chain, l_a, seeds.lifetimes)?;
    let traj = run_filter(hazard, &deaths, grid)?;
    let prices = simulate_price(market, traj.times(), seeds.market)?;
    let engine =
        Engine { hazard, market, payoff: claim.payoff(), kind: claim.kind(), l_a, tables };
    engine.walk(&traj, &prices)
}

/// Residual-risk estimate at a checkpoint.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RiskEstimate {
    pub t: f64,
    pub value: f64,
    pub std_error: f64,
}

/// Estimates the risk process `R_t = E[(C_T − C_t)^2 | info at t]` by
/// conditional Monte Carlo: one base scenario fixes the state at each
/// checkpoint (price, filter law, death count), and `n_paths` futures are
/// resimulated from that state — the hidden state is drawn from the filter,
/// survivor lifetimes and prices from the model dynamics, and the filter is
/// continued from the checkpoint snapshot.
#[allow(clippy::too_many_arguments)]
pub fn risk_process_estimate(
    hazard: &HazardModel,
    market: &MarketModel,
    claim: &ClaimSpec,
    l_a: u32,
    tables: &ClaimTables,
    grid: &[f64],
    checkpoints: &[f64],
    n_paths: usize,
    master_seed: u64,
) -> Result<Vec<RiskEstimate>, HedgeError> {
    check_setup(hazard, market, claim, tables, grid)?;
    let horizon = hazard.horizon();
    let engine =
        Engine { hazard, market, payoff: claim.payoff(), kind: claim.kind(), l_a, tables };

    // Base scenario providing the checkpoint states.
    let base_seeds = PathSeeds::for_path(master_seed, 0);
    let chain = sample_chain_path(hazard, horizon, base_seeds.chain);
    let deaths = sample_lifetimes(hazard, &chain, l_a, base_seeds.lifetimes)?;
    let base_traj = run_filter(hazard, &deaths, grid)?;
    let base_prices = simulate_price(market, base_traj.times(), base_seeds.market)?;

    let mut out = Vec::with_capacity(checkpoints.len());
    for (ci, &t_c) in checkpoints.iter().enumerate() {
        if t_c == horizon {
            out.push(RiskEstimate { t: t_c, value: 0.0, std_error: 0.0 });
            continue;
        }
        let base_idx = base_traj
            .times()
            .iter()
            .position(|&t| t == t_c)
            .ok_or(HedgeError::BadCheckpoint { time: t_c })?;
        let grid_from = grid.partition_point(|&t| t < t_c);
        if grid.get(grid_from) != Some(&t_c) {
            return Err(HedgeError::BadCheckpoint { time: t_c });
        }
        let future_grid = &grid[grid_from..];
        let start_state = base_traj.state(base_idx).clone();
        let start_price = base_prices[base_idx];
        let survivors = l_a - start_state.n_dead;

        let mut squares = Vec::with_capacity(n_paths);
        for k in 0..n_paths {
            let stream = (ci * n_paths + k + 1) as u64;
            let seeds = PathSeeds::for_path(master_seed, stream);
            let mut rng_chain = Prng::new(seeds.chain);
            let mut rng_life = Prng::new(seeds.lifetimes);
            let mut rng_mkt = Prng::new(seeds.market);

            let chain = sample_chain_between(hazard, &start_state.pi, t_c, horizon, &mut rng_chain);
            let future_deaths = sample_lifetimes_between(hazard, &chain, survivors, &mut rng_life)?;
            let traj = run_filter_from(
                hazard,
                l_a,
                start_state.clone(),
                future_grid,
                future_deaths.death_times(),
            )?;
            let prices = simulate_price_from(market, start_price, traj.times(), &mut rng_mkt)?;
            let result = engine.walk(&traj, &prices)?;
            let d = result.cost_drift();
            squares.push(d * d);
        }
        let (value, std_error) = mean_with_se(&squares);
        out.push(RiskEstimate { t: t_c, value, std_error });
    }
    Ok(out)
}

//! Conditional law of the hidden hazard state given the observed deaths.
//!
//! Between deaths the unnormalized mass vector `rho` follows the linear flow
//!
//! ```text
//! d rho / dt = Qᵀ rho − (l_a − n) diag(lambda(t, ·)) rho,
//! ```
//!
//! which is integrated with fixed-step RK4 and renormalized each step (the
//! normalized ratio solves the nonlinear filtering equation, and the shed
//! mass is kept in `log_mass` so the unnormalized value stays recoverable).
//! At a death the conditional law jumps multiplicatively,
//! `pi_new ∝ diag(lambda(τ, ·)) pi_old`, and the death count increments.
//!
//! Two independent oracles validate the filter: a brute-force Bayesian filter
//! on a time-discretized hidden Markov model ([`discrete_oracle`]) and a
//! Monte Carlo estimator of the unnormalized mass functional built from
//! killed chain paths ([`feynman_kac_oracle`]).

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::grid::EventGrid;
use crate::hazard::{cumulative_hazard, sample_chain_between, HazardModel, PortfolioPath};
use crate::math::SquareMat;
use crate::rng::Prng;

/// Upper bound on the RK4 step, in years. Death times are grid points, so
/// the integrator never steps across a jump.
pub const H_MAX: f64 = 1e-3;

const NEG_MASS_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum FilterError {
    NonPositiveStep,
    NegativeMass { time: f64 },
    AllDead,
    BadGrid,
    DimensionMismatch,
    InvalidWindow,
    NoSamples,
}

impl fmt::Display for FilterError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilterError::NonPositiveStep => write!(f, "propagation step must be positive"),
            FilterError::NegativeMass { time } => {
                write!(f, "mass vector went negative at t = {time} (step too large)")
            }
            FilterError::AllDead => write!(f, "no further deaths are possible: the cohort is exhausted"),
            FilterError::BadGrid => write!(f, "grid must be increasing and start at the filter's time"),
            FilterError::DimensionMismatch => write!(f, "vector length does not match the state count"),
            FilterError::InvalidWindow => write!(f, "time window must satisfy s < t"),
            FilterError::NoSamples => write!(f, "at least one Monte Carlo sample is required"),
        }
    }
}

impl core::error::Error for FilterError {}

/// Filter snapshot: normalized conditional law `pi`, the unnormalized mass
/// vector `rho` (kept at unit sum between operations) and the accumulated
/// normalization in log scale.
#[derive(Clone, Debug, PartialEq)]
pub struct FilterState {
    pub time: f64,
    pub n_dead: u32,
    pub rho: Vec<f64>,
    pub log_mass: f64,
    pub pi: Vec<f64>,
}

impl FilterState {
    /// Filter at time zero: the prior law of the hidden state, no deaths.
    pub fn initial(model: &HazardModel) -> Self {
        let pi = model.initial_dist().to_vec();
        FilterState { time: 0.0, n_dead: 0, rho: pi.clone(), log_mass: 0.0, pi }
    }

    /// `pi(f) = Σ_x pi(x) f(x)` for a per-state vector `f`.
    pub fn expect(&self, f: &[f64]) -> f64 {
        self.pi.iter().zip(f).map(|(p, v)| p * v).sum()
    }

    /// Conditional expectation of the per-capita hazard, `pi(lambda(t, ·))`.
    pub fn expected_hazard(&self, model: &HazardModel) -> f64 {
        self.expect(model.hazard_rates_at(self.time))
    }
}

/// Total-variation distance between two probability vectors.
pub fn tv_distance(p: &[f64], q: &[f64]) -> f64 {
    debug_assert_eq!(p.len(), q.len());
    0.5 * p.iter().zip(q).map(|(a, b)| libm::fabs(a - b)).sum::<f64>()
}

/// Generator of the linear mass flow on a hazard interval containing `t`:
/// `Qᵀ − (l_a − n) diag(lambda(t, ·))`.
fn flow_matrix(model: &HazardModel, l_a: u32, n_dead: u32, t: f64) -> SquareMat {
    let mut a = model.generator().transpose();
    let survivors = (l_a - n_dead) as f64;
    let rates = model.hazard_rates_at(t);
    for (x, &r) in rates.iter().enumerate() {
        a.set(x, x, a.at(x, x) - survivors * r);
    }
    a
}

fn propagate_to(
    state: &FilterState,
    model: &HazardModel,
    l_a: u32,
    t_target: f64,
) -> Result<FilterState, FilterError> {
    if !(t_target > state.time) {
        return Err(FilterError::NonPositiveStep);
    }
    let mut rho = state.rho.clone();
    let mut log_mass = state.log_mass;
    let mut scratch = crate::math::Rk4Scratch::new(rho.len());

    // Integrate piecewise: the hazard is constant between its breakpoints,
    // so within each piece the flow is autonomous and RK4 keeps full order.
    let mut lo = state.time;
    let edges = model.hazard_times();
    while lo < t_target {
        let next_edge = edges.iter().copied().find(|&e| e > lo).unwrap_or(f64::INFINITY);
        let hi = next_edge.min(t_target);
        let a = flow_matrix(model, l_a, state.n_dead, lo);
        let n_sub = libm::ceil((hi - lo) / H_MAX).max(1.0) as usize;
        let h = (hi - lo) / n_sub as f64;
        for _ in 0..n_sub {
            crate::math::rk4_linear_step(&a, h, &mut rho, &mut scratch);
            let mass: f64 = rho.iter().sum();
            if rho.iter().any(|&x| x < -NEG_MASS_TOL * mass) || !(mass > 0.0) {
                return Err(FilterError::NegativeMass { time: lo });
            }
            log_mass += libm::log(mass);
            for x in rho.iter_mut() {
                *x /= mass;
            }
        }
        lo = hi;
    }
    Ok(FilterState { time: t_target, n_dead: state.n_dead, pi: rho.clone(), rho, log_mass })
}

/// Advances the filter over a death-free interval of length `dt`.
pub fn propagate(
    state: &FilterState,
    model: &HazardModel,
    l_a: u32,
    dt: f64,
) -> Result<FilterState, FilterError> {
    propagate_to(state, model, l_a, state.time + dt)
}

/// Applies the multiplicative update at a death occurring at `state.time`:
/// `pi_new(x) = lambda(τ, x) pi(x) / pi(lambda)`, `n_dead + 1`. The shed
/// normalization `log pi(Λ)` (using the full intensity, so `exp(log_mass)`
/// tracks the observation likelihood) is added to `log_mass`.
pub fn jump_update(state: &FilterState, model: &HazardModel, l_a: u32) -> Result<FilterState, FilterError> {
    if state.n_dead >= l_a {
        return Err(FilterError::AllDead);
    }
    let rates = model.hazard_rates_at(state.time);
    let denom: f64 = state.pi.iter().zip(rates).map(|(p, r)| p * r).sum();
    let pi: Vec<f64> = state.pi.iter().zip(rates).map(|(p, r)| p * r / denom).collect();
    let log_mass = state.log_mass + libm::log((l_a - state.n_dead) as f64 * denom);
    Ok(FilterState { time: state.time, n_dead: state.n_dead + 1, rho: pi.clone(), log_mass, pi })
}

/// Filter history along a grid. Death instants are spliced into the grid and
/// carry two snapshots, the left limit and the post-jump state; elsewhere the
/// two coincide.
#[derive(Clone, Debug)]
pub struct FilterTrajectory {
    times: Vec<f64>,
    states: Vec<FilterState>,
    index: Vec<(u32, u32)>,
}

impl FilterTrajectory {
    /// Grid times (deaths included), each exactly once.
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Left limit of the filter at grid point `i` (the pre-death state when a
    /// death occurs there).
    pub fn left(&self, i: usize) -> &FilterState {
        &self.states[self.index[i].0 as usize]
    }

    /// Filter value at grid point `i` (right-continuous).
    pub fn state(&self, i: usize) -> &FilterState {
        &self.states[self.index[i].1 as usize]
    }

    /// All snapshots in time order, including both sides of each death.
    pub fn states(&self) -> &[FilterState] {
        &self.states
    }
}

fn run_over(
    model: &HazardModel,
    l_a: u32,
    start: FilterState,
    grid: &[f64],
    death_times: &[f64],
) -> Result<FilterTrajectory, FilterError> {
    if grid.is_empty() || grid[0] != start.time || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(FilterError::BadGrid);
    }
    let merged = EventGrid::merge(grid, death_times);
    let mut states: Vec<FilterState> = Vec::with_capacity(merged.len() + death_times.len());
    let mut index = Vec::with_capacity(merged.len());
    let mut state = start;
    for i in 0..merged.len() {
        let t = merged.times()[i];
        if t > state.time {
            state = propagate_to(&state, model, l_a, t)?;
        }
        let deaths_here = merged.deaths_at(i);
        if deaths_here > 0 {
            let left = states.len() as u32;
            states.push(state.clone());
            for _ in 0..deaths_here {
                state = jump_update(&state, model, l_a)?;
            }
            states.push(state.clone());
            index.push((left, left + 1));
        } else {
            let here = states.len() as u32;
            states.push(state.clone());
            index.push((here, here));
        }
    }
    Ok(FilterTrajectory { times: merged.times().to_vec(), states, index })
}

/// Runs the filter from time zero over `grid` against an observed death
/// record. `grid` must start at 0; death times are spliced in as extra grid
/// points so their left and right filter states are both available.
pub fn run_filter(
    model: &HazardModel,
    deaths: &PortfolioPath,
    grid: &[f64],
) -> Result<FilterTrajectory, FilterError> {
    run_over(model, deaths.l_a(), FilterState::initial(model), grid, deaths.death_times())
}

/// Continues the filter from an arbitrary snapshot over `grid` (which must
/// start at `start.time`), against death times observed after the snapshot.
/// Used by conditional resimulation.
pub fn run_filter_from(
    model: &HazardModel,
    l_a: u32,
    start: FilterState,
    grid: &[f64],
    future_death_times: &[f64],
) -> Result<FilterTrajectory, FilterError> {
    run_over(model, l_a, start, grid, future_death_times)
}

/// Brute-force reference filter on a time-discretized hidden Markov model:
/// exact one-step transitions `exp(Qᵀ h)`, per-step survival weights
/// `exp(-(l_a - n) lambda h)` and a death reweighting at death cells. First
/// order in `step`; converges to [`run_filter`] as `step → 0`.
pub fn discrete_oracle(
    model: &HazardModel,
    deaths: &PortfolioPath,
    grid: &[f64],
    step: f64,
) -> Result<FilterTrajectory, FilterError> {
    if !(step > 0.0) {
        return Err(FilterError::NonPositiveStep);
    }
    if grid.is_empty() || grid[0] != 0.0 || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(FilterError::BadGrid);
    }
    let l_a = deaths.l_a();
    let n_states = model.n_states();
    let merged = EventGrid::merge(grid, deaths.death_times());

    let mut state = FilterState::initial(model);
    let mut states: Vec<FilterState> = Vec::new();
    let mut index = Vec::with_capacity(merged.len());
    let mut scratch = vec![0.0; n_states];

    for i in 0..merged.len() {
        let t = merged.times()[i];
        // March in sub-cells, splitting at hazard breakpoints so each cell
        // sees one rate vector.
        let mut lo = state.time;
        while lo < t {
            let next_edge =
                model.hazard_times().iter().copied().find(|&e| e > lo).unwrap_or(f64::INFINITY);
            let hi = next_edge.min(t);
            let n_sub = libm::ceil((hi - lo) / step).max(1.0) as usize;
            let h = (hi - lo) / n_sub as f64;
            let trans = model.generator().transpose().scaled(h).exp();
            let rates = model.hazard_rates_at(lo).to_vec();
            let survivors = (l_a - state.n_dead) as f64;
            for _ in 0..n_sub {
                trans.mul_vec(&state.pi, &mut scratch);
                for x in 0..n_states {
                    scratch[x] *= libm::exp(-survivors * rates[x] * h);
                }
                let mass: f64 = scratch.iter().sum();
                state.log_mass += libm::log(mass);
                for x in 0..n_states {
                    state.pi[x] = scratch[x] / mass;
                }
            }
            lo = hi;
        }
        state.time = t;
        state.rho.clone_from(&state.pi);

        let deaths_here = merged.deaths_at(i);
        if deaths_here > 0 {
            let left = states.len() as u32;
            states.push(state.clone());
            for _ in 0..deaths_here {
                state = jump_update(&state, model, l_a)?;
            }
            states.push(state.clone());
            index.push((left, left + 1));
        } else {
            let here = states.len() as u32;
            states.push(state.clone());
            index.push((here, here));
        }
    }
    Ok(FilterTrajectory { times: merged.times().to_vec(), states, index })
}

/// Monte Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FkEstimate {
    pub value: f64,
    pub std_error: f64,
}

/// Monte Carlo estimator of the unnormalized mass functional on a death-free
/// window `(s, t]` with `n_dead` deaths so far: averages
/// `f(Z_t) exp(-∫_s^t (l_a - n) lambda(r, Z_r) dr)` over chain paths `Z`
/// started from `start_pi` at time `s`. Unbiased for the value the linear
/// flow assigns to `f`; the killing integral is exact along each path.
#[allow(clippy::too_many_arguments)]
pub fn feynman_kac_oracle(
    model: &HazardModel,
    start_pi: &[f64],
    s: f64,
    t: f64,
    l_a: u32,
    n_dead: u32,
    f: &[f64],
    n_samples: usize,
    seed: u64,
) -> Result<FkEstimate, FilterError> {
    if !(s < t) {
        return Err(FilterError::InvalidWindow);
    }
    if n_samples == 0 {
        return Err(FilterError::NoSamples);
    }
    if start_pi.len() != model.n_states() || f.len() != model.n_states() {
        return Err(FilterError::DimensionMismatch);
    }
    let survivors = (l_a - n_dead) as f64;
    let mut rng = Prng::new(seed);
    let mut samples = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let chain = sample_chain_between(model, start_pi, s, t, &mut rng);
        let killing = cumulative_hazard(model, &chain, s, t).expect("chain covers its own window");
        samples.push(f[chain.state_at(t)] * libm::exp(-survivors * killing));
    }
    let (value, std_error) = crate::math::mean_with_se(&samples);
    Ok(FkEstimate { value, std_error })
}

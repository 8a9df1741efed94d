//! Hidden-hazard mortality model.
//!
//! A cohort of identical individuals shares one mortality hazard rate
//! `lambda(t, X_t)` modulated by a hidden finite-state Markov chain `X` with
//! generator `Q`. Given the chain path, lifetimes are conditionally
//! independent with survival `exp(-∫ lambda)`; the portfolio is observed only
//! through the process counting its deaths.
//!
//! Hazard rates are piecewise constant in time on a fixed breakpoint grid, so
//! every time integral of the hazard along a chain path is available in
//! closed form; lifetimes are drawn by inverse transform of the cumulative
//! hazard, which is exact and replayable under a fixed seed.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::math::SquareMat;
use crate::rng::Prng;

const ROW_SUM_TOL: f64 = 1e-12;
const DIST_SUM_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum HazardError {
    EmptyModel,
    NonSquareGenerator,
    NegativeOffDiagonal { row: usize, col: usize },
    NonConservativeRow { row: usize, sum: f64 },
    BadHazardGrid,
    NonPositiveHazard { interval: usize, state: usize },
    BadInitialDist,
    BadHorizon,
    ChainTooShort { needed: f64, covered: f64 },
    IntervalOutsideChain,
}

impl fmt::Display for HazardError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HazardError::EmptyModel => write!(f, "model must have at least one state"),
            HazardError::NonSquareGenerator => write!(f, "generator matrix must be square"),
            HazardError::NegativeOffDiagonal { row, col } => {
                write!(f, "generator[{row}][{col}]: off-diagonal entries must be >= 0")
            }
            HazardError::NonConservativeRow { row, sum } => {
                write!(f, "generator row {row} sums to {sum:e}, expected 0")
            }
            HazardError::BadHazardGrid => {
                write!(f, "hazard breakpoints must start at 0 and increase strictly")
            }
            HazardError::NonPositiveHazard { interval, state } => {
                write!(f, "hazard rate for interval {interval}, state {state} must be > 0")
            }
            HazardError::BadInitialDist => {
                write!(f, "initial distribution must be nonnegative and sum to 1")
            }
            HazardError::BadHorizon => write!(f, "horizon must be positive and finite"),
            HazardError::ChainTooShort { needed, covered } => {
                write!(f, "chain covers up to {covered}, but {needed} is required")
            }
            HazardError::IntervalOutsideChain => {
                write!(f, "requested interval lies outside the chain's coverage")
            }
        }
    }
}

impl core::error::Error for HazardError {}

/// Hidden-state mortality model: generator `Q`, per-state hazard table and
/// the law of the initial state. Immutable after construction; all invariants
/// are checked here so the simulation and filtering routines can assume them.
#[derive(Clone, Debug)]
pub struct HazardModel {
    n_states: usize,
    generator: SquareMat,
    hazard_times: Vec<f64>,
    hazard_rates: Vec<Vec<f64>>,
    horizon: f64,
    initial_dist: Vec<f64>,
}

impl HazardModel {
    /// `hazard_times[k]` is the left edge of the k-th rate interval (the first
    /// must be 0); `hazard_rates[k][x]` is the rate on that interval for state
    /// `x`, with the last interval extending beyond the horizon.
    pub fn new(
        generator: Vec<Vec<f64>>,
        hazard_times: Vec<f64>,
        hazard_rates: Vec<Vec<f64>>,
        horizon: f64,
        initial_dist: Vec<f64>,
    ) -> Result<Self, HazardError> {
        let n = generator.len();
        if n == 0 {
            return Err(HazardError::EmptyModel);
        }
        for row in &generator {
            if row.len() != n {
                return Err(HazardError::NonSquareGenerator);
            }
        }
        for (i, row) in generator.iter().enumerate() {
            for (j, &q) in row.iter().enumerate() {
                if i != j && !(q >= 0.0) {
                    return Err(HazardError::NegativeOffDiagonal { row: i, col: j });
                }
            }
            let sum: f64 = row.iter().sum();
            if !(libm::fabs(sum) <= ROW_SUM_TOL) {
                return Err(HazardError::NonConservativeRow { row: i, sum });
            }
        }
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(HazardError::BadHorizon);
        }
        if hazard_times.is_empty()
            || hazard_times.len() != hazard_rates.len()
            || hazard_times[0] != 0.0
            || hazard_times.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(HazardError::BadHazardGrid);
        }
        for (k, rates) in hazard_rates.iter().enumerate() {
            if rates.len() != n {
                return Err(HazardError::BadHazardGrid);
            }
            for (x, &r) in rates.iter().enumerate() {
                if !(r > 0.0) || !r.is_finite() {
                    return Err(HazardError::NonPositiveHazard { interval: k, state: x });
                }
            }
        }
        if initial_dist.len() != n
            || initial_dist.iter().any(|&p| !(p >= 0.0))
            || libm::fabs(initial_dist.iter().sum::<f64>() - 1.0) > DIST_SUM_TOL
        {
            return Err(HazardError::BadInitialDist);
        }
        Ok(HazardModel {
            n_states: n,
            generator: SquareMat::from_rows(&generator),
            hazard_times,
            hazard_rates,
            horizon,
            initial_dist,
        })
    }

    /// Model with time-constant hazard rates.
    pub fn constant(
        generator: Vec<Vec<f64>>,
        rates: Vec<f64>,
        horizon: f64,
        initial_dist: Vec<f64>,
    ) -> Result<Self, HazardError> {
        Self::new(generator, vec![0.0], vec![rates], horizon, initial_dist)
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn initial_dist(&self) -> &[f64] {
        &self.initial_dist
    }

    pub fn generator(&self) -> &SquareMat {
        &self.generator
    }

    /// Breakpoints of the piecewise-constant hazard (left edges, first is 0).
    pub fn hazard_times(&self) -> &[f64] {
        &self.hazard_times
    }

    fn hazard_interval(&self, t: f64) -> usize {
        // Index of the interval containing t; t before 0 clamps to the first.
        match self.hazard_times.partition_point(|&edge| edge <= t) {
            0 => 0,
            k => k - 1,
        }
    }

    /// Hazard rate `lambda(t, state)`.
    pub fn hazard_rate(&self, t: f64, state: usize) -> f64 {
        self.hazard_rates[self.hazard_interval(t)][state]
    }

    /// Hazard rates of all states at time `t`.
    pub fn hazard_rates_at(&self, t: f64) -> &[f64] {
        &self.hazard_rates[self.hazard_interval(t)]
    }

    /// `∫_a^b lambda(r, state) dr` in closed form.
    pub fn hazard_integral(&self, state: usize, a: f64, b: f64) -> f64 {
        debug_assert!(b >= a);
        let mut acc = 0.0;
        let mut k = self.hazard_interval(a);
        let mut lo = a;
        while lo < b {
            let hi = if k + 1 < self.hazard_times.len() { self.hazard_times[k + 1].min(b) } else { b };
            acc += self.hazard_rates[k][state] * (hi - lo);
            lo = hi;
            k += 1;
        }
        acc
    }

    /// Predictable intensity of the death-counting process:
    /// `(l_a - n_dead) * lambda(t, state)`.
    pub fn intensity(&self, l_a: u32, n_dead: u32, t: f64, state: usize) -> f64 {
        debug_assert!(n_dead <= l_a);
        (l_a - n_dead) as f64 * self.hazard_rate(t, state)
    }
}

/// One trajectory of the hidden chain on `[t_start, t_end]`. The chain is in
/// `states[k]` on `[jump_times[k-1], jump_times[k])` (with `t_start` and
/// `t_end` closing the first and last segment).
#[derive(Clone, Debug, PartialEq)]
pub struct ChainPath {
    t_start: f64,
    t_end: f64,
    jump_times: Vec<f64>,
    states: Vec<usize>,
}

impl ChainPath {
    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn jump_times(&self) -> &[f64] {
        &self.jump_times
    }

    pub fn states(&self) -> &[usize] {
        &self.states
    }

    /// State at time `t` (right-continuous).
    pub fn state_at(&self, t: f64) -> usize {
        let k = self.jump_times.partition_point(|&j| j <= t);
        self.states[k]
    }

    /// Constant-state segments `(from, to, state)` covering `[t_start, t_end]`.
    pub fn segments(&self) -> impl Iterator<Item = (f64, f64, usize)> + '_ {
        (0..self.states.len()).map(move |k| {
            let a = if k == 0 { self.t_start } else { self.jump_times[k - 1] };
            let b = if k == self.jump_times.len() { self.t_end } else { self.jump_times[k] };
            (a, b, self.states[k])
        })
    }
}

/// Death record of a cohort: initial size and the sorted times of the deaths
/// resolved within the simulated coverage. Ties have probability zero.
#[derive(Clone, Debug, PartialEq)]
pub struct PortfolioPath {
    l_a: u32,
    death_times: Vec<f64>,
}

impl PortfolioPath {
    pub fn new(l_a: u32, mut death_times: Vec<f64>) -> Self {
        death_times.sort_by(|a, b| a.partial_cmp(b).expect("death times must not be NaN"));
        assert!(death_times.len() <= l_a as usize);
        assert!(death_times.first().map_or(true, |&d| d > 0.0));
        PortfolioPath { l_a, death_times }
    }

    pub fn l_a(&self) -> u32 {
        self.l_a
    }

    pub fn death_times(&self) -> &[f64] {
        &self.death_times
    }

    /// The death-counting process `N_t` (right-continuous: a death at `t`
    /// is included in the count at `t`).
    pub fn count_at(&self, t: f64) -> u32 {
        debug_assert!(t >= 0.0);
        self.death_times.partition_point(|&d| d <= t) as u32
    }
}

/// Simulates the hidden chain on `[0, t_end]` with the model's initial law.
/// Standard exponential-holding-time construction; replayable per seed.
pub fn sample_chain_path(model: &HazardModel, t_end: f64, seed: u64) -> ChainPath {
    let mut rng = Prng::new(seed);
    sample_chain_between(model, model.initial_dist(), 0.0, t_end, &mut rng)
}

/// Simulates the hidden chain on `[t_start, t_end]` with initial law `dist`,
/// drawing from an existing generator. Used by the Feynman-Kac estimator and
/// by conditional resimulation, where the start law is a filter state.
pub fn sample_chain_between(
    model: &HazardModel,
    dist: &[f64],
    t_start: f64,
    t_end: f64,
    rng: &mut Prng,
) -> ChainPath {
    assert!(t_end > t_start);
    let q = model.generator();
    let mut state = rng.categorical(dist);
    let mut t = t_start;
    let mut jump_times = Vec::new();
    let mut states = vec![state];
    loop {
        let rate = -q.at(state, state);
        if rate <= 0.0 {
            break;
        }
        t += rng.exponential() / rate;
        if t > t_end {
            break;
        }
        // Next state picked proportionally to the off-diagonal row entries.
        let mut target = rng.uniform() * rate;
        let mut next = state;
        for j in 0..model.n_states() {
            if j == state {
                continue;
            }
            target -= q.at(state, j);
            if target < 0.0 {
                next = j;
                break;
            }
        }
        if next == state {
            // Guard against rounding at the end of the row scan.
            next = (0..model.n_states()).rev().find(|&j| j != state && q.at(state, j) > 0.0).unwrap_or(state);
        }
        jump_times.push(t);
        states.push(next);
        state = next;
    }
    ChainPath { t_start, t_end, jump_times, states }
}

/// Cumulative hazard `∫_a^b lambda(r, X_r) dr` along a chain path, exact for
/// the piecewise-constant hazard.
pub fn cumulative_hazard(model: &HazardModel, chain: &ChainPath, a: f64, b: f64) -> Result<f64, HazardError> {
    if !(a >= chain.t_start && b >= a && b <= chain.t_end) {
        return Err(HazardError::IntervalOutsideChain);
    }
    let mut acc = 0.0;
    for (lo, hi, state) in chain.segments() {
        let lo = lo.max(a);
        let hi = hi.min(b);
        if lo < hi {
            acc += model.hazard_integral(state, lo, hi);
        }
    }
    Ok(acc)
}

/// Pathwise survival factor `exp(-∫_s^{s+t} lambda(u, X_u) du)`: the
/// probability that an individual alive at `s` survives `t` more years,
/// conditionally on the chain path.
pub fn survival_factor(model: &HazardModel, chain: &ChainPath, s: f64, t: f64) -> Result<f64, HazardError> {
    Ok(libm::exp(-cumulative_hazard(model, chain, s, s + t)?))
}

/// Draws the cohort's death times given a chain path: each individual is
/// independent with conditional survival `exp(-∫ lambda)`, sampled by inverse
/// transform of the cumulative hazard. Deaths beyond the chain's coverage are
/// censored (the individual is simply recorded as a survivor).
pub fn sample_lifetimes(
    model: &HazardModel,
    chain: &ChainPath,
    l_a: u32,
    seed: u64,
) -> Result<PortfolioPath, HazardError> {
    if chain.t_start > 0.0 || chain.t_end < model.horizon() {
        return Err(HazardError::ChainTooShort { needed: model.horizon(), covered: chain.t_end });
    }
    let mut rng = Prng::new(seed);
    sample_lifetimes_between(model, chain, l_a, &mut rng)
}

/// As [`sample_lifetimes`], for `survivors` individuals alive at
/// `chain.t_start()` and an existing generator.
pub fn sample_lifetimes_between(
    model: &HazardModel,
    chain: &ChainPath,
    survivors: u32,
    rng: &mut Prng,
) -> Result<PortfolioPath, HazardError> {
    // Breakpoints where the hazard along the path changes: chain jumps and
    // hazard-table edges. Between consecutive breakpoints the cumulative
    // hazard is linear, so the inverse transform is exact.
    let mut edges: Vec<f64> = vec![chain.t_start];
    for &j in chain.jump_times() {
        edges.push(j);
    }
    for &e in model.hazard_times() {
        if e > chain.t_start && e < chain.t_end {
            edges.push(e);
        }
    }
    edges.push(chain.t_end);
    edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    edges.dedup();

    let mut cum = Vec::with_capacity(edges.len());
    let mut rates = Vec::with_capacity(edges.len() - 1);
    cum.push(0.0);
    for w in edges.windows(2) {
        let mid_state = chain.state_at(w[0]);
        let rate = model.hazard_rate(w[0], mid_state);
        rates.push(rate);
        cum.push(cum.last().unwrap() + rate * (w[1] - w[0]));
    }
    let total = *cum.last().unwrap();

    let mut deaths = Vec::new();
    for _ in 0..survivors {
        let e = rng.exponential();
        if e >= total {
            continue; // survives past the simulated coverage
        }
        let k = cum.partition_point(|&c| c <= e) - 1;
        let t = edges[k] + (e - cum[k]) / rates[k];
        deaths.push(t);
    }
    Ok(PortfolioPath::new(survivors, deaths))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn two_state(q01: f64, q10: f64, rates: Vec<f64>, horizon: f64, init: Vec<f64>) -> HazardModel {
        HazardModel::constant(vec![vec![-q01, q01], vec![q10, -q10]], rates, horizon, init).unwrap()
    }

    #[test]
    fn one_state_chain_never_jumps() {
        let model = HazardModel::constant(vec![vec![0.0]], vec![0.05], 10.0, vec![1.0]).unwrap();
        let chain = sample_chain_path(&model, 10.0, 1);
        assert!(chain.jump_times().is_empty());
        assert_eq!(chain.states(), &[0]);
    }

    #[test]
    fn rejects_non_conservative_generator() {
        let err = HazardModel::constant(vec![vec![-1.0, 0.5], vec![1.0, -1.0]], vec![0.1, 0.1], 1.0, vec![0.5, 0.5])
            .unwrap_err();
        assert!(matches!(err, HazardError::NonConservativeRow { row: 0, .. }));
    }

    #[test]
    fn rejects_vanishing_hazard() {
        let err =
            HazardModel::constant(vec![vec![0.0]], vec![0.0], 1.0, vec![1.0]).unwrap_err();
        assert!(matches!(err, HazardError::NonPositiveHazard { interval: 0, state: 0 }));
    }

    #[test]
    fn tiny_hazard_gives_unit_survival() {
        let model = HazardModel::constant(vec![vec![0.0]], vec![1e-8], 2.0, vec![1.0]).unwrap();
        let chain = sample_chain_path(&model, 2.0, 0);
        let sf = survival_factor(&model, &chain, 0.0, 1.0).unwrap();
        assert!((1.0 - sf).abs() < 1e-6);
    }

    #[test]
    fn symmetric_chain_occupies_both_states_equally() {
        // Symmetric generator: the stationary law is uniform.
        let model = two_state(1.0, 1.0, vec![0.1, 0.1], 100.0, vec![0.5, 0.5]);
        let n = 10_000;
        let fractions: Vec<f64> = (0..n)
            .map(|seed| {
                let chain = sample_chain_path(&model, 100.0, seed as u64);
                let occ: f64 = chain.segments().filter(|&(_, _, s)| s == 0).map(|(a, b, _)| b - a).sum();
                occ / 100.0
            })
            .collect();
        let (mean, se) = crate::math::mean_with_se(&fractions);
        assert!((mean - 0.5).abs() < 3.0 * se, "occupation {mean} vs 0.5 (se {se})");
    }

    #[test]
    fn occupation_matches_stationary_distribution() {
        // Q = [[-2,2],[3,-3]]: pi Q = 0 gives pi = (3/5, 2/5). Starting the
        // chain at stationarity makes the expected occupation exactly 3/5.
        let model = two_state(2.0, 3.0, vec![0.1, 0.1], 50.0, vec![0.6, 0.4]);
        let n = 10_000;
        let fractions: Vec<f64> = (0..n)
            .map(|seed| {
                let chain = sample_chain_path(&model, 50.0, seed as u64);
                let occ: f64 = chain.segments().filter(|&(_, _, s)| s == 0).map(|(a, b, _)| b - a).sum();
                occ / 50.0
            })
            .collect();
        let (mean, se) = crate::math::mean_with_se(&fractions);
        assert!((mean - 0.6).abs() < 3.0 * se, "occupation {mean} vs 0.6 (se {se})");
    }

    #[test]
    fn constant_hazard_survival_matches_closed_form() {
        let model = HazardModel::constant(vec![vec![0.0]], vec![0.05], 10.0, vec![1.0]).unwrap();
        let chain = sample_chain_path(&model, 10.0, 0);
        let sf = survival_factor(&model, &chain, 0.0, 10.0).unwrap();
        assert_abs_diff_eq!(sf, 0.60653065971263342, epsilon = 1e-14);
    }

    #[test]
    fn survival_factor_of_zero_duration_is_one() {
        let model = two_state(1.0, 2.0, vec![0.02, 0.2], 5.0, vec![0.5, 0.5]);
        let chain = sample_chain_path(&model, 5.0, 3);
        assert_eq!(survival_factor(&model, &chain, 2.0, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn survival_factor_on_a_known_two_state_path() {
        // 3y at rate 0.01, then 2y at rate 0.1: exp(-(0.03 + 0.2)).
        let model = two_state(1.0, 1.0, vec![0.01, 0.1], 5.0, vec![1.0, 0.0]);
        let chain = ChainPath { t_start: 0.0, t_end: 5.0, jump_times: vec![3.0], states: vec![0, 1] };
        let sf = survival_factor(&model, &chain, 0.0, 5.0).unwrap();
        assert_abs_diff_eq!(sf, 0.79453360250333401, epsilon = 1e-14);
    }

    #[test]
    fn survival_factor_is_multiplicative_over_abutting_intervals() {
        let model = two_state(1.0, 2.0, vec![0.02, 0.2], 8.0, vec![0.5, 0.5]);
        let chain = sample_chain_path(&model, 8.0, 17);
        let whole = survival_factor(&model, &chain, 1.0, 5.0).unwrap();
        let first = survival_factor(&model, &chain, 1.0, 2.25).unwrap();
        let second = survival_factor(&model, &chain, 3.25, 2.75).unwrap();
        assert_abs_diff_eq!(whole, first * second, epsilon = 1e-12);
    }

    #[test]
    fn survival_factor_rejects_intervals_outside_coverage() {
        let model = two_state(1.0, 2.0, vec![0.02, 0.2], 5.0, vec![0.5, 0.5]);
        let chain = sample_chain_path(&model, 5.0, 0);
        assert_eq!(survival_factor(&model, &chain, 4.0, 2.0).unwrap_err(), HazardError::IntervalOutsideChain);
    }

    #[test]
    fn time_varying_hazard_integral_is_exact() {
        let model = HazardModel::new(
            vec![vec![0.0]],
            vec![0.0, 1.0, 3.0],
            vec![vec![0.1], vec![0.2], vec![0.4]],
            5.0,
            vec![1.0],
        )
        .unwrap();
        // ∫_0.5^4 = 0.1*0.5 + 0.2*2 + 0.4*1 = 0.85
        assert_abs_diff_eq!(model.hazard_integral(0, 0.5, 4.0), 0.85, epsilon = 1e-14);
        assert_eq!(model.hazard_rate(0.999, 0), 0.1);
        assert_eq!(model.hazard_rate(1.0, 0), 0.2);
        assert_eq!(model.hazard_rate(10.0, 0), 0.4);
    }

    #[test]
    fn intensity_vanishes_iff_cohort_exhausted() {
        let model = two_state(1.0, 2.0, vec![0.02, 0.2], 5.0, vec![0.5, 0.5]);
        assert_eq!(model.intensity(10, 10, 1.0, 0), 0.0);
        assert_eq!(model.intensity(10, 10, 1.0, 1), 0.0);
        assert!(model.intensity(10, 9, 1.0, 0) > 0.0);
        assert_abs_diff_eq!(model.intensity(5, 2, 0.5, 1), 3.0 * 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(model.intensity(1, 0, 0.5, 0), 0.02, epsilon = 1e-15);
    }

    #[test]
    fn count_process_is_right_continuous() {
        let p = PortfolioPath::new(5, vec![1.0, 2.0, 3.0]);
        assert_eq!(p.count_at(5.0), 3);
        assert_eq!(p.count_at(2.0), 2);
        assert_eq!(p.count_at(1.999), 1);
        assert_eq!(PortfolioPath::new(5, vec![]).count_at(5.0), 0);
    }

    #[test]
    fn constant_hazard_lifetimes_match_exponential_law() {
        let model = HazardModel::constant(vec![vec![0.0]], vec![0.05], 20.0, vec![1.0]).unwrap();
        let chain = sample_chain_path(&model, 20.0, 0);
        let l_a = 10_000;
        let deaths = sample_lifetimes(&model, &chain, l_a, 99).unwrap();
        let survivors_at_10 = l_a - deaths.count_at(10.0);
        let p = 0.60653065971263342;
        let se = libm::sqrt(p * (1.0 - p) / l_a as f64);
        let observed = survivors_at_10 as f64 / l_a as f64;
        assert!((observed - p).abs() < 3.0 * se, "survival {observed} vs {p} (se {se})");
    }

    #[test]
    fn lifetimes_require_chain_coverage() {
        let model = two_state(1.0, 2.0, vec![0.02, 0.2], 5.0, vec![0.5, 0.5]);
        let chain = sample_chain_path(&model, 3.0, 0);
        assert!(matches!(
            sample_lifetimes(&model, &chain, 10, 0),
            Err(HazardError::ChainTooShort { .. })
        ));
    }

    #[test]
    fn identical_seeds_replay_identical_paths() {
        let model = two_state(1.0, 2.0, vec![0.02, 0.2], 5.0, vec![0.5, 0.5]);
        let c1 = sample_chain_path(&model, 5.0, 123);
        let c2 = sample_chain_path(&model, 5.0, 123);
        assert_eq!(c1, c2);
        let d1 = sample_lifetimes(&model, &c1, 10, 456).unwrap();
        let d2 = sample_lifetimes(&model, &c2, 10, 456).unwrap();
        assert_eq!(d1, d2);
    }

    #[test]
    fn chain_path_invariants_hold_on_samples() {
        let model = two_state(2.0, 3.0, vec![0.1, 0.1], 50.0, vec![0.6, 0.4]);
        for seed in 0..50 {
            let chain = sample_chain_path(&model, 50.0, seed);
            assert!(chain.jump_times().windows(2).all(|w| w[0] < w[1]));
            assert!(chain.jump_times().iter().all(|&t| t > 0.0 && t <= 50.0));
            assert_eq!(chain.states().len(), chain.jump_times().len() + 1);
            assert!(chain.states().windows(2).all(|w| w[0] != w[1]));
        }
    }
}

//! Backward equations for the conditional survival quantities.
//!
//! Both contracts reduce to one backward linear ODE system in the hidden
//! state alone,
//!
//! ```text
//! ∂_t m(t, x) + (Q m)(t, x) − lambda(t, x) m(t, x) = 0,
//! ```
//!
//! solved from a terminal row: `m(T, ·) = 1` gives the survival projection
//! `m(t, x) = E[exp(-∫_t^T lambda(s, X_s) ds) | X_t = x]` used by pure
//! endowments, while `m(u, ·) = lambda(u, ·)` gives the death-payout kernel
//! `E[lambda(u, X_u) exp(-∫_t^u lambda) | X_t = x]` used by term insurance.
//! The auxiliary multiplicative discounting process only ever enters the
//! joint generator through `-lambda·y·∂_y`, so the `y` dependence factors off
//! exactly and never has to be discretized.
//!
//! Combining a table row with a filter state yields the expected-survivor
//! processes: `p_hat = pi(m)` and `B = (l_a − N) pi(m)`.

use alloc::vec::Vec;
use core::fmt;

use crate::filter::{FilterState, H_MAX};
use crate::hazard::HazardModel;
use crate::math::{rk4_linear_step, Rk4Scratch, SquareMat};

#[derive(Clone, Debug, PartialEq)]
pub enum ProjectionError {
    BadGrid,
    BadMaturity,
    NonFinite { time: f64 },
    WrongKind,
    OutOfRange { time: f64 },
    DimensionMismatch,
}

impl fmt::Display for ProjectionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjectionError::BadGrid => write!(f, "grid must be increasing and span [0, horizon]"),
            ProjectionError::BadMaturity => write!(f, "maturity must lie in (0, horizon]"),
            ProjectionError::NonFinite { time } => {
                write!(f, "backward solve produced a non-finite value at t = {time}")
            }
            ProjectionError::WrongKind => write!(f, "projection table kind does not match the operation"),
            ProjectionError::OutOfRange { time } => {
                write!(f, "query time {time} lies outside the table grid")
            }
            ProjectionError::DimensionMismatch => {
                write!(f, "filter dimension does not match the table")
            }
        }
    }
}

impl core::error::Error for ProjectionError {}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TableKind {
    /// Survival projection with terminal row 1 at the contract horizon.
    PureEndowment,
    /// Death-payout kernel with terminal row `lambda(maturity, ·)`.
    Term { maturity: f64 },
}

/// Time-gridded backward solution `m(t, x)`, immutable after the solve.
#[derive(Clone, Debug)]
pub struct ProjectionTable {
    kind: TableKind,
    grid: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl ProjectionTable {
    pub fn kind(&self) -> TableKind {
        self.kind
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// Row `m(grid[i], ·)`.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i]
    }

    pub fn n_states(&self) -> usize {
        self.values[0].len()
    }

    /// `m(t, state)`, linearly interpolated between grid rows when `t` is not
    /// a grid point (death times typically are not).
    pub fn value_at(&self, t: f64, state: usize) -> Result<f64, ProjectionError> {
        let (i, alpha) = self.locate(t)?;
        Ok(if alpha == 0.0 {
            self.values[i][state]
        } else {
            (1.0 - alpha) * self.values[i][state] + alpha * self.values[i + 1][state]
        })
    }

    /// `Σ_x weights[x] · m(t, x)` with the same interpolation rule.
    pub fn weighted_at(&self, t: f64, weights: &[f64]) -> Result<f64, ProjectionError> {
        if weights.len() != self.n_states() {
            return Err(ProjectionError::DimensionMismatch);
        }
        let (i, alpha) = self.locate(t)?;
        let mut acc = 0.0;
        for (x, w) in weights.iter().enumerate() {
            let v = if alpha == 0.0 {
                self.values[i][x]
            } else {
                (1.0 - alpha) * self.values[i][x] + alpha * self.values[i + 1][x]
            };
            acc += w * v;
        }
        Ok(acc)
    }

    fn locate(&self, t: f64) -> Result<(usize, f64), ProjectionError> {
        let first = self.grid[0];
        let last = *self.grid.last().unwrap();
        if !(t >= first && t <= last) {
            return Err(ProjectionError::OutOfRange { time: t });
        }
        match self.grid.binary_search_by(|g| g.partial_cmp(&t).unwrap()) {
            Ok(i) => Ok((i, 0.0)),
            Err(i) => {
                let (lo, hi) = (self.grid[i - 1], self.grid[i]);
                Ok((i - 1, (t - lo) / (hi - lo)))
            }
        }
    }
}

/// Integrates `m' = (−Q + diag(lambda)) m` backward from `(t_end, terminal)`,
/// recording at `record_times` (increasing, all ≤ t_end, last == t_end).
fn backward_solve(
    model: &HazardModel,
    record_times: &[f64],
    terminal: Vec<f64>,
    kind: TableKind,
) -> Result<ProjectionTable, ProjectionError> {
    let n = model.n_states();
    let mut m = terminal;
    let mut scratch = Rk4Scratch::new(n);
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(record_times.len());
    rows.push(m.clone());

    // Backward generator on the hazard interval containing t: −Q + diag(λ(t)).
    let backward_matrix = |t: f64| -> SquareMat {
        let mut a = model.generator().scaled(-1.0);
        for (x, &r) in model.hazard_rates_at(t).iter().enumerate() {
            a.set(x, x, a.at(x, x) + r);
        }
        a
    };

    for w in record_times.windows(2).rev() {
        let (t_lo, t_hi) = (w[0], w[1]);
        // Split at hazard breakpoints so each RK4 stretch is autonomous.
        let mut hi = t_hi;
        while hi > t_lo {
            let prev_edge = model
                .hazard_times()
                .iter()
                .rev()
                .copied()
                .find(|&e| e < hi)
                .unwrap_or(f64::NEG_INFINITY);
            let lo = prev_edge.max(t_lo);
            let a = backward_matrix(lo);
            let n_sub = libm::ceil((hi - lo) / H_MAX).max(1.0) as usize;
            let h = (hi - lo) / n_sub as f64;
            for _ in 0..n_sub {
                rk4_linear_step(&a, -h, &mut m, &mut scratch);
            }
            hi = lo;
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(ProjectionError::NonFinite { time: t_lo });
        }
        rows.push(m.clone());
    }
    rows.reverse();
    Ok(ProjectionTable { kind, grid: record_times.to_vec(), values: rows })
}

fn check_grid(grid: &[f64], horizon: f64) -> Result<(), ProjectionError> {
    if grid.len() < 2
        || grid[0] != 0.0
        || grid.windows(2).any(|w| w[0] >= w[1])
        || *grid.last().unwrap() != horizon
    {
        return Err(ProjectionError::BadGrid);
    }
    Ok(())
}

/// Solves the survival projection `m(t, x) = E[exp(-∫_t^T lambda) | X_t = x]`
/// on `grid` (which must span `[0, T]` for the model's horizon `T`).
pub fn solve_pure_endowment(model: &HazardModel, grid: &[f64]) -> Result<ProjectionTable, ProjectionError> {
    check_grid(grid, model.horizon())?;
    let terminal = alloc::vec![1.0; model.n_states()];
    backward_solve(model, grid, terminal, TableKind::PureEndowment)
}

/// Solves the death-payout kernel
/// `m(t, x) = E[lambda(u, X_u) exp(-∫_t^u lambda) | X_t = x]` for a payout
/// date `u`, on the part of `grid` up to `u` (with `u` itself appended when
/// it is not a grid point).
pub fn solve_term(model: &HazardModel, u: f64, grid: &[f64]) -> Result<ProjectionTable, ProjectionError> {
    check_grid(grid, model.horizon())?;
    if !(u > 0.0 && u <= model.horizon()) {
        return Err(ProjectionError::BadMaturity);
    }
    let mut record: Vec<f64> = grid.iter().copied().filter(|&t| t < u).collect();
    record.push(u);
    let terminal = model.hazard_rates_at(u).to_vec();
    backward_solve(model, &record, terminal, TableKind::Term { maturity: u })
}

/// Projected conditional survival probability over the table's remaining
/// horizon: `p_hat = Σ_x pi(x) m(t, x)`, evaluated at the filter's time.
pub fn p_hat(filter: &FilterState, table: &ProjectionTable) -> Result<f64, ProjectionError> {
    if table.kind() != TableKind::PureEndowment {
        return Err(ProjectionError::WrongKind);
    }
    table.weighted_at(filter.time, &filter.pi)
}

/// Expected number of survivors at the horizon given the observations:
/// `B = (l_a − N_t) p_hat`.
pub fn b_pure(filter: &FilterState, table: &ProjectionTable, l_a: u32) -> Result<f64, ProjectionError> {
    debug_assert!(filter.n_dead <= l_a);
    Ok((l_a - filter.n_dead) as f64 * p_hat(filter, table)?)
}

/// Expected death-payout intensity at the table's payout date given the
/// observations: `B(u) = (l_a − N_t) Σ_x pi(x) m_u(t, x)`, for `t ≤ u`.
pub fn b_term(filter: &FilterState, table: &ProjectionTable, l_a: u32) -> Result<f64, ProjectionError> {
    match table.kind() {
        TableKind::Term { .. } => {}
        _ => return Err(ProjectionError::WrongKind),
    }
    debug_assert!(filter.n_dead <= l_a);
    Ok((l_a - filter.n_dead) as f64 * table.weighted_at(filter.time, &filter.pi)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hazard::{sample_chain_path, survival_factor};
    use approx::assert_abs_diff_eq;

    fn model_1(rate: f64, horizon: f64) -> HazardModel {
        HazardModel::constant(alloc::vec![alloc::vec![0.0]], alloc::vec![rate], horizon, alloc::vec![1.0])
            .unwrap()
    }

    fn model_2(horizon: f64) -> HazardModel {
        HazardModel::constant(
            alloc::vec![alloc::vec![-1.0, 1.0], alloc::vec![2.0, -2.0]],
            alloc::vec![0.02, 0.2],
            horizon,
            alloc::vec![0.5, 0.5],
        )
        .unwrap()
    }

    #[test]
    fn constant_hazard_projection_matches_closed_form() {
        let model = model_1(0.05, 10.0);
        let grid = crate::grid::uniform_grid(10.0, 100);
        let table = solve_pure_endowment(&model, &grid).unwrap();
        assert_abs_diff_eq!(table.value_at(0.0, 0).unwrap(), 0.60653065971263342, epsilon = 1e-12);
        for (i, &t) in grid.iter().enumerate() {
            assert_abs_diff_eq!(table.row(i)[0], libm::exp(-0.05 * (10.0 - t)), epsilon = 1e-12);
        }
    }

    #[test]
    fn terminal_row_is_exactly_one() {
        let model = model_2(5.0);
        let grid = crate::grid::uniform_grid(5.0, 50);
        let table = solve_pure_endowment(&model, &grid).unwrap();
        assert_eq!(table.row(grid.len() - 1), &[1.0, 1.0]);
    }

    #[test]
    fn projection_is_monotone_and_bounded() {
        let model = model_2(5.0);
        let grid = crate::grid::uniform_grid(5.0, 200);
        let table = solve_pure_endowment(&model, &grid).unwrap();
        for x in 0..2 {
            for i in 1..grid.len() {
                assert!(table.row(i)[x] >= table.row(i - 1)[x]);
            }
            assert!(table.row(0)[x] > 0.0 && table.row(0)[x] <= 1.0);
        }
    }

    #[test]
    fn projection_matches_monte_carlo_survival() {
        let model = model_2(5.0);
        let grid = crate::grid::uniform_grid(5.0, 100);
        let table = solve_pure_endowment(&model, &grid).unwrap();
        for x0 in 0..2 {
            let mut init = alloc::vec![0.0, 0.0];
            init[x0] = 1.0;
            let pinned = HazardModel::constant(
                alloc::vec![alloc::vec![-1.0, 1.0], alloc::vec![2.0, -2.0]],
                alloc::vec![0.02, 0.2],
                5.0,
                init,
            )
            .unwrap();
            let n = 20_000;
            let samples: Vec<f64> = (0..n)
                .map(|seed| {
                    let chain = sample_chain_path(&pinned, 5.0, seed);
                    survival_factor(&pinned, &chain, 0.0, 5.0).unwrap()
                })
                .collect();
            let (mc, se) = crate::math::mean_with_se(&samples);
            let solved = table.value_at(0.0, x0).unwrap();
            assert!((mc - solved).abs() < 3.0 * se, "state {x0}: MC {mc} vs ODE {solved} (se {se})");
        }
    }

    #[test]
    fn term_kernel_matches_closed_form_for_one_state() {
        let model = model_1(0.05, 10.0);
        let grid = crate::grid::uniform_grid(10.0, 100);
        let table = solve_term(&model, 10.0, &grid).unwrap();
        assert_abs_diff_eq!(table.value_at(0.0, 0).unwrap(), 0.030326532985631671, epsilon = 1e-12);
    }

    #[test]
    fn term_kernel_terminal_row_is_the_hazard() {
        let model = model_2(5.0);
        let grid = crate::grid::uniform_grid(5.0, 50);
        let table = solve_term(&model, 2.5, &grid).unwrap();
        let last = table.grid().len() - 1;
        assert_eq!(table.grid()[last], 2.5);
        assert_eq!(table.row(last), &[0.02, 0.2]);
    }

    #[test]
    fn term_kernel_matches_monte_carlo() {
        let model = model_2(5.0);
        let grid = crate::grid::uniform_grid(5.0, 100);
        let u = 2.5;
        let table = solve_term(&model, u, &grid).unwrap();
        let n = 20_000;
        let samples: Vec<f64> = (0..n)
            .map(|seed| {
                let chain = sample_chain_path(&model, 5.0, 7_000_000 + seed);
                let x_u = chain.state_at(u);
                model.hazard_rate(u, x_u) * survival_factor(&model, &chain, 0.0, u).unwrap()
            })
            .collect();
        let (mc, se) = crate::math::mean_with_se(&samples);
        let solved: f64 =
            (0..2).map(|x| model.initial_dist()[x] * table.value_at(0.0, x).unwrap()).sum();
        assert!((mc - solved).abs() < 3.0 * se, "MC {mc} vs ODE {solved} (se {se})");
    }

    #[test]
    fn p_hat_is_survival_for_known_hazard() {
        let model = model_1(0.05, 10.0);
        let grid = crate::grid::uniform_grid(10.0, 100);
        let table = solve_pure_endowment(&model, &grid).unwrap();
        let filter = FilterState { time: 4.0, n_dead: 3, rho: alloc::vec![1.0], log_mass: -0.3, pi: alloc::vec![1.0] };
        assert_abs_diff_eq!(p_hat(&filter, &table).unwrap(), libm::exp(-0.05 * 6.0), epsilon = 1e-12);
    }

    #[test]
    fn p_hat_respects_point_masses_and_dominance() {
        let model = model_2(5.0);
        let grid = crate::grid::uniform_grid(5.0, 100);
        let table = solve_pure_endowment(&model, &grid).unwrap();
        let t = 1.5;
        for x in 0..2 {
            let mut pi = alloc::vec![0.0, 0.0];
            pi[x] = 1.0;
            let filter = FilterState { time: t, n_dead: 0, rho: pi.clone(), log_mass: 0.0, pi };
            assert_abs_diff_eq!(p_hat(&filter, &table).unwrap(), table.value_at(t, x).unwrap(), epsilon = 1e-15);
        }
        for k in 0..=10 {
            let w = k as f64 / 10.0;
            let pi = alloc::vec![w, 1.0 - w];
            let filter = FilterState { time: t, n_dead: 0, rho: pi.clone(), log_mass: 0.0, pi };
            let p = p_hat(&filter, &table).unwrap();
            let lo = table.value_at(t, 1).unwrap().min(table.value_at(t, 0).unwrap());
            let hi = table.value_at(t, 1).unwrap().max(table.value_at(t, 0).unwrap());
            assert!(p >= lo - 1e-15 && p <= hi + 1e-15);
            assert!(p > 0.0 && p <= 1.0);
        }
    }

    #[test]
    fn b_pure_examples() {
        let model = model_1(0.05, 10.0);
        let grid = crate::grid::uniform_grid(10.0, 100);
        let table = solve_pure_endowment(&model, &grid).unwrap();
        let exhausted =
            FilterState { time: 0.0, n_dead: 10, rho: alloc::vec![1.0], log_mass: 0.0, pi: alloc::vec![1.0] };
        assert_eq!(b_pure(&exhausted, &table, 10).unwrap(), 0.0);
        let filter = FilterState { time: 0.0, n_dead: 2, rho: alloc::vec![1.0], log_mass: 0.0, pi: alloc::vec![1.0] };
        assert_abs_diff_eq!(b_pure(&filter, &table, 10).unwrap(), 4.8522452777010674, epsilon = 1e-10);
    }

    #[test]
    fn b_pure_at_time_zero_is_the_tower_value() {
        let model = model_2(5.0);
        let grid = crate::grid::uniform_grid(5.0, 100);
        let table = solve_pure_endowment(&model, &grid).unwrap();
        let filter = FilterState::initial(&model);
        let expected: f64 =
            10.0 * (0..2).map(|x| model.initial_dist()[x] * table.row(0)[x]).sum::<f64>();
        assert_eq!(b_pure(&filter, &table, 10).unwrap(), expected);
    }

    #[test]
    fn b_term_examples() {
        let model = model_1(0.05, 10.0);
        let grid = crate::grid::uniform_grid(10.0, 100);
        let table = solve_term(&model, 4.0, &grid).unwrap();
        let exhausted =
            FilterState { time: 1.0, n_dead: 5, rho: alloc::vec![1.0], log_mass: 0.0, pi: alloc::vec![1.0] };
        assert_eq!(b_term(&exhausted, &table, 5).unwrap(), 0.0);
        // l_a = 5, one death, u − t = 2.
        let filter = FilterState { time: 2.0, n_dead: 1, rho: alloc::vec![1.0], log_mass: 0.0, pi: alloc::vec![1.0] };
        assert_abs_diff_eq!(b_term(&filter, &table, 5).unwrap(), 0.18096748360719191, epsilon = 1e-10);
    }

    #[test]
    fn kind_mismatch_is_rejected() {
        let model = model_1(0.05, 10.0);
        let grid = crate::grid::uniform_grid(10.0, 10);
        let endow = solve_pure_endowment(&model, &grid).unwrap();
        let term = solve_term(&model, 5.0, &grid).unwrap();
        let filter = FilterState::initial(&model);
        assert_eq!(p_hat(&filter, &term).unwrap_err(), ProjectionError::WrongKind);
        assert_eq!(b_term(&filter, &endow, 5).unwrap_err(), ProjectionError::WrongKind);
    }

    #[test]
    fn interpolation_between_rows_is_accurate() {
        let model = model_1(0.05, 10.0);
        let grid = crate::grid::uniform_grid(10.0, 100);
        let table = solve_pure_endowment(&model, &grid).unwrap();
        let t = 3.14159;
        let exact = libm::exp(-0.05 * (10.0 - t));
        assert!((table.value_at(t, 0).unwrap() - exact).abs() < 1e-6);
        assert!(matches!(table.value_at(10.5, 0), Err(ProjectionError::OutOfRange { .. })));
    }
}

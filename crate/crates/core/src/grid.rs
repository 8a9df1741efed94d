//! Time grids. Scenario runs share one grid across market, filter and
//! hedging, with death instants spliced in as extra points so that the
//! predictability-sensitive left/right limits at deaths never need
//! interpolation.

use alloc::vec::Vec;

/// Uniform grid `0 = t_0 < … < t_steps = t_end` with exact endpoints.
pub fn uniform_grid(t_end: f64, steps: usize) -> Vec<f64> {
    assert!(t_end > 0.0 && steps > 0);
    let mut out = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        out.push(t_end * i as f64 / steps as f64);
    }
    out
}

/// A base grid with event times merged in. Each grid point carries the number
/// of deaths to process at that instant (0 almost everywhere, 1 at a death).
#[derive(Clone, Debug)]
pub struct EventGrid {
    times: Vec<f64>,
    deaths_at: Vec<u32>,
}

impl EventGrid {
    /// Splices `death_times` (sorted) into `base` (sorted, increasing).
    /// Deaths beyond the last base time are ignored; a death landing exactly
    /// on a base point marks that point rather than duplicating it. Two
    /// deaths at the same instant are kept as one point with count 2 and are
    /// processed sequentially.
    pub fn merge(base: &[f64], death_times: &[f64]) -> Self {
        assert!(!base.is_empty());
        let horizon = *base.last().unwrap();
        let mut times = Vec::with_capacity(base.len() + death_times.len());
        let mut deaths_at = Vec::with_capacity(base.len() + death_times.len());

        let mut di = 0;
        for &t in base {
            while di < death_times.len() && death_times[di] <= horizon && death_times[di] < t {
                let d = death_times[di];
                if times.last() == Some(&d) {
                    *deaths_at.last_mut().unwrap() += 1;
                } else {
                    times.push(d);
                    deaths_at.push(1);
                }
                di += 1;
            }
            let mut here = 0;
            while di < death_times.len() && death_times[di] == t {
                here += 1;
                di += 1;
            }
            times.push(t);
            deaths_at.push(here);
        }
        EventGrid { times, deaths_at }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn deaths_at(&self, i: usize) -> u32 {
        self.deaths_at[i]
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

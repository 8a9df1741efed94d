//! Deterministic random-number plumbing.
//!
//! Every stochastic operation in this crate takes an explicit `u64` seed and
//! draws from a ChaCha stream, so identical seeds replay bitwise-identical
//! paths on every platform. Ensembles derive per-path sub-seeds from a master
//! seed with [`derive_seed`]; the rule is fixed and documented so runs are
//! reproducible independently of execution order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed-splitting rule: the sub-seed for `(stream, index)` under a master
/// seed is the `(index + 1)`-th SplitMix64 output of the state
/// `master XOR splitmix64(stream + 1)`.
///
/// `stream` is the Monte Carlo path number; `index` selects the generator
/// within a path (0 = hidden chain, 1 = lifetimes, 2 = market noise).
pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    let mut s = stream.wrapping_add(1);
    let tag = splitmix64(&mut s);
    let mut state = master ^ tag;
    let mut out = 0;
    for _ in 0..=index {
        out = splitmix64(&mut state);
    }
    out
}

/// Seeded generator with the scalar draws the simulators need.
pub struct Prng {
    inner: ChaCha12Rng,
    spare_normal: Option<f64>,
}

impl Prng {
    pub fn new(seed: u64) -> Self {
        Prng { inner: ChaCha12Rng::seed_from_u64(seed), spare_normal: None }
    }

    /// Uniform draw on `[0, 1)`.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.inner.gen::<f64>()
    }

    /// Unit-rate exponential draw, strictly positive.
    pub fn exponential(&mut self) -> f64 {
        loop {
            let u = self.uniform();
            let e = -libm::log(1.0 - u);
            if e > 0.0 {
                return e;
            }
        }
    }

    /// Standard normal draw (Box-Muller, spare cached).
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        let r = libm::sqrt(-2.0 * libm::log(1.0 - self.uniform()));
        let theta = 2.0 * core::f64::consts::PI * self.uniform();
        self.spare_normal = Some(r * libm::sin(theta));
        r * libm::cos(theta)
    }

    /// Draws an index from a discrete distribution given by `weights`
    /// (nonnegative, positive total mass).
    pub fn categorical(&mut self, weights: &[f64]) -> usize {
        let total: f64 = weights.iter().sum();
        debug_assert!(total > 0.0);
        let target = self.uniform() * total;
        let mut acc = 0.0;
        for (i, w) in weights.iter().enumerate() {
            acc += w;
            if target < acc {
                return i;
            }
        }
        weights.len() - 1
    }
}

//! Small numerical utilities: the standard normal CDF, a dense square matrix
//! with a scaling-and-squaring exponential, and summary statistics used by the
//! Monte Carlo estimators.

use alloc::vec;
use alloc::vec::Vec;

/// Standard normal cumulative distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * core::f64::consts::FRAC_1_SQRT_2)
}

/// Dense square matrix, row-major. Sized for small hidden-state spaces.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareMat {
    n: usize,
    data: Vec<f64>,
}

impl SquareMat {
    pub fn zeros(n: usize) -> Self {
        SquareMat { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Builds from nested rows; panics if the rows are not square.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            assert_eq!(row.len(), n, "matrix rows must be square");
            data.extend_from_slice(row);
        }
        SquareMat { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(j, i, self.at(i, j));
            }
        }
        out
    }

    /// `out = self * v`.
    pub fn mul_vec(&self, v: &[f64], out: &mut [f64]) {
        debug_assert_eq!(v.len(), self.n);
        debug_assert_eq!(out.len(), self.n);
        for i in 0..self.n {
            let mut acc = 0.0;
            for j in 0..self.n {
                acc += self.at(i, j) * v[j];
            }
            out[i] = acc;
        }
    }

    pub fn mat_mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = Self::zeros(self.n);
        for i in 0..self.n {
            for k in 0..self.n {
                let a = self.at(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..self.n {
                    out.data[i * self.n + j] += a * other.at(k, j);
                }
            }
        }
        out
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        for v in &mut out.data {
            *v *= c;
        }
        out
    }

    fn add_assign(&mut self, other: &Self) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    fn inf_norm(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            let mut row = 0.0;
            for j in 0..self.n {
                row += libm::fabs(self.at(i, j));
            }
            worst = worst.max(row);
        }
        worst
    }

    /// Matrix exponential by scaling-and-squaring with a Taylor series on the
    /// scaled matrix. Accurate to machine precision for the small, well-scaled
    /// generators this crate works with.
    pub fn exp(&self) -> Self {
        let norm = self.inf_norm();
        let mut squarings = 0u32;
        let mut scale = 1.0;
        while norm * scale > 0.5 {
            squarings += 1;
            scale *= 0.5;
        }
        let scaled = self.scaled(scale);

        let mut result = Self::identity(self.n);
        let mut term = Self::identity(self.n);
        for k in 1..=24 {
            term = term.mat_mul(&scaled).scaled(1.0 / k as f64);
            result.add_assign(&term);
            if term.inf_norm() < 1e-18 {
                break;
            }
        }
        for _ in 0..squarings {
            result = result.mat_mul(&result);
        }
        result
    }
}

/// Scratch space for [`rk4_linear_step`].
pub(crate) struct Rk4Scratch {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4Scratch {
    pub(crate) fn new(n: usize) -> Self {
        Rk4Scratch {
            k1: vec![0.0; n],
            k2: vec![0.0; n],
            k3: vec![0.0; n],
            k4: vec![0.0; n],
            tmp: vec![0.0; n],
        }
    }
}

/// One classical RK4 step of the linear system `v' = A v`; `h` may be
/// negative for backward integration.
pub(crate) fn rk4_linear_step(a: &SquareMat, h: f64, v: &mut [f64], s: &mut Rk4Scratch) {
    let n = v.len();
    a.mul_vec(v, &mut s.k1);
    for i in 0..n {
        s.tmp[i] = v[i] + 0.5 * h * s.k1[i];
    }
    a.mul_vec(&s.tmp, &mut s.k2);
    for i in 0..n {
        s.tmp[i] = v[i] + 0.5 * h * s.k2[i];
    }
    a.mul_vec(&s.tmp, &mut s.k3);
    for i in 0..n {
        s.tmp[i] = v[i] + h * s.k3[i];
    }
    a.mul_vec(&s.tmp, &mut s.k4);
    for i in 0..n {
        v[i] += h / 6.0 * (s.k1[i] + 2.0 * s.k2[i] + 2.0 * s.k3[i] + s.k4[i]);
    }
}

/// Trapezoid rule over an ordered list of `(abscissa, value)` points.
pub fn trapezoid(points: &[(f64, f64)]) -> f64 {
    let mut acc = 0.0;
    for w in points.windows(2) {
        acc += 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1);
    }
    acc
}

/// Sample mean.
pub fn mean(samples: &[f64]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    samples.iter().sum::<f64>() / samples.len() as f64
}

/// Sample mean together with the standard error of the mean.
pub fn mean_with_se(samples: &[f64]) -> (f64, f64) {
    let n = samples.len();
    if n < 2 {
        return (mean(samples), 0.0);
    }
    let m = mean(samples);
    let var = samples.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64;
    (m, libm::sqrt(var / n as f64))
}

/// Sample covariance of two paired samples together with the standard error
/// of the covariance estimate (from the spread of the per-pair products).
pub fn covariance_with_se(a: &[f64], b: &[f64]) -> (f64, f64) {
    assert_eq!(a.len(), b.len());
    let n = a.len();
    if n < 2 {
        return (0.0, 0.0);
    }
    let ma = mean(a);
    let mb = mean(b);
    let products: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).collect();
    let cov = products.iter().sum::<f64>() / (n - 1) as f64;
    let mp = mean(&products);
    let var_p = products.iter().map(|p| (p - mp) * (p - mp)).sum::<f64>() / (n - 1) as f64;
    (cov, libm::sqrt(var_p / n as f64))
}

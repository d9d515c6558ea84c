//! Vectors, lp norms, progression geometry, and experiment parameters.

use thiserror::Error;

use crate::num::Real;

#[derive(Debug, Error)]
pub enum ParamError {
    #[error("parameter `{key}` out of range: {message}")]
    OutOfRange { key: &'static str, message: String },
}

/// The lp norm `(sum |x_i|^p)^(1/p)` for `p >= 1`.
///
/// Positively homogeneous of degree one and subadditive; both properties
/// are exercised by the property tests below.
pub fn lp_norm<T: Real>(x: &[T], p: T) -> T {
    assert!(p >= T::one(), "lp_norm: exponent p must be >= 1");
    // Fast paths for the common exponents.
    if p == T::one() {
        return x.iter().fold(T::zero(), |acc, &v| acc + v.abs());
    }
    if p == T::two() {
        return x
            .iter()
            .fold(T::zero(), |acc, &v| acc + v * v)
            .sqrt();
    }
    let mut acc = T::zero();
    for &v in x {
        acc += v.abs().powf(p);
    }
    acc.powf(T::one() / p)
}

/// `sum |x_i|^p` without the root; the quantity the shell sets are built from.
pub fn lp_norm_pow<T: Real>(x: &[T], p: T) -> T {
    assert!(p >= T::one(), "lp_norm_pow: exponent p must be >= 1");
    if p == T::one() {
        return x.iter().fold(T::zero(), |acc, &v| acc + v.abs());
    }
    if p == T::two() {
        return x.iter().fold(T::zero(), |acc, &v| acc + v * v);
    }
    let mut acc = T::zero();
    for &v in x {
        acc += v.abs().powf(p);
    }
    acc
}

/// Squared Euclidean norm.
pub fn l2_norm_sq<T: Real>(x: &[T]) -> T {
    x.iter().fold(T::zero(), |acc, &v| acc + v * v)
}

/// Dimensional threshold `2^(n+3) (n + p)` above which the main density
/// theorem applies. Returns the rounded-up integer together with the exact
/// real value.
pub fn dimension_threshold(n: u32, p: f64) -> (u64, f64) {
    assert!(n >= 3, "dimension_threshold: n >= 3 required");
    assert!(p >= 1.0, "dimension_threshold: p >= 1 required");
    let exact = 2f64.powi(n as i32 + 3) * (n as f64 + p);
    (exact.ceil() as u64, exact)
}

/// The points `x, x+y, ..., x+(n-1)y` of an n-term progression.
pub fn ap_points(x: &[f64], y: &[f64], n: usize) -> Vec<Vec<f64>> {
    assert_eq!(x.len(), y.len(), "ap_points: dimension mismatch");
    (0..n)
        .map(|i| {
            x.iter()
                .zip(y)
                .map(|(&xj, &yj)| xj + i as f64 * yj)
                .collect()
        })
        .collect()
}

/// Write the i-th progression point into `out` without allocating.
#[inline]
pub fn ap_point_into(x: &[f64], y: &[f64], i: usize, out: &mut [f64]) {
    let s = i as f64;
    for ((o, &xj), &yj) in out.iter_mut().zip(x).zip(y) {
        *o = xj + s * yj;
    }
}

/// One vertex `(x_1 + r_1 y_1, ..., x_n + r_n y_n)` of the combinatorial
/// cube spanned by planar points `x_i` with planar side vectors `y_i`.
pub fn cube_vertex(x: &[[f64; 2]], y: &[[f64; 2]], r: &[bool]) -> Vec<f64> {
    assert!(x.len() == y.len() && x.len() == r.len());
    let mut out = Vec::with_capacity(2 * x.len());
    for i in 0..x.len() {
        let b = if r[i] { 1.0 } else { 0.0 };
        out.push(x[i][0] + b * y[i][0]);
        out.push(x[i][1] + b * y[i][1]);
    }
    out
}

/// Parameters shared by the counting experiments.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExperimentParams {
    /// Pattern length (progression length, or cube dimension), >= 2.
    pub n: u32,
    /// lp exponent for gap sizes, >= 1.
    pub p: f64,
    /// Ambient dimension, >= 1.
    pub d: u32,
    /// Scale of largeness, in (0, 1].
    pub lambda: f64,
    /// Scale of smoothness, in (0, 1].
    pub eps: f64,
    /// Density parameter, in (0, 1].
    pub delta: f64,
    pub seed: u64,
}

impl ExperimentParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        fn check(ok: bool, key: &'static str, message: String) -> Result<(), ParamError> {
            if ok {
                Ok(())
            } else {
                Err(ParamError::OutOfRange { key, message })
            }
        }
        check(self.n >= 2, "n", format!("{} < 2", self.n))?;
        check(self.p >= 1.0, "p", format!("{} < 1", self.p))?;
        check(self.d >= 1, "d", format!("{} < 1", self.d))?;
        check(
            self.lambda > 0.0 && self.lambda <= 1.0,
            "lambda",
            format!("{} not in (0, 1]", self.lambda),
        )?;
        check(
            self.eps > 0.0 && self.eps <= 1.0,
            "eps",
            format!("{} not in (0, 1]", self.eps),
        )?;
        check(
            self.delta > 0.0 && self.delta <= 1.0,
            "delta",
            format!("{} not in (0, 1]", self.delta),
        )?;
        Ok(())
    }
}

impl Default for ExperimentParams {
    fn default() -> Self {
        Self {
            n: 3,
            p: 2.0,
            d: 2,
            lambda: 0.1,
            eps: 0.5,
            delta: 0.5,
            seed: 0,
        }
    }
}

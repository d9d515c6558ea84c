//! Gowers box norms on `R^d` and the oscillatory integrals that control
//! their decay for power phases.
//!
//! The `U^n` norm of `f` is the `2^n`-th root of the integral of the
//! iterated multiplicative difference
//! `Delta_(h_n) ... Delta_(h_1) f (x)` over `(x, h_1, ..., h_n)`, with
//! `(Delta_h f)(x) = f(x) conj(f(x + h))`. The construction makes the
//! integral real; the imaginary residue is asserted small rather than
//! assumed away.

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::quad::gauss_legendre;
use crate::rng::{chunked_mean, SeedStream};

#[derive(Debug, Error)]
pub enum GowersError {
    #[error("grid of {terms} terms exceeds the {budget} budget")]
    ResourceLimit { terms: u128, budget: u128 },
    #[error("imaginary residue {imag:.3e} exceeds tolerance")]
    ImaginaryResidue { imag: f64 },
    #[error("dimension mismatch")]
    DimensionMismatch,
}

type EvalFn = dyn Fn(&[f64]) -> Complex64 + Send + Sync;

/// A bounded complex function with a known bounding box outside which it
/// vanishes.
#[derive(Clone)]
pub struct FunctionOracle {
    pub dim: usize,
    pub support_lo: Vec<f64>,
    pub support_hi: Vec<f64>,
    eval: Arc<EvalFn>,
}

impl FunctionOracle {
    pub fn new(
        dim: usize,
        support_lo: Vec<f64>,
        support_hi: Vec<f64>,
        eval: impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        assert!(support_lo.len() == dim && support_hi.len() == dim);
        Self {
            dim,
            support_lo,
            support_hi,
            eval: Arc::new(eval),
        }
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> Complex64 {
        (self.eval)(x)
    }

    /// Indicator of a box.
    pub fn indicator_box(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        let (l, h) = (lo.clone(), hi.clone());
        Self::new(lo.len(), lo, hi, move |x| {
            let inside = x
                .iter()
                .zip(l.iter().zip(&h))
                .all(|(&v, (&a, &b))| v >= a && v <= b);
            Complex64::new(if inside { 1.0 } else { 0.0 }, 0.0)
        })
    }

    /// Real step function on the line: `values[i]` on `[breaks[i], breaks[i+1])`.
    pub fn step_function(breaks: Vec<f64>, values: Vec<f64>) -> Self {
        assert!(breaks.len() == values.len() + 1);
        assert!(breaks.windows(2).all(|w| w[0] < w[1]));
        let lo = breaks[0];
        let hi = *breaks.last().unwrap();
        Self::new(1, vec![lo], vec![hi], move |x| {
            let t = x[0];
            if t < breaks[0] || t >= *breaks.last().unwrap() {
                return Complex64::new(0.0, 0.0);
            }
            let i = breaks.partition_point(|&b| b <= t) - 1;
            Complex64::new(values[i.min(values.len() - 1)], 0.0)
        })
    }

    /// The Gaussian `exp(-pi ||x||^2)` truncated to `[-6, 6]^d` (where it
    /// has decayed below 1e-49).
    pub fn gaussian(dim: usize) -> Self {
        Self::new(dim, vec![-6.0; dim], vec![6.0; dim], move |x| {
            let q: f64 = x.iter().map(|v| v * v).sum();
            if x.iter().any(|v| v.abs() > 6.0) {
                return Complex64::new(0.0, 0.0);
            }
            Complex64::new((-std::f64::consts::PI * q).exp(), 0.0)
        })
    }

    /// L1-normalized dilate `lambda^(-d) f(x / lambda)`.
    pub fn dilate(&self, lambda: f64) -> Self {
        assert!(lambda > 0.0);
        let inner = self.clone();
        let d = self.dim;
        let scale = lambda.powi(-(d as i32));
        let lo = self.support_lo.iter().map(|&v| v * lambda).collect();
        let hi = self.support_hi.iter().map(|&v| v * lambda).collect();
        Self::new(d, lo, hi, move |x| {
            let scaled: Vec<f64> = x.iter().map(|&v| v / lambda).collect();
            inner.eval(&scaled) * scale
        })
    }

    /// Translate by `shift`.
    pub fn translate(&self, shift: Vec<f64>) -> Self {
        assert_eq!(shift.len(), self.dim);
        let inner = self.clone();
        let lo = self
            .support_lo
            .iter()
            .zip(&shift)
            .map(|(&v, &s)| v + s)
            .collect();
        let hi = self
            .support_hi
            .iter()
            .zip(&shift)
            .map(|(&v, &s)| v + s)
            .collect();
        Self::new(self.dim, lo, hi, move |x| {
            let moved: Vec<f64> = x.iter().zip(&shift).map(|(&v, &s)| v - s).collect();
            inner.eval(&moved)
        })
    }

    /// Reflection `x -> f(-x)`.
    pub fn reflect(&self) -> Self {
        let inner = self.clone();
        let lo: Vec<f64> = self.support_hi.iter().map(|&v| -v).collect();
        let hi: Vec<f64> = self.support_lo.iter().map(|&v| -v).collect();
        Self::new(self.dim, lo, hi, move |x| {
            let neg: Vec<f64> = x.iter().map(|&v| -v).collect();
            inner.eval(&neg)
        })
    }

    /// Pointwise sum (support box is the hull).
    pub fn add(&self, other: &FunctionOracle) -> Self {
        assert_eq!(self.dim, other.dim);
        let (a, b) = (self.clone(), other.clone());
        let lo = self
            .support_lo
            .iter()
            .zip(&other.support_lo)
            .map(|(&x, &y)| x.min(y))
            .collect();
        let hi = self
            .support_hi
            .iter()
            .zip(&other.support_hi)
            .map(|(&x, &y)| x.max(y))
            .collect();
        Self::new(self.dim, lo, hi, move |x| a.eval(x) + b.eval(x))
    }
}

/// The multiplicative difference `(Delta_h f)(x) = f(x) conj(f(x+h))`.
/// The support shrinks to `supp f` intersected with `supp f - h`.
pub fn delta_h(f: &FunctionOracle, h: Vec<f64>) -> Result<FunctionOracle, GowersError> {
    if h.len() != f.dim {
        return Err(GowersError::DimensionMismatch);
    }
    let inner = f.clone();
    let lo = f
        .support_lo
        .iter()
        .zip(&h)
        .map(|(&v, &s)| v.max(v - s))
        .collect();
    let hi = f
        .support_hi
        .iter()
        .zip(&h)
        .map(|(&v, &s)| v.min(v - s))
        .collect();
    Ok(FunctionOracle::new(f.dim, lo, hi, move |x| {
        let shifted: Vec<f64> = x.iter().zip(&h).map(|(&v, &s)| v + s).collect();
        inner.eval(x) * inner.eval(&shifted).conj()
    }))
}

/// The integrand of the `U^n` power at `(x, h_1..h_n)`:
/// `prod over r in {0,1}^n of C^(|r|) f(x + r . h)`.
#[inline]
fn un_integrand(f: &FunctionOracle, x: &[f64], hs: &[Vec<f64>], arg: &mut [f64]) -> Complex64 {
    let n = hs.len();
    let mut prod = Complex64::new(1.0, 0.0);
    for r in 0..(1u32 << n) {
        arg.copy_from_slice(x);
        let mut parity = false;
        for (i, h) in hs.iter().enumerate() {
            if (r >> i) & 1 == 1 {
                parity = !parity;
                for (a, &hv) in arg.iter_mut().zip(h) {
                    *a += hv;
                }
            }
        }
        let v = f.eval(arg);
        prod *= if parity { v.conj() } else { v };
        if prod.norm_sqr() == 0.0 {
            return prod;
        }
    }
    prod
}

/// Brute-force midpoint Riemann sum for the `U^n` norm. The sum runs over
/// `x` in the support box and each `h_i` in the difference box; the total
/// term count must stay within 1e8.
pub fn un_norm_grid(f: &FunctionOracle, n: u32, grid_step: f64) -> Result<f64, GowersError> {
    assert!(grid_step > 0.0);
    let d = f.dim;
    let x_lens: Vec<usize> = (0..d)
        .map(|i| (((f.support_hi[i] - f.support_lo[i]) / grid_step).ceil() as usize).max(1))
        .collect();
    let h_lens: Vec<usize> = (0..d)
        .map(|i| {
            ((2.0 * (f.support_hi[i] - f.support_lo[i]) / grid_step).ceil() as usize).max(1)
        })
        .collect();
    let x_terms: u128 = x_lens.iter().map(|&v| v as u128).product();
    let h_terms: u128 = h_lens.iter().map(|&v| v as u128).product();
    let terms = x_terms * h_terms.pow(n);
    const BUDGET: u128 = 100_000_000;
    if terms > BUDGET {
        return Err(GowersError::ResourceLimit {
            terms,
            budget: BUDGET,
        });
    }

    // odometer over the (n+1) * d dimensional grid
    let axes: usize = d * (n as usize + 1);
    let mut idx = vec![0usize; axes];
    let len_of = |axis: usize| -> usize {
        if axis < d {
            x_lens[axis]
        } else {
            h_lens[axis % d]
        }
    };
    let coord_of = |axis: usize, i: usize| -> f64 {
        let c = axis % d;
        if axis < d {
            f.support_lo[c] + (i as f64 + 0.5) * grid_step
        } else {
            (f.support_lo[c] - f.support_hi[c]) + (i as f64 + 0.5) * grid_step
        }
    };
    let mut x = vec![0.0; d];
    let mut hs = vec![vec![0.0; d]; n as usize];
    let mut arg = vec![0.0; d];
    let mut acc = Complex64::new(0.0, 0.0);
    'outer: loop {
        for (c, xv) in x.iter_mut().enumerate() {
            *xv = coord_of(c, idx[c]);
        }
        for (m, h) in hs.iter_mut().enumerate() {
            for (c, hv) in h.iter_mut().enumerate() {
                let axis = d * (m + 1) + c;
                *hv = coord_of(axis, idx[axis]);
            }
        }
        acc += un_integrand(f, &x, &hs, &mut arg);
        // advance odometer
        let mut axis = 0;
        loop {
            idx[axis] += 1;
            if idx[axis] < len_of(axis) {
                break;
            }
            idx[axis] = 0;
            axis += 1;
            if axis == axes {
                break 'outer;
            }
        }
    }
    let cell = grid_step.powi(axes as i32);
    let power = acc * cell;
    if power.im.abs() > 1e-8 * (1.0 + power.re.abs()) {
        return Err(GowersError::ImaginaryResidue { imag: power.im });
    }
    Ok(power.re.max(0.0).powf(0.5f64.powi(n as i32)))
}

/// Monte Carlo `U^n` norm estimate.
#[derive(Clone, Debug)]
pub struct UnNormEstimate {
    pub value: f64,
    pub stderr: f64,
    /// Mean of the `2^n`-th power functional and its standard error.
    pub power: f64,
    pub power_stderr: f64,
    pub samples: u64,
    /// Set when the power estimate came out negative within noise and the
    /// value was clamped to zero.
    pub clamped: bool,
}

/// Uniform sampling over the product of support boxes; the estimate of the
/// `2^n` power is multiplied by the box volumes and rooted, with the
/// standard error propagated through the root.
pub fn un_norm_mc(
    f: &FunctionOracle,
    n: u32,
    samples: u64,
    stream: SeedStream,
) -> Result<UnNormEstimate, GowersError> {
    if samples == 0 {
        return Err(GowersError::ResourceLimit {
            terms: 0,
            budget: 0,
        });
    }
    let d = f.dim;
    let x_lo = f.support_lo.clone();
    let x_hi = f.support_hi.clone();
    let h_lo: Vec<f64> = (0..d).map(|i| x_lo[i] - x_hi[i]).collect();
    let h_hi: Vec<f64> = (0..d).map(|i| x_hi[i] - x_lo[i]).collect();
    let x_vol: f64 = (0..d).map(|i| x_hi[i] - x_lo[i]).product();
    let h_vol: f64 = (0..d).map(|i| h_hi[i] - h_lo[i]).product();
    let volume = x_vol * h_vol.powi(n as i32);
    let acc = chunked_mean(stream, samples, |rng| {
        let mut x = vec![0.0; d];
        let mut hs = vec![vec![0.0; d]; n as usize];
        let mut arg = vec![0.0; d];
        for (c, v) in x.iter_mut().enumerate() {
            *v = rng.gen_range(x_lo[c]..x_hi[c]);
        }
        for h in hs.iter_mut() {
            for (c, v) in h.iter_mut().enumerate() {
                *v = rng.gen_range(h_lo[c]..h_hi[c]);
            }
        }
        un_integrand(f, &x, &hs, &mut arg).re
    });
    let power = acc.mean() * volume;
    let power_stderr = acc.stderr() * volume;
    let root = 0.5f64.powi(n as i32);
    let clamped = power <= 0.0;
    let value = if clamped { 0.0 } else { power.powf(root) };
    let stderr = if clamped || power == 0.0 {
        power_stderr.powf(root)
    } else {
        power_stderr * root * power.powf(root - 1.0)
    };
    Ok(UnNormEstimate {
        value,
        stderr,
        power,
        power_stderr,
        samples: acc.count,
        clamped,
    })
}

// ---------------------------------------------------------------------------
// Oscillatory integrals
// ---------------------------------------------------------------------------

/// An instance of the alternating-difference power phase on an interval.
#[derive(Clone, Debug)]
pub struct OscillatoryInstance {
    pub p: f64,
    pub n: u32,
    /// Frequency multiplier of the phase.
    pub u: f64,
    /// Shifts `h_1 .. h_(n-1)`.
    pub shifts: Vec<f64>,
    /// Inner cutoff of the support `[eta, 3]`.
    pub eta: f64,
}

impl OscillatoryInstance {
    pub fn new(p: f64, n: u32, u: f64, shifts: Vec<f64>, eta: f64) -> Self {
        assert_eq!(shifts.len(), n as usize - 1);
        assert!((0.0..1.0).contains(&eta));
        Self {
            p,
            n,
            u,
            shifts,
            eta,
        }
    }

    /// Lower integration limit `max_r (eta - r . h)`.
    pub fn a(&self) -> f64 {
        self.eta + self.shifts.iter().map(|&h| (-h).max(0.0)).sum::<f64>()
    }

    /// Upper integration limit `min_r (3 - r . h)`.
    pub fn b(&self) -> f64 {
        3.0 - self.shifts.iter().map(|&h| h.max(0.0)).sum::<f64>()
    }

    pub fn active(&self) -> bool {
        self.a() < self.b()
    }

    /// The alternating sum `sum_r (-1)^|r| |x + r . h|^p`.
    pub fn phase(&self, x: f64) -> f64 {
        phase_eval(self.p, &self.shifts, x)
    }

    fn dphase(&self, x: f64) -> f64 {
        let m = self.shifts.len();
        let mut total = 0.0;
        for r in 0..(1u32 << m) {
            let mut t = x;
            let mut sign = 1.0;
            for (i, &h) in self.shifts.iter().enumerate() {
                if (r >> i) & 1 == 1 {
                    t += h;
                    sign = -sign;
                }
            }
            total += sign * self.p * t.abs().powf(self.p - 1.0) * t.signum();
        }
        total
    }
}

/// The alternating-difference phase, exposed for direct evaluation.
pub fn phase_eval(p: f64, shifts: &[f64], x: f64) -> f64 {
    let m = shifts.len();
    let mut total = 0.0;
    for r in 0..(1u32 << m) {
        let mut t = x;
        let mut sign = 1.0;
        for (i, &h) in shifts.iter().enumerate() {
            if (r >> i) & 1 == 1 {
                t += h;
                sign = -sign;
            }
        }
        total += sign * t.abs().powf(p);
    }
    total
}

/// `int_a^b exp(2 pi i u phi(x)) dx`, resolved with at least 20 nodes per
/// phase period; above `u = 1e5` a Filon-type linear-phase rule with a
/// quadratic correction takes over. Inactive instances integrate to 0.
pub fn oscillatory_integral(inst: &OscillatoryInstance) -> Complex64 {
    let (a, b) = (inst.a(), inst.b());
    if a >= b {
        return Complex64::new(0.0, 0.0);
    }
    if inst.u == 0.0 {
        return Complex64::new(b - a, 0.0);
    }
    if inst.u.abs() > 1e5 {
        return filon_linear(inst, a, b);
    }
    // total phase variation estimates the period count
    let probes = 256;
    let mut total_variation = 0.0;
    let mut prev = inst.phase(a);
    for i in 1..=probes {
        let x = a + (b - a) * i as f64 / probes as f64;
        let cur = inst.phase(x);
        total_variation += (cur - prev).abs();
        prev = cur;
    }
    let periods = inst.u.abs() * total_variation;
    let panels = ((periods * 20.0 / 15.0).ceil() as usize).clamp(16, 400_000);
    let rule = gauss_legendre(15);
    let (nodes, weights) = (&rule.0, &rule.1);
    let mut acc = Complex64::new(0.0, 0.0);
    let h = (b - a) / panels as f64;
    for panel in 0..panels {
        let pa = a + panel as f64 * h;
        let c = pa + 0.5 * h;
        let mut local = Complex64::new(0.0, 0.0);
        for (&t, &w) in nodes.iter().zip(weights) {
            let x = c + 0.5 * h * t;
            let theta = 2.0 * std::f64::consts::PI * inst.u * inst.phase(x);
            local += Complex64::new(theta.cos(), theta.sin()) * w;
        }
        acc += local * (0.5 * h);
    }
    acc
}

/// Filon-type rule: panels sized by phase curvature, each integrated in
/// closed form against the locally linearized phase with the leading
/// quadratic correction.
fn filon_linear(inst: &OscillatoryInstance, a: f64, b: f64) -> Complex64 {
    let u = inst.u;
    // curvature-based panel length: |2 pi u phi'' l^2| / 8 <= 0.05
    let mut max_curv: f64 = 1e-12;
    for i in 0..=64 {
        let x = a + (b - a) * i as f64 / 64.0;
        let d2 = (inst.dphase(x + 1e-4) - inst.dphase(x - 1e-4)) / 2e-4;
        max_curv = max_curv.max(d2.abs());
    }
    let l = (0.4 / (2.0 * std::f64::consts::PI * u.abs() * max_curv))
        .sqrt()
        .min(b - a);
    let panels = ((b - a) / l).ceil().max(1.0) as usize;
    let h = (b - a) / panels as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for panel in 0..panels {
        let c = a + (panel as f64 + 0.5) * h;
        let phi0 = inst.phase(c);
        let phi1 = inst.dphase(c);
        let phi2 = (inst.dphase(c + 1e-5) - inst.dphase(c - 1e-5)) / 2e-5;
        let theta = 2.0 * std::f64::consts::PI * u;
        let alpha = theta * phi1; // linear frequency
        let half = 0.5 * h;
        // moments of 1 and s^2 against e^(i alpha s) on [-h/2, h/2]
        let (m0, m2) = if alpha.abs() * half < 1e-4 {
            (
                Complex64::new(h, 0.0),
                Complex64::new(h * h * h / 12.0, 0.0),
            )
        } else {
            let s = (alpha * half).sin();
            let cs = (alpha * half).cos();
            let m0 = Complex64::new(2.0 * s / alpha, 0.0);
            let m2 = Complex64::new(
                2.0 * (half * half / alpha * s + 2.0 * half / (alpha * alpha) * cs
                    - 2.0 / (alpha * alpha * alpha) * s),
                0.0,
            );
            (m0, m2)
        };
        let carrier = Complex64::new(0.0, theta * phi0).exp();
        let quad_corr = Complex64::new(0.0, 0.5 * theta * phi2);
        acc += carrier * (m0 + quad_corr * m2);
    }
    acc
}

/// The `U^n` norm (power `2^n` rooted) of `1_[eta,3](x) exp(2 pi i u |x|^p)`
/// computed as the h-integral of `|I_h(u)|^2` over the admissible box
/// `|h_i| <= 3`, by tensor Gauss-Legendre with 64 nodes per axis.
pub fn un_1d_oscillatory(u: f64, n: u32, p: f64, eta: f64) -> f64 {
    assert!((2..=3).contains(&n), "h-integral implemented for n <= 3");
    let rule = gauss_legendre(64);
    let (nodes, weights) = (&rule.0, &rule.1);
    let m = n as usize - 1;
    let mut total = 0.0;
    if m == 1 {
        for (&t, &w) in nodes.iter().zip(weights) {
            let h = 3.0 * t;
            let inst = OscillatoryInstance::new(p, n, u, vec![h], eta);
            let i = oscillatory_integral(&inst);
            total += w * 3.0 * i.norm_sqr();
        }
    } else {
        use rayon::prelude::*;
        let rows: Vec<f64> = nodes
            .par_iter()
            .zip(weights.par_iter())
            .map(|(&t1, &w1)| {
                let h1 = 3.0 * t1;
                let mut row = 0.0;
                for (&t2, &w2) in nodes.iter().zip(weights) {
                    let h2 = 3.0 * t2;
                    let inst = OscillatoryInstance::new(p, n, u, vec![h1, h2], eta);
                    let i = oscillatory_integral(&inst);
                    row += w1 * w2 * 9.0 * i.norm_sqr();
                }
                row
            })
            .collect();
        total = rows.iter().sum();
    }
    total.max(0.0).powf(0.5f64.powi(n as i32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn indicator01() -> FunctionOracle {
        FunctionOracle::indicator_box(vec![0.0], vec![1.0])
    }

    /// Exact U^2 of a real step function via its autocorrelation:
    /// the fourth power equals `int rho(h)^2 dh` with
    /// `rho(h) = int f(x) f(x+h) dx`, a piecewise-linear function.
    fn u2_step_exact(breaks: &[f64], values: &[f64]) -> f64 {
        let lo = breaks[0];
        let hi = *breaks.last().unwrap();
        let span = hi - lo;
        // dense trapezoid on the piecewise-linear autocorrelation
        let grid = 4096;
        let f = |t: f64| -> f64 {
            if t < lo || t >= hi {
                return 0.0;
            }
            let i = breaks.partition_point(|&b| b <= t) - 1;
            values[i.min(values.len() - 1)]
        };
        let rho = |h: f64| -> f64 {
            let steps = 8192;
            let dx = span / steps as f64;
            let mut acc = 0.0;
            for i in 0..steps {
                let x = lo + (i as f64 + 0.5) * dx;
                acc += f(x) * f(x + h);
            }
            acc * dx
        };
        let mut acc = 0.0;
        let dh = 2.0 * span / grid as f64;
        for i in 0..grid {
            let h = -span + (i as f64 + 0.5) * dh;
            let r = rho(h);
            acc += r * r;
        }
        (acc * dh).powf(0.25)
    }

    #[test]
    fn delta_h_basics() {
        let f = indicator01();
        let d0 = delta_h(&f, vec![0.0]).unwrap();
        // h = 0 gives |f|^2
        assert_abs_diff_eq!(d0.eval(&[0.5]).re, 1.0, epsilon = 1e-15);
        let d = delta_h(&f, vec![0.3]).unwrap();
        // indicator of [0,1] cap [0,1]-0.3 = [0, 0.7]
        assert_abs_diff_eq!(d.eval(&[0.5]).re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.eval(&[0.8]).re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.support_hi[0], 0.7, epsilon = 1e-15);
    }

    #[test]
    fn delta_h_commutes() {
        use rand::{Rng, SeedableRng};
        let f = FunctionOracle::gaussian(1);
        let ab = delta_h(&delta_h(&f, vec![0.4]).unwrap(), vec![-0.7]).unwrap();
        let ba = delta_h(&delta_h(&f, vec![-0.7]).unwrap(), vec![0.4]).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1000 {
            let x = [rng.gen_range(-3.0..3.0)];
            let va = ab.eval(&x);
            let vb = ba.eval(&x);
            assert!((va - vb).norm() <= 1e-14);
        }
    }

    #[test]
    fn zero_function_has_zero_norm() {
        let f = FunctionOracle::new(1, vec![0.0], vec![1.0], |_| Complex64::new(0.0, 0.0));
        assert_abs_diff_eq!(un_norm_grid(&f, 2, 0.05).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn u2_of_unit_indicator_grid() {
        // exact value (2/3)^(1/4)
        let v = un_norm_grid(&indicator01(), 2, 0.005).unwrap();
        let expect = (2.0f64 / 3.0).powf(0.25);
        assert!((v - expect).abs() <= 0.01 * expect, "{v} vs {expect}");
    }

    #[test]
    fn u2_of_gaussian_grid() {
        // determinant of the quadratic form of the four-fold product gives
        // power = 1/2, so the norm is (1/2)^(1/4)
        let v = un_norm_grid(&FunctionOracle::gaussian(1), 2, 0.05).unwrap();
        let expect = 0.5f64.powf(0.25);
        assert!((v - expect).abs() <= 0.005 * expect, "{v} vs {expect}");
    }

    #[test]
    fn grid_budget_guard() {
        let f = indicator01();
        assert!(matches!(
            un_norm_grid(&f, 3, 1e-4),
            Err(GowersError::ResourceLimit { .. })
        ));
    }

    #[test]
    fn grid_invariance_under_translation_and_reflection() {
        let f = indicator01();
        let base = un_norm_grid(&f, 2, 0.01).unwrap();
        let shifted = un_norm_grid(&f.translate(vec![0.37]), 2, 0.01).unwrap();
        let reflected = un_norm_grid(&f.reflect(), 2, 0.01).unwrap();
        assert_abs_diff_eq!(base, shifted, epsilon = 5e-3);
        assert_abs_diff_eq!(base, reflected, epsilon = 5e-3);
    }

    #[test]
    fn mc_flags_vanishing_power() {
        let zero = FunctionOracle::new(1, vec![0.0], vec![1.0], |_| Complex64::new(0.0, 0.0));
        let est = un_norm_mc(&zero, 2, 10_000, SeedStream::new(39, 0)).unwrap();
        assert_eq!(est.value, 0.0);
        assert!(est.clamped);
    }

    #[test]
    fn mc_agrees_with_grid() {
        let f = indicator01();
        let grid = un_norm_grid(&f, 2, 0.005).unwrap();
        let mc = un_norm_mc(&f, 2, 2_000_000, SeedStream::new(40, 0)).unwrap();
        assert!(
            (mc.value - grid).abs() <= 4.0 * mc.stderr + 0.01 * grid,
            "mc {} vs grid {grid} (stderr {})",
            mc.value,
            mc.stderr
        );
    }

    #[test]
    fn dilation_scaling_law() {
        // || f_lambda ||_U2 = lambda^(-d(1 - 3/4)) ||f||_U2 = lambda^(-1/4) ||f||
        let f = indicator01();
        let base = un_norm_mc(&f, 2, 2_000_000, SeedStream::new(41, 0)).unwrap();
        let dilated = un_norm_mc(&f.dilate(0.5), 2, 2_000_000, SeedStream::new(42, 0)).unwrap();
        let ratio = dilated.value / base.value;
        let expect = 2.0f64.powf(0.25);
        let rel_se = (dilated.stderr / dilated.value).hypot(base.stderr / base.value);
        assert!(
            (ratio - expect).abs() <= 4.0 * expect * rel_se + 0.02,
            "ratio {ratio} vs {expect}"
        );
    }

    #[test]
    fn u2_below_l43_on_step_functions() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(43);
        for _ in 0..20 {
            let k = rng.gen_range(2..6);
            let mut breaks: Vec<f64> = (0..=k).map(|i| i as f64 / k as f64).collect();
            for b in breaks.iter_mut().skip(1).take(k - 1) {
                *b += rng.gen_range(-0.3 / k as f64..0.3 / k as f64);
            }
            let values: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let u2 = u2_step_exact(&breaks, &values);
            let l43: f64 = breaks
                .windows(2)
                .zip(&values)
                .map(|(w, &v)| v.abs().powf(4.0 / 3.0) * (w[1] - w[0]))
                .sum::<f64>()
                .powf(0.75);
            assert!(u2 <= l43 + 1e-3, "u2 {u2} > l43 {l43}");
        }
    }

    #[test]
    fn u2_triangle_inequality_on_steps() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(44);
        let breaks: Vec<f64> = (0..=8).map(|i| i as f64 / 8.0).collect();
        for _ in 0..20 {
            let a: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let b: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
            let na = u2_step_exact(&breaks, &a);
            let nb = u2_step_exact(&breaks, &b);
            let ns = u2_step_exact(&breaks, &sum);
            assert!(ns <= na + nb + 1e-3, "{ns} > {na} + {nb}");
        }
    }

    #[test]
    fn phase_special_cases() {
        // p = 2, n = 3: second difference of a quadratic is constant 2 h1 h2
        let inst = OscillatoryInstance::new(2.0, 3, 1.0, vec![0.4, 0.6], 0.2);
        for x in [0.7, 1.0, 1.9] {
            assert_abs_diff_eq!(inst.phase(x), 2.0 * 0.4 * 0.6, epsilon = 1e-12);
        }
        // p = 1, n = 2, everything positive: phase = -h1
        let inst = OscillatoryInstance::new(1.0, 2, 1.0, vec![0.5], 0.1);
        for x in [0.2, 1.0, 2.0] {
            assert_abs_diff_eq!(inst.phase(x), -0.5, epsilon = 1e-14);
        }
    }

    #[test]
    fn phase_derivative_matches_finite_differences() {
        let inst = OscillatoryInstance::new(1.5, 3, 1.0, vec![0.5, 0.7], 0.3);
        for x in [0.5, 1.0, 1.5] {
            let fd = (inst.phase(x + 1e-6) - inst.phase(x - 1e-6)) / 2e-6;
            assert_abs_diff_eq!(inst.dphase(x), fd, epsilon = 1e-6);
        }
        // sign: (-1)^(n-1) p (p-1) (p-2) h1 h2 < 0 here, and the integral
        // representation keeps phi' single-signed on the active interval
        assert!(inst.dphase(1.0) < 0.0);
    }

    #[test]
    fn oscillatory_integral_basics() {
        // u = 0 gives the interval length
        let inst = OscillatoryInstance::new(1.5, 3, 0.0, vec![0.5, 0.7], 0.3);
        let (a, b) = (inst.a(), inst.b());
        assert_abs_diff_eq!(a, 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(b, 1.8, epsilon = 1e-15);
        assert_abs_diff_eq!(oscillatory_integral(&inst).re, b - a, epsilon = 1e-12);
        // inactive instance
        let dead = OscillatoryInstance::new(1.5, 3, 5.0, vec![2.0, 1.5], 0.3);
        assert!(!dead.active());
        assert_eq!(oscillatory_integral(&dead).norm(), 0.0);
        // p = 2, n = 3: constant phase, |I| = b - a for any u
        for u in [1.0, 10.0, 1000.0] {
            let inst = OscillatoryInstance::new(2.0, 3, u, vec![0.5, 0.7], 0.3);
            assert_abs_diff_eq!(
                oscillatory_integral(&inst).norm(),
                inst.b() - inst.a(),
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn oscillatory_decay_for_generic_exponent() {
        let mk = |u: f64| OscillatoryInstance::new(1.5, 3, u, vec![0.5, 0.7], 0.3);
        let magnitudes: Vec<f64> = [1.0, 10.0, 100.0, 1000.0]
            .iter()
            .map(|&u| oscillatory_integral(&mk(u)).norm())
            .collect();
        for w in magnitudes.windows(2) {
            assert!(w[0] > w[1], "not decreasing: {magnitudes:?}");
        }
        let span = mk(1.0).b() - mk(1.0).a();
        assert!(magnitudes[3] <= span / 50.0);
        // modulus bound
        for &m in &magnitudes {
            assert!(m <= span + 1e-9);
        }
    }

    #[test]
    fn oscillatory_u_weighted_boundedness() {
        // with all |h_i| >= eta and p generic, u |I(u)| stays bounded
        let mk = |u: f64| OscillatoryInstance::new(1.5, 3, u, vec![0.5, 0.7], 0.3);
        let reference = 10.0 * oscillatory_integral(&mk(10.0)).norm() * 10.0;
        for &u in &[10.0, 100.0, 1000.0, 10_000.0] {
            let weighted = u * oscillatory_integral(&mk(u)).norm();
            assert!(weighted <= reference, "u|I| = {weighted} at u = {u}");
        }
    }

    #[test]
    fn filon_agrees_with_subdivision() {
        let gl = OscillatoryInstance::new(1.5, 3, 9.0e4, vec![0.5, 0.7], 0.3);
        let filon = OscillatoryInstance::new(1.5, 3, 9.0e4, vec![0.5, 0.7], 0.3);
        let direct = oscillatory_integral(&gl);
        let via_filon = filon_linear(&filon, filon.a(), filon.b());
        assert!(
            (direct - via_filon).norm() <= 1e-6,
            "direct {direct} vs filon {via_filon}"
        );
    }

    #[test]
    fn un_oscillatory_u0_matches_grid() {
        // u = 0, eta = 0, n = 2: the norm of the indicator of [0, 3]
        let v = un_1d_oscillatory(0.0, 2, 1.5, 0.0);
        let f = FunctionOracle::indicator_box(vec![0.0], vec![3.0]);
        let grid = un_norm_grid(&f, 2, 0.012).unwrap();
        assert!((v - grid).abs() <= 0.01 * grid, "{v} vs {grid}");
        // and the closed form 18^(1/4)
        assert!((v - 18f64.powf(0.25)).abs() <= 0.01 * v);
    }

    #[test]
    fn un_oscillatory_quadratic_phase_does_not_decay() {
        let v1 = un_1d_oscillatory(1.0, 3, 2.0, 0.2);
        let v100 = un_1d_oscillatory(100.0, 3, 2.0, 0.2);
        assert!((v100 - v1).abs() <= 0.05 * v1, "{v1} vs {v100}");
    }

    #[test]
    fn un_oscillatory_generic_exponent_decays() {
        let v1 = un_1d_oscillatory(1.0, 3, 1.5, 0.2);
        let vbig = un_1d_oscillatory(1.0e4, 3, 1.5, 0.2);
        assert!(vbig < v1, "{vbig} !< {v1}");
        // fitted exponent is positive; the analytic floor is 2/D(3,1.5)
        let us = [1.0, 10.0, 100.0, 1000.0, 1.0e4];
        let vals: Vec<f64> = us.iter().map(|&u| un_1d_oscillatory(u, 3, 1.5, 0.2)).collect();
        let inv: Vec<f64> = vals.iter().map(|&v| 1.0 / v).collect();
        let slope = crate::stats::loglog_slope(&us, &inv).unwrap();
        assert!(slope > 0.0, "fitted decay exponent {slope}");
        let floor = 2.0 / crate::geometry::dimension_threshold(3, 1.5).1;
        assert!(floor > 0.0 && floor < slope + 1.0);
    }
}

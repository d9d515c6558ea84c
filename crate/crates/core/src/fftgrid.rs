//! Grid Fourier analysis used to verify the kernel identities.
//!
//! Functions are sampled on a uniform grid over `[-L, L]^d`. The
//! continuous Fourier transform is approximated by the rescaled DFT
//! (periodization and truncation are negligible when `L >= 16 * scale`,
//! where a unit Gaussian has decayed below 1e-300), and convolutions are
//! computed by pointwise multiplication in frequency.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use thiserror::Error;

use crate::gaussian::{self, GaussianKernel};

#[derive(Debug, Error)]
pub enum GridError {
    #[error("grid too coarse: need at least {need} points, got {got}")]
    TooCoarse { need: usize, got: usize },
}

/// Uniform symmetric grid on `[-L, L)` with `n` points (n a power of two).
#[derive(Clone)]
pub struct Grid1d {
    pub n: usize,
    pub half_width: f64,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl Grid1d {
    pub fn new(n: usize, half_width: f64) -> Result<Self, GridError> {
        if n < 64 || !n.is_power_of_two() {
            return Err(GridError::TooCoarse { need: 64, got: n });
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            n,
            half_width,
            fft: planner.plan_fft_forward(n),
            ifft: planner.plan_fft_inverse(n),
        })
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.dx()
    }

    /// Frequency of DFT bin `k` (shifted to the symmetric range).
    pub fn xi(&self, k: usize) -> f64 {
        let k = k as i64;
        let n = self.n as i64;
        let signed = if k < n / 2 { k } else { k - n };
        signed as f64 / (2.0 * self.half_width)
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<Complex64> {
        (0..self.n)
            .map(|j| Complex64::new(f(self.x(j)), 0.0))
            .collect()
    }

    /// Continuous-FT approximation: `F(xi_k) = dx * (-1)^k * DFT[f]_k`.
    pub fn fourier(&self, samples: &[Complex64]) -> Vec<Complex64> {
        let mut buf = samples.to_vec();
        self.fft.process(&mut buf);
        let dx = self.dx();
        for (k, v) in buf.iter_mut().enumerate() {
            let phase = if k % 2 == 0 { 1.0 } else { -1.0 };
            *v *= dx * phase;
        }
        buf
    }

    /// Circular convolution scaled to approximate the continuous one.
    pub fn convolve(&self, f: &[Complex64], g: &[Complex64]) -> Vec<Complex64> {
        let mut fa = f.to_vec();
        let mut ga = g.to_vec();
        self.fft.process(&mut fa);
        self.fft.process(&mut ga);
        for (a, b) in fa.iter_mut().zip(&ga) {
            *a *= b;
        }
        self.ifft.process(&mut fa);
        let scale = self.dx() / self.n as f64;
        // circular indexing: entry j corresponds to x_j with the origin at
        // sample index n/2 shifted out; fix by rotating half a period
        let n = self.n;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (j, o) in out.iter_mut().enumerate() {
            *o = fa[(j + n / 2) % n] * scale;
        }
        out
    }
}

/// Max residual of the Fourier pairs of `g`, `h^(1)` and `k` on a d-dim
/// grid (`d <= 2`), comparing the grid transform to the analytic forms
/// `g^ = g`, `(h^(l))^ = 2 pi i xi_l g`, `k^ = -4 pi^2 ||xi||^2 g`.
pub fn verify_ft_pairs(d: usize, n: usize, half_width: f64) -> Result<f64, GridError> {
    assert!(d == 1 || d == 2);
    let mut worst: f64 = 0.0;
    if d == 1 {
        let grid = Grid1d::new(n, half_width)?;
        let cases = [GaussianKernel::G, GaussianKernel::H(0), GaussianKernel::K];
        for kernel in cases {
            let samples = grid.sample(|x| gaussian::kernel_eval(kernel, &[x], 1.0));
            let transformed = grid.fourier(&samples);
            for (k, &got) in transformed.iter().enumerate() {
                let xi = grid.xi(k);
                let expect = analytic_ft_1d(kernel, xi);
                worst = worst.max((got - expect).norm());
            }
        }
    } else {
        let grid = Grid1d::new(n, half_width)?;
        let cases = [GaussianKernel::G, GaussianKernel::H(0), GaussianKernel::K];
        for kernel in cases {
            let mut field: Vec<Complex64> = Vec::with_capacity(n * n);
            for j1 in 0..n {
                for j0 in 0..n {
                    let x = [grid.x(j0), grid.x(j1)];
                    field.push(Complex64::new(gaussian::kernel_eval(kernel, &x, 1.0), 0.0));
                }
            }
            fft2_in_place(&grid, &mut field);
            for k1 in 0..n {
                for k0 in 0..n {
                    let xi = [grid.xi(k0), grid.xi(k1)];
                    let expect = analytic_ft_2d(kernel, xi);
                    let got = field[k1 * n + k0];
                    worst = worst.max((got - expect).norm());
                }
            }
        }
    }
    Ok(worst)
}

fn analytic_ft_1d(kernel: GaussianKernel, xi: f64) -> Complex64 {
    let pi = std::f64::consts::PI;
    let g = (-pi * xi * xi).exp();
    match kernel {
        GaussianKernel::G => Complex64::new(g, 0.0),
        GaussianKernel::H(_) => Complex64::new(0.0, 2.0 * pi * xi * g),
        GaussianKernel::KAxis(_) | GaussianKernel::K => {
            Complex64::new(-4.0 * pi * pi * xi * xi * g, 0.0)
        }
    }
}

fn analytic_ft_2d(kernel: GaussianKernel, xi: [f64; 2]) -> Complex64 {
    let pi = std::f64::consts::PI;
    let q = xi[0] * xi[0] + xi[1] * xi[1];
    let g = (-pi * q).exp();
    match kernel {
        GaussianKernel::G => Complex64::new(g, 0.0),
        GaussianKernel::H(l) => Complex64::new(0.0, 2.0 * pi * xi[l] * g),
        GaussianKernel::KAxis(l) => Complex64::new(-4.0 * pi * pi * xi[l] * xi[l] * g, 0.0),
        GaussianKernel::K => Complex64::new(-4.0 * pi * pi * q * g, 0.0),
    }
}

/// Row-column FFT of a square field, with the same continuous-FT scaling
/// and alternating-sign shift as [`Grid1d::fourier`].
fn fft2_in_place(grid: &Grid1d, field: &mut [Complex64]) {
    let n = grid.n;
    // rows
    for row in field.chunks_mut(n) {
        grid.fft.process(row);
    }
    // columns
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for c in 0..n {
        for r in 0..n {
            col[r] = field[r * n + c];
        }
        grid.fft.process(&mut col);
        for r in 0..n {
            field[r * n + c] = col[r];
        }
    }
    let dx = grid.dx();
    for k1 in 0..n {
        for k0 in 0..n {
            let phase = if (k0 + k1) % 2 == 0 { 1.0 } else { -1.0 };
            field[k1 * n + k0] *= dx * dx * phase;
        }
    }
}

/// Report from the convolution-identity suite at scales `(a, b)`:
/// the maximum grid residual over the four identities
/// `g_a * g_b = g_c`, `h_a * h_b = (ab/c^2) k^(l)_c`,
/// `h_a * g_b = (a/c) h^(l)_c`, `k^(l)_a * g_b = (a^2/c^2) k^(l)_c`,
/// where `c = sqrt(a^2 + b^2)`.
pub fn verify_convolution_identities(a: f64, b: f64, d: usize) -> Result<f64, GridError> {
    assert!(a > 0.0 && b > 0.0);
    assert!(d == 1 || d == 2, "convolution verification covers d <= 2");
    let c = (a * a + b * b).sqrt();
    let half_width = 16.0 * c.max(1.0);
    if d == 1 {
        let n = if half_width > 16.0 { 8192 } else { 4096 };
        let grid = Grid1d::new(n, half_width)?;
        let sample1 = |kernel: GaussianKernel, s: f64| grid.sample(|x| gaussian::kernel_eval(kernel, &[x], s));
        let mut worst: f64 = 0.0;
        let cases: [(GaussianKernel, GaussianKernel, GaussianKernel, f64); 4] = [
            (GaussianKernel::G, GaussianKernel::G, GaussianKernel::G, 1.0),
            (
                GaussianKernel::H(0),
                GaussianKernel::H(0),
                GaussianKernel::KAxis(0),
                a * b / (c * c),
            ),
            (
                GaussianKernel::H(0),
                GaussianKernel::G,
                GaussianKernel::H(0),
                a / c,
            ),
            (
                GaussianKernel::KAxis(0),
                GaussianKernel::G,
                GaussianKernel::KAxis(0),
                a * a / (c * c),
            ),
        ];
        for (ka, kb, kc, coeff) in cases {
            let conv = grid.convolve(&sample1(ka, a), &sample1(kb, b));
            for (j, &got) in conv.iter().enumerate() {
                let x = grid.x(j);
                let expect = coeff * gaussian::kernel_eval(kc, &[x], c);
                worst = worst.max((got - Complex64::new(expect, 0.0)).norm());
            }
        }
        Ok(worst)
    } else {
        let n = if half_width > 16.0 { 1024 } else { 512 };
        let grid = Grid1d::new(n, half_width)?;
        let mut worst: f64 = 0.0;
        let cases: [(GaussianKernel, GaussianKernel, GaussianKernel, f64); 4] = [
            (GaussianKernel::G, GaussianKernel::G, GaussianKernel::G, 1.0),
            (
                GaussianKernel::H(0),
                GaussianKernel::H(0),
                GaussianKernel::KAxis(0),
                a * b / (c * c),
            ),
            (
                GaussianKernel::H(1),
                GaussianKernel::G,
                GaussianKernel::H(1),
                a / c,
            ),
            (
                GaussianKernel::KAxis(0),
                GaussianKernel::G,
                GaussianKernel::KAxis(0),
                a * a / (c * c),
            ),
        ];
        for (ka, kb, kc, coeff) in cases {
            worst = worst.max(conv2_residual(&grid, ka, a, kb, b, kc, c, coeff));
        }
        Ok(worst)
    }
}

#[allow(clippy::too_many_arguments)]
fn conv2_residual(
    grid: &Grid1d,
    ka: GaussianKernel,
    a: f64,
    kb: GaussianKernel,
    b: f64,
    kc: GaussianKernel,
    c: f64,
    coeff: f64,
) -> f64 {
    let n = grid.n;
    let field = |kernel: GaussianKernel, s: f64| -> Vec<Complex64> {
        let mut v = Vec::with_capacity(n * n);
        for j1 in 0..n {
            for j0 in 0..n {
                let x = [grid.x(j0), grid.x(j1)];
                v.push(Complex64::new(gaussian::kernel_eval(kernel, &x, s), 0.0));
            }
        }
        v
    };
    let mut fa = field(ka, a);
    let mut fb = field(kb, b);
    fft2_raw(grid, &mut fa);
    fft2_raw(grid, &mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    ifft2_raw(grid, &mut fa);
    let scale = grid.dx() * grid.dx() / (n * n) as f64;
    let mut worst: f64 = 0.0;
    for j1 in 0..n {
        for j0 in 0..n {
            let got = fa[((j1 + n / 2) % n) * n + (j0 + n / 2) % n] * scale;
            let x = [grid.x(j0), grid.x(j1)];
            let expect = coeff * gaussian::kernel_eval(kc, &x, c);
            worst = worst.max((got - Complex64::new(expect, 0.0)).norm());
        }
    }
    worst
}

fn fft2_raw(grid: &Grid1d, field: &mut [Complex64]) {
    let n = grid.n;
    for row in field.chunks_mut(n) {
        grid.fft.process(row);
    }
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for c in 0..n {
        for r in 0..n {
            col[r] = field[r * n + c];
        }
        grid.fft.process(&mut col);
        for r in 0..n {
            field[r * n + c] = col[r];
        }
    }
}

fn ifft2_raw(grid: &Grid1d, field: &mut [Complex64]) {
    let n = grid.n;
    for row in field.chunks_mut(n) {
        grid.ifft.process(row);
    }
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for c in 0..n {
        for r in 0..n {
            col[r] = field[r * n + c];
        }
        grid.ifft.process(&mut col);
        for r in 0..n {
            field[r * n + c] = col[r];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn ft_pairs_1d() {
        let r = verify_ft_pairs(1, 4096, 16.0).unwrap();
        assert!(r <= 1e-8, "residual {r}");
    }

    #[test]
    fn ft_pairs_2d() {
        let r = verify_ft_pairs(2, 256, 16.0).unwrap();
        assert!(r <= 1e-8, "residual {r}");
    }

    #[test]
    fn ft_k_at_zero_is_zero() {
        let grid = Grid1d::new(4096, 16.0).unwrap();
        let samples = grid.sample(|x| gaussian::kernel_eval(GaussianKernel::K, &[x], 1.0));
        let transformed = grid.fourier(&samples);
        assert_abs_diff_eq!(transformed[0].norm(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn grid_guard() {
        assert!(Grid1d::new(17, 16.0).is_err());
        assert!(Grid1d::new(16, 16.0).is_err());
    }

    #[test]
    fn convolution_identities_1d() {
        // unit scales
        let r = verify_convolution_identities(1.0, 1.0, 1).unwrap();
        assert!(r <= 1e-8, "residual {r}");
        // 3-4-5 scales
        let r = verify_convolution_identities(3.0, 4.0, 1).unwrap();
        assert!(r <= 1e-8, "residual {r}");
    }

    #[test]
    fn convolution_identities_2d() {
        let r = verify_convolution_identities(1.0, 1.0, 2).unwrap();
        assert!(r <= 1e-8, "residual {r}");
    }

    #[test]
    fn convolution_coefficients() {
        // h_a * h_b carries ab/(a^2+b^2): at a=b=1 the factor is 1/2
        assert_abs_diff_eq!(1.0 * 1.0 / (1.0 + 1.0), 0.5);
        // k_a * g_b carries a^2/(a^2+b^2): at a=b=1 the factor is 1/2
        assert_abs_diff_eq!(1.0 / (1.0 + 1.0), 0.5);
    }
}

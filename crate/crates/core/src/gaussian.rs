//! The Gaussian kernel family and its calculus.
//!
//! The base kernel is `g(x) = exp(-pi ||x||^2)`, with first and second
//! partials `h_l = d_l g` and `k_l = d_l^2 g`, and `k = sum_l k_l`, the
//! Laplacian of `g`. All dilates are L1-normalized:
//! `f_s(x) = s^(-d) f(x/s)`, so `g_s` integrates to 1 at every scale and
//! the scale flow satisfies `d/ds g_s(x) = k_s(x) / (2 pi s)`, the heat
//! equation after a quadratic change of the time variable.

use crate::num::Real;
use crate::quad::{adaptive_quad, QuadError};
use crate::special::{gamma, gamma_p};

/// Which kernel of the family to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GaussianKernel {
    /// `g`
    G,
    /// `h^(l) = d_l g`; axis is 0-based
    H(usize),
    /// `k^(l) = d_l^2 g`
    KAxis(usize),
    /// `k = Laplacian of g`
    K,
}

/// `g(x) = exp(-pi ||x||^2)`.
#[inline]
pub fn g_unit<T: Real>(x: &[T]) -> T {
    let mut q = T::zero();
    for &v in x {
        q += v * v;
    }
    (-T::PI() * q).exp()
}

/// L1-normalized dilate `g_s(x) = s^(-d) g(x/s)`.
#[inline]
pub fn g_scaled<T: Real>(x: &[T], s: T) -> T {
    let d = x.len() as i32;
    let mut q = T::zero();
    for &v in x {
        let u = v / s;
        q += u * u;
    }
    (-T::PI() * q).exp() / s.powi(d)
}

/// `h^(l)_s(x) = s^(-d) (d_l g)(x/s)`, with `(d_l g)(x) = -2 pi x_l g(x)`.
#[inline]
pub fn h_scaled<T: Real>(x: &[T], l: usize, s: T) -> T {
    let u = x[l] / s;
    -T::two() * T::PI() * u * g_scaled(x, s)
}

/// `k^(l)_s(x)`, with `(d_l^2 g)(x) = (4 pi^2 x_l^2 - 2 pi) g(x)`.
#[inline]
pub fn k_axis_scaled<T: Real>(x: &[T], l: usize, s: T) -> T {
    let u = x[l] / s;
    let pi = T::PI();
    (T::of(4.0) * pi * pi * u * u - T::two() * pi) * g_scaled(x, s)
}

/// `k_s(x)` with `k(x) = (4 pi^2 ||x||^2 - 2 pi d) g(x)`.
#[inline]
pub fn k_scaled<T: Real>(x: &[T], s: T) -> T {
    let d = T::of(x.len() as f64);
    let pi = T::PI();
    let mut q = T::zero();
    for &v in x {
        let u = v / s;
        q += u * u;
    }
    (T::of(4.0) * pi * pi * q - T::two() * pi * d) * (-pi * q).exp() / s.powi(x.len() as i32)
}

/// Evaluate any kernel of the family at scale `s`.
pub fn kernel_eval<T: Real>(kernel: GaussianKernel, x: &[T], s: T) -> T {
    assert!(s > T::zero(), "kernel scale must be positive");
    match kernel {
        GaussianKernel::G => g_scaled(x, s),
        GaussianKernel::H(l) => h_scaled(x, l, s),
        GaussianKernel::KAxis(l) => k_axis_scaled(x, l, s),
        GaussianKernel::K => k_scaled(x, s),
    }
}

/// Max over a `(t, x)` grid of the heat-equation residual
/// `| d/dt g_t(x) - k_t(x) / (2 pi t) |`, with `d/dt` taken by central
/// differences of step `1e-5`.
pub fn heat_equation_residual(t_grid: &[f64], x_grid: &[Vec<f64>]) -> f64 {
    const STEP: f64 = 1e-5;
    let mut worst: f64 = 0.0;
    for &t in t_grid {
        assert!(t > 2.0 * STEP);
        for x in x_grid {
            let fd = (g_scaled(x, t + STEP) - g_scaled(x, t - STEP)) / (2.0 * STEP);
            let analytic = k_scaled(x, t) / (2.0 * std::f64::consts::PI * t);
            worst = worst.max((fd - analytic).abs());
        }
    }
    worst
}

/// The constant `(1/2) pi^(-(d+3)/2) Gamma((d+3)/2)`, the limit of
/// `||z||^(d+3) * int_1^inf g_beta(z) dbeta / beta^4` as `||z|| -> inf`.
pub fn domination_constant(d: usize) -> f64 {
    let a = (d as f64 + 3.0) / 2.0;
    0.5 * std::f64::consts::PI.powf(-a) * gamma(a)
}

/// `int_1^inf g_beta(z) dbeta / beta^4` for `||z|| = r`, in closed form
/// through the regularized incomplete gamma.
pub fn domination_envelope(d: usize, r: f64) -> f64 {
    assert!(r >= 0.0);
    let a = (d as f64 + 3.0) / 2.0;
    if r < 1e-8 {
        // integrand reduces to beta^-(d+4)
        return 1.0 / (d as f64 + 3.0);
    }
    let s = std::f64::consts::PI * r * r;
    0.5 * s.powf(-a) * gamma(a) * gamma_p(a, s)
}

/// Same envelope by direct quadrature over the scale variable; the
/// independent route used to confirm the closed form and the limit.
pub fn domination_envelope_quadrature(d: usize, r: f64) -> Result<f64, QuadError> {
    let b_max = (20.0 * r).max(400.0);
    let df = d as f64;
    let (v, _) = adaptive_quad(
        &|beta: f64| {
            let u = r / beta;
            (-std::f64::consts::PI * u * u).exp() * beta.powf(-df - 4.0)
        },
        1.0,
        b_max,
        1e-14,
    )?;
    // tail beyond b_max: bounded by int beta^-(d+4)
    let tail = b_max.powf(-df - 3.0) / (df + 3.0);
    Ok(v + tail)
}

/// Worst relative deviation of `r^(d+3) * envelope(r)` from the limit
/// constant at `r in {10, 20, 40}` (quadrature route).
pub fn confirm_domination_limit(d: usize) -> Result<f64, QuadError> {
    let c = domination_constant(d);
    let mut worst: f64 = 0.0;
    for r in [10.0, 20.0, 40.0] {
        let v = domination_envelope_quadrature(d, r)? * r.powf(d as f64 + 3.0);
        worst = worst.max((v - c).abs() / c);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn kernel_values_at_origin() {
        assert_abs_diff_eq!(kernel_eval(GaussianKernel::G, &[0.0], 1.0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(kernel_eval(GaussianKernel::H(0), &[0.0], 1.0), 0.0, epsilon = 1e-15);
        // k(0) = -2 pi in d = 1
        assert_abs_diff_eq!(
            kernel_eval(GaussianKernel::K, &[0.0], 1.0),
            -2.0 * std::f64::consts::PI,
            epsilon = 1e-12
        );
        // h is odd
        assert_abs_diff_eq!(
            kernel_eval(GaussianKernel::H(0), &[0.7], 1.0),
            -kernel_eval(GaussianKernel::H(0), &[-0.7], 1.0),
            epsilon = 1e-15
        );
    }

    #[test]
    fn dilates_integrate_correctly() {
        // g_s has mass 1, h and k have mass 0, at any scale
        for s in [0.5, 1.0, 1.7] {
            let (m_g, _) = adaptive_quad(&|t| g_scaled(&[t], s), -30.0, 30.0, 1e-10).unwrap();
            assert_abs_diff_eq!(m_g, 1.0, epsilon = 1e-8);
            let (m_h, _) = adaptive_quad(&|t| h_scaled(&[t], 0, s), -30.0, 30.0, 1e-10).unwrap();
            assert_abs_diff_eq!(m_h, 0.0, epsilon = 1e-8);
            let (m_k, _) = adaptive_quad(&|t| k_scaled(&[t], s), -30.0, 30.0, 1e-10).unwrap();
            assert_abs_diff_eq!(m_k, 0.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn heat_equation_small_grid() {
        let t_grid: Vec<f64> = (0..16).map(|i| 0.5 + 0.1 * i as f64).collect();
        let x_grid: Vec<Vec<f64>> = (-40..=40).map(|i| vec![i as f64 * 0.1]).collect();
        assert!(heat_equation_residual(&t_grid, &x_grid) <= 1e-6);
        // peak height decays: d/dt g_t(0) < 0
        for &t in &t_grid {
            let fd = (g_scaled(&[0.0], t + 1e-5) - g_scaled(&[0.0], t - 1e-5)) / 2e-5;
            assert!(fd < 0.0);
        }
    }

    #[test]
    fn heat_equation_dilation_covariance() {
        // residual structure transports under (t, x) -> (2t, 2x)
        let r1 = heat_equation_residual(&[0.7], &[vec![0.9]]);
        let r2 = heat_equation_residual(&[1.4], &[vec![1.8]]);
        assert!(r1 <= 1e-6 && r2 <= 1e-6);
    }

    #[test]
    fn domination_constants() {
        assert_abs_diff_eq!(domination_constant(1), 0.05066059182116889, epsilon = 1e-14);
        assert_abs_diff_eq!(domination_constant(2), 0.037995443865876664, epsilon = 1e-14);
        assert_abs_diff_eq!(domination_constant(3), 0.03225153443319949, epsilon = 1e-14);
    }

    #[test]
    fn domination_limit_confirmed_by_quadrature() {
        for d in [1, 2] {
            assert!(confirm_domination_limit(d).unwrap() <= 0.02);
        }
        // closed form and quadrature agree pointwise
        for d in [1usize, 2] {
            for r in [0.0, 0.3, 1.0, 5.0, 25.0] {
                let q = domination_envelope_quadrature(d, r).unwrap();
                assert_abs_diff_eq!(domination_envelope(d, r), q, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn domination_inequality_with_stated_constant() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for d in [1usize, 2] {
            let c = 2.0 / domination_constant(d);
            for _ in 0..100 {
                let r: f64 = rng.gen_range(0.0..50.0);
                let lhs = (1.0 + r).powi(-(d as i32) - 3);
                let rhs = c * domination_envelope(d, r);
                assert!(
                    lhs <= rhs,
                    "domination fails at d={d}, r={r}: {lhs:.3e} > {rhs:.3e}"
                );
            }
        }
    }

    #[test]
    fn f32_kernels() {
        assert_abs_diff_eq!(g_unit(&[0.0f32, 0.0f32]), 1.0f32, epsilon = 1e-7);
        assert_abs_diff_eq!(
            k_scaled(&[0.0f32], 1.0f32),
            -2.0 * std::f32::consts::PI,
            epsilon = 1e-4
        );
    }
}

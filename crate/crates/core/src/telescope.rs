//! Numerical verification of the two telescoping identities of the
//! Gaussian calculus and of their planar box-pattern counterpart.
//!
//! At small instances every inner integral is a one-dimensional Gaussian
//! convolution or a separable product, so each identity reduces to an
//! adaptive scale integral that can be checked against its boundary
//! difference to high accuracy.

use num_complex::Complex64;
use thiserror::Error;

use crate::fftgrid::Grid1d;
use crate::gaussian::{g_scaled, h_scaled, k_axis_scaled, k_scaled};
use crate::quad::{adaptive_quad, QuadError};
use crate::special::erf;

#[derive(Debug, Error)]
pub enum TelescopeError {
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error("instance requires {requirement}")]
    Unsupported { requirement: &'static str },
    #[error("planar box union must be disjoint and n <= 2")]
    NonSeparable,
}

/// An evaluation point for the telescoping identities: the free variable
/// `y` and the shift vectors `u_k .. u_{n-1}`, all in `R^d`.
#[derive(Clone, Debug)]
pub struct EvalPoint {
    pub y: Vec<f64>,
    pub us: Vec<Vec<f64>>,
}

/// A small instance of the telescoping identity family.
#[derive(Clone, Debug)]
pub struct TelescopeInstance {
    /// The depth index; the reduced identity corresponds to `k = 1`.
    pub k_index: usize,
    pub d: usize,
    pub n: usize,
    /// Scale multiplier of the `y`-kernel.
    pub alpha: f64,
    /// Scale multipliers `alpha_k .. alpha_{n-1}` of the shift kernels.
    pub alphas: Vec<f64>,
    pub a: f64,
    pub b: f64,
    pub eval_points: Vec<EvalPoint>,
}

impl TelescopeInstance {
    fn check_scales(&self) -> Result<(), TelescopeError> {
        if !(self.a <= self.b && self.a > 0.0) {
            return Err(TelescopeError::Unsupported {
                requirement: "0 < a <= b",
            });
        }
        if self.alpha <= 0.0 || self.alphas.iter().any(|&a| a <= 0.0) {
            return Err(TelescopeError::Unsupported {
                requirement: "positive scale multipliers",
            });
        }
        Ok(())
    }
}

/// Verify the reduced identity (`k = 1`): with
/// `Ktilde_{l,m,t} = -1/2 k^(l)_{sqrt(2) t alpha_m}(u_m) prod_{j != m} g_{sqrt(2) t alpha_j}(u_j)`
/// and `Mtilde_t = prod_j g_{sqrt(2) t alpha_j}(u_j)`, the scale integral
/// `int_a^b sum_{l,m} Ktilde dt/t` equals `pi (Mtilde_a - Mtilde_b)`.
///
/// Returns the maximum absolute residual over the instance's eval points.
pub fn verify_identity_tilde(inst: &TelescopeInstance) -> Result<f64, TelescopeError> {
    if inst.k_index != 1 {
        return Err(TelescopeError::Unsupported {
            requirement: "k_index == 1",
        });
    }
    if inst.alphas.len() != inst.n - 1 {
        return Err(TelescopeError::Unsupported {
            requirement: "one scale multiplier per shift",
        });
    }
    inst.check_scales()?;
    let sqrt2 = std::f64::consts::SQRT_2;
    let mut worst: f64 = 0.0;
    for pt in &inst.eval_points {
        assert_eq!(pt.us.len(), inst.n - 1);
        let m_tilde = |t: f64| -> f64 {
            pt.us
                .iter()
                .zip(&inst.alphas)
                .map(|(u, &al)| g_scaled(u, sqrt2 * t * al))
                .product()
        };
        let integrand = |t: f64| -> f64 {
            // sum over l of Ktilde collapses k^(l) into the Laplacian kernel
            let mut total = 0.0;
            for (m, (um, &alm)) in pt.us.iter().zip(&inst.alphas).enumerate() {
                let mut term = -0.5 * k_scaled(um, sqrt2 * t * alm);
                for (j, (uj, &alj)) in pt.us.iter().zip(&inst.alphas).enumerate() {
                    if j != m {
                        term *= g_scaled(uj, sqrt2 * t * alj);
                    }
                }
                total += term;
            }
            total / t
        };
        let lhs = if inst.a == inst.b {
            0.0
        } else {
            adaptive_quad(&integrand, inst.a, inst.b, 1e-9)?.0
        };
        let rhs = std::f64::consts::PI * (m_tilde(inst.a) - m_tilde(inst.b));
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// Inner integrals of the full identity at `k = n - 1` in `d = 1`, where
/// they are single 1D convolutions; evaluated on an FFT grid.
struct FullInstanceKernels {
    grid: Grid1d,
    alpha: f64,
    alpha2: f64,
}

impl FullInstanceKernels {
    fn new(alpha: f64, alpha2: f64, b: f64, reach: f64) -> Result<Self, TelescopeError> {
        let max_scale = b * alpha.max(alpha2);
        let half_width = (8.0 * max_scale + reach + 4.0).max(16.0);
        let grid = Grid1d::new(16384, half_width).map_err(|_| TelescopeError::Unsupported {
            requirement: "grid construction",
        })?;
        Ok(Self {
            grid,
            alpha,
            alpha2,
        })
    }

    /// `int f1(p) f2(u - p) dp` at `u`, where the product under the
    /// integral also carries `carry(y + p)`; computed as an FFT
    /// convolution of `p -> f1(p) carry(y + p)` with `f2`, then read off
    /// at `u` by cubic interpolation.
    fn conv_at(
        &self,
        f1: impl Fn(f64) -> f64,
        carry: impl Fn(f64) -> f64,
        f2: impl Fn(f64) -> f64,
        y: f64,
        u: f64,
    ) -> f64 {
        let lhs = self.grid.sample(|p| f1(p) * carry(y + p));
        let rhs = self.grid.sample(&f2);
        let conv = self.grid.convolve(&lhs, &rhs);
        interp_cubic(&self.grid, &conv, u)
    }

    /// `M_t(y, u2) = int g_{t a}(y + p) g_{t a2}(p) g_{t a2}(u2 - p) dp`
    fn m(&self, t: f64, y: f64, u2: f64) -> f64 {
        self.conv_at(
            |p| g_scaled(&[p], t * self.alpha2),
            |q| g_scaled(&[q], t * self.alpha),
            |p| g_scaled(&[p], t * self.alpha2),
            y,
            u2,
        )
    }

    /// `K_t(y, u2) = -int g_{t a}(y + p) h_{t a2}(p) h_{t a2}(u2 - p) dp`
    fn k_term(&self, t: f64, y: f64, u2: f64) -> f64 {
        -self.conv_at(
            |p| h_scaled(&[p], 0, t * self.alpha2),
            |q| g_scaled(&[q], t * self.alpha),
            |p| h_scaled(&[p], 0, t * self.alpha2),
            y,
            u2,
        )
    }

    /// `L_t(y, u2) = -1/2 (1 + a2^2/a^2) int k_{t a}(y + p) g_{t a2}(p) g_{t a2}(u2 - p) dp`
    fn l_term(&self, t: f64, y: f64, u2: f64) -> f64 {
        let prefactor = -0.5 * (1.0 + (self.alpha2 * self.alpha2) / (self.alpha * self.alpha));
        prefactor
            * self.conv_at(
                |p| g_scaled(&[p], t * self.alpha2),
                |q| k_axis_scaled(&[q], 0, t * self.alpha),
                |p| g_scaled(&[p], t * self.alpha2),
                y,
                u2,
            )
    }

    /// The prefactor carried by the `L` term.
    fn l_prefactor(&self) -> f64 {
        -0.5 * (1.0 + (self.alpha2 * self.alpha2) / (self.alpha * self.alpha))
    }
}

fn interp_cubic(grid: &Grid1d, values: &[Complex64], x: f64) -> f64 {
    let dx = grid.dx();
    let pos = (x + grid.half_width) / dx;
    let j = pos.floor() as isize;
    let frac = pos - j as f64;
    let n = values.len() as isize;
    let at = |i: isize| -> f64 { values[i.clamp(0, n - 1) as usize].re };
    let (p0, p1, p2, p3) = (at(j - 1), at(j), at(j + 1), at(j + 2));
    // Catmull-Rom
    let a = -0.5 * p0 + 1.5 * p1 - 1.5 * p2 + 0.5 * p3;
    let b = p0 - 2.5 * p1 + 2.0 * p2 - 0.5 * p3;
    let c = -0.5 * p0 + 0.5 * p2;
    ((a * frac + b) * frac + c) * frac + p1
}

/// Verify the full identity at the smallest nontrivial instance
/// (`n = 3`, `k = 2`, `d = 1`):
/// `int_a^b (L_t + K_t) dt/t = pi (M_a - M_b)` pointwise in `(y, u_2)`.
///
/// Inner integrals are 1D convolutions evaluated on an FFT grid; the
/// scale integral is adaptive. Returns the max residual over eval points.
pub fn verify_identity_full(inst: &TelescopeInstance) -> Result<f64, TelescopeError> {
    if inst.d != 1 || inst.n != 3 || inst.k_index != 2 {
        return Err(TelescopeError::Unsupported {
            requirement: "d = 1, n = 3, k = 2",
        });
    }
    if inst.alphas.len() != 1 {
        return Err(TelescopeError::Unsupported {
            requirement: "a single trailing scale multiplier",
        });
    }
    inst.check_scales()?;
    let mut worst: f64 = 0.0;
    for pt in &inst.eval_points {
        let (y, u2) = (pt.y[0], pt.us[0][0]);
        let reach = y.abs() + u2.abs();
        let kernels = FullInstanceKernels::new(inst.alpha, inst.alphas[0], inst.b, reach)?;
        let lhs = if inst.a == inst.b {
            0.0
        } else {
            adaptive_quad(
                &|t: f64| (kernels.l_term(t, y, u2) + kernels.k_term(t, y, u2)) / t,
                inst.a,
                inst.b,
                1e-8,
            )?
            .0
        };
        let rhs = std::f64::consts::PI * (kernels.m(inst.a, y, u2) - kernels.m(inst.b, y, u2));
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// The evaluated `L`-term prefactor `-1/2 (1 + alpha^-2 sum alpha_m^2)`,
/// exposed for the sign-structure check.
pub fn full_identity_l_prefactor(alpha: f64, alpha2: f64) -> f64 {
    FullInstanceKernels {
        grid: Grid1d::new(64, 1.0).expect("tiny grid"),
        alpha,
        alpha2,
    }
    .l_prefactor()
}

// ---------------------------------------------------------------------------
// Planar box patterns: Theta / Xi identity
// ---------------------------------------------------------------------------

/// Product of `n` planar axis-aligned rectangles, a subset of
/// `([0,1]^2)^n`. Rectangle `i` constrains the planar point `x_i`.
#[derive(Clone, Debug)]
pub struct PlanarBoxProduct {
    /// Per slot: `[x_lo, x_hi, y_lo, y_hi]`.
    pub rects: Vec<[f64; 4]>,
}

impl PlanarBoxProduct {
    pub fn unit(n: usize) -> Self {
        Self {
            rects: vec![[0.0, 1.0, 0.0, 1.0]; n],
        }
    }
}

#[derive(Clone, Debug)]
pub struct ThetaXiReport {
    /// One value per pattern slot `m`.
    pub theta: Vec<f64>,
    pub xi_a: f64,
    pub xi_b: f64,
    /// `| sum_m theta_m - 2 pi (xi_a - xi_b) |`
    pub identity_residual: f64,
}

#[derive(Clone, Copy)]
struct Interval(f64, f64);

impl Interval {
    fn intersect(self, other: Interval) -> Option<Interval> {
        let lo = self.0.max(other.0);
        let hi = self.1.min(other.1);
        (lo < hi).then_some(Interval(lo, hi))
    }
}

/// `int_I int_J g_c(u - v) du dv` by the closed form through the second
/// antiderivative `F2(w) = w/2 erf(sqrt(pi) w / c) + c/(2 pi) exp(-pi w^2/c^2)`.
fn pair_integral_g(i: Interval, j: Interval, c: f64) -> f64 {
    let f2 = |w: f64| {
        0.5 * w * erf(std::f64::consts::PI.sqrt() * w / c)
            + c / (2.0 * std::f64::consts::PI) * (-std::f64::consts::PI * w * w / (c * c)).exp()
    };
    f2(i.1 - j.0) + f2(i.0 - j.1) - f2(i.0 - j.0) - f2(i.1 - j.1)
}

/// `int_I int_J k_c(u - v) du dv`; the second antiderivative of the 1D
/// `k_c` is `c^2 g_c`.
fn pair_integral_k(i: Interval, j: Interval, c: f64) -> f64 {
    let g = |w: f64| c * (-std::f64::consts::PI * w * w / (c * c)).exp(); // c^2 * g_c(w)
    g(i.1 - j.0) + g(i.0 - j.1) - g(i.0 - j.0) - g(i.1 - j.1)
}

/// Planar pair integrals against the 2D kernels: `W` uses `g`, `U` uses
/// the Laplacian kernel, which splits into the two axis contributions.
fn planar_pair_g(r: &[f64; 4], q: &[f64; 4], c: f64) -> f64 {
    pair_integral_g(Interval(r[0], r[1]), Interval(q[0], q[1]), c)
        * pair_integral_g(Interval(r[2], r[3]), Interval(q[2], q[3]), c)
}

fn planar_pair_k(r: &[f64; 4], q: &[f64; 4], c: f64) -> f64 {
    let gx = pair_integral_g(Interval(r[0], r[1]), Interval(q[0], q[1]), c);
    let gy = pair_integral_g(Interval(r[2], r[3]), Interval(q[2], q[3]), c);
    let kx = pair_integral_k(Interval(r[0], r[1]), Interval(q[0], q[1]), c);
    let ky = pair_integral_k(Interval(r[2], r[3]), Interval(q[2], q[3]), c);
    kx * gy + gx * ky
}

fn rect_intersect(a: &[f64; 4], b: &[f64; 4]) -> Option<[f64; 4]> {
    let x = Interval(a[0], a[1]).intersect(Interval(b[0], b[1]))?;
    let y = Interval(a[2], a[3]).intersect(Interval(b[2], b[3]))?;
    Some([x.0, x.1, y.0, y.1])
}

/// `Xi_s` and the `Theta` integrands for a disjoint union of box products
/// over `([0,1]^2)^n`, `n <= 2`. For a single box the pattern indicator
/// factorizes per slot; for a union at `n = 2` the product expands into a
/// sum over assignments of boxes to the four pattern vertices.
struct BoxPatternIntegrals<'a> {
    boxes: &'a [PlanarBoxProduct],
    n: usize,
    alphas: &'a [f64],
}

impl BoxPatternIntegrals<'_> {
    /// `sum over slot factorizations of prod_i pair(slot i kernel)`, with
    /// the kernel of slot `m_k` (if any) replaced by the Laplacian pair.
    fn evaluate(&self, s: f64, laplacian_slot: Option<usize>) -> f64 {
        match self.n {
            1 => {
                let c = s * self.alphas[0];
                let mut total = 0.0;
                for b0 in self.boxes {
                    for b1 in self.boxes {
                        let (r, q) = (&b0.rects[0], &b1.rects[0]);
                        total += match laplacian_slot {
                            Some(0) => planar_pair_k(r, q, c),
                            _ => planar_pair_g(r, q, c),
                        };
                    }
                }
                total
            }
            2 => {
                // assignments of a box to each vertex (r1, r2) in {0,1}^2
                let nb = self.boxes.len();
                let mut total = 0.0;
                for k00 in 0..nb {
                    for k01 in 0..nb {
                        for k10 in 0..nb {
                            for k11 in 0..nb {
                                // slot 1 rectangles for x_1^0 / x_1^1
                                let s1_0 = rect_intersect(
                                    &self.boxes[k00].rects[0],
                                    &self.boxes[k01].rects[0],
                                );
                                let s1_1 = rect_intersect(
                                    &self.boxes[k10].rects[0],
                                    &self.boxes[k11].rects[0],
                                );
                                // slot 2 rectangles for x_2^0 / x_2^1
                                let s2_0 = rect_intersect(
                                    &self.boxes[k00].rects[1],
                                    &self.boxes[k10].rects[1],
                                );
                                let s2_1 = rect_intersect(
                                    &self.boxes[k01].rects[1],
                                    &self.boxes[k11].rects[1],
                                );
                                let (Some(a0), Some(a1), Some(b0), Some(b1)) =
                                    (s1_0, s1_1, s2_0, s2_1)
                                else {
                                    continue;
                                };
                                let c1 = s * self.alphas[0];
                                let c2 = s * self.alphas[1];
                                let f1 = match laplacian_slot {
                                    Some(0) => planar_pair_k(&a0, &a1, c1),
                                    _ => planar_pair_g(&a0, &a1, c1),
                                };
                                let f2 = match laplacian_slot {
                                    Some(1) => planar_pair_k(&b0, &b1, c2),
                                    _ => planar_pair_g(&b0, &b1, c2),
                                };
                                total += f1 * f2;
                            }
                        }
                    }
                }
                total
            }
            _ => unreachable!(),
        }
    }
}

/// Verify the box-pattern telescoping identity
/// `sum_m Theta_m = 2 pi (Xi_a - Xi_b)` for a disjoint union of planar box
/// products (`n <= 2`), returning all computed quantities. `Theta_m` is
/// the negative scale integral of the `m`-th Laplacian replacement and is
/// nonnegative, bounded by `2 pi`; `Xi_s` lies in `[0, 1]`.
pub fn verify_theta_xi(
    boxes: &[PlanarBoxProduct],
    n: usize,
    alphas: &[f64],
    a: f64,
    b: f64,
) -> Result<ThetaXiReport, TelescopeError> {
    if n == 0 || n > 2 || boxes.is_empty() || alphas.len() != n {
        return Err(TelescopeError::NonSeparable);
    }
    if boxes.iter().any(|bx| bx.rects.len() != n) {
        return Err(TelescopeError::NonSeparable);
    }
    if !(a > 0.0 && a <= b) {
        return Err(TelescopeError::Unsupported {
            requirement: "0 < a <= b",
        });
    }
    let integrals = BoxPatternIntegrals { boxes, n, alphas };
    let xi = |s: f64| integrals.evaluate(s, None);
    let mut theta = Vec::with_capacity(n);
    for m in 0..n {
        let value = if a == b {
            0.0
        } else {
            -adaptive_quad(&|s: f64| integrals.evaluate(s, Some(m)) / s, a, b, 1e-9)?.0
        };
        theta.push(value);
    }
    let xi_a = xi(a);
    let xi_b = xi(b);
    let identity_residual =
        (theta.iter().sum::<f64>() - 2.0 * std::f64::consts::PI * (xi_a - xi_b)).abs();
    Ok(ThetaXiReport {
        theta,
        xi_a,
        xi_b,
        identity_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::adaptive_quad;
    use approx::assert_abs_diff_eq;

    fn tilde_instance(n: usize, d: usize, alphas: Vec<f64>, a: f64, b: f64, us: Vec<Vec<f64>>) -> TelescopeInstance {
        TelescopeInstance {
            k_index: 1,
            d,
            n,
            alpha: 1.0,
            alphas,
            a,
            b,
            eval_points: vec![EvalPoint { y: vec![0.0; d], us }],
        }
    }

    #[test]
    fn tilde_identity_at_origin() {
        // n=2, d=1, u=0: the integrand is positive and the identity is
        // fully explicit: int_a^b pi/(sqrt(2) alpha t^2) dt
        let inst = tilde_instance(2, 1, vec![1.0], 0.5, 2.0, vec![vec![0.0]]);
        let r = verify_identity_tilde(&inst).unwrap();
        assert!(r <= 1e-6, "residual {r}");
        // and the integrand at u=0 is positive
        assert!(-0.5 * k_scaled(&[0.0], std::f64::consts::SQRT_2) > 0.0);
    }

    #[test]
    fn tilde_identity_generic_points() {
        let inst = tilde_instance(
            3,
            1,
            vec![1.0, 1.0],
            0.5,
            2.0,
            vec![vec![0.3], vec![-0.7]],
        );
        let r = verify_identity_tilde(&inst).unwrap();
        assert!(r <= 1e-6, "residual {r}");
        // degenerate interval
        let inst0 = tilde_instance(3, 1, vec![1.0, 1.0], 1.0, 1.0, vec![vec![0.3], vec![-0.7]]);
        assert_abs_diff_eq!(verify_identity_tilde(&inst0).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn tilde_identity_d2_n4() {
        let inst = TelescopeInstance {
            k_index: 1,
            d: 2,
            n: 4,
            alpha: 1.0,
            alphas: vec![0.8, 1.0, 1.3],
            a: 0.6,
            b: 1.7,
            eval_points: vec![EvalPoint {
                y: vec![0.0, 0.0],
                us: vec![vec![0.2, -0.1], vec![0.0, 0.4], vec![-0.3, 0.3]],
            }],
        };
        let r = verify_identity_tilde(&inst).unwrap();
        assert!(r <= 1e-6, "residual {r}");
    }

    #[test]
    fn full_identity_inner_integrals_match_quadrature() {
        // FFT convolution route vs direct adaptive quadrature of the
        // triple product
        let kernels = FullInstanceKernels::new(1.0, 1.0, 2.0, 1.0).unwrap();
        for (t, y, u2) in [(1.0, 0.0, 0.0), (0.7, 0.4, -0.6), (1.6, -0.2, 0.9)] {
            let direct = adaptive_quad(
                &|p: f64| {
                    g_scaled(&[y + p], t) * g_scaled(&[p], t) * g_scaled(&[u2 - p], t)
                },
                -12.0,
                12.0,
                1e-11,
            )
            .unwrap()
            .0;
            assert_abs_diff_eq!(kernels.m(t, y, u2), direct, epsilon = 5e-7);
            let direct_k = -adaptive_quad(
                &|p: f64| {
                    g_scaled(&[y + p], t) * h_scaled(&[p], 0, t) * h_scaled(&[u2 - p], 0, t)
                },
                -12.0,
                12.0,
                1e-11,
            )
            .unwrap()
            .0;
            assert_abs_diff_eq!(kernels.k_term(t, y, u2), direct_k, epsilon = 5e-7);
        }
    }

    #[test]
    fn full_identity_small_instance() {
        let inst = TelescopeInstance {
            k_index: 2,
            d: 1,
            n: 3,
            alpha: 1.0,
            alphas: vec![1.0],
            a: 1.0,
            b: 2.0,
            eval_points: vec![
                EvalPoint { y: vec![0.0], us: vec![vec![0.0]] },
                EvalPoint { y: vec![0.5], us: vec![vec![-0.3]] },
            ],
        };
        let r = verify_identity_full(&inst).unwrap();
        assert!(r <= 1e-5, "residual {r}");
        // a == b degenerates to 0 = 0
        let mut inst0 = inst.clone();
        inst0.b = inst0.a;
        assert_abs_diff_eq!(verify_identity_full(&inst0).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn l_prefactor_value() {
        assert_abs_diff_eq!(full_identity_l_prefactor(1.0, 1.0), -1.0, epsilon = 1e-15);
    }

    #[test]
    fn theta_xi_unit_square() {
        let report = verify_theta_xi(&[PlanarBoxProduct::unit(1)], 1, &[1.0], 0.1, 1.0).unwrap();
        assert!(report.identity_residual <= 1e-5, "residual {}", report.identity_residual);
        assert!(report.theta[0] >= 0.0 && report.theta[0] <= 2.0 * std::f64::consts::PI);
        assert!(report.xi_a >= 0.0 && report.xi_a <= 1.0);
        assert!(report.xi_b >= 0.0 && report.xi_b <= 1.0);
        assert!(report.xi_a >= report.xi_b);
    }

    #[test]
    fn theta_xi_union_n2() {
        let b1 = PlanarBoxProduct {
            rects: vec![[0.0, 0.4, 0.0, 0.5], [0.1, 0.6, 0.2, 0.8]],
        };
        let b2 = PlanarBoxProduct {
            rects: vec![[0.5, 0.9, 0.55, 1.0], [0.1, 0.6, 0.2, 0.8]],
        };
        let report = verify_theta_xi(&[b1, b2], 2, &[1.0, 0.7], 0.2, 1.5).unwrap();
        assert!(report.identity_residual <= 1e-5, "residual {}", report.identity_residual);
        for &t in &report.theta {
            assert!((0.0..=2.0 * std::f64::consts::PI).contains(&t));
        }
        assert!((0.0..=1.0).contains(&report.xi_a));
        assert!((0.0..=1.0).contains(&report.xi_b));
    }

    #[test]
    fn xi_monotone_on_random_boxes() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let lo_x: f64 = rng.gen_range(0.0..0.5);
            let hi_x: f64 = rng.gen_range(lo_x + 0.1..1.0);
            let lo_y: f64 = rng.gen_range(0.0..0.5);
            let hi_y: f64 = rng.gen_range(lo_y + 0.1..1.0);
            let boxes = [PlanarBoxProduct {
                rects: vec![[lo_x, hi_x, lo_y, hi_y]],
            }];
            let integrals = BoxPatternIntegrals {
                boxes: &boxes,
                n: 1,
                alphas: &[1.0],
            };
            let mut prev = f64::INFINITY;
            for i in 0..30 {
                let s = 0.05 + 0.1 * i as f64;
                let xi = integrals.evaluate(s, None);
                assert!(xi <= prev + 1e-12, "xi not monotone at s={s}");
                prev = xi;
            }
        }
    }

    #[test]
    fn identity_checks_detect_wrong_coefficients() {
        // the verifications must have teeth: perturbing the kernel scale
        // or the prefactor away from the derived values blows up the
        // residual by many orders of magnitude
        let us = [vec![0.45], vec![-0.3]];
        let alphas = [1.0, 1.0];
        let (a, b) = (0.5, 2.0);
        let sqrt2 = std::f64::consts::SQRT_2;
        let residual_with_scale = |scale: f64| -> f64 {
            let m_tilde = |t: f64| -> f64 {
                us.iter()
                    .zip(&alphas)
                    .map(|(u, &al)| g_scaled(u, sqrt2 * t * al))
                    .product()
            };
            let integrand = |t: f64| -> f64 {
                let mut total = 0.0;
                for (m, (um, &alm)) in us.iter().zip(&alphas).enumerate() {
                    let mut term = -0.5 * k_scaled(um, scale * t * alm);
                    for (j, (uj, &alj)) in us.iter().zip(&alphas).enumerate() {
                        if j != m {
                            term *= g_scaled(uj, sqrt2 * t * alj);
                        }
                    }
                    total += term;
                }
                total / t
            };
            let lhs = adaptive_quad(&integrand, a, b, 1e-10).unwrap().0;
            let rhs = std::f64::consts::PI * (m_tilde(a) - m_tilde(b));
            (lhs - rhs).abs()
        };
        let correct = residual_with_scale(sqrt2);
        let wrong = residual_with_scale(sqrt2 * 1.01);
        assert!(correct <= 1e-10, "correct-scale residual {correct}");
        assert!(wrong > 1e-3, "1% scale error must be detected, got {wrong}");

        // the full identity likewise rejects a perturbed L prefactor
        let kernels = FullInstanceKernels::new(1.0, 1.0, 2.0, 1.0).unwrap();
        let (y, u2) = (0.4, -0.3);
        let rhs = std::f64::consts::PI * (kernels.m(1.0, y, u2) - kernels.m(2.0, y, u2));
        let lhs_of = |l_factor: f64| {
            adaptive_quad(
                &|t: f64| (l_factor * kernels.l_term(t, y, u2) + kernels.k_term(t, y, u2)) / t,
                1.0,
                2.0,
                1e-9,
            )
            .unwrap()
            .0
        };
        assert!((lhs_of(1.0) - rhs).abs() <= 1e-6);
        assert!((lhs_of(1.01) - rhs).abs() > 1e-4);
    }

    #[test]
    fn rejects_unsupported_instances() {
        assert!(verify_theta_xi(&[PlanarBoxProduct::unit(3)], 3, &[1.0, 1.0, 1.0], 0.1, 1.0).is_err());
        let inst = TelescopeInstance {
            k_index: 2,
            d: 2,
            n: 3,
            alpha: 1.0,
            alphas: vec![1.0],
            a: 0.5,
            b: 1.0,
            eval_points: vec![],
        };
        assert!(verify_identity_full(&inst).is_err());
    }
}

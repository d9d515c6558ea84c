//! Sampling and density bookkeeping for the lp-sphere measure and the
//! planar circle measure.
//!
//! The measure `sigma` is the vague limit of the shell densities
//! `psi_eta(||x||_p^p - 1) dx`. That limit is proportional to the cone
//! measure of the lp ball, which is exactly the law of `G / ||G||_p` for
//! `G` with independent coordinates of density `~ exp(-|t|^p)`; such a
//! coordinate is `+/- W^(1/p)` with `W ~ Gamma(1/p, 1)`. Everything here
//! is probability-normalized; the mass constant that relates this to the
//! unnormalized shell limit is available from [`sigma_mass_closed_form`]
//! and is confirmed by shell quadrature in [`sigma_eta_total_mass`].

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use crate::bump::Mollifier;
use crate::geometry::lp_norm;
use crate::quad::{adaptive_quad, QuadError};
use crate::special::{bessel_j0, ln_gamma};

/// Sampler for the probability-normalized lp-sphere measure in dimension d.
#[derive(Clone, Debug)]
pub struct SphereSampler {
    p: f64,
    d: usize,
    gamma: Gamma<f64>,
    /// Total mass of the unnormalized shell limit, for report headers.
    pub normalization: f64,
}

impl SphereSampler {
    pub fn new(p: f64, d: usize) -> Self {
        assert!(p >= 1.0 && d >= 1);
        Self {
            p,
            d,
            gamma: Gamma::new(1.0 / p, 1.0).expect("valid gamma shape"),
            normalization: sigma_mass_closed_form(p, d),
        }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Draw a point of the unit lp sphere distributed as sigma.
    pub fn sample_into(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.d);
        loop {
            for o in out.iter_mut() {
                let w = self.gamma.sample(rng);
                let mag = w.powf(1.0 / self.p);
                *o = if rng.gen::<bool>() { mag } else { -mag };
            }
            let norm = lp_norm(out, self.p);
            if norm > 0.0 && norm.is_finite() {
                for o in out.iter_mut() {
                    *o /= norm;
                }
                return;
            }
        }
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut out = vec![0.0; self.d];
        self.sample_into(rng, &mut out);
        out
    }

    /// Draw a gap vector with density `sigma_lambda * phi_(eps lambda)`:
    /// `y = lambda z + eps lambda w` with `z ~ sigma`, `w ~ phi`.
    pub fn sample_mollified_gap_into(
        &self,
        mollifier: &Mollifier,
        lambda: f64,
        eps: f64,
        rng: &mut ChaCha8Rng,
        out: &mut [f64],
    ) {
        debug_assert!(lambda > 0.0 && eps >= 0.0);
        self.sample_into(rng, out);
        if eps == 0.0 {
            for o in out.iter_mut() {
                *o *= lambda;
            }
            return;
        }
        for o in out.iter_mut() {
            let w = mollifier.bump3.sample(rng);
            *o = lambda * *o + eps * lambda * w;
        }
    }
}

/// Closed form of the total mass of the shell limit:
/// `(d/p) * 2^d * Gamma(1 + 1/p)^d / Gamma(1 + d/p)`,
/// the derivative at 1 of the volume of the lp ball of p-radius `s^(1/p)`.
pub fn sigma_mass_closed_form(p: f64, d: usize) -> f64 {
    let df = d as f64;
    let log_mass = df * std::f64::consts::LN_2 + df * ln_gamma(1.0 + 1.0 / p)
        - ln_gamma(1.0 + df / p);
    (df / p) * log_mass.exp()
}

/// Numerical total mass of the shell density `psi_eta(||x||_p^p - 1)`,
/// `d <= 3`, by a polar decomposition that resolves the thin shell
/// exactly: the radial integral substitutes `u = c(omega) r^p - 1`,
/// leaving smooth integrands in both the shell and angular variables.
pub fn sigma_eta_total_mass(p: f64, d: usize, eta: f64) -> Result<f64, QuadError> {
    assert!(p >= 1.0 && (1..=3).contains(&d));
    assert!(eta > 0.0 && eta <= 0.5);
    let mollifier: Mollifier = Mollifier::standard(1);
    let df = d as f64;
    // shell factor: int psi_eta(u) (1+u)^(d/p - 1) du
    let shell = adaptive_quad(
        &|u: f64| mollifier.psi_eta(u, eta) * (1.0 + u).powf(df / p - 1.0),
        -eta,
        eta,
        1e-10,
    )?
    .0;
    // angular factor: int over directions of c(omega)^(-d/p)
    let angular = match d {
        1 => 2.0,
        2 => {
            adaptive_quad(
                &|theta: f64| {
                    let c = theta.cos().abs().powf(p) + theta.sin().abs().powf(p);
                    c.powf(-2.0 / p)
                },
                0.0,
                2.0 * std::f64::consts::PI,
                1e-10,
            )?
            .0
        }
        3 => {
            adaptive_quad(
                &|theta: f64| {
                    let st = theta.sin();
                    let inner = adaptive_quad(
                        &|phi: f64| {
                            let x = (st * phi.cos()).abs().powf(p);
                            let y = (st * phi.sin()).abs().powf(p);
                            let z = theta.cos().abs().powf(p);
                            (x + y + z).powf(-3.0 / p)
                        },
                        0.0,
                        2.0 * std::f64::consts::PI,
                        1e-9,
                    )
                    .map(|r| r.0)
                    .unwrap_or(f64::NAN);
                    inner * st
                },
                0.0,
                std::f64::consts::PI,
                1e-8,
            )?
            .0
        }
        _ => unreachable!(),
    };
    Ok(angular * shell / p)
}

/// Fourier transform of the probability-normalized circle measure at
/// radial frequency `r`: `J0(2 pi r)`.
pub fn circle_ft(xi_norm: f64) -> f64 {
    assert!(xi_norm >= 0.0);
    bessel_j0(2.0 * std::f64::consts::PI * xi_norm)
}

/// Empirical sup of `|sigma_hat(xi)| (1 + ||xi||)^(1/2)` over a radial
/// grid on `[0, xi_max]`, together with the radius where the running max
/// last increased.
pub fn ft_decay_check(xi_max: f64, grid: usize) -> (f64, f64) {
    assert!(grid >= 1 && xi_max >= 0.0);
    let mut sup: f64 = 0.0;
    let mut argmax = 0.0;
    for i in 0..grid.max(1) {
        let r = if grid == 1 {
            0.0
        } else {
            xi_max * i as f64 / (grid - 1) as f64
        };
        let v = circle_ft(r).abs() * (1.0 + r).sqrt();
        if v > sup {
            sup = v;
            argmax = r;
        }
    }
    (sup, argmax)
}

/// `(sigma * g_s)(y)` for the planar circle measure by angular quadrature.
pub fn circle_gauss_conv(y: [f64; 2], scale: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let integrand = |theta: f64| {
        let diff = [y[0] - theta.cos(), y[1] - theta.sin()];
        crate::gaussian::g_scaled(&diff, scale)
    };
    adaptive_quad(&integrand, 0.0, two_pi, 1e-12)
        .map(|r| r.0 / two_pi)
        .unwrap_or_else(|_| {
            // fall back to a dense fixed rule; the integrand is smooth
            crate::quad::fixed_quad(&integrand, 0.0, two_pi, 512) / two_pi
        })
}

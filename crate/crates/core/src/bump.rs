//! The fixed smooth bumps used for smoothing: a 1D bump
//! `b(t) ∝ exp(-1/(1-(t/w)^2))` on `(-w, w)`, its tensor product `phi`
//! on `R^d` (supported in `[-3,3]^d`, strictly positive inside), the 1D
//! companion `psi` on `(-1, 1)`, and the derived objects
//! `rho = d*phi + grad(phi) . x` and the vector field `v(x) = phi(x) x`
//! with `div v = rho`.

use rand::Rng;

use crate::num::Real;
use crate::quad::adaptive_quad;

/// Normalized 1D bump of the given half-width.
#[derive(Clone, Copy, Debug)]
pub struct Bump1d<T: Real = f64> {
    half_width: T,
    /// 1 / integral of the unnormalized profile.
    inv_norm: T,
}

impl<T: Real> Bump1d<T> {
    pub fn new(half_width: f64) -> Self {
        assert!(half_width > 0.0);
        // integral of exp(-1/(1-(t/w)^2)) over (-w, w) = w * c with
        // c = 0.4439938161680794... ; computed by quadrature, not frozen.
        let (unit, _) = adaptive_quad(
            &|s: f64| (-1.0 / (1.0 - s * s)).exp(),
            -1.0 + 1e-14,
            1.0 - 1e-14,
            1e-13,
        )
        .expect("bump normalization quadrature");
        Self {
            half_width: T::of(half_width),
            inv_norm: T::of(1.0 / (half_width * unit)),
        }
    }

    pub fn half_width(&self) -> T {
        self.half_width
    }

    #[inline]
    pub fn eval(&self, t: T) -> T {
        let s = t / self.half_width;
        let d = T::one() - s * s;
        if d <= T::zero() {
            return T::zero();
        }
        (-T::one() / d).exp() * self.inv_norm
    }

    /// Logarithmic derivative factor: `b'(t) = b(t) * log_slope(t)`.
    #[inline]
    pub fn log_slope(&self, t: T) -> T {
        let w2 = self.half_width * self.half_width;
        let s = t / self.half_width;
        let d = T::one() - s * s;
        if d <= T::zero() {
            return T::zero();
        }
        -T::two() * t / (w2 * d * d)
    }

    #[inline]
    pub fn deriv(&self, t: T) -> T {
        self.eval(t) * self.log_slope(t)
    }

    /// Rejection-sample from the bump density.
    pub fn sample(&self, rng: &mut impl Rng) -> f64 {
        let w: f64 = self.half_width.to_f64().unwrap();
        let peak: f64 = self.eval(T::zero()).to_f64().unwrap();
        loop {
            let t = rng.gen_range(-w..w);
            let u: f64 = rng.gen_range(0.0..peak);
            if u < self.eval(T::of(t)).to_f64().unwrap() {
                return t;
            }
        }
    }
}

/// The pair `(phi, psi)` together with `rho` and `v`.
///
/// `phi` is the tensor product of 1D bumps of half-width 3, so it is even,
/// has integral 1, is strictly positive on `(-3,3)^d` (hence on
/// `[-2,2]^d`), and vanishes outside `[-3,3]^d`. `psi` is the 1D bump of
/// half-width 1.
#[derive(Clone, Debug)]
pub struct Mollifier<T: Real = f64> {
    d: usize,
    pub bump3: Bump1d<T>,
    pub bump1: Bump1d<T>,
}

impl<T: Real> Mollifier<T> {
    pub fn standard(d: usize) -> Self {
        assert!(d >= 1);
        Self {
            d,
            bump3: Bump1d::new(3.0),
            bump1: Bump1d::new(1.0),
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn phi(&self, x: &[T]) -> T {
        debug_assert_eq!(x.len(), self.d);
        let mut acc = T::one();
        for &t in x {
            acc *= self.bump3.eval(t);
            if acc == T::zero() {
                return T::zero();
            }
        }
        acc
    }

    /// `psi_eta(t) = psi(t/eta) / eta`.
    pub fn psi_eta(&self, t: T, eta: T) -> T {
        self.bump1.eval(t / eta) / eta
    }

    pub fn psi(&self, t: T) -> T {
        self.bump1.eval(t)
    }

    /// `rho(x) = d phi(x) + grad(phi)(x) . x`, via the analytic gradient.
    pub fn rho(&self, x: &[T]) -> T {
        let p = self.phi(x);
        if p == T::zero() {
            return T::zero();
        }
        let mut factor = T::of(self.d as f64);
        for &t in x {
            factor += self.bump3.log_slope(t) * t;
        }
        p * factor
    }

    /// The vector field `v(x) = phi(x) x`.
    pub fn v(&self, x: &[T]) -> Vec<T> {
        let p = self.phi(x);
        x.iter().map(|&t| p * t).collect()
    }

    /// One component of the analytic Jacobian diagonal,
    /// `d/dx_i (phi(x) x_i)`; summing over i gives `rho`.
    pub fn v_div_component(&self, x: &[T], i: usize) -> T {
        let p = self.phi(x);
        p * (T::one() + self.bump3.log_slope(x[i]) * x[i])
    }

    /// Sample `w ~ phi` (independent coordinates).
    pub fn sample_phi(&self, rng: &mut impl Rng, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.d);
        for o in out.iter_mut() {
            *o = self.bump3.sample(rng);
        }
    }
}

//! gapslab-core: a numerical laboratory for gap spectra of arithmetic
//! progressions and combinatorial cubes in positive-measure subsets of the
//! unit cube.
//!
//! The crate provides:
//!
//! - exact membership oracles for the counterexample set families (annuli,
//!   lp shells, thin boxes) and plain test sets ([`sets`]);
//! - samplers for the lp-sphere measure and its mollified dilates
//!   ([`sphere`]), with the fixed smooth bumps in [`bump`];
//! - the Gaussian kernel calculus: Fourier/convolution identities, the
//!   scale heat equation, power-weighted Gaussian domination, and the
//!   telescoping identities behind the multiscale estimates ([`gaussian`],
//!   [`fftgrid`], [`telescope`]);
//! - Monte Carlo counting of progressions and cube patterns, gap spectra
//!   with stored witnesses, and multiscale/uniform error scans
//!   ([`counting`]);
//! - Gowers box norms on `R^d` and the oscillatory integrals controlling
//!   their decay ([`gowers`]);
//! - exact small-scale discrete computations and the thin-box bridge
//!   between discrete and continuous counting ([`discrete`]).
//!
//! Numerical kernels are generic over the scalar type via [`num::Real`];
//! the Monte Carlo machinery is pinned to `f64` (see [`Scalar`]) because
//! its outputs are part of a bit-for-bit reproducibility contract.

pub mod bump;
pub mod counting;
pub mod discrete;
pub mod fftgrid;
pub mod gaussian;
pub mod geometry;
pub mod gowers;
pub mod num;
pub mod quad;
pub mod rng;
pub mod sets;
pub mod special;
pub mod sphere;
pub mod stats;
pub mod telescope;

/// Working precision of the Monte Carlo and FFT machinery.
pub type Scalar = f64;

/// Point of `R^d` at working precision.
pub type Vector = Vec<Scalar>;

/// Library version string echoed into report headers.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// One-line description of the measure normalization used everywhere:
/// the sphere measure is sampled as a probability measure, so counting
/// quantities equal the unnormalized ones divided by the measure's total
/// mass (available from [`sphere::sigma_mass_closed_form`]).
pub const NORMALIZATION_NOTE: &str =
    "sigma is probability-normalized; counts equal unnormalized counts divided by sigma mass";

pub use geometry::ExperimentParams;
pub use rng::SeedStream;
pub use sets::SetOracle;

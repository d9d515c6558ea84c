//! The library of measurable subsets of `[0,1]^d` used by the experiments:
//! annuli and lp-shell counterexample families, thin rectangular boxes
//! bridging discrete sets into the cube, and plain boxes, half-spaces,
//! and finite unions for testing.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::geometry::{l2_norm_sq, lp_norm_pow};

#[derive(Debug, Error)]
pub enum SetError {
    #[error("shell exponent p={p} outside 1..={max} (construction specific to integer p <= n-1)")]
    ShellExponent { p: u32, max: u32 },
    #[error("thin-box index {index} outside 0..{n_ambient}")]
    ThinBoxIndex { index: u64, n_ambient: u64 },
    #[error("box bounds must satisfy lo <= hi componentwise")]
    BadBox,
}

type MemberFn = dyn Fn(&[f64]) -> bool + Send + Sync;

/// A measurable subset of `[0,1]^dim` given by an exact membership predicate.
///
/// Predicates are pure and total; the oracle is immutable and can be shared
/// across worker threads freely.
#[derive(Clone)]
pub struct SetOracle {
    dim: usize,
    label: String,
    known_measure: Option<f64>,
    member: Arc<MemberFn>,
}

impl fmt::Debug for SetOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SetOracle")
            .field("dim", &self.dim)
            .field("label", &self.label)
            .field("known_measure", &self.known_measure)
            .finish()
    }
}

#[inline]
fn in_unit_cube(x: &[f64]) -> bool {
    x.iter().all(|&v| (0.0..=1.0).contains(&v))
}

#[inline]
fn dist_to_integers(u: f64) -> f64 {
    (u - u.round()).abs()
}

impl SetOracle {
    pub fn new(
        dim: usize,
        label: impl Into<String>,
        known_measure: Option<f64>,
        member: impl Fn(&[f64]) -> bool + Send + Sync + 'static,
    ) -> Self {
        if let Some(m) = known_measure {
            assert!((0.0..=1.0).contains(&m), "known_measure must lie in [0,1]");
        }
        Self {
            dim,
            label: label.into(),
            known_measure,
            member: Arc::new(member),
        }
    }

    #[inline]
    pub fn member(&self, x: &[f64]) -> bool {
        debug_assert_eq!(x.len(), self.dim);
        (self.member)(x)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn known_measure(&self) -> Option<f64> {
        self.known_measure
    }

    /// The full cube `[0,1]^d`.
    pub fn unit_cube(d: usize) -> Self {
        Self::new(d, format!("cube(d={d})"), Some(1.0), in_unit_cube)
    }

    pub fn empty(d: usize) -> Self {
        Self::new(d, format!("empty(d={d})"), Some(0.0), |_| false)
    }

    /// Axis-aligned box `prod [lo_i, hi_i]`, assumed inside the unit cube.
    pub fn axis_box(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self, SetError> {
        if lo.len() != hi.len() || lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return Err(SetError::BadBox);
        }
        let d = lo.len();
        let measure: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
        let label = format!("box(d={d})");
        Ok(Self::new(d, label, Some(measure.min(1.0)), move |x| {
            x.iter()
                .zip(lo.iter().zip(&hi))
                .all(|(&v, (&a, &b))| v >= a && v <= b)
        }))
    }

    /// Half-space `x . normal <= offset` clipped to the unit cube.
    pub fn halfspace(normal: Vec<f64>, offset: f64) -> Self {
        let d = normal.len();
        Self::new(d, format!("halfspace(d={d})"), None, move |x| {
            in_unit_cube(x)
                && x.iter().zip(&normal).map(|(a, b)| a * b).sum::<f64>() <= offset
        })
    }

    /// Union of finitely many oracles of equal dimension. The measure is
    /// carried over only when `disjoint` is asserted by the caller and all
    /// parts are known.
    pub fn union(parts: Vec<SetOracle>, disjoint: bool) -> Self {
        assert!(!parts.is_empty());
        let d = parts[0].dim;
        assert!(parts.iter().all(|p| p.dim == d));
        let measure = if disjoint {
            parts
                .iter()
                .map(|p| p.known_measure)
                .try_fold(0.0, |acc, m| m.map(|m| acc + m))
        } else {
            None
        };
        let label = format!("union({})", parts.len());
        Self::new(d, label, measure, move |x| parts.iter().any(|p| p.member(x)))
    }

    /// Union of concentric annuli: points of the cube whose rescaled
    /// squared Euclidean norm `||x/eps||^2` lies within 1/10 of an integer.
    ///
    /// Every 3-term progression inside this set has a gap `y` with
    /// `2 ||y/eps||^2` within 2/5 of an integer (see
    /// [`crate::counting::verify_annuli_rigidity`]), so its gap-length
    /// spectrum contains no interval longer than `eps`, while the measure
    /// stays bounded below uniformly in `eps`.
    pub fn bourgain_annuli(d: usize, eps: f64) -> Self {
        assert!(eps > 0.0 && eps <= 1.0);
        let inv_eps_sq = 1.0 / (eps * eps);
        Self::new(
            d,
            format!("annuli(d={d},eps={eps})"),
            None,
            move |x| in_unit_cube(x) && dist_to_integers(l2_norm_sq(x) * inv_eps_sq) < 0.1,
        )
    }

    /// lp analogue of the annuli for integer exponents `1 <= p <= n-1`:
    /// points with `||x/eps||_p^p` within `2^(-p-2)` of an integer.
    pub fn lp_shells(n: u32, p: u32, d: usize, eps: f64) -> Result<Self, SetError> {
        if p < 1 || p > n - 1 {
            return Err(SetError::ShellExponent { p, max: n - 1 });
        }
        assert!(eps > 0.0 && eps <= 1.0);
        let half_width = 2f64.powi(-(p as i32) - 2);
        let pf = p as f64;
        let inv_eps = 1.0 / eps;
        Ok(Self::new(
            d,
            format!("shells(n={n},p={p},d={d},eps={eps})"),
            None,
            move |x| {
                if !in_unit_cube(x) {
                    return false;
                }
                let mut scaled = [0.0f64; 8];
                if x.len() <= 8 {
                    for (s, &v) in scaled.iter_mut().zip(x) {
                        *s = v * inv_eps;
                    }
                    dist_to_integers(lp_norm_pow(&scaled[..x.len()], pf)) < half_width
                } else {
                    let scaled: Vec<f64> = x.iter().map(|&v| v * inv_eps).collect();
                    dist_to_integers(lp_norm_pow(&scaled, pf)) < half_width
                }
            },
        ))
    }
}

/// Thin rectangular boxes embedding a discrete set `S` of `{0..N-1}` into
/// the cube: the union over `k in S` of
/// `[(5k+2)/(5N), (5k+3)/(5N)] x [0,1]^(d-1)`.
#[derive(Clone, Debug)]
pub struct ThinBoxes {
    indices: Vec<u64>,
    n_ambient: u64,
    dim: usize,
}

impl ThinBoxes {
    pub fn new(s: &[u64], n_ambient: u64, dim: usize) -> Result<Self, SetError> {
        assert!(dim >= 1 && n_ambient >= 1);
        let mut indices = s.to_vec();
        indices.sort_unstable();
        indices.dedup();
        for &k in &indices {
            if k >= n_ambient {
                return Err(SetError::ThinBoxIndex {
                    index: k,
                    n_ambient,
                });
            }
        }
        Ok(Self {
            indices,
            n_ambient,
            dim,
        })
    }

    /// Measure `|S| / (5N)`.
    pub fn measure(&self) -> f64 {
        self.indices.len() as f64 / (5.0 * self.n_ambient as f64)
    }

    /// First-coordinate interval of the box with discrete index `k`.
    pub fn interval(&self, k: u64) -> (f64, f64) {
        let den = 5.0 * self.n_ambient as f64;
        ((5 * k + 2) as f64 / den, (5 * k + 3) as f64 / den)
    }

    /// Which box (if any) contains first coordinate `x1`.
    pub fn box_index(&self, x1: f64) -> Option<u64> {
        let pos = self
            .indices
            .partition_point(|&k| self.interval(k).0 <= x1);
        if pos == 0 {
            return None;
        }
        let k = self.indices[pos - 1];
        let (lo, hi) = self.interval(k);
        (x1 >= lo && x1 <= hi).then_some(k)
    }

    pub fn oracle(&self) -> SetOracle {
        let this = self.clone();
        let label = format!(
            "thinboxes(|S|={},N={},d={})",
            self.indices.len(),
            self.n_ambient,
            self.dim
        );
        let measure = self.measure();
        SetOracle::new(self.dim, label, Some(measure), move |x| {
            in_unit_cube(x) && this.box_index(x[0]).is_some()
        })
    }
}

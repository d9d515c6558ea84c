//! Adaptive 1D quadrature built on runtime-generated Gauss–Legendre rules.
//!
//! Nodes and weights are produced by Newton iteration on the Legendre
//! recurrence, so no coefficient tables are embedded. The adaptive driver
//! bisects panels until the difference between an 8-point and a 16-point
//! rule falls under the requested tolerance; integrands in this crate are
//! smooth away from isolated shell boundaries, where bisection localizes
//! quickly.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum QuadError {
    #[error("quadrature did not converge: achieved error {achieved:.3e} > tolerance {tol:.3e}")]
    NotConverged { achieved: f64, tol: f64 },
}

/// A quadrature rule on [-1, 1]: `(nodes, weights)`.
pub type Rule = Arc<(Vec<f64>, Vec<f64>)>;

/// Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> Rule {
    static CACHE: OnceLock<Mutex<HashMap<usize, Rule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry(n)
        .or_insert_with(|| Arc::new(compute_gauss_legendre(n)))
        .clone()
}

fn compute_gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi-type initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_p(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Value and derivative of the Legendre polynomial P_n at x.
fn legendre_p(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Fixed-order Gauss–Legendre integral of `f` over `[a, b]`.
pub fn fixed_quad<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, order: usize) -> f64 {
    let rule = gauss_legendre(order);
    let (nodes, weights) = (&rule.0, &rule.1);
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = 0.0;
    for (&x, &w) in nodes.iter().zip(weights) {
        acc += w * f(c + h * x);
    }
    acc * h
}

/// Adaptive integral of `f` over `[a, b]` with absolute tolerance `tol`.
///
/// Returns the estimate together with the achieved error bound; errors out
/// when the panel budget is exhausted before reaching `tol`.
pub fn adaptive_quad<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<(f64, f64), QuadError> {
    if a == b {
        return Ok((0.0, 0.0));
    }
    const MAX_PANELS: usize = 100_000;
    // Worst-panel-first refinement, seeded with a uniform subdivision so
    // that features narrower than the initial interval cannot hide
    // between the nodes of a single rule.
    const SEED_PANELS: usize = 16;
    let mut panels: Vec<(f64, f64, f64, f64)> = Vec::new(); // (a, b, value, err)
    for i in 0..SEED_PANELS {
        let pa = a + (b - a) * i as f64 / SEED_PANELS as f64;
        let pb = a + (b - a) * (i + 1) as f64 / SEED_PANELS as f64;
        let seed = eval_panel(f, pa, pb);
        panels.push((pa, pb, seed.0, seed.1));
    }
    let mut total_err: f64 = panels.iter().map(|p| p.3).sum();
    while total_err > tol && panels.len() < MAX_PANELS {
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap())
            .unwrap();
        let (pa, pb, _, perr) = panels.swap_remove(idx);
        if !perr.is_finite() {
            return Err(QuadError::NotConverged {
                achieved: f64::INFINITY,
                tol,
            });
        }
        let mid = 0.5 * (pa + pb);
        if mid == pa || mid == pb {
            // Panel at floating-point resolution; keep its estimate.
            panels.push((pa, pb, eval_panel(f, pa, pb).0, 0.0));
            total_err = panels.iter().map(|p| p.3).sum();
            continue;
        }
        let left = eval_panel(f, pa, mid);
        let right = eval_panel(f, mid, pb);
        panels.push((pa, mid, left.0, left.1));
        panels.push((mid, pb, right.0, right.1));
        total_err = panels.iter().map(|p| p.3).sum();
    }
    let value = panels.iter().map(|p| p.2).sum();
    if total_err > tol {
        return Err(QuadError::NotConverged {
            achieved: total_err,
            tol,
        });
    }
    Ok((value, total_err))
}

fn eval_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let coarse = fixed_quad(f, a, b, 8);
    let fine = fixed_quad(f, a, b, 16);
    (fine, (fine - coarse).abs())
}

/// Adaptive tensor-product integral over an axis-aligned box, `dim <= 3`.
///
/// Integrates the innermost axis adaptively for each outer node; the
/// per-axis tolerance is `tol` scaled by the remaining volume.
pub fn adaptive_quad_nd<F: Fn(&[f64]) -> f64 + Sync>(
    f: &F,
    lo: &[f64],
    hi: &[f64],
    tol: f64,
) -> Result<f64, QuadError> {
    assert_eq!(lo.len(), hi.len());
    match lo.len() {
        1 => adaptive_quad(&|x| f(&[x]), lo[0], hi[0], tol).map(|r| r.0),
        2 => {
            let inner_tol = tol / (hi[0] - lo[0]).abs().max(1.0);
            adaptive_quad(
                &|x| {
                    adaptive_quad(&|y| f(&[x, y]), lo[1], hi[1], inner_tol)
                        .map(|r| r.0)
                        .unwrap_or(f64::NAN)
                },
                lo[0],
                hi[0],
                tol,
            )
            .map(|r| r.0)
        }
        3 => {
            let inner_tol = tol / ((hi[0] - lo[0]) * (hi[1] - lo[1])).abs().max(1.0);
            adaptive_quad(
                &|x| {
                    adaptive_quad(
                        &|y| {
                            adaptive_quad(&|z| f(&[x, y, z]), lo[2], hi[2], inner_tol)
                                .map(|r| r.0)
                                .unwrap_or(f64::NAN)
                        },
                        lo[1],
                        hi[1],
                        inner_tol,
                    )
                    .map(|r| r.0)
                    .unwrap_or(f64::NAN)
                },
                lo[0],
                hi[0],
                tol,
            )
            .map(|r| r.0)
        }
        d => panic!("tensor quadrature supports dim <= 3, got {d}"),
    }
}

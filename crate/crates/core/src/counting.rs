//! Monte Carlo estimation of the progression- and cube-counting
//! quantities, gap spectra with witnesses, the annuli rigidity check, and
//! the multiscale/uniform error scans.
//!
//! All estimators draw from keyed streams in fixed-size chunks (see
//! [`crate::rng`]), so estimates are bit-identical across worker counts.
//! Scans evaluate every compared estimator on the same draws, which turns
//! differences of counts into low-variance paired estimates.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::bump::Mollifier;
use crate::geometry::{l2_norm_sq, ExperimentParams};
use crate::rng::{chunked_mean, chunked_mean_vec, MeanAccumulator, SeedStream, CHUNK};
use crate::sets::SetOracle;
use crate::sphere::SphereSampler;
use crate::stats::loglog_slope;

#[derive(Debug, Error)]
pub enum CountError {
    #[error("sample budget must be positive")]
    ZeroSamples,
    #[error("set dimension {got} does not match expected {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("witness is not an n-term progression inside the set")]
    NotAWitness,
    #[error("grid too large: {cells} cells exceed the exact-computation budget")]
    GridTooLarge { cells: u128 },
    #[error("set has no mass to check against")]
    EmptySet,
}

/// A Monte Carlo estimate with its provenance.
#[derive(Clone, Debug)]
pub struct EstimateWithError {
    pub value: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
    pub stream_id: u64,
    pub params: ExperimentParams,
}

impl EstimateWithError {
    fn from_acc(acc: &MeanAccumulator, stream: SeedStream, params: ExperimentParams) -> Self {
        Self {
            value: acc.mean(),
            stderr: acc.stderr(),
            samples: acc.count,
            seed: stream.seed,
            stream_id: stream.stream_id,
            params,
        }
    }

    /// Standard error of the difference of two independent estimates.
    pub fn combined_stderr(&self, other: &EstimateWithError) -> f64 {
        (self.stderr * self.stderr + other.stderr * other.stderr).sqrt()
    }
}

/// Monte Carlo Lebesgue measure of an oracle's intersection with the
/// unit cube.
pub fn estimate_measure(
    a: &SetOracle,
    samples: u64,
    stream: SeedStream,
) -> Result<EstimateWithError, CountError> {
    if samples == 0 {
        return Err(CountError::ZeroSamples);
    }
    let d = a.dim();
    let acc = chunked_mean(stream, samples, |rng| {
        let mut x = vec![0.0; d];
        for v in x.iter_mut() {
            *v = rng.gen::<f64>();
        }
        if a.member(&x) {
            1.0
        } else {
            0.0
        }
    });
    let params = ExperimentParams {
        d: d as u32,
        ..ExperimentParams::default()
    };
    Ok(EstimateWithError::from_acc(&acc, stream, params))
}

#[inline]
fn all_ap_points_member(a: &SetOracle, x: &[f64], y: &[f64], n: u32, buf: &mut [f64]) -> bool {
    for i in 0..n {
        let s = i as f64;
        for ((b, &xj), &yj) in buf.iter_mut().zip(x).zip(y) {
            *b = xj + s * yj;
        }
        if !a.member(buf) {
            return false;
        }
    }
    true
}

/// Sharp progression count: the probability that `x, x+y, ..., x+(n-1)y`
/// all lie in `A` for `x` uniform on the cube and `y = lambda z`,
/// `z ~ sigma`.
pub fn count_ap_sharp(
    a: &SetOracle,
    params: &ExperimentParams,
    samples: u64,
    stream: SeedStream,
) -> Result<EstimateWithError, CountError> {
    count_ap_with_eps(a, params, 0.0, samples, stream)
}

/// Smoothed progression count: gaps drawn with density
/// `sigma_lambda * phi_(eps lambda)`.
pub fn count_ap_smoothed(
    a: &SetOracle,
    params: &ExperimentParams,
    samples: u64,
    stream: SeedStream,
) -> Result<EstimateWithError, CountError> {
    count_ap_with_eps(a, params, params.eps, samples, stream)
}

fn count_ap_with_eps(
    a: &SetOracle,
    params: &ExperimentParams,
    eps: f64,
    samples: u64,
    stream: SeedStream,
) -> Result<EstimateWithError, CountError> {
    if samples == 0 {
        return Err(CountError::ZeroSamples);
    }
    let d = params.d as usize;
    if a.dim() != d {
        return Err(CountError::DimensionMismatch {
            got: a.dim(),
            expected: d,
        });
    }
    let sampler = SphereSampler::new(params.p, d);
    let mollifier: Mollifier = Mollifier::standard(d);
    let n = params.n;
    let lambda = params.lambda;
    let acc = chunked_mean(stream, samples, |rng| {
        let mut x = vec![0.0; d];
        let mut y = vec![0.0; d];
        let mut buf = vec![0.0; d];
        for v in x.iter_mut() {
            *v = rng.gen::<f64>();
        }
        sampler.sample_mollified_gap_into(&mollifier, lambda, eps, rng, &mut y);
        if all_ap_points_member(a, &x, &y, n, &mut buf) {
            1.0
        } else {
            0.0
        }
    });
    Ok(EstimateWithError::from_acc(&acc, stream, *params))
}

/// Cube-pattern count over `([0,1]^2)^n`: the probability that all `2^n`
/// vertices `(x_1 + r_1 y_1, ..., x_n + r_n y_n)` lie in `A`, with each
/// `y_i = lambda z_i + eps lambda w_i`, `z_i` uniform on the circle and
/// `w_i` standard planar Gaussian (`eps = 0` gives the sharp count).
pub fn count_cube(
    a: &SetOracle,
    n: u32,
    lambda: f64,
    eps: f64,
    samples: u64,
    stream: SeedStream,
) -> Result<EstimateWithError, CountError> {
    if samples == 0 {
        return Err(CountError::ZeroSamples);
    }
    assert!(n >= 1, "cube pattern needs at least one planar side");
    let nu = n as usize;
    if a.dim() != 2 * nu {
        return Err(CountError::DimensionMismatch {
            got: a.dim(),
            expected: 2 * nu,
        });
    }
    // variance of the standard Gaussian density exp(-pi ||x||^2) per axis
    let gauss_sd = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
    let acc = chunked_mean(stream, samples, |rng| {
        let mut x = vec![0.0; 2 * nu];
        let mut y = vec![0.0; 2 * nu];
        let mut vertex = vec![0.0; 2 * nu];
        for v in x.iter_mut() {
            *v = rng.gen::<f64>();
        }
        for i in 0..nu {
            let theta = rng.gen::<f64>() * 2.0 * std::f64::consts::PI;
            let (s, c) = theta.sin_cos();
            let (mut gx, mut gy) = (0.0, 0.0);
            if eps > 0.0 {
                gx = gauss_sd * normal_draw(rng);
                gy = gauss_sd * normal_draw(rng);
            }
            y[2 * i] = lambda * c + eps * lambda * gx;
            y[2 * i + 1] = lambda * s + eps * lambda * gy;
        }
        for r in 0..(1u32 << n) {
            for i in 0..nu {
                let bit = if (r >> i) & 1 == 1 { 1.0 } else { 0.0 };
                vertex[2 * i] = x[2 * i] + bit * y[2 * i];
                vertex[2 * i + 1] = x[2 * i + 1] + bit * y[2 * i + 1];
            }
            if !a.member(&vertex) {
                return 0.0;
            }
        }
        1.0
    });
    let params = ExperimentParams {
        n,
        p: 2.0,
        d: 2 * n,
        lambda,
        eps,
        ..ExperimentParams::default()
    };
    Ok(EstimateWithError::from_acc(&acc, stream, params))
}

#[inline]
fn normal_draw(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; two uniforms per normal keeps the draw count fixed
    let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Varnavides-type average: `y` uniform on `[0, lambda]^d` instead of on
/// a sphere, `x` uniform on the cube.
pub fn varnavides_lhs(
    a: &SetOracle,
    n: u32,
    lambda: f64,
    samples: u64,
    stream: SeedStream,
) -> Result<EstimateWithError, CountError> {
    if samples == 0 {
        return Err(CountError::ZeroSamples);
    }
    let d = a.dim();
    let acc = chunked_mean(stream, samples, |rng| {
        let mut x = vec![0.0; d];
        let mut y = vec![0.0; d];
        let mut buf = vec![0.0; d];
        for v in x.iter_mut() {
            *v = rng.gen::<f64>();
        }
        for v in y.iter_mut() {
            *v = rng.gen::<f64>() * lambda;
        }
        if all_ap_points_member(a, &x, &y, n, &mut buf) {
            1.0
        } else {
            0.0
        }
    });
    let params = ExperimentParams {
        n,
        d: d as u32,
        lambda,
        ..ExperimentParams::default()
    };
    Ok(EstimateWithError::from_acc(&acc, stream, params))
}

/// A witnessed progression: base point and gap vector.
pub type Witness = (Vec<f64>, Vec<f64>);

/// Bucketed record of which gap sizes admit a witnessed pattern.
#[derive(Clone, Debug)]
pub struct SpectrumHistogram {
    /// `buckets + 1` strictly increasing positive edges.
    pub lambda_edges: Vec<f64>,
    pub hit_counts: Vec<u64>,
    pub trial_counts: Vec<u64>,
    /// One stored witness per nonempty bucket.
    pub witnesses: Vec<Option<Witness>>,
    /// All witnesses per bucket when full dumps were requested.
    pub full_witnesses: Option<Vec<Vec<Witness>>>,
}

impl SpectrumHistogram {
    pub fn buckets(&self) -> usize {
        self.hit_counts.len()
    }

    pub fn midpoint(&self, b: usize) -> f64 {
        0.5 * (self.lambda_edges[b] + self.lambda_edges[b + 1])
    }

    pub fn hit_flags(&self) -> Vec<bool> {
        self.hit_counts.iter().map(|&h| h > 0).collect()
    }
}

/// Stratified gap-spectrum scan: every bucket gets `trials_per_bucket`
/// trials at its midpoint gap length; a bucket is hit when some trial
/// lands an n-term progression entirely inside `A`.
#[allow(clippy::too_many_arguments)]
pub fn gap_spectrum(
    a: &SetOracle,
    n: u32,
    p: f64,
    lambda_min: f64,
    lambda_max: f64,
    buckets: usize,
    trials_per_bucket: u64,
    stream: SeedStream,
    store_all_witnesses: bool,
) -> Result<SpectrumHistogram, CountError> {
    assert!(0.0 < lambda_min && lambda_min < lambda_max && buckets >= 1);
    if trials_per_bucket == 0 {
        return Err(CountError::ZeroSamples);
    }
    let d = a.dim();
    let sampler = SphereSampler::new(p, d);
    let width = (lambda_max - lambda_min) / buckets as f64;
    let lambda_edges: Vec<f64> = (0..=buckets)
        .map(|i| lambda_min + width * i as f64)
        .collect();

    struct BucketResult {
        hits: u64,
        first: Option<Witness>,
        all: Vec<Witness>,
    }

    let results: Vec<BucketResult> = (0..buckets)
        .into_par_iter()
        .map(|bidx| {
            let lambda = lambda_min + width * (bidx as f64 + 0.5);
            let mut hits = 0u64;
            let mut first: Option<Witness> = None;
            let mut all = Vec::new();
            let n_chunks = trials_per_bucket.div_ceil(CHUNK);
            for chunk in 0..n_chunks {
                let mut rng = stream
                    .offset((bidx as u64) << 32)
                    .offset(chunk)
                    .rng();
                let lo = chunk * CHUNK;
                let hi = ((chunk + 1) * CHUNK).min(trials_per_bucket);
                let mut x = vec![0.0; d];
                let mut y = vec![0.0; d];
                let mut buf = vec![0.0; d];
                for _ in lo..hi {
                    for v in x.iter_mut() {
                        *v = rng.gen::<f64>();
                    }
                    sampler.sample_into(&mut rng, &mut y);
                    for v in y.iter_mut() {
                        *v *= lambda;
                    }
                    if all_ap_points_member(a, &x, &y, n, &mut buf) {
                        hits += 1;
                        if first.is_none() {
                            first = Some((x.clone(), y.clone()));
                        }
                        if store_all_witnesses {
                            all.push((x.clone(), y.clone()));
                        }
                    }
                }
            }
            BucketResult { hits, first, all }
        })
        .collect();

    let hit_counts: Vec<u64> = results.iter().map(|r| r.hits).collect();
    let witnesses: Vec<Option<Witness>> = results.iter().map(|r| r.first.clone()).collect();
    let full_witnesses =
        store_all_witnesses.then(|| results.into_iter().map(|r| r.all).collect());
    Ok(SpectrumHistogram {
        lambda_edges,
        hit_counts,
        trial_counts: vec![trials_per_bucket; buckets],
        witnesses,
        full_witnesses,
    })
}

/// Exact rigidity check for witnessed 3-term progressions in the annuli
/// set: `2 ||y/eps||^2` must lie within 2/5 of an integer. Witnesses are
/// re-verified against the oracle first; a failing verdict would mean a
/// bug in the oracle or the sampler, so callers treat it as fatal.
pub fn verify_annuli_rigidity(
    a: &SetOracle,
    eps: f64,
    witnesses: &[Witness],
) -> Result<Vec<bool>, CountError> {
    let mut verdicts = Vec::with_capacity(witnesses.len());
    for (x, y) in witnesses {
        let mut buf = vec![0.0; x.len()];
        if !all_ap_points_member(a, x, y, 3, &mut buf) {
            return Err(CountError::NotAWitness);
        }
        let u = 2.0 * l2_norm_sq(y) / (eps * eps);
        verdicts.push((u - u.round()).abs() < 0.4);
    }
    Ok(verdicts)
}

/// One row of the multiscale error scan.
#[derive(Clone, Debug)]
pub struct MultiscaleRow {
    pub j: u32,
    pub lambda: f64,
    pub smoothed_eps: f64,
    pub smoothed_one: f64,
    pub diff: f64,
    pub diff_stderr: f64,
}

#[derive(Clone, Debug)]
pub struct MultiscaleScan {
    pub rows: Vec<MultiscaleRow>,
    pub cumulative_abs: Vec<f64>,
    /// `J^(1 - 2^(2-n))` reference curve for slope comparison.
    pub reference_curve: Vec<f64>,
    /// Log-log slope of the cumulative sum over the second half of the
    /// scale range, where the growth rate in the number of scales is the
    /// meaningful quantity (the first scales are a transient: counts at
    /// gap sizes comparable to the cube are nearly zero).
    pub fitted_slope: Option<f64>,
}

/// Differences `N^eps - N^1` at dyadic representative scales
/// `lambda_j = 1.5 * 2^-j`, evaluated on common draws per scale.
#[allow(clippy::too_many_arguments)]
pub fn multiscale_error_scan(
    a: &SetOracle,
    n: u32,
    p: f64,
    eps: f64,
    j_max: u32,
    samples: u64,
    stream: SeedStream,
    lambda_override: Option<&[f64]>,
) -> Result<MultiscaleScan, CountError> {
    assert!((1..=20).contains(&j_max));
    if samples == 0 {
        return Err(CountError::ZeroSamples);
    }
    let d = a.dim();
    let sampler = SphereSampler::new(p, d);
    let mollifier: Mollifier = Mollifier::standard(d);
    let mut rows = Vec::with_capacity(j_max as usize);
    for j in 1..=j_max {
        let lambda = match lambda_override {
            Some(ls) => ls[(j - 1) as usize],
            None => 1.5 * 2f64.powi(-(j as i32)),
        };
        // paired estimator: same (x, z, w) feeds both smoothness scales
        let acc = chunked_mean_vec(
            stream.offset((j as u64) << 32),
            samples,
            3,
            |rng, out| {
                let mut x = vec![0.0; d];
                let mut z = vec![0.0; d];
                let mut w = vec![0.0; d];
                let mut y = vec![0.0; d];
                let mut buf = vec![0.0; d];
                for v in x.iter_mut() {
                    *v = rng.gen::<f64>();
                }
                sampler.sample_into(rng, &mut z);
                mollifier.sample_phi(rng, &mut w);
                let mut hit = [0.0f64; 2];
                for (slot, e) in [eps, 1.0].into_iter().enumerate() {
                    for i in 0..d {
                        y[i] = lambda * z[i] + e * lambda * w[i];
                    }
                    if all_ap_points_member(a, &x, &y, n, &mut buf) {
                        hit[slot] = 1.0;
                    }
                }
                out[0] = hit[0];
                out[1] = hit[1];
                out[2] = hit[0] - hit[1];
            },
        );
        rows.push(MultiscaleRow {
            j,
            lambda,
            smoothed_eps: acc[0].mean(),
            smoothed_one: acc[1].mean(),
            diff: acc[2].mean(),
            diff_stderr: acc[2].stderr(),
        });
    }
    let mut cumulative_abs = Vec::with_capacity(rows.len());
    let mut acc = 0.0;
    for r in &rows {
        acc += r.diff.abs();
        cumulative_abs.push(acc);
    }
    let exponent = 1.0 - 2f64.powi(2 - n as i32);
    let reference_curve: Vec<f64> = (1..=j_max).map(|j| (j as f64).powf(exponent)).collect();
    let half = (j_max as usize) / 2;
    let js: Vec<f64> = (half + 1..=j_max as usize).map(|j| j as f64).collect();
    let fitted_slope = loglog_slope(&js, &cumulative_abs[half..]);
    Ok(MultiscaleScan {
        rows,
        cumulative_abs,
        reference_curve,
        fitted_slope,
    })
}

#[derive(Clone, Debug)]
pub struct UniformScanRow {
    pub eps: f64,
    pub value: f64,
    pub diff_vs_ref: f64,
    pub diff_stderr: f64,
}

#[derive(Clone, Debug)]
pub struct UniformScan {
    pub rows: Vec<UniformScanRow>,
    /// Smallest (last) entry of the eps list, the reference scale.
    pub eps_ref: f64,
    pub fitted_slope: Option<f64>,
}

/// Differences `|N^eps - N^eps_ref|` across a non-increasing eps list,
/// with the smallest entry as reference, all on common draws.
pub fn uniform_error_scan(
    a: &SetOracle,
    n: u32,
    p: f64,
    lambda: f64,
    eps_list: &[f64],
    samples: u64,
    stream: SeedStream,
) -> Result<UniformScan, CountError> {
    assert!(eps_list.len() >= 3, "need at least 3 smoothness scales");
    assert!(
        eps_list.windows(2).all(|w| w[0] >= w[1]),
        "eps list must be non-increasing"
    );
    if samples == 0 {
        return Err(CountError::ZeroSamples);
    }
    let d = a.dim();
    let sampler = SphereSampler::new(p, d);
    let mollifier: Mollifier = Mollifier::standard(d);
    let m = eps_list.len();
    // slots: one count per eps, then one signed difference per non-ref eps
    let acc = chunked_mean_vec(stream, samples, 2 * m - 1, |rng, out| {
        let mut x = vec![0.0; d];
        let mut z = vec![0.0; d];
        let mut w = vec![0.0; d];
        let mut y = vec![0.0; d];
        let mut buf = vec![0.0; d];
        for v in x.iter_mut() {
            *v = rng.gen::<f64>();
        }
        sampler.sample_into(rng, &mut z);
        mollifier.sample_phi(rng, &mut w);
        let mut hits = vec![0.0f64; m];
        for (slot, &e) in eps_list.iter().enumerate() {
            for i in 0..d {
                y[i] = lambda * z[i] + e * lambda * w[i];
            }
            hits[slot] = if all_ap_points_member(a, &x, &y, n, &mut buf) {
                1.0
            } else {
                0.0
            };
        }
        out[..m].copy_from_slice(&hits);
        for slot in 0..m - 1 {
            out[m + slot] = hits[slot] - hits[m - 1];
        }
    });
    let eps_ref = eps_list[m - 1];
    let mut rows = Vec::with_capacity(m);
    for (slot, &e) in eps_list.iter().enumerate() {
        let (diff, diff_stderr) = if slot + 1 == m {
            (0.0, 0.0)
        } else {
            (acc[m + slot].mean().abs(), acc[m + slot].stderr())
        };
        rows.push(UniformScanRow {
            eps: e,
            value: acc[slot].mean(),
            diff_vs_ref: diff,
            diff_stderr,
        });
    }
    let xs: Vec<f64> = rows[..m - 1].iter().map(|r| r.eps).collect();
    let ys: Vec<f64> = rows[..m - 1].iter().map(|r| r.diff_vs_ref).collect();
    let fitted_slope = loglog_slope(&xs, &ys);
    Ok(UniformScan {
        rows,
        eps_ref,
        fitted_slope,
    })
}

/// 0/1 array over a product grid of cells.
#[derive(Clone, Debug)]
pub struct GridArray {
    pub dims: Vec<usize>,
    pub data: Vec<u8>,
}

impl GridArray {
    pub fn new(dims: Vec<usize>, data: Vec<u8>) -> Self {
        assert_eq!(dims.iter().product::<usize>(), data.len());
        assert!(data.iter().all(|&b| b <= 1));
        Self { dims, data }
    }

    fn at(&self, idx: &[usize]) -> u64 {
        let mut flat = 0usize;
        for (i, &ix) in idx.iter().enumerate() {
            flat = flat * self.dims[i] + ix;
        }
        self.data[flat] as u64
    }
}

/// Exact box-norm comparison on a grid: the average over all
/// `(x_i^0, x_i^1)` tuples of the product of `B` over the `2^n` pattern
/// vertices, versus the `2^n`-th power of the plain average. Returns
/// `(lhs, rhs, lhs >= rhs)`, computed in exact integer arithmetic.
pub fn box_norm_check(b: &GridArray, n: u32) -> Result<(f64, f64, bool), CountError> {
    let nu = n as usize;
    assert_eq!(b.dims.len(), nu);
    let cells: u128 = b.dims.iter().map(|&d| d as u128).product();
    let pair_space: u128 = cells * cells;
    if pair_space > 100_000_000 {
        return Err(CountError::GridTooLarge { cells });
    }
    // enumerate pair tuples axis by axis
    fn recurse(b: &GridArray, axis: usize, pairs: &mut Vec<(usize, usize)>, total: &mut u128) {
        if axis == b.dims.len() {
            // evaluate product over the 2^n vertices
            let nu = b.dims.len();
            let mut prod = 1u64;
            let mut idx = vec![0usize; nu];
            'vertex: for r in 0..(1u32 << nu) {
                for i in 0..nu {
                    idx[i] = if (r >> i) & 1 == 1 {
                        pairs[i].1
                    } else {
                        pairs[i].0
                    };
                }
                if b.at(&idx) == 0 {
                    prod = 0;
                    break 'vertex;
                }
            }
            *total += prod as u128;
            return;
        }
        for i in 0..b.dims[axis] {
            for j in 0..b.dims[axis] {
                pairs.push((i, j));
                recurse(b, axis + 1, pairs, total);
                pairs.pop();
            }
        }
    }
    let mut lhs_num = 0u128;
    recurse(b, 0, &mut Vec::with_capacity(nu), &mut lhs_num);
    let ones: u128 = b.data.iter().map(|&v| v as u128).sum();
    // exact comparison: lhs_num / cells^2 >= (ones / cells)^(2^n)
    // <=> lhs_num * cells^(2^n - 2) >= ones^(2^n)
    let pow = 1u32 << n;
    let lhs_cmp = lhs_num
        .checked_mul(
            cells
                .checked_pow(pow - 2)
                .ok_or(CountError::GridTooLarge { cells })?,
        )
        .ok_or(CountError::GridTooLarge { cells })?;
    let rhs_cmp = ones
        .checked_pow(pow)
        .ok_or(CountError::GridTooLarge { cells })?;
    let lhs = lhs_num as f64 / (pair_space as f64);
    let rhs = (ones as f64 / cells as f64).powi(pow as i32);
    Ok((lhs, rhs, lhs_cmp >= rhs_cmp))
}

#[derive(Clone, Debug)]
pub struct StructuredCheck {
    pub deltas: Vec<f64>,
    pub values: Vec<f64>,
    pub fitted_slope: Option<f64>,
    /// Slope must not exceed `2^n + 0.5`.
    pub slope_bound: f64,
    pub pass: bool,
}

/// Positivity and density-power scaling of the fully smoothed cube count on
/// the slab family `A_delta = [0, delta] x [0,1] x ([0,1]^2)^(n-1)`.
pub fn structured_lower_check(
    n: u32,
    lambda: f64,
    deltas: &[f64],
    samples: u64,
    stream: SeedStream,
) -> Result<StructuredCheck, CountError> {
    assert!(!deltas.is_empty() && deltas.iter().all(|&d| d > 0.0 && d <= 1.0));
    let nu = n as usize;
    let mut values = Vec::with_capacity(deltas.len());
    for (i, &delta) in deltas.iter().enumerate() {
        let mut lo = vec![0.0; 2 * nu];
        let mut hi = vec![1.0; 2 * nu];
        lo[0] = 0.0;
        hi[0] = delta;
        let a = SetOracle::axis_box(lo, hi).expect("slab bounds");
        let est = count_cube(&a, n, lambda, 1.0, samples, stream.offset((i as u64) << 32))?;
        if est.value <= 0.0 {
            return Err(CountError::EmptySet);
        }
        values.push(est.value);
    }
    let fitted_slope = loglog_slope(deltas, &values);
    let slope_bound = 2f64.powi(n as i32) + 0.5;
    let pass = fitted_slope.map(|s| s <= slope_bound).unwrap_or(false);
    Ok(StructuredCheck {
        deltas: deltas.to_vec(),
        values,
        fitted_slope,
        slope_bound,
        pass,
    })
}

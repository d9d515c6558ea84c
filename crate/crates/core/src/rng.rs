//! Reproducible randomness.
//!
//! Every random quantity in the lab is drawn from a ChaCha stream keyed by
//! `(seed, stream_id)`. ChaCha is counter-based, so streams can be created
//! on demand at any point of a parallel computation; identical keys always
//! reproduce bit-identical draws, and distinct keys give statistically
//! independent sequences. Chunked Monte Carlo assigns `stream_id`s by
//! chunk index and reduces partial sums in chunk order, which makes every
//! estimate independent of the number of worker threads.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Key for one reproducible random stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeedStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl SeedStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// Instantiate the generator for this key.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }

    /// Stream with the same seed and an offset id. Callers partition the
    /// id space so that no two concurrent uses collide.
    pub fn offset(&self, delta: u64) -> Self {
        Self {
            seed: self.seed,
            stream_id: self.stream_id.wrapping_add(delta),
        }
    }
}

/// Number of samples per Monte Carlo chunk. Fixed so that estimates do not
/// depend on how chunks are scheduled onto threads.
pub const CHUNK: u64 = 1 << 16;

/// Accumulator for a mean with a standard error.
#[derive(Clone, Copy, Debug, Default)]
pub struct MeanAccumulator {
    pub sum: f64,
    pub sum_sq: f64,
    pub count: u64,
}

impl MeanAccumulator {
    pub fn push(&mut self, x: f64) {
        self.sum += x;
        self.sum_sq += x * x;
        self.count += 1;
    }

    /// Merge in fixed order only.
    pub fn merge(&mut self, other: &MeanAccumulator) {
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self.count += other.count;
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.sum / self.count as f64
        }
    }

    /// Standard error of the mean: sample standard deviation / sqrt(n).
    pub fn stderr(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        let mean = self.sum / n;
        let var = ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    }
}

/// Run `per_sample` for `samples` draws split into fixed-size chunks.
///
/// Chunk `i` draws from `stream.offset(i)`; partial accumulators are merged
/// in chunk order, so the result is bit-identical for any worker count.
pub fn chunked_mean<F>(stream: SeedStream, samples: u64, per_sample: F) -> MeanAccumulator
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let n_chunks = samples.div_ceil(CHUNK);
    let partials: Vec<MeanAccumulator> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = stream.offset(chunk).rng();
            let lo = chunk * CHUNK;
            let hi = ((chunk + 1) * CHUNK).min(samples);
            let mut acc = MeanAccumulator::default();
            for _ in lo..hi {
                acc.push(per_sample(&mut rng));
            }
            acc
        })
        .collect();
    let mut total = MeanAccumulator::default();
    for p in &partials {
        total.merge(p);
    }
    total
}

/// Like [`chunked_mean`] but each sample produces a small fixed-length
/// vector of values (used for common-random-number scans); means and
/// standard errors are tracked per component.
pub fn chunked_mean_vec<F>(
    stream: SeedStream,
    samples: u64,
    width: usize,
    per_sample: F,
) -> Vec<MeanAccumulator>
where
    F: Fn(&mut ChaCha8Rng, &mut [f64]) + Sync,
{
    let n_chunks = samples.div_ceil(CHUNK);
    let partials: Vec<Vec<MeanAccumulator>> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = stream.offset(chunk).rng();
            let lo = chunk * CHUNK;
            let hi = ((chunk + 1) * CHUNK).min(samples);
            let mut acc = vec![MeanAccumulator::default(); width];
            let mut buf = vec![0.0; width];
            for _ in lo..hi {
                per_sample(&mut rng, &mut buf);
                for (a, &v) in acc.iter_mut().zip(buf.iter()) {
                    a.push(v);
                }
            }
            acc
        })
        .collect();
    let mut total = vec![MeanAccumulator::default(); width];
    for p in &partials {
        for (t, q) in total.iter_mut().zip(p.iter()) {
            t.merge(q);
        }
    }
    total
}

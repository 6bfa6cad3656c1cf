//! Monte Carlo probe of the characteristic function of a measure on `F_M`.
//!
//! The measure here is a surrogate: `X = [0; a_1, ..., a_depth]` with i.i.d.
//! digits. It carries no decay guarantee.

use super::sampling::{task_rng, DigitSampler, DigitWeights};
use crate::error::{Error, Result};
use num_traits::Float;
use rayon::prelude::*;
use serde::Serialize;

/// Samples per RNG stream. Fixed so that output is independent of threading.
pub const FOURIER_BLOCK: u64 = 1 << 14;

/// Recompute the phase directly after this many recurrence steps.
const RESYNC: usize = 64;

/// Estimate of `E[exp(2 pi i t X)]` at one frequency.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FourierPoint<T> {
    pub t: i64,
    pub re: T,
    pub im: T,
    pub sample_count: u64,
    pub stderr: T,
}

pub type FourierEstimate = FourierPoint<f64>;

impl<T: Float> FourierPoint<T> {
    pub fn modulus(&self) -> T {
        self.re.hypot(self.im)
    }

    /// `|estimate| <= 1 + k * stderr`.
    pub fn within_noise(&self, k: T) -> bool {
        self.modulus() <= T::one() + k * self.stderr
    }

    pub fn conj(&self) -> Self {
        FourierPoint {
            t: -self.t,
            im: -self.im,
            ..*self
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FourierConfig {
    pub m: u64,
    pub weights: DigitWeights,
    pub depth: usize,
    pub samples: u64,
    pub freqs: Vec<i64>,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FourierRun {
    pub points: Vec<FourierEstimate>,
    /// Worst-case `|X - x|` from truncating at `depth`: `1 / (q_depth q_{depth+1})`
    /// with all digits equal to one.
    pub truncation_bound: f64,
}

impl FourierRun {
    /// Largest modulus over frequencies in `[lo, hi)`.
    pub fn block_max(&self, lo: i64, hi: i64) -> Option<f64> {
        self.points
            .iter()
            .filter(|p| (lo..hi).contains(&p.t))
            .map(|p| p.modulus())
            .reduce(f64::max)
    }
}

fn truncation_bound(depth: usize) -> f64 {
    let (mut a, mut b) = (1.0f64, 1.0f64);
    for _ in 0..depth {
        (a, b) = (b, a + b);
    }
    1.0 / (a * b)
}

/// Groups sorted distinct positive frequencies into runs of consecutive values.
fn runs(freqs: &[u64]) -> Vec<(u64, usize)> {
    let mut out: Vec<(u64, usize)> = Vec::new();
    for &f in freqs {
        match out.last_mut() {
            Some((start, len)) if *start + *len as u64 == f => *len += 1,
            _ => out.push((f, 1)),
        }
    }
    out
}

fn phase(t: u64, x: f64) -> (f64, f64) {
    let f = (t as f64 * x).fract();
    let (s, c) = (std::f64::consts::TAU * f).sin_cos();
    (c, s)
}

/// Adds `exp(2 pi i t x)` for every frequency in `runs` to `acc`.
fn accumulate(x: f64, runs: &[(u64, usize)], acc: &mut [(f64, f64)]) {
    let step = phase(1, x);
    let mut i = 0;
    for &(start, len) in runs {
        let mut cur = (1.0, 0.0);
        for j in 0..len {
            if j % RESYNC == 0 {
                cur = phase(start + j as u64, x);
            } else {
                cur = (
                    cur.0 * step.0 - cur.1 * step.1,
                    cur.0 * step.1 + cur.1 * step.0,
                );
            }
            acc[i].0 += cur.0;
            acc[i].1 += cur.1;
            i += 1;
        }
    }
}

/// Estimates the characteristic function at every frequency in `cfg.freqs`.
///
/// `t = 0` is exactly `(1, 0)` and `-t` is the conjugate of `t`, since both
/// come from the same samples.
pub fn fourier_surrogate(cfg: &FourierConfig) -> Result<FourierRun> {
    if cfg.depth < 30 {
        return Err(Error::InvalidArgument(format!("depth {} < 30", cfg.depth)));
    }
    if cfg.samples < 1000 {
        return Err(Error::InvalidArgument(format!(
            "samples {} < 1000",
            cfg.samples
        )));
    }
    let sampler = DigitSampler::new(cfg.m, cfg.weights)?;
    let mut pos: Vec<u64> = cfg
        .freqs
        .iter()
        .map(|t| t.unsigned_abs())
        .filter(|&t| t > 0)
        .collect();
    pos.sort_unstable();
    pos.dedup();
    let groups = runs(&pos);

    let blocks = cfg.samples.div_ceil(FOURIER_BLOCK);
    let partial: Vec<Vec<(f64, f64)>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = task_rng(cfg.seed, b);
            let mut acc = vec![(0.0, 0.0); pos.len()];
            let n = FOURIER_BLOCK.min(cfg.samples - b * FOURIER_BLOCK);
            let mut digits = vec![0u64; cfg.depth];
            for _ in 0..n {
                digits
                    .iter_mut()
                    .for_each(|d| *d = sampler.sample(&mut rng));
                let x = digits.iter().rev().fold(0.0, |x, &a| 1.0 / (a as f64 + x));
                accumulate(x, &groups, &mut acc);
            }
            acc
        })
        .collect();
    let mut sums = vec![(0.0, 0.0); pos.len()];
    for block in &partial {
        for (s, v) in sums.iter_mut().zip(block) {
            s.0 += v.0;
            s.1 += v.1;
        }
    }

    let n = cfg.samples as f64;
    let stderr = 1.0 / n.sqrt();
    let points = cfg
        .freqs
        .iter()
        .map(|&t| {
            let (re, im) = if t == 0 {
                (1.0, 0.0)
            } else {
                let i = pos
                    .binary_search(&t.unsigned_abs())
                    .expect("frequency present");
                let (re, im) = (sums[i].0 / n, sums[i].1 / n);
                if t < 0 {
                    (re, -im)
                } else {
                    (re, im)
                }
            };
            FourierPoint {
                t,
                re,
                im,
                sample_count: cfg.samples,
                stderr,
            }
        })
        .collect();
    Ok(FourierRun {
        points,
        truncation_bound: truncation_bound(cfg.depth),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(freqs: Vec<i64>) -> FourierConfig {
        FourierConfig {
            m: 3,
            weights: DigitWeights::Uniform,
            depth: 30,
            samples: 40_000,
            freqs,
            seed: 7,
        }
    }

    #[test]
    fn normalization_and_symmetry() {
        let run = fourier_surrogate(&cfg(vec![0, 3, -3, 5, 200])).unwrap();
        let p = &run.points;
        assert_eq!((p[0].re, p[0].im), (1.0, 0.0));
        assert_eq!(p[2], p[1].conj());
        assert!(p.iter().all(|q| q.within_noise(3.0)));
        // truncation at depth 30 is below 1/(F_31 F_32)
        assert!(run.truncation_bound < 1e-12);
    }

    #[test]
    fn recurrence_matches_direct() {
        let freqs: Vec<i64> = (1..300).collect();
        let run = fourier_surrogate(&cfg(freqs.clone())).unwrap();
        let sparse: Vec<i64> = freqs.iter().copied().filter(|t| t % 7 == 0).collect();
        let run2 = fourier_surrogate(&cfg(sparse)).unwrap();
        for q in &run2.points {
            let p = run.points[(q.t - 1) as usize];
            assert!((p.re - q.re).abs() < 1e-9 && (p.im - q.im).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_small_inputs() {
        let mut c = cfg(vec![1]);
        c.depth = 29;
        assert!(fourier_surrogate(&c).is_err());
        let mut c = cfg(vec![1]);
        c.samples = 999;
        assert!(fourier_surrogate(&c).is_err());
    }
}

use crate::cf::CFExpansion;
use crate::error::{Error, Result};
use crate::exact::ExactReal;
use num_bigint::BigInt;
use rand::distr::weighted::WeightedIndex;
use rand::distr::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

/// Name recorded in manifests for the generator behind [`task_rng`].
pub const RNG_ALGORITHM: &str = "ChaCha20 (rand_chacha 0.9), seed_from_u64 + per-task stream";

/// Generator for task `stream` of a run with master `seed`.
///
/// Streams are fixed by task index, so results do not depend on how tasks
/// are scheduled across threads.
pub fn task_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Distribution of partial quotients on `[1, M]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DigitWeights {
    /// Gauss-Kuzmin weights `log2(1 + 1/(a(a+2)))`, renormalized on `[1, M]`.
    #[default]
    GaussKuzmin,
    Uniform,
}

impl std::str::FromStr for DigitWeights {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gauss-kuzmin" | "gk" => Ok(DigitWeights::GaussKuzmin),
            "uniform" => Ok(DigitWeights::Uniform),
            _ => Err(Error::Parse(format!("unknown digit weights {s:?}"))),
        }
    }
}

impl std::fmt::Display for DigitWeights {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DigitWeights::GaussKuzmin => "gauss-kuzmin",
            DigitWeights::Uniform => "uniform",
        })
    }
}

/// A sampler for i.i.d. digits in `[1, M]`.
pub(crate) enum DigitSampler {
    Weighted(WeightedIndex<f64>),
    Uniform(Uniform<u64>),
}

impl DigitSampler {
    pub(crate) fn new(m: u64, weights: DigitWeights) -> Result<DigitSampler> {
        if m == 0 {
            return Err(Error::InvalidArgument("M must be at least 1".into()));
        }
        Ok(match weights {
            DigitWeights::GaussKuzmin => {
                let w = (1..=m).map(|a| {
                    let a = a as f64;
                    (1.0 + 1.0 / (a * (a + 2.0))).log2()
                });
                DigitSampler::Weighted(
                    WeightedIndex::new(w).map_err(|e| Error::InvalidArgument(e.to_string()))?,
                )
            }
            DigitWeights::Uniform => DigitSampler::Uniform(
                Uniform::new_inclusive(1, m).map_err(|e| Error::InvalidArgument(e.to_string()))?,
            ),
        })
    }

    pub(crate) fn sample<R: rand::Rng>(&self, rng: &mut R) -> u64 {
        match self {
            DigitSampler::Weighted(w) => w.sample(rng) as u64 + 1,
            DigitSampler::Uniform(u) => u.sample(rng),
        }
    }
}

/// A point of `F_M`: the purely periodic expansion `[0; block, block, ...]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FMSample {
    pub m: u64,
    pub block: Vec<u64>,
    pub value: ExactReal,
    pub weights: DigitWeights,
    pub seed: u64,
    pub stream: u64,
}

impl FMSample {
    pub fn expansion(&self) -> CFExpansion {
        CFExpansion::purely_periodic(self.block.iter().map(|&a| BigInt::from(a)).collect())
    }
}

/// Draws a block of `block_len` digits from `weights` on `[1, m]`.
pub fn sample_fm(
    m: u64,
    block_len: usize,
    seed: u64,
    weights: DigitWeights,
    stream: u64,
) -> Result<FMSample> {
    if block_len == 0 {
        return Err(Error::InvalidArgument(
            "block length must be at least 1".into(),
        ));
    }
    let sampler = DigitSampler::new(m, weights)?;
    let mut rng = task_rng(seed, stream);
    let block: Vec<u64> = (0..block_len).map(|_| sampler.sample(&mut rng)).collect();
    let cf = CFExpansion::purely_periodic(block.iter().map(|&a| BigInt::from(a)).collect());
    let value = cf.value().expect("periodic expansions have exact values");
    Ok(FMSample {
        m,
        block,
        value,
        weights,
        seed,
        stream,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::expand;

    #[test]
    fn m_one_is_golden_conjugate() {
        let s = sample_fm(1, 5, 42, DigitWeights::GaussKuzmin, 0).unwrap();
        assert_eq!(s.block, vec![1; 5]);
        assert_eq!(s.value.to_string(), "(-1+1*sqrt(5))/2");
    }

    #[test]
    fn deterministic_and_round_trips() {
        for weights in [DigitWeights::GaussKuzmin, DigitWeights::Uniform] {
            let a = sample_fm(5, 7, 2024, weights, 3).unwrap();
            let b = sample_fm(5, 7, 2024, weights, 3).unwrap();
            assert_eq!(a, b);
            assert!(a.block.iter().all(|&d| (1..=5).contains(&d)));
            let cf = expand(&a.value, 50).unwrap();
            for k in 1..=21 {
                assert_eq!(cf.digit(k).unwrap(), BigInt::from(a.block[(k - 1) % 7]));
            }
        }
    }

    #[test]
    fn streams_differ() {
        let a = sample_fm(50, 20, 1, DigitWeights::Uniform, 0).unwrap();
        let b = sample_fm(50, 20, 1, DigitWeights::Uniform, 1).unwrap();
        assert_ne!(a.block, b.block);
    }
}

//! Seeded Monte Carlo estimate of the moments of `B_j`.
//!
//! Trials are split into blocks of [`TRIALS_PER_BLOCK`]. Block `b` draws from
//! `ChaCha8Rng::seed_from_u64(seed)` switched to stream `b`, so the output
//! depends only on `(seed, trials)` and not on the thread count. Letters are
//! drawn exactly when the common denominator `D` of the probabilities fits in
//! a `u64` (uniform integer in `[0, D)` against cumulative numerators), and
//! from `f64` cumulative probabilities otherwise. Per-block sums of waiting
//! times and their squares are integers, so the reduction is exact.

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::domain::{LetterSet, Query};
use crate::error::{Error, Result};

pub const TRIALS_PER_BLOCK: u64 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimulationStats {
    pub mean: f64,
    /// Unbiased sample variance (`0` for a single trial).
    pub variance: f64,
    pub std_error: f64,
    pub trials: u64,
}

enum Sampler {
    Exact {
        denominator: u64,
        cumulative: Vec<u64>,
    },
    Float {
        cumulative: Vec<f64>,
    },
}

impl Sampler {
    fn new(query: &Query) -> Self {
        let probs = query.dist().probs();
        let d = query.dist().common_denominator();
        if let Some(denominator) = d.to_u64() {
            let mut acc = 0u64;
            let cumulative = probs
                .iter()
                .map(|p| {
                    let scaled = p * num_rational::BigRational::from_integer(d.clone());
                    acc += scaled
                        .to_integer()
                        .to_u64()
                        .expect("numerator below denominator");
                    acc
                })
                .collect();
            Sampler::Exact {
                denominator,
                cumulative,
            }
        } else {
            let mut acc = 0.0;
            let cumulative = probs
                .iter()
                .map(|p| {
                    acc += p.to_f64().unwrap_or(0.0);
                    acc
                })
                .collect();
            Sampler::Float { cumulative }
        }
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> usize {
        match self {
            Sampler::Exact {
                denominator,
                cumulative,
            } => {
                let u = rng.gen_range(0..*denominator);
                cumulative.partition_point(|&c| c <= u)
            }
            Sampler::Float { cumulative } => {
                let u: f64 = rng.gen();
                cumulative
                    .partition_point(|&c| c <= u)
                    .min(cumulative.len() - 1)
            }
        }
    }
}

fn one_trial<R: Rng>(rng: &mut R, sampler: &Sampler, runs: &[u32], j: usize) -> u64 {
    let mut done = LetterSet::empty();
    let mut last = usize::MAX;
    let mut run = 0u32;
    let mut steps = 0u64;
    loop {
        let letter = sampler.draw(rng);
        steps += 1;
        run = if letter == last { run + 1 } else { 1 };
        last = letter;
        if run >= runs[letter] && !done.contains(letter) {
            done = done.with(letter);
            if done.len() >= j {
                return steps;
            }
        }
    }
}

/// Simulates `trials` independent waiting times for `B_j`.
pub fn simulate_waiting(query: &Query, trials: u64, seed: u64) -> Result<SimulationStats> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    if query.r() > LetterSet::MAX_LETTERS {
        return Err(Error::AlphabetTooLarge {
            r: query.r(),
            limit: LetterSet::MAX_LETTERS,
            what: "the simulator",
        });
    }
    let sampler = Sampler::new(query);
    let runs = query.runs().lengths();
    let j = query.j();
    let blocks = trials.div_ceil(TRIALS_PER_BLOCK);

    let sums: Vec<(u128, u128)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let count = TRIALS_PER_BLOCK.min(trials - b * TRIALS_PER_BLOCK);
            let mut sum = 0u128;
            let mut sum_sq = 0u128;
            for _ in 0..count {
                let t = one_trial(&mut rng, &sampler, runs, j) as u128;
                sum += t;
                sum_sq += t * t;
            }
            (sum, sum_sq)
        })
        .collect();
    let (sum, sum_sq) = sums
        .iter()
        .fold((0u128, 0u128), |(a, b), &(s, q)| (a + s, b + q));

    let n = trials as u128;
    let mean = sum as f64 / trials as f64;
    let variance = if trials == 1 {
        0.0
    } else {
        match n.checked_mul(sum_sq).zip(sum.checked_mul(sum)) {
            Some((a, b)) => (a - b) as f64 / (n * (n - 1)) as f64,
            None => {
                let m = sum as f64 / trials as f64;
                (sum_sq as f64 - trials as f64 * m * m) / (trials - 1) as f64
            }
        }
    };
    Ok(SimulationStats {
        mean,
        variance,
        std_error: (variance / trials as f64).sqrt(),
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{validate_query, AlphabetDistribution, RunSpec};

    fn query(weights: &[u64], h: &[u32], j: usize) -> Query {
        let d = AlphabetDistribution::from_weights(weights).unwrap();
        validate_query(&d, &RunSpec::new(h.to_vec()).unwrap(), j).unwrap()
    }

    #[test]
    fn unit_runs_take_one_letter() {
        let s = simulate_waiting(&query(&[1, 2, 3], &[1, 1, 1], 1), 1000, 99).unwrap();
        assert_eq!(s.mean, 1.0);
        assert_eq!(s.variance, 0.0);
        assert_eq!(s.std_error, 0.0);
    }

    #[test]
    fn reproducible_for_fixed_seed() {
        let q = query(&[1, 1, 2], &[2, 3, 2], 2);
        let a = simulate_waiting(&q, 200_000, 7).unwrap();
        let b = simulate_waiting(&q, 200_000, 7).unwrap();
        assert_eq!(a, b);
        let c = simulate_waiting(&q, 200_000, 8).unwrap();
        assert_ne!(a.mean, c.mean);
    }

    #[test]
    fn coin_h3_mean_and_variance() {
        // E = 7, V = 22 for the first 3-run of a fair coin.
        let s = simulate_waiting(&query(&[1, 1], &[3, 3], 1), 1_000_000, 2024).unwrap();
        assert!((s.mean - 7.0).abs() <= 5.0 * s.std_error, "{s:?}");
        assert!((s.variance - 22.0).abs() <= 2.2, "{s:?}");
    }

    #[test]
    fn single_trial() {
        let s = simulate_waiting(&query(&[1, 1], &[2, 2], 1), 1, 1).unwrap();
        assert!(s.mean >= 2.0);
        assert_eq!(s.variance, 0.0);
    }

    #[test]
    fn zero_trials_rejected() {
        assert!(simulate_waiting(&query(&[1, 1], &[2, 2], 1), 0, 1).is_err());
    }
}

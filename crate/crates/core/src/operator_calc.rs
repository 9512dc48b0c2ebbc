//! `E(B_j)` for every `j` from the Smirnov generating function
//! `S(v) = 1 / (1 - sum_i v_i / (1 + v_i))`.
//!
//! Each letter is substituted either by `alpha_i = (p_i - p_i^{h_i}) / (1 - p_i)`
//! (its run has not completed) or by `gamma_i = p_i / (1 - p_i)` (no
//! restriction). Expanding `prod_i (y Gamma_i + (1 - y) A_i)` and keeping the
//! coefficients of `y^0..y^{j-1}` turns the operator expression into a sum
//! over subsets `T` (letters taking `gamma`) with a weight depending only on
//! `|T|`:
//!
//! ```text
//! E(B_j) = sum_{T ⊆ A} w_j(|T|) S(gamma on T, alpha off T)
//! w_j(t)  = sum_{q=t}^{j-1} (-1)^{q-t} C(r-t, q-t)
//! ```
//!
//! `w_j(r)` is an empty sum for every `j <= r`, so the all-`gamma` point, where
//! `S` is singular, is never evaluated.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::domain::{integer, rpow, AlphabetDistribution, ExactRational, Query, RunSpec};
use crate::error::{Error, Result};

/// Default refusal threshold for the `2^r` subset sum.
pub const DEFAULT_MAX_LETTERS: usize = 20;

/// The two substitution points for every letter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubstitutionValues {
    pub alpha: Vec<ExactRational>,
    pub gamma: Vec<ExactRational>,
}

impl SubstitutionValues {
    pub fn new(dist: &AlphabetDistribution, runs: &RunSpec) -> Self {
        let one = ExactRational::one();
        let (alpha, gamma) = dist
            .probs()
            .iter()
            .zip(runs.lengths())
            .map(|(p, &h)| {
                let q = &one - p;
                ((p - rpow(p, h)) / &q, p / &q)
            })
            .unzip();
        Self { alpha, gamma }
    }

    /// Point with `gamma` on the letters of `mask` and `alpha` elsewhere.
    pub fn assignment(&self, mask: u64) -> Vec<ExactRational> {
        (0..self.alpha.len())
            .map(|i| {
                if mask >> i & 1 == 1 {
                    self.gamma[i].clone()
                } else {
                    self.alpha[i].clone()
                }
            })
            .collect()
    }
}

/// `1 / (1 - sum_i x_i / (1 + x_i))`, exactly.
pub fn smirnov_eval(x: &[ExactRational]) -> Result<ExactRational> {
    let one = ExactRational::one();
    let mut sum = ExactRational::zero();
    for (i, xi) in x.iter().enumerate() {
        let d = &one + xi;
        if d.is_zero() {
            return Err(Error::DivisionByZero { index: i + 1 });
        }
        sum += xi / d;
    }
    let denom = one - sum;
    if denom.is_zero() {
        return Err(Error::SingularEvaluation);
    }
    Ok(denom.recip())
}

fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// Aggregated weight `w_j(t)` of an assignment with `t` letters on `gamma`.
pub fn weight(r: usize, j: usize, t: usize) -> BigInt {
    (t..j).fold(BigInt::zero(), |acc, q| {
        let c = binomial(r - t, q - t);
        if (q - t).is_multiple_of(2) {
            acc + c
        } else {
            acc - c
        }
    })
}

/// `E(B_j)` via the weighted subset sum, refusing `r > 20`.
pub fn expect_j(query: &Query) -> Result<ExactRational> {
    expect_j_with_limit(query, DEFAULT_MAX_LETTERS)
}

/// `E(B_j)` with an explicit alphabet-size limit (at most 63).
pub fn expect_j_with_limit(query: &Query, max_letters: usize) -> Result<ExactRational> {
    let r = query.r();
    let limit = max_letters.min(63);
    if r > limit {
        return Err(Error::AlphabetTooLarge {
            r,
            limit,
            what: "the operator subset sum",
        });
    }
    if query.j() == 1 {
        // Only T = ∅ carries weight.
        return smirnov_eval(&SubstitutionValues::new(query.dist(), query.runs()).alpha);
    }
    let weights: Vec<ExactRational> = (0..=r)
        .map(|t| ExactRational::from_integer(weight(r, query.j(), t)))
        .collect();
    debug_assert!(weights[r].is_zero());
    Ok(subset_sum(query.dist(), query.runs(), &weights))
}

/// `E(B_r)`: every proper subset with sign `(-1)^{r-|T|+1}`.
pub fn expect_all(dist: &AlphabetDistribution, runs: &RunSpec) -> ExactRational {
    let r = dist.len();
    let weights: Vec<ExactRational> = (0..=r)
        .map(|t| match t {
            t if t == r => integer(0),
            t if (r - t) % 2 == 1 => integer(1),
            _ => integer(-1),
        })
        .collect();
    subset_sum(dist, runs, &weights)
}

/// `sum_T weights[|T|] * S(gamma on T, alpha off T)`, skipping zero weights.
///
/// Subsets are visited in Gray-code order so the running value of
/// `sum_i x_i / (1 + x_i)` changes by one letter per step. With
/// `x/(1+x)` equal to `p_i` at `gamma_i` and `(p_i - p_i^h)/(1 - p_i^h)` at
/// `alpha_i`, no per-subset division other than the final reciprocal is
/// needed.
fn subset_sum(
    dist: &AlphabetDistribution,
    runs: &RunSpec,
    weights: &[ExactRational],
) -> ExactRational {
    let r = dist.len();
    let one = ExactRational::one();
    let alpha_ratio: Vec<ExactRational> = dist
        .probs()
        .iter()
        .zip(runs.lengths())
        .map(|(p, &h)| {
            let ph = rpow(p, h);
            (p - &ph) / (&one - &ph)
        })
        .collect();
    let delta: Vec<ExactRational> = dist
        .probs()
        .iter()
        .zip(&alpha_ratio)
        .map(|(p, a)| p - a)
        .collect();

    let mut ratio_sum: ExactRational = alpha_ratio.iter().sum();
    let mut mask = 0u64;
    let mut total = ExactRational::zero();
    let count = 1u64 << r;
    for step in 0..count {
        if step > 0 {
            let flip = step.trailing_zeros() as usize;
            mask ^= 1 << flip;
            if mask >> flip & 1 == 1 {
                ratio_sum += &delta[flip];
            } else {
                ratio_sum -= &delta[flip];
            }
        }
        let w = &weights[mask.count_ones() as usize];
        if w.is_zero() {
            continue;
        }
        total += w / (&one - &ratio_sum);
    }
    total
}

/// `r (r^h - 1) / (r - 1) * H_r` for the equidistributed alphabet.
pub fn expect_all_uniform(r: u32, h: u32) -> ExactRational {
    assert!(r >= 2, "need at least two letters");
    let rr = integer(r as i64);
    let rh = rr.pow(h as i32);
    &rr * (rh - integer(1)) / integer(r as i64 - 1) * harmonic(r)
}

/// `H_r = 1 + 1/2 + ... + 1/r`.
pub fn harmonic(r: u32) -> ExactRational {
    (1..=r as i64).map(|k| integer(k).recip()).sum()
}

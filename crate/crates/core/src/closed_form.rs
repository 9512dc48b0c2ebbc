//! Closed forms for the first completed run (`j = 1`) with per-letter run
//! lengths, and the rational generating function
//! `G1(z) = sum_n P{Y_n = 0} z^n` with exact coefficient extraction.

use std::ops::{Add, Mul, Sub};

use num_traits::{One, Zero};

use crate::domain::{integer, rpow, AlphabetDistribution, ExactRational, RunSpec};

/// Dense univariate polynomial, coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: Vec<ExactRational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<ExactRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn constant(c: ExactRational) -> Self {
        Self::new(vec![c])
    }

    /// `c * z^k`
    pub fn monomial(c: ExactRational, k: usize) -> Self {
        let mut coeffs = vec![ExactRational::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[ExactRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> ExactRational {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(ExactRational::zero)
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Horner evaluation.
    pub fn eval(&self, z: &ExactRational) -> ExactRational {
        self.coeffs
            .iter()
            .rev()
            .fold(ExactRational::zero(), |acc, c| acc * z + c)
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::new(Vec::new());
        }
        let mut out = vec![ExactRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (k, b) in rhs.coeffs.iter().enumerate() {
                out[i + k] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

/// `numer(z) / denom(z)` with `denom(0) != 0`, so a power series at 0 exists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunction {
    numer: Polynomial,
    denom: Polynomial,
}

impl RationalFunction {
    /// Returns `None` when the denominator vanishes at `z = 0`.
    pub fn new(numer: Polynomial, denom: Polynomial) -> Option<Self> {
        if denom.coeff(0).is_zero() {
            return None;
        }
        Some(Self { numer, denom })
    }

    pub fn numer(&self) -> &Polynomial {
        &self.numer
    }

    pub fn denom(&self) -> &Polynomial {
        &self.denom
    }

    /// Value at `z`, or `None` at a pole of the uncancelled fraction.
    pub fn eval(&self, z: &ExactRational) -> Option<ExactRational> {
        let d = self.denom.eval(z);
        if d.is_zero() {
            return None;
        }
        Some(self.numer.eval(z) / d)
    }

    /// First `n_max + 1` power-series coefficients via
    /// `a_n = (c_n - sum_{k>=1} q_k a_{n-k}) / q_0`.
    pub fn series(&self, n_max: usize) -> Vec<ExactRational> {
        let q = self.denom.coeffs();
        let q0_inv = q[0].recip();
        let mut a: Vec<ExactRational> = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            let mut acc = self.numer.coeff(n);
            for (k, qk) in q.iter().enumerate().skip(1).take(n) {
                if !qk.is_zero() {
                    acc -= qk * &a[n - k];
                }
            }
            a.push(acc * &q0_inv);
        }
        a
    }
}

/// `p^h (1 - p) / (1 - p^h)`, the reciprocal of `p^-1 + ... + p^-h`.
fn completion_rate(p: &ExactRational, h: u32) -> ExactRational {
    let ph = rpow(p, h);
    let one = ExactRational::one();
    &ph * (&one - p) / (&one - &ph)
}

/// `E(B_1) = 1 / sum_i p_i^{h_i} (1 - p_i) / (1 - p_i^{h_i})`.
///
/// The inputs are assumed validated against each other (same length).
pub fn expect_first(dist: &AlphabetDistribution, runs: &RunSpec) -> ExactRational {
    debug_assert_eq!(dist.len(), runs.len());
    let rate: ExactRational = dist
        .probs()
        .iter()
        .zip(runs.lengths())
        .map(|(p, &h)| completion_rate(p, h))
        .sum();
    rate.recip()
}

/// One summand of the variance numerator:
/// `(p + p^h) / (1 - p^h) - 2 h p^h (1 - p) / (1 - p^h)^2`.
///
/// Non-negative for every `0 < p < 1`, `h >= 1`, and zero exactly when `h = 1`.
pub fn variance_summand(p: &ExactRational, h: u32) -> ExactRational {
    let one = ExactRational::one();
    let ph = rpow(p, h);
    let tail = &one - &ph;
    let first = (p + &ph) / &tail;
    let second = integer(2 * h as i64) * &ph * (&one - p) / (&tail * &tail);
    first - second
}

/// `V(B_1) = E(B_1)^2 * sum_i variance_summand(p_i, h_i)`.
pub fn variance_first(dist: &AlphabetDistribution, runs: &RunSpec) -> ExactRational {
    let e = expect_first(dist, runs);
    let s: ExactRational = dist
        .probs()
        .iter()
        .zip(runs.lengths())
        .map(|(p, &h)| variance_summand(p, h))
        .sum();
    &e * &e * s
}

/// `G1(z) = 1 / (1 - sum_i (p_i z - (p_i z)^{h_i}) / (1 - (p_i z)^{h_i}))`
/// with the product of the per-letter denominators as common denominator.
pub fn g1_rational(dist: &AlphabetDistribution, runs: &RunSpec) -> RationalFunction {
    let one = Polynomial::constant(ExactRational::one());
    let (numers, denoms): (Vec<Polynomial>, Vec<Polynomial>) = dist
        .probs()
        .iter()
        .zip(runs.lengths())
        .map(|(p, &h)| {
            let run = Polynomial::monomial(rpow(p, h), h as usize);
            let single = Polynomial::monomial(p.clone(), 1);
            (&single - &run, &one - &run)
        })
        .unzip();

    let product = denoms.iter().fold(one.clone(), |acc, d| &acc * d);
    let mut weighted = Polynomial::new(Vec::new());
    for (i, n) in numers.iter().enumerate() {
        if n.is_zero() {
            continue;
        }
        let others = denoms
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .fold(n.clone(), |acc, (_, d)| &acc * d);
        weighted = &weighted + &others;
    }
    let denom = &product - &weighted;
    RationalFunction::new(product, denom).expect("denominator has constant term 1")
}

/// `[P{Y_0 = 0}, ..., P{Y_{n_max} = 0}]` from the series of [`g1_rational`].
pub fn no_run_prefix_probs(
    dist: &AlphabetDistribution,
    runs: &RunSpec,
    n_max: usize,
) -> Vec<ExactRational> {
    g1_rational(dist, runs).series(n_max)
}

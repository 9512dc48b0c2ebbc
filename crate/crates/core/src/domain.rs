//! Value types shared by every route: exact rationals, the letter
//! distribution, per-letter run lengths and the checked query.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type ExactRational = BigRational;

/// Parses `[+-]digits[/digits]` exactly. Decimal points are rejected.
pub fn parse_rational(text: &str) -> Option<ExactRational> {
    fn digits(s: &str) -> Option<BigInt> {
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        BigInt::parse_bytes(s.as_bytes(), 10)
    }

    let (negative, body) = match text.as_bytes().first()? {
        b'-' => (true, &text[1..]),
        b'+' => (false, &text[1..]),
        _ => (false, text),
    };
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (digits(n)?, digits(d)?),
        None => (digits(body)?, BigInt::one()),
    };
    if den.is_zero() {
        return None;
    }
    let num = if negative { -num } else { num };
    Some(BigRational::new(num, den))
}

/// Canonical `num/den` rendering; the denominator is always printed.
pub fn render_rational(x: &ExactRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Decimal rendering with `sig` significant digits, rounding half to even.
///
/// Plain notation is used for decimal exponents in `[-6, 21)`, scientific
/// notation otherwise. Trailing zeros after the point are dropped.
pub fn decimal_string(x: &ExactRational, sig: usize) -> String {
    assert!(sig >= 1, "need at least one significant digit");
    if x.is_zero() {
        return "0".to_string();
    }
    let negative = x.is_negative();
    let a = x.abs();
    let ten = BigInt::from(10u32);
    let pow10 = |e: i64| -> ExactRational {
        let p = num_traits::pow(ten.clone(), e.unsigned_abs() as usize);
        if e >= 0 {
            BigRational::from_integer(p)
        } else {
            BigRational::new(BigInt::one(), p)
        }
    };

    let mut e = a.numer().to_string().len() as i64 - a.denom().to_string().len() as i64;
    while a >= pow10(e + 1) {
        e += 1;
    }
    while a < pow10(e) {
        e -= 1;
    }

    let scaled = &a * pow10(sig as i64 - 1 - e);
    let (mut q, rem) = scaled.numer().div_rem(scaled.denom());
    let twice = rem * 2u32;
    let round_up = match twice.cmp(scaled.denom()) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => q.is_odd(),
    };
    if round_up {
        q += 1u32;
    }
    if q == num_traits::pow(ten.clone(), sig) {
        q /= 10u32;
        e += 1;
    }

    let digits = q.to_string();
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if (-6..21).contains(&e) {
        let body = if e >= sig as i64 - 1 {
            format!("{digits}{}", "0".repeat((e - sig as i64 + 1) as usize))
        } else if e >= 0 {
            let (int, frac) = digits.split_at(e as usize + 1);
            format!("{int}.{frac}")
        } else {
            format!("0.{}{digits}", "0".repeat((-e - 1) as usize))
        };
        out.push_str(&strip_fraction_zeros(body));
    } else {
        let (lead, rest) = digits.split_at(1);
        let mantissa = strip_fraction_zeros(format!("{lead}.{rest}"));
        out.push_str(&format!("{mantissa}e{e}"));
    }
    out
}

fn strip_fraction_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Letter probabilities `p1..pr`: `r >= 2`, each `0 < p < 1`, summing to 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlphabetDistribution {
    probs: Vec<ExactRational>,
}

impl AlphabetDistribution {
    pub fn new(probs: Vec<ExactRational>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::TooFewLetters { count: probs.len() });
        }
        let zero = ExactRational::zero();
        let one = ExactRational::one();
        for (i, p) in probs.iter().enumerate() {
            if *p <= zero || *p >= one {
                return Err(Error::ProbabilityOutOfRange {
                    index: i + 1,
                    value: render_rational(p),
                });
            }
        }
        let sum: ExactRational = probs.iter().sum();
        if !sum.is_one() {
            return Err(Error::SumNotOne {
                sum: render_rational(&sum),
            });
        }
        Ok(Self { probs })
    }

    /// Equidistribution `p_i = 1/r`.
    pub fn uniform(r: usize) -> Result<Self> {
        let p = BigRational::new(BigInt::one(), BigInt::from(r.max(1)));
        Self::new(vec![p; r])
    }

    /// Builds `k_i / sum(k)` from positive integer weights.
    pub fn from_weights(weights: &[u64]) -> Result<Self> {
        let total: BigInt = weights.iter().map(|&w| BigInt::from(w)).sum();
        if total.is_zero() {
            return Err(Error::TooFewLetters { count: 0 });
        }
        Self::new(
            weights
                .iter()
                .map(|&w| BigRational::new(BigInt::from(w), total.clone()))
                .collect(),
        )
    }

    pub fn probs(&self) -> &[ExactRational] {
        &self.probs
    }

    pub fn prob(&self, letter: usize) -> &ExactRational {
        &self.probs[letter]
    }

    /// Alphabet size `r`.
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Least common denominator of all probabilities.
    pub fn common_denominator(&self) -> BigInt {
        self.probs
            .iter()
            .fold(BigInt::one(), |acc, p| acc.lcm(p.denom()))
    }
}

impl FromStr for AlphabetDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_distribution(s)
    }
}

impl fmt::Display for AlphabetDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.probs.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}/{}", p.numer(), p.denom())?;
        }
        Ok(())
    }
}

/// Parses a comma-separated list of exact rationals and validates it as a
/// distribution.
pub fn parse_distribution(text: &str) -> Result<AlphabetDistribution> {
    let probs = text
        .split(',')
        .enumerate()
        .map(|(i, token)| {
            let token = token.trim();
            parse_rational(token).ok_or_else(|| Error::MalformedToken {
                index: i + 1,
                token: token.to_string(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    AlphabetDistribution::new(probs)
}

/// Required run length `h_i >= 1` for each letter.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RunSpec {
    lengths: Vec<u32>,
}

impl RunSpec {
    pub fn new(lengths: Vec<u32>) -> Result<Self> {
        if let Some(i) = lengths.iter().position(|&h| h == 0) {
            return Err(Error::InvalidRunLength {
                index: i + 1,
                token: "0".to_string(),
            });
        }
        Ok(Self { lengths })
    }

    /// The same run length `h` for all `r` letters.
    pub fn uniform(h: u32, r: usize) -> Result<Self> {
        Self::new(vec![h; r])
    }

    pub fn lengths(&self) -> &[u32] {
        &self.lengths
    }

    pub fn length(&self, letter: usize) -> u32 {
        self.lengths[letter]
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    pub fn min_length(&self) -> u32 {
        self.lengths.iter().copied().min().unwrap_or(1)
    }
}

impl fmt::Display for RunSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, h) in self.lengths.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{h}")?;
        }
        Ok(())
    }
}

/// Parses `"3"` (broadcast to all `r` letters) or `"3,2,4"` (one per letter).
pub fn parse_runs(text: &str, r: usize) -> Result<RunSpec> {
    let lengths = text
        .split(',')
        .enumerate()
        .map(|(i, token)| {
            let token = token.trim();
            token
                .parse::<u32>()
                .ok()
                .filter(|&h| h >= 1 && token.bytes().all(|b| b.is_ascii_digit()))
                .ok_or_else(|| Error::InvalidRunLength {
                    index: i + 1,
                    token: token.to_string(),
                })
        })
        .collect::<Result<Vec<_>>>()?;
    match lengths.as_slice() {
        [h] => RunSpec::uniform(*h, r),
        _ => RunSpec::new(lengths),
    }
}

/// Expectation and, when computed, variance of a waiting time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Moments {
    pub expectation: ExactRational,
    pub variance: Option<ExactRational>,
}

/// A validated `(distribution, run spec, j)` triple with `1 <= j <= r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    dist: AlphabetDistribution,
    runs: RunSpec,
    j: usize,
}

impl Query {
    pub fn dist(&self) -> &AlphabetDistribution {
        &self.dist
    }

    pub fn runs(&self) -> &RunSpec {
        &self.runs
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn r(&self) -> usize {
        self.dist.len()
    }

    /// Same distribution and runs with a different `j`.
    pub fn with_j(&self, j: usize) -> Result<Query> {
        validate_query(&self.dist, &self.runs, j)
    }
}

pub fn validate_query(dist: &AlphabetDistribution, runs: &RunSpec, j: usize) -> Result<Query> {
    let r = dist.len();
    if runs.len() != r {
        return Err(Error::RunSpecLength {
            expected: r,
            found: runs.len(),
        });
    }
    if j == 0 || j > r {
        return Err(Error::JOutOfRange { j, r });
    }
    Ok(Query {
        dist: dist.clone(),
        runs: runs.clone(),
        j,
    })
}

/// Subset of letters `0..64` as a bit mask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LetterSet(u64);

impl LetterSet {
    pub const MAX_LETTERS: usize = 64;

    pub const fn empty() -> Self {
        LetterSet(0)
    }

    pub const fn from_bits(bits: u64) -> Self {
        LetterSet(bits)
    }

    pub fn full(r: usize) -> Self {
        if r >= 64 {
            LetterSet(u64::MAX)
        } else {
            LetterSet((1u64 << r) - 1)
        }
    }

    pub fn from_letters<I: IntoIterator<Item = usize>>(letters: I) -> Self {
        letters
            .into_iter()
            .fold(LetterSet::empty(), |s, l| s.with(l))
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, letter: usize) -> bool {
        self.0 >> letter & 1 == 1
    }

    #[must_use]
    pub fn with(self, letter: usize) -> Self {
        LetterSet(self.0 | 1 << letter)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&l| self.contains(l))
    }
}

impl fmt::Display for LetterSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, l) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", l + 1)?;
        }
        f.write_str("}")
    }
}

/// `p^k` for a non-negative exponent.
pub(crate) fn rpow(p: &ExactRational, k: u32) -> ExactRational {
    num_traits::pow(p.clone(), k as usize)
}

#[cfg(test)]
pub(crate) fn rational(n: i64, d: i64) -> ExactRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub(crate) fn integer(n: i64) -> ExactRational {
    BigRational::from_integer(BigInt::from(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> ExactRational {
        rational(n, d)
    }

    #[test]
    fn parses_symmetric_coin() {
        let d = parse_distribution("1/2,1/2").unwrap();
        assert_eq!(d.probs(), &[r(1, 2), r(1, 2)]);
    }

    #[test]
    fn parses_fair_die() {
        let d = parse_distribution("1/6,1/6,1/6,1/6,1/6,1/6").unwrap();
        assert_eq!(d.len(), 6);
        assert!(d.probs().iter().all(|p| *p == r(1, 6)));
        assert_eq!(d, AlphabetDistribution::uniform(6).unwrap());
    }

    #[test]
    fn parses_unequal_exact_sum() {
        let d = parse_distribution(" 1/2 , 1/3,1/6 ").unwrap();
        assert_eq!(d.probs(), &[r(1, 2), r(1, 3), r(1, 6)]);
    }

    #[test]
    fn non_lowest_terms_are_canonicalised() {
        let d = parse_distribution("2/4,3/6").unwrap();
        assert_eq!(d.to_string(), "1/2,1/2");
    }

    #[test]
    fn rejects_malformed_tokens() {
        assert_eq!(
            parse_distribution("1/2,0.5"),
            Err(Error::MalformedToken {
                index: 2,
                token: "0.5".into()
            })
        );
        assert!(matches!(
            parse_distribution("1/2,1/0"),
            Err(Error::MalformedToken { index: 2, .. })
        ));
        assert!(matches!(
            parse_distribution("1/2,,1/2"),
            Err(Error::MalformedToken { index: 2, .. })
        ));
        assert!(matches!(
            parse_distribution("a,1/2"),
            Err(Error::MalformedToken { index: 1, .. })
        ));
        assert!(matches!(
            parse_distribution("1/-2,1/2"),
            Err(Error::MalformedToken { index: 1, .. })
        ));
    }

    #[test]
    fn rejects_single_letter() {
        assert_eq!(
            parse_distribution("1"),
            Err(Error::TooFewLetters { count: 1 })
        );
    }

    #[test]
    fn rejects_zero_and_negative_probabilities() {
        assert_eq!(
            parse_distribution("1,0"),
            Err(Error::ProbabilityOutOfRange {
                index: 1,
                value: "1/1".into()
            })
        );
        assert_eq!(
            parse_distribution("1/2,0,1/2"),
            Err(Error::ProbabilityOutOfRange {
                index: 2,
                value: "0/1".into()
            })
        );
        assert!(matches!(
            parse_distribution("3/2,-1/2"),
            Err(Error::ProbabilityOutOfRange { index: 1, .. })
        ));
    }

    #[test]
    fn rejects_wrong_sum() {
        assert_eq!(
            parse_distribution("1/2,1/3"),
            Err(Error::SumNotOne { sum: "5/6".into() })
        );
    }

    #[test]
    fn parse_rational_grammar() {
        assert_eq!(parse_rational("+3"), Some(r(3, 1)));
        assert_eq!(parse_rational("-3/6"), Some(r(-1, 2)));
        assert_eq!(parse_rational("007/014"), Some(r(1, 2)));
        assert_eq!(parse_rational(""), None);
        assert_eq!(parse_rational("-"), None);
        assert_eq!(parse_rational("1/"), None);
        assert_eq!(parse_rational("1 /2"), None);
        assert_eq!(parse_rational("1e3"), None);
    }

    #[test]
    fn validate_query_cases() {
        let die = AlphabetDistribution::uniform(6).unwrap();
        assert!(validate_query(&die, &RunSpec::uniform(3, 6).unwrap(), 1).is_ok());

        let coin = AlphabetDistribution::uniform(2).unwrap();
        assert!(validate_query(&coin, &RunSpec::new(vec![3, 2]).unwrap(), 2).is_ok());
        assert_eq!(
            validate_query(&coin, &RunSpec::uniform(3, 2).unwrap(), 3),
            Err(Error::JOutOfRange { j: 3, r: 2 })
        );
        assert_eq!(
            validate_query(&coin, &RunSpec::uniform(3, 2).unwrap(), 0),
            Err(Error::JOutOfRange { j: 0, r: 2 })
        );
        assert_eq!(
            validate_query(&coin, &RunSpec::uniform(3, 3).unwrap(), 1),
            Err(Error::RunSpecLength {
                expected: 2,
                found: 3
            })
        );
    }

    #[test]
    fn run_spec_parsing() {
        assert_eq!(parse_runs("3", 4).unwrap().lengths(), &[3, 3, 3, 3]);
        assert_eq!(parse_runs("3, 2,4", 3).unwrap().lengths(), &[3, 2, 4]);
        assert!(matches!(
            parse_runs("3,0", 2),
            Err(Error::InvalidRunLength { index: 2, .. })
        ));
        assert!(matches!(
            parse_runs("+3", 2),
            Err(Error::InvalidRunLength { index: 1, .. })
        ));
        assert!(RunSpec::new(vec![1, 0]).is_err());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(decimal_string(&r(7, 1), 12), "7");
        assert_eq!(decimal_string(&r(6321, 10), 12), "632.1");
        assert_eq!(decimal_string(&r(1, 3), 12), "0.333333333333");
        assert_eq!(decimal_string(&r(2, 3), 12), "0.666666666667");
        assert_eq!(decimal_string(&r(-1, 8), 2), "-0.12");
        assert_eq!(decimal_string(&r(3, 8), 2), "0.38");
        assert_eq!(decimal_string(&r(999_999, 1), 3), "1000000");
        assert_eq!(decimal_string(&r(1, 10_000_000), 12), "1e-7");
        assert_eq!(decimal_string(&r(0, 1), 12), "0");
        assert_eq!(decimal_string(&integer(10).pow(25), 12), "1e25");
    }

    #[test]
    fn letter_set_basics() {
        let s = LetterSet::from_letters([0, 2]);
        assert!(s.contains(0) && !s.contains(1) && s.contains(2));
        assert_eq!(s.len(), 2);
        assert_eq!(s.to_string(), "{1,3}");
        assert_eq!(LetterSet::full(3).bits(), 0b111);
    }

    fn weights() -> impl Strategy<Value = Vec<u64>> {
        prop::collection::vec(1u64..50, 2..7)
    }

    proptest! {
        #[test]
        fn render_parse_round_trip(w in weights()) {
            let d = AlphabetDistribution::from_weights(&w).unwrap();
            let again = parse_distribution(&d.to_string()).unwrap();
            prop_assert_eq!(&again, &d);
            prop_assert_eq!(again.to_string(), d.to_string());
        }

        #[test]
        fn stored_in_lowest_terms(w in weights()) {
            let d = AlphabetDistribution::from_weights(&w).unwrap();
            for p in d.probs() {
                prop_assert!(p.numer().gcd(p.denom()).is_one());
                prop_assert!(p.denom().is_positive());
            }
        }
    }
}

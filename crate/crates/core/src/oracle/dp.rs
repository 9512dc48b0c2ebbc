use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::domain::{AlphabetDistribution, ExactRational, LetterSet, RunSpec};
use crate::error::{Error, Result};

/// Refusal threshold for the set-resolved dynamic program.
pub const MAX_DP_LETTERS: usize = 12;

/// Context of a prefix: every letter that has had its run so far, the last
/// letter, and its trailing run length (`0` when untracked).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LawKey {
    pub completed: LetterSet,
    pub last: Option<usize>,
    pub run: u32,
}

/// Exact joint law of [`LawKey`] over all words of length `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrefixLaw {
    pub n: usize,
    pub mass: BTreeMap<LawKey, ExactRational>,
}

impl PrefixLaw {
    /// Law of the empty word.
    pub fn empty_word() -> Self {
        let key = LawKey {
            completed: LetterSet::empty(),
            last: None,
            run: 0,
        };
        Self {
            n: 0,
            mass: BTreeMap::from([(key, ExactRational::one())]),
        }
    }

    pub fn total(&self) -> ExactRational {
        self.mass.values().sum()
    }

    /// `P(E_{n,M})`: exactly the letters of `set` have had their run.
    pub fn event_prob(&self, set: LetterSet) -> ExactRational {
        self.mass
            .iter()
            .filter(|(k, _)| k.completed == set)
            .map(|(_, m)| m)
            .sum()
    }

    /// `P{Y_n = q}` for `q = 0..=r`.
    pub fn y_dist(&self, r: usize) -> Vec<ExactRational> {
        let mut out = vec![ExactRational::zero(); r + 1];
        for (k, m) in &self.mass {
            out[k.completed.len()] += m;
        }
        out
    }
}

fn check_size(r: usize) -> Result<()> {
    if r > MAX_DP_LETTERS {
        return Err(Error::AlphabetTooLarge {
            r,
            limit: MAX_DP_LETTERS,
            what: "the prefix dynamic program",
        });
    }
    Ok(())
}

fn extend(key: LawKey, letter: usize, h: u32) -> LawKey {
    if key.completed.contains(letter) {
        return LawKey {
            completed: key.completed,
            last: Some(letter),
            run: 0,
        };
    }
    let run = match key.last {
        Some(l) if l == letter => key.run + 1,
        _ => 1,
    };
    if run == h {
        LawKey {
            completed: key.completed.with(letter),
            last: Some(letter),
            run: 0,
        }
    } else {
        LawKey {
            completed: key.completed,
            last: Some(letter),
            run,
        }
    }
}

/// Law at length `n + 1` from the law at length `n`.
pub fn dp_step(law: &PrefixLaw, dist: &AlphabetDistribution, runs: &RunSpec) -> PrefixLaw {
    let mut mass: BTreeMap<LawKey, ExactRational> = BTreeMap::new();
    for (key, m) in &law.mass {
        for (letter, p) in dist.probs().iter().enumerate() {
            let next = extend(*key, letter, runs.length(letter));
            *mass.entry(next).or_insert_with(ExactRational::zero) += m * p;
        }
    }
    PrefixLaw { n: law.n + 1, mass }
}

/// Law of the first `n` letters.
pub fn dp_law(dist: &AlphabetDistribution, runs: &RunSpec, n: usize) -> Result<PrefixLaw> {
    check_size(dist.len())?;
    let mut law = PrefixLaw::empty_word();
    for _ in 0..n {
        law = dp_step(&law, dist, runs);
    }
    Ok(law)
}

pub fn dp_event_prob(
    dist: &AlphabetDistribution,
    runs: &RunSpec,
    n: usize,
    set: LetterSet,
) -> Result<ExactRational> {
    Ok(dp_law(dist, runs, n)?.event_prob(set))
}

/// `P{Y_n = q}` for `q = 0..=r`.
pub fn dp_y_dist(
    dist: &AlphabetDistribution,
    runs: &RunSpec,
    n: usize,
) -> Result<Vec<ExactRational>> {
    Ok(dp_law(dist, runs, n)?.y_dist(dist.len()))
}

/// `dp_y_dist` for every `n = 0..=n_max` in one forward pass.
pub fn dp_y_dist_series(
    dist: &AlphabetDistribution,
    runs: &RunSpec,
    n_max: usize,
) -> Result<Vec<Vec<ExactRational>>> {
    check_size(dist.len())?;
    let mut law = PrefixLaw::empty_word();
    let mut out = vec![law.y_dist(dist.len())];
    for _ in 0..n_max {
        law = dp_step(&law, dist, runs);
        out.push(law.y_dist(dist.len()));
    }
    Ok(out)
}

//! Run-detecting automaton as an absorbing Markov chain, with exact moments
//! and CDF of the absorption time.
//!
//! A transient state remembers the set of letters that already completed
//! their run, the letter currently being repeated and the length of that
//! trailing run. Once a letter is completed its runs are no longer tracked.
//! Reading the letter that brings the number of completed letters to `j`
//! moves to the single absorbing sink.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use num_traits::{One, Zero};

use crate::domain::{render_rational, ExactRational, LetterSet, Moments, Query};
use crate::error::{Error, Result};

/// Transient state of the run detector.
///
/// `run` is the trailing run length `1 <= run < h_current` when the current
/// letter is still open, and `0` when there is no current letter (start) or
/// the current letter is already completed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChainState {
    pub completed: LetterSet,
    pub current: Option<usize>,
    pub run: u32,
}

impl ChainState {
    pub const START: ChainState = ChainState {
        completed: LetterSet::empty(),
        current: None,
        run: 0,
    };

    /// Successor after reading `letter`, before checking for absorption.
    pub fn read(self, letter: usize, runs: &[u32]) -> ChainState {
        let completed = self.completed;
        if completed.contains(letter) {
            return ChainState {
                completed,
                current: Some(letter),
                run: 0,
            };
        }
        let run = if self.current == Some(letter) {
            self.run + 1
        } else {
            1
        };
        if run >= runs[letter] {
            ChainState {
                completed: completed.with(letter),
                current: Some(letter),
                run: 0,
            }
        } else {
            ChainState {
                completed,
                current: Some(letter),
                run,
            }
        }
    }

    /// Word-style label: the trailing run written out, e.g. `"22"`.
    /// Completed letters are shown in braces.
    pub fn label(&self) -> String {
        let mut s = String::new();
        if !self.completed.is_empty() {
            s.push_str(&self.completed.to_string());
        }
        if let Some(l) = self.current {
            if self.run == 0 {
                let _ = write!(s, "[{}]", l + 1);
            } else {
                s.push_str(&(l + 1).to_string().repeat(self.run as usize));
            }
        }
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Target {
    State(usize),
    Absorbed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub letter: usize,
    pub prob: ExactRational,
    pub target: Target,
}

/// Finite absorbing chain with exact transition probabilities.
#[derive(Clone, Debug)]
pub struct AbsorbingChain {
    states: Vec<ChainState>,
    transitions: Vec<Vec<Transition>>,
    start: usize,
}

impl AbsorbingChain {
    /// Builds a chain from explicit parts and checks its invariants.
    pub fn from_parts(
        states: Vec<ChainState>,
        transitions: Vec<Vec<Transition>>,
        start: usize,
    ) -> Result<Self> {
        let chain = Self {
            states,
            transitions,
            start,
        };
        chain.validate()?;
        Ok(chain)
    }

    pub fn states(&self) -> &[ChainState] {
        &self.states
    }

    pub fn transitions(&self, state: usize) -> &[Transition] {
        &self.transitions[state]
    }

    pub fn start(&self) -> usize {
        self.start
    }

    /// Number of transient states.
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    fn validate(&self) -> Result<()> {
        let n = self.states.len();
        if self.start >= n || self.transitions.len() != n {
            return Err(Error::ChainInvariant(
                "start or transition table out of range".into(),
            ));
        }
        for (s, row) in self.transitions.iter().enumerate() {
            let sum: ExactRational = row.iter().map(|t| &t.prob).sum();
            if !sum.is_one() {
                return Err(Error::ChainInvariant(format!(
                    "row {s} sums to {}",
                    render_rational(&sum)
                )));
            }
            if row
                .iter()
                .any(|t| matches!(t.target, Target::State(k) if k >= n))
            {
                return Err(Error::ChainInvariant(format!(
                    "row {s} targets a missing state"
                )));
            }
        }

        // Every state must reach the sink along positive-probability edges.
        let mut reverse: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut queue = VecDeque::new();
        let mut reaches = vec![false; n];
        for (s, row) in self.transitions.iter().enumerate() {
            for t in row.iter().filter(|t| !t.prob.is_zero()) {
                match t.target {
                    Target::State(k) => reverse[k].push(s),
                    Target::Absorbed => {
                        if !reaches[s] {
                            reaches[s] = true;
                            queue.push_back(s);
                        }
                    }
                }
            }
        }
        while let Some(k) = queue.pop_front() {
            for &s in &reverse[k] {
                if !reaches[s] {
                    reaches[s] = true;
                    queue.push_back(s);
                }
            }
        }
        if let Some(s) = reaches.iter().position(|&r| !r) {
            return Err(Error::ChainInvariant(format!(
                "state {s} cannot reach absorption"
            )));
        }
        Ok(())
    }

    /// Text listing: `#`-prefixed state lines, then one
    /// `state_index letter prob target` line per transition.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.states.iter().enumerate() {
            let current = s.current.map_or("-".to_string(), |l| (l + 1).to_string());
            let _ = writeln!(
                out,
                "# state {i} completed={} current={current} run={}{}",
                s.completed,
                s.run,
                if i == self.start { " start" } else { "" }
            );
        }
        for (i, row) in self.transitions.iter().enumerate() {
            for t in row {
                let target = match t.target {
                    Target::State(k) => k.to_string(),
                    Target::Absorbed => "ABSORBED".to_string(),
                };
                let _ = writeln!(
                    out,
                    "{i} {} {} {target}",
                    t.letter + 1,
                    render_rational(&t.prob)
                );
            }
        }
        out
    }
}

/// Chain whose absorption time has the law of `B_j`.
///
/// States are numbered in BFS order from the start state, letters ascending.
pub fn build_run_chain(query: &Query) -> Result<AbsorbingChain> {
    let r = query.r();
    if r > LetterSet::MAX_LETTERS {
        return Err(Error::AlphabetTooLarge {
            r,
            limit: LetterSet::MAX_LETTERS,
            what: "the run chain",
        });
    }
    let runs = query.runs().lengths();
    let probs = query.dist().probs();
    let j = query.j();

    let mut index: HashMap<ChainState, usize> = HashMap::new();
    let mut states = vec![ChainState::START];
    let mut transitions: Vec<Vec<Transition>> = Vec::new();
    index.insert(ChainState::START, 0);

    let mut cursor = 0;
    while cursor < states.len() {
        let state = states[cursor];
        let row = (0..r)
            .map(|letter| {
                let next = state.read(letter, runs);
                let target = if next.completed.len() >= j {
                    Target::Absorbed
                } else {
                    let k = *index.entry(next).or_insert_with(|| {
                        states.push(next);
                        states.len() - 1
                    });
                    Target::State(k)
                };
                Transition {
                    letter,
                    prob: probs[letter].clone(),
                    target,
                }
            })
            .collect();
        transitions.push(row);
        cursor += 1;
    }
    AbsorbingChain::from_parts(states, transitions, 0)
}

/// Upper bound on the number of transient states:
/// `1 + sum_{|C| < j} sum_l (l in C ? 1 : h_l - 1)`.
pub fn state_count_bound(query: &Query) -> u128 {
    let r = query.r();
    let runs = query.runs().lengths();
    let mut bound: u128 = 1;
    for bits in 0..(1u128 << r) {
        let c = LetterSet::from_bits(bits as u64);
        if c.len() >= query.j() {
            continue;
        }
        bound += (0..r)
            .map(|l| {
                if c.contains(l) {
                    1
                } else {
                    runs[l] as u128 - 1
                }
            })
            .sum::<u128>();
    }
    bound
}

/// Dense LU factorization over the rationals with row pivoting.
struct Lu {
    rows: Vec<Vec<ExactRational>>,
    perm: Vec<usize>,
}

fn bit_size(x: &ExactRational) -> u64 {
    x.numer().bits() + x.denom().bits()
}

impl Lu {
    fn factor(mut a: Vec<Vec<ExactRational>>) -> Result<Self> {
        let n = a.len();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let pivot = (k..n)
                .filter(|&i| !a[i][k].is_zero())
                .min_by_key(|&i| bit_size(&a[i][k]))
                .ok_or(Error::SingularSystem)?;
            a.swap(k, pivot);
            perm.swap(k, pivot);
            let inv = a[k][k].recip();
            let (upper, lower) = a.split_at_mut(k + 1);
            let pivot_row = &upper[k];
            for row in lower.iter_mut() {
                if row[k].is_zero() {
                    continue;
                }
                let factor = &row[k] * &inv;
                for c in k + 1..n {
                    if !pivot_row[c].is_zero() {
                        let delta = &factor * &pivot_row[c];
                        row[c] -= delta;
                    }
                }
                row[k] = factor;
            }
        }
        Ok(Self { rows: a, perm })
    }

    fn solve(&self, b: &[ExactRational]) -> Vec<ExactRational> {
        let n = self.rows.len();
        let mut y: Vec<ExactRational> = self.perm.iter().map(|&p| b[p].clone()).collect();
        for i in 0..n {
            for k in 0..i {
                if !self.rows[i][k].is_zero() {
                    let delta = &self.rows[i][k] * &y[k];
                    y[i] -= delta;
                }
            }
        }
        for i in (0..n).rev() {
            for c in i + 1..n {
                if !self.rows[i][c].is_zero() {
                    let delta = &self.rows[i][c] * &y[c];
                    y[i] -= delta;
                }
            }
            y[i] = &y[i] / &self.rows[i][i];
        }
        y
    }
}

/// Exact expectation and variance of the absorption time from the start
/// state, solving `t = 1 + Q t` and `s = 1 + 2 Q t + Q s`.
pub fn chain_moments(chain: &AbsorbingChain) -> Result<Moments> {
    let n = chain.len();
    // Completed sets only grow, so ordering by their size makes I - Q block
    // upper triangular and keeps elimination inside the diagonal blocks.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&s| {
        (
            chain.states[s].completed.len(),
            chain.states[s].completed,
            s,
        )
    });
    let mut position = vec![0; n];
    for (p, &s) in order.iter().enumerate() {
        position[s] = p;
    }

    let mut q = vec![vec![ExactRational::zero(); n]; n];
    for (s, row) in chain.transitions.iter().enumerate() {
        for t in row {
            if let Target::State(k) = t.target {
                q[position[s]][position[k]] += &t.prob;
            }
        }
    }
    let a: Vec<Vec<ExactRational>> = q
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(c, v)| if i == c { ExactRational::one() - v } else { -v })
                .collect()
        })
        .collect();
    let lu = Lu::factor(a)?;

    let ones = vec![ExactRational::one(); n];
    let t = lu.solve(&ones);
    let rhs: Vec<ExactRational> = q
        .iter()
        .map(|row| {
            let qt: ExactRational = row
                .iter()
                .zip(&t)
                .filter(|(v, _)| !v.is_zero())
                .map(|(v, x)| v * x)
                .sum();
            ExactRational::one() + qt * ExactRational::from_integer(2.into())
        })
        .collect();
    let s = lu.solve(&rhs);

    let start = position[chain.start];
    let expectation = t[start].clone();
    let variance = &s[start] - &expectation * &expectation;
    Ok(Moments {
        expectation,
        variance: Some(variance),
    })
}

/// `P{absorption time <= n}` for `n = 0..=n_max`, by exact distribution pushes.
pub fn chain_waiting_cdfs(chain: &AbsorbingChain, n_max: usize) -> Vec<ExactRational> {
    let n = chain.len();
    let mut mass = vec![ExactRational::zero(); n];
    mass[chain.start] = ExactRational::one();
    let mut absorbed = ExactRational::zero();
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(absorbed.clone());
    for _ in 0..n_max {
        let mut next = vec![ExactRational::zero(); n];
        for (s, m) in mass.iter().enumerate() {
            if m.is_zero() {
                continue;
            }
            for t in &chain.transitions[s] {
                let flow = m * &t.prob;
                match t.target {
                    Target::State(k) => next[k] += flow,
                    Target::Absorbed => absorbed += flow,
                }
            }
        }
        mass = next;
        out.push(absorbed.clone());
    }
    out
}

/// `P{absorption time <= n}`.
pub fn chain_waiting_cdf(chain: &AbsorbingChain, n: usize) -> ExactRational {
    chain_waiting_cdfs(chain, n)
        .pop()
        .unwrap_or_else(ExactRational::zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{integer, rational, validate_query, AlphabetDistribution, RunSpec};

    fn query(weights: &[u64], h: &[u32], j: usize) -> Query {
        let d = AlphabetDistribution::from_weights(weights).unwrap();
        validate_query(&d, &RunSpec::new(h.to_vec()).unwrap(), j).unwrap()
    }

    #[test]
    fn any_three_run_on_two_letters_has_five_states() {
        let chain = build_run_chain(&query(&[1, 1], &[3, 3], 1)).unwrap();
        let mut labels: Vec<String> = chain.states().iter().map(ChainState::label).collect();
        labels.sort();
        assert_eq!(labels, vec!["", "1", "11", "2", "22"]);
        assert_eq!(chain.states()[chain.start()], ChainState::START);
    }

    #[test]
    fn run_length_one_absorbs_immediately() {
        let chain = build_run_chain(&query(&[1, 1], &[1, 1], 1)).unwrap();
        assert_eq!(chain.len(), 1);
        assert!(chain
            .transitions(0)
            .iter()
            .all(|t| t.target == Target::Absorbed));
        let m = chain_moments(&chain).unwrap();
        assert_eq!(m.expectation, integer(1));
        assert_eq!(m.variance, Some(integer(0)));
        assert_eq!(chain_waiting_cdf(&chain, 0), integer(0));
        assert_eq!(chain_waiting_cdf(&chain, 1), integer(1));
    }

    #[test]
    fn coin_h2_collect_both() {
        let q = query(&[1, 1], &[2, 2], 2);
        let chain = build_run_chain(&q).unwrap();
        // start, "1", "2", {1}[1], {1}"2", {2}[2], {2}"1"
        assert_eq!(chain.len(), 7);
        assert!(chain.len() as u128 <= state_count_bound(&q));
        assert_eq!(chain_moments(&chain).unwrap().expectation, integer(9));
    }

    #[test]
    fn fair_die_h2() {
        let chain = build_run_chain(&query(&[1; 6], &[2; 6], 1)).unwrap();
        let m = chain_moments(&chain).unwrap();
        assert_eq!(m.expectation, integer(7));
        assert_eq!(m.variance, Some(integer(30)));
    }

    #[test]
    fn coin_h3_expectation() {
        let chain = build_run_chain(&query(&[1, 1], &[3, 3], 1)).unwrap();
        assert_eq!(chain_moments(&chain).unwrap().expectation, integer(7));
    }

    #[test]
    fn coin_h2_cdf() {
        let chain = build_run_chain(&query(&[1, 1], &[2, 2], 1)).unwrap();
        let cdf = chain_waiting_cdfs(&chain, 3);
        assert_eq!(cdf[0], integer(0));
        assert_eq!(cdf[1], integer(0));
        assert_eq!(cdf[2], rational(1, 2));
        assert_eq!(cdf[3], rational(3, 4));
        assert_eq!(chain_waiting_cdf(&chain, 2), rational(1, 2));
    }

    #[test]
    fn cdf_is_nondecreasing_and_approaches_one() {
        let chain = build_run_chain(&query(&[2, 1, 1], &[2, 3, 1], 2)).unwrap();
        let cdf = chain_waiting_cdfs(&chain, 80);
        for w in cdf.windows(2) {
            assert!(w[0] <= w[1]);
        }
        assert!(*cdf.last().unwrap() > rational(999, 1000));
        assert!(*cdf.last().unwrap() < integer(1));
    }

    #[test]
    fn rejects_non_absorbing_chain() {
        let state = ChainState::START;
        let transitions = vec![vec![Transition {
            letter: 0,
            prob: integer(1),
            target: Target::State(0),
        }]];
        assert!(matches!(
            AbsorbingChain::from_parts(vec![state], transitions, 0),
            Err(Error::ChainInvariant(_))
        ));
    }

    #[test]
    fn rejects_bad_row_sum() {
        let transitions = vec![vec![Transition {
            letter: 0,
            prob: rational(1, 2),
            target: Target::Absorbed,
        }]];
        assert!(matches!(
            AbsorbingChain::from_parts(vec![ChainState::START], transitions, 0),
            Err(Error::ChainInvariant(_))
        ));
    }

    #[test]
    fn singular_system_reported() {
        let zero_row = vec![vec![ExactRational::zero(); 2]; 2];
        assert!(matches!(Lu::factor(zero_row), Err(Error::SingularSystem)));
    }

    #[test]
    fn dump_format() {
        let chain = build_run_chain(&query(&[1, 1], &[2, 2], 1)).unwrap();
        let text = chain.dump();
        let transitions: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(
            transitions,
            vec![
                "0 1 1/2 1",
                "0 2 1/2 2",
                "1 1 1/2 ABSORBED",
                "1 2 1/2 2",
                "2 1 1/2 1",
                "2 2 1/2 ABSORBED",
            ]
        );
        assert!(text.starts_with("# state 0 completed={} current=- run=0 start\n"));
    }

    #[test]
    fn state_bound_holds_on_grid() {
        for h in [[1, 1, 1], [2, 3, 4], [4, 4, 4], [1, 2, 1]] {
            for j in 1..=3 {
                let q = query(&[1, 2, 3], &h, j);
                let chain = build_run_chain(&q).unwrap();
                assert!(chain.len() as u128 <= state_count_bound(&q));
            }
        }
    }
}

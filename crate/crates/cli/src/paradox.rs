//! Search for pairs of dice whose ordering by mean waiting time for a run of
//! two equal faces is reversed for runs of three.
//!
//! Candidates are the dice with face probabilities `k_i / D`, `k_i >= 1`.
//! Relabelling faces does not change any waiting time, so each die is taken
//! once, as a non-increasing weight vector.

use rayon::prelude::*;
use serde::Serialize;

use runwait_core::closed_form::expect_first;
use runwait_core::{render_rational, AlphabetDistribution, ExactRational, RunSpec};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Die {
    pub weights: Vec<u64>,
    pub dist: AlphabetDistribution,
    /// `E(B_1)` for runs of two.
    pub wait2: ExactRational,
    /// `E(B_1)` for runs of three.
    pub wait3: ExactRational,
}

impl Die {
    pub fn new(weights: Vec<u64>) -> Result<Self, CliError> {
        let dist = AlphabetDistribution::from_weights(&weights)?;
        let r = dist.len();
        let wait2 = expect_first(&dist, &RunSpec::uniform(2, r)?);
        let wait3 = expect_first(&dist, &RunSpec::uniform(3, r)?);
        Ok(Self {
            weights,
            dist,
            wait2,
            wait3,
        })
    }
}

/// `a` waits longer than `b` for two in a row but shorter for three.
pub fn is_paradox_pair(a: &Die, b: &Die) -> bool {
    a.wait2 > b.wait2 && a.wait3 < b.wait3
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairReport {
    pub die_a: String,
    pub die_b: String,
    pub a_wait2: String,
    pub b_wait2: String,
    pub a_wait3: String,
    pub b_wait3: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchReport {
    pub r: usize,
    pub denominator: u64,
    pub candidates: usize,
    pub pairs: Vec<PairReport>,
}

/// Non-increasing compositions of `total` into exactly `parts` positive parts,
/// in lexicographically decreasing order.
pub fn partitions(total: u64, parts: usize) -> Vec<Vec<u64>> {
    fn go(rest: u64, parts: usize, cap: u64, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if parts == 0 {
            if rest == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        let parts_u = parts as u64;
        if rest < parts_u {
            return;
        }
        let hi = cap.min(rest - (parts_u - 1));
        let lo = rest.div_ceil(parts_u);
        for k in (lo..=hi).rev() {
            prefix.push(k);
            go(rest - k, parts - 1, k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(
        total,
        parts,
        total,
        &mut Vec::with_capacity(parts),
        &mut out,
    );
    out
}

pub fn search(r: usize, denominator: u64, limit: usize) -> Result<SearchReport, CliError> {
    if r < 2 {
        return Err(CliError::Validation(format!("need r >= 2, got {r}")));
    }
    if denominator < r as u64 {
        return Err(CliError::Validation(format!(
            "grid denominator {denominator} is smaller than r={r}"
        )));
    }
    let dice: Vec<Die> = partitions(denominator, r)
        .into_par_iter()
        .map(Die::new)
        .collect::<Result<_, _>>()?;

    let mut pairs = Vec::new();
    'outer: for a in &dice {
        for b in &dice {
            if pairs.len() >= limit {
                break 'outer;
            }
            if is_paradox_pair(a, b) {
                pairs.push(PairReport {
                    die_a: a.dist.to_string(),
                    die_b: b.dist.to_string(),
                    a_wait2: render_rational(&a.wait2),
                    b_wait2: render_rational(&b.wait2),
                    a_wait3: render_rational(&a.wait3),
                    b_wait3: render_rational(&b.wait3),
                });
            }
        }
    }
    Ok(SearchReport {
        r,
        denominator,
        candidates: dice.len(),
        pairs,
    })
}

impl SearchReport {
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "r={} denominator={} candidates={}\n",
            self.r, self.denominator, self.candidates
        );
        if self.pairs.is_empty() {
            out.push_str("none found\n");
        }
        for p in &self.pairs {
            out.push_str(&format!(
                "A={} B={} E_A(h=2)={} > E_B(h=2)={} and E_A(h=3)={} < E_B(h=3)={}\n",
                p.die_a, p.die_b, p.a_wait2, p.b_wait2, p.a_wait3, p.b_wait3
            ));
        }
        out
    }
}

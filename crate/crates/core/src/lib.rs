//! Exact moments of the waiting time until runs of equal letters appear in an
//! infinite i.i.d. random word.
//!
//! A word `X1 X2 ...` is drawn letter by letter from a finite alphabet with
//! fixed probabilities `p1..pr`. Letter `i` *completes its run* once `h_i`
//! consecutive copies of it have been seen. `B_j` is the first position at
//! which at least `j` distinct letters have completed their runs.
//!
//! Three independent routes compute moments of `B_j` in exact rational
//! arithmetic:
//!
//! * [`closed_form`]: closed expressions for `E(B_1)`, `V(B_1)` and the
//!   rational generating function of `P{Y_n = 0}`.
//! * [`operator_calc`]: `E(B_j)` for every `j` as a weighted sum of Smirnov
//!   generating function evaluations.
//! * [`chain`]: an absorbing Markov chain built from a run-detecting
//!   automaton, solved exactly for first and second moments.
//!
//! [`oracle`] holds the verification engines (prefix dynamic program, tail-sum
//! enclosure, seeded Monte Carlo) used to cross-check the three routes.

pub mod chain;
pub mod closed_form;
pub mod domain;
pub mod operator_calc;
pub mod oracle;

mod error;

pub use domain::{
    parse_distribution, parse_rational, parse_runs, render_rational, validate_query,
    AlphabetDistribution, ExactRational, LetterSet, Moments, Query, RunSpec,
};
pub use error::{Error, Result};

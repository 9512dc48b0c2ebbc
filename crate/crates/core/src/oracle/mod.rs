//! Verification engines that do not share code with the three exact routes:
//! an exact dynamic program over word prefixes, a rigorous tail-sum
//! enclosure of `E(B_j)`, and a seeded Monte Carlo simulator.

mod dp;
mod simulate;
mod tail;

pub use dp::{
    dp_event_prob, dp_law, dp_step, dp_y_dist, dp_y_dist_series, LawKey, PrefixLaw, MAX_DP_LETTERS,
};
pub use simulate::{simulate_waiting, SimulationStats, TRIALS_PER_BLOCK};
pub use tail::{tail_sum_expectation, TailEnclosure, FIXED_POINT_BITS};

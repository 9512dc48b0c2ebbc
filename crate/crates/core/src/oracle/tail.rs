//! Rigorous enclosure of `E(B_j) = sum_{n>=0} P{B_j > n}`.
//!
//! The survival masses are pushed through the run chain in fixed-point
//! arithmetic with `FIXED_POINT_BITS` fractional bits, once rounded down and
//! once rounded up, so that both partial sums bound the exact ones. The
//! remainder after `N` terms is bounded by
//! `sum_{n>=N} P{B_j > n} <= P{B_j > N} * L / delta`, where `L` is the number
//! of transient states and `delta` the smallest probability, over all
//! transient states, of absorbing within `L` steps.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::chain::{build_run_chain, AbsorbingChain, Target};
use crate::domain::{ExactRational, Query};
use crate::error::{Error, Result};

pub const FIXED_POINT_BITS: u32 = 62;
const ONE: u128 = 1 << FIXED_POINT_BITS;

/// Lower and upper bounds on `E(B_j)` after `steps` survival terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TailEnclosure {
    pub lower: ExactRational,
    pub upper: ExactRational,
    pub steps: usize,
    /// Look-ahead `L` of the absorption bound.
    pub horizon: usize,
    /// Lower bound on the `L`-step absorption probability.
    pub delta: ExactRational,
}

impl TailEnclosure {
    pub fn width(&self) -> ExactRational {
        &self.upper - &self.lower
    }

    pub fn contains(&self, x: &ExactRational) -> bool {
        self.lower <= *x && *x <= self.upper
    }
}

fn to_fixed(p: &ExactRational, round_up: bool) -> u128 {
    let scaled = p.numer() << FIXED_POINT_BITS;
    let (q, rem) = (&scaled / p.denom(), &scaled % p.denom());
    let q = q.to_u128().expect("probability below one");
    if round_up && !rem.is_zero() {
        q + 1
    } else {
        q
    }
}

fn from_fixed(x: u128) -> ExactRational {
    BigRational::new(BigInt::from(x), BigInt::from(ONE))
}

fn mul_down(a: u128, p: u128) -> u128 {
    (a * p) >> FIXED_POINT_BITS
}

fn mul_up(a: u128, p: u128) -> u128 {
    (a * p + ONE - 1) >> FIXED_POINT_BITS
}

struct Edge {
    from: usize,
    to: Option<usize>,
    lo: u128,
    hi: u128,
}

fn edges(chain: &AbsorbingChain) -> Vec<Edge> {
    (0..chain.len())
        .flat_map(|s| {
            chain.transitions(s).iter().map(move |t| Edge {
                from: s,
                to: match t.target {
                    Target::State(k) => Some(k),
                    Target::Absorbed => None,
                },
                lo: to_fixed(&t.prob, false),
                hi: to_fixed(&t.prob, true),
            })
        })
        .collect()
}

/// `min_s P_s{absorbed within horizon steps}`, rounded down.
fn absorption_floor(n: usize, edges: &[Edge], horizon: usize) -> u128 {
    let mut within = vec![0u128; n];
    for _ in 0..horizon {
        let mut next = vec![0u128; n];
        for e in edges {
            next[e.from] += match e.to {
                Some(k) => mul_down(within[k], e.lo),
                None => e.lo,
            };
        }
        within = next.into_iter().map(|v| v.min(ONE)).collect();
    }
    within.into_iter().min().unwrap_or(0)
}

/// Encloses `E(B_j)` to within `tol`, pushing at most `n_cap` survival terms.
pub fn tail_sum_expectation(
    query: &Query,
    n_cap: usize,
    tol: &ExactRational,
) -> Result<TailEnclosure> {
    if n_cap == 0 {
        return Err(Error::InvalidArgument("n_cap must be at least 1".into()));
    }
    if *tol <= ExactRational::zero() {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let chain = build_run_chain(query)?;
    let n = chain.len();
    let edges = edges(&chain);
    let horizon = n;
    let delta = absorption_floor(n, &edges, horizon);
    if delta == 0 {
        return Err(Error::TailBoundUnavailable { steps: horizon });
    }
    // Remainder factor L / delta as an exact rational.
    let factor = BigRational::new(
        BigInt::from(horizon) * BigInt::from(ONE),
        BigInt::from(delta),
    );

    let mut lo = vec![0u128; n];
    let mut hi = vec![0u128; n];
    lo[chain.start()] = ONE;
    hi[chain.start()] = ONE;
    let mut lower_sum = BigUint::zero();
    let mut upper_sum = BigUint::zero();
    let mut best_upper: Option<ExactRational> = None;

    let mut steps = 0usize;
    loop {
        let survive_lo: u128 = lo.iter().sum();
        let survive_hi: u128 = hi.iter().sum::<u128>().min(ONE);

        let lower = BigRational::new(BigInt::from(lower_sum.clone()), BigInt::from(ONE));
        let candidate = BigRational::new(BigInt::from(upper_sum.clone()), BigInt::from(ONE))
            + from_fixed(survive_hi) * &factor;
        let upper = match best_upper.take() {
            Some(best) if best < candidate => best,
            _ => candidate,
        };
        if &upper - &lower <= *tol {
            return Ok(TailEnclosure {
                lower,
                upper,
                steps,
                horizon,
                delta: from_fixed(delta),
            });
        }
        if steps == n_cap {
            return Err(Error::TailCapExceeded {
                reached: steps,
                lower: Box::new(lower),
                upper: Box::new(upper),
            });
        }
        best_upper = Some(upper);

        lower_sum += survive_lo;
        upper_sum += survive_hi;
        let mut next_lo = vec![0u128; n];
        let mut next_hi = vec![0u128; n];
        for e in &edges {
            if let Some(k) = e.to {
                next_lo[k] += mul_down(lo[e.from], e.lo);
                next_hi[k] += mul_up(hi[e.from], e.hi);
            }
        }
        lo = next_lo;
        hi = next_hi.into_iter().map(|v| v.min(ONE)).collect();
        steps += 1;
    }
}

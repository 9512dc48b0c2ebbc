use runwait_core::chain::{build_run_chain, chain_moments};
use runwait_core::closed_form::{expect_first, variance_first};
use runwait_core::operator_calc::{expect_j_with_limit, DEFAULT_MAX_LETTERS};
use runwait_core::oracle::{simulate_waiting, tail_sum_expectation};
use runwait_core::{render_rational, ExactRational, Query};

use crate::output::{Diagnostics, QueryResult, Route, Value};
use crate::CliError;

#[derive(Clone, Debug)]
pub struct RouteOptions {
    pub tol: ExactRational,
    pub n_cap: usize,
    pub trials: u64,
    pub seed: u64,
    /// Alphabet-size limit for the operator subset sum.
    pub max_letters: usize,
}

impl Default for RouteOptions {
    fn default() -> Self {
        Self {
            tol: ExactRational::new(1.into(), 1000.into()),
            n_cap: 10_000_000,
            trials: 1_000_000,
            seed: 0,
            max_letters: DEFAULT_MAX_LETTERS,
        }
    }
}

/// Runs one route and packages the result.
pub fn compute(query: &Query, route: Route, opts: &RouteOptions) -> Result<QueryResult, CliError> {
    let mut diagnostics = Diagnostics::default();
    let (expectation, variance) = match route {
        Route::ClosedForm => {
            if query.j() != 1 {
                return Err(CliError::Validation(format!(
                    "route closed has no formula for j={} > 1; use --route operator or --route chain",
                    query.j()
                )));
            }
            let e = expect_first(query.dist(), query.runs());
            let v = variance_first(query.dist(), query.runs());
            (Value::exact(&e), Some(Value::exact(&v)))
        }
        Route::Operator => {
            let e = expect_j_with_limit(query, opts.max_letters)?;
            (Value::exact(&e), None)
        }
        Route::Chain => {
            let chain = build_run_chain(query)?;
            diagnostics.transient_states = Some(chain.len());
            let m = chain_moments(&chain)?;
            (
                Value::exact(&m.expectation),
                m.variance.as_ref().map(Value::exact),
            )
        }
        Route::TailSum => {
            let enc = tail_sum_expectation(query, opts.n_cap, &opts.tol)?;
            diagnostics.steps = Some(enc.steps);
            diagnostics.horizon = Some(enc.horizon);
            diagnostics.delta = Some(render_rational(&enc.delta));
            (Value::enclosure(&enc.lower, &enc.upper), None)
        }
        Route::Simulate => {
            let s = simulate_waiting(query, opts.trials, opts.seed)?;
            diagnostics.seed = Some(opts.seed);
            diagnostics.trials = Some(s.trials);
            diagnostics.std_error = Some(s.std_error);
            (Value::estimate(s.mean), Some(Value::estimate(s.variance)))
        }
    };
    Ok(QueryResult {
        r: query.r(),
        distribution: query.dist().to_string(),
        runs: query.runs().to_string(),
        j: query.j(),
        route,
        expectation,
        variance,
        diagnostics,
    })
}

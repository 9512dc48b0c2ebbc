//! Runs every applicable route on one input and compares them exactly.

use std::fmt::Write as _;

use clap::ValueEnum;
use rayon::prelude::*;

use runwait_core::chain::{build_run_chain, chain_moments, chain_waiting_cdfs};
use runwait_core::closed_form::{expect_first, no_run_prefix_probs, variance_first};
use runwait_core::operator_calc::{expect_all, expect_j};
use runwait_core::oracle::dp_y_dist_series;
use runwait_core::{render_rational, ExactRational, Query};

use crate::CliError;

/// Test hook: perturbs one route so the report must fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Fault {
    Closed,
    Operator,
    Chain,
    Dp,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: String,
    /// `None` on success, otherwise the first counterexample.
    pub counterexample: Option<String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub checks: Vec<CheckOutcome>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckOutcome::passed)
    }

    pub fn first_failure(&self) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| !c.passed())
    }

    /// One `PASS name` / `FAIL name: detail` line per check.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            match &c.counterexample {
                None => {
                    let _ = writeln!(out, "PASS {}", c.name);
                }
                Some(detail) => {
                    let _ = writeln!(out, "FAIL {}: {detail}", c.name);
                }
            }
        }
        out
    }
}

fn nudge(x: ExactRational, active: bool) -> ExactRational {
    if active {
        x + ExactRational::new(1.into(), 1_000_000_000.into())
    } else {
        x
    }
}

fn agree(name: String, values: &[(&str, &ExactRational)]) -> CheckOutcome {
    let (_, first) = values[0];
    let counterexample = values.iter().any(|(_, v)| *v != first).then(|| {
        values
            .iter()
            .map(|(label, v)| format!("{label}={}", render_rational(v)))
            .collect::<Vec<_>>()
            .join(" ")
    });
    CheckOutcome {
        name,
        counterexample,
    }
}

fn checks_for_j(
    query: &Query,
    j: usize,
    n_max: usize,
    dp: &[Vec<ExactRational>],
    fault: Option<Fault>,
) -> Result<Vec<CheckOutcome>, CliError> {
    let r = query.r();
    let qj = query.with_j(j)?;
    let chain = build_run_chain(&qj)?;
    let moments = chain_moments(&chain)?;
    let chain_e = nudge(moments.expectation.clone(), fault == Some(Fault::Chain));
    let operator_e = nudge(expect_j(&qj)?, fault == Some(Fault::Operator));

    let mut out = Vec::new();
    let mut values = vec![("operator", &operator_e), ("chain", &chain_e)];
    let closed_e;
    let all_e;
    if j == 1 {
        closed_e = nudge(
            expect_first(qj.dist(), qj.runs()),
            fault == Some(Fault::Closed),
        );
        values.push(("closed", &closed_e));
    }
    if j == r {
        all_e = expect_all(qj.dist(), qj.runs());
        values.push(("all_runs", &all_e));
    }
    out.push(agree(format!("expectation j={j}"), &values));

    if j == 1 {
        let closed_v = nudge(
            variance_first(qj.dist(), qj.runs()),
            fault == Some(Fault::Closed),
        );
        let chain_v = moments.variance.clone().expect("chain reports variance");
        out.push(agree(
            "variance j=1".to_string(),
            &[("closed", &closed_v), ("chain", &chain_v)],
        ));
    }

    let cdf = chain_waiting_cdfs(&chain, n_max);
    let one = ExactRational::from_integer(1.into());
    let counterexample = (0..=n_max).find_map(|n| {
        let below: ExactRational = dp[n][..j].iter().sum();
        let dp_cdf = nudge(&one - below, fault == Some(Fault::Dp) && n == n_max);
        (dp_cdf != cdf[n]).then(|| {
            format!(
                "n={n} dp={} chain={}",
                render_rational(&dp_cdf),
                render_rational(&cdf[n])
            )
        })
    });
    out.push(CheckOutcome {
        name: format!("cdf identity j={j} n<={n_max}"),
        counterexample,
    });
    Ok(out)
}

/// Cross-checks `j = 1..=j_max` and the `P{Y_n = 0}` series up to `n_max`.
pub fn crosscheck(
    query: &Query,
    j_max: usize,
    n_max: usize,
    fault: Option<Fault>,
) -> Result<Report, CliError> {
    let r = query.r();
    if j_max == 0 || j_max > r {
        return Err(CliError::Validation(format!(
            "jmax must lie in [1, {r}], got {j_max}"
        )));
    }
    let dp = dp_y_dist_series(query.dist(), query.runs(), n_max)?;

    let mut checks = Vec::new();
    let series = no_run_prefix_probs(query.dist(), query.runs(), n_max);
    let counterexample = (0..=n_max).find_map(|n| {
        (series[n] != dp[n][0]).then(|| {
            format!(
                "n={n} series={} dp={}",
                render_rational(&series[n]),
                render_rational(&dp[n][0])
            )
        })
    });
    checks.push(CheckOutcome {
        name: format!("no-run series n<={n_max}"),
        counterexample,
    });

    let per_j: Vec<Result<Vec<CheckOutcome>, CliError>> = (1..=j_max)
        .into_par_iter()
        .map(|j| checks_for_j(query, j, n_max, &dp, fault))
        .collect();
    for outcome in per_j {
        checks.extend(outcome?);
    }
    Ok(Report { checks })
}

use std::process::{Command, Output};

use serde_json::Value as Json;

use runwait_cli::output::QueryResult;
use runwait_core::parse_rational;

const FAIR_DIE: &str = "1/6,1/6,1/6,1/6,1/6,1/6";

fn runwait(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_runwait"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Json {
    let out = runwait(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn fair_die_closed_form() {
    let v = json(&[
        "moments", "--dist", FAIR_DIE, "--runs", "2", "--j", "1", "--route", "closed", "--format",
        "json",
    ]);
    assert_eq!(v["expectation"]["exact"], "7/1");
    assert_eq!(v["variance"]["exact"], "30/1");
    assert_eq!(v["route"], "closed_form");
}

#[test]
fn coin_both_doubles_by_operator() {
    let v = json(&[
        "moments", "--dist", "1/2,1/2", "--runs", "2", "--j", "2", "--route", "operator",
        "--format", "json",
    ]);
    assert_eq!(v["expectation"]["exact"], "9/1");
}

#[test]
fn unit_runs_by_chain() {
    let v = json(&[
        "moments", "--dist", "1/2,1/2", "--runs", "1", "--j", "1", "--route", "chain", "--format",
        "json",
    ]);
    assert_eq!(v["expectation"]["exact"], "1/1");
    assert_eq!(v["variance"]["exact"], "0/1");
    assert!(v["diagnostics"]["transient_states"].is_u64());
}

#[test]
fn json_round_trips_exact_values() {
    let out = runwait(&[
        "moments", "--dist", "2/3,1/3", "--runs", "3,2", "--j", "2", "--route", "chain",
        "--format", "json",
    ]);
    let result: QueryResult = serde_json::from_slice(&out.stdout).unwrap();
    let e = parse_rational(&result.expectation.exact.unwrap()).unwrap();
    let v = parse_rational(&result.variance.unwrap().exact.unwrap()).unwrap();
    let op = json(&[
        "moments", "--dist", "2/3,1/3", "--runs", "3,2", "--j", "2", "--format", "json",
    ]);
    assert_eq!(
        e,
        parse_rational(op["expectation"]["exact"].as_str().unwrap()).unwrap()
    );
    assert!(v > parse_rational("0").unwrap());
}

#[test]
fn csv_has_fixed_columns() {
    let out = runwait(&[
        "moments", "--dist", FAIR_DIE, "--runs", "3", "--route", "closed", "--format", "csv",
    ]);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "r,dist,runs,j,route,expectation_num,expectation_den,variance_num,variance_den"
    );
    assert_eq!(
        lines.next().unwrap(),
        "6,\"1/6,1/6,1/6,1/6,1/6,1/6\",\"3,3,3,3,3,3\",1,closed_form,43,1,1650,1"
    );
}

#[test]
fn tail_and_simulation_routes() {
    let tail = json(&[
        "moments", "--dist", FAIR_DIE, "--runs", "2", "--route", "tail", "--tol", "1/100",
        "--format", "json",
    ]);
    let lo = parse_rational(tail["expectation"]["lower"].as_str().unwrap()).unwrap();
    let hi = parse_rational(tail["expectation"]["upper"].as_str().unwrap()).unwrap();
    let seven = parse_rational("7").unwrap();
    assert!(lo <= seven && seven <= hi);

    let args = [
        "moments", "--dist", FAIR_DIE, "--runs", "2", "--route", "sim", "--trials", "20000",
        "--seed", "5", "--format", "json",
    ];
    let a = json(&args);
    assert_eq!(a, json(&args));
    assert_eq!(a["diagnostics"]["seed"], 5);
    assert!(a["expectation"]["exact"].is_null());
}

#[test]
fn validation_errors_exit_one() {
    for args in [
        &["moments", "--dist", "1/2,1/3", "--runs", "2"][..],
        &["moments", "--dist", "0.5,0.5", "--runs", "2"],
        &["moments", "--dist", "1/2,1/2", "--runs", "0"],
        &["moments", "--dist", "1/2,1/2", "--runs", "2", "--j", "3"],
        &[
            "moments", "--dist", "1/2,1/2", "--runs", "2", "--j", "2", "--route", "closed",
        ],
    ] {
        let out = runwait(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert_eq!(err.lines().count(), 1, "{err}");
        let v: Json = serde_json::from_str(&err).unwrap();
        assert_eq!(v["error"], "validation");
    }
}

#[test]
fn closed_route_points_elsewhere_for_j_above_one() {
    let out = runwait(&[
        "moments", "--dist", "1/2,1/2", "--runs", "2", "--j", "2", "--route", "closed",
    ]);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("operator") && err.contains("chain"), "{err}");
}

#[test]
fn crosscheck_fair_die() {
    let out = runwait(&[
        "crosscheck",
        "--dist",
        FAIR_DIE,
        "--runs",
        "3",
        "--jmax",
        "2",
        "--nmax",
        "15",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.lines().count() >= 4);
    assert!(text.lines().all(|l| l.starts_with("PASS ")), "{text}");
}

#[test]
fn crosscheck_heterogeneous_coin() {
    let out = runwait(&[
        "crosscheck",
        "--dist",
        "2/3,1/3",
        "--runs",
        "3,2",
        "--jmax",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
}

#[test]
fn crosscheck_fault_exits_two() {
    let out = runwait(&[
        "crosscheck",
        "--dist",
        "1/2,1/2",
        "--runs",
        "2",
        "--inject-fault",
        "operator",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let text = stdout(&out);
    let fail = text.lines().find(|l| l.starts_with("FAIL ")).unwrap();
    assert!(fail.contains("operator=3000000001/1000000000"), "{fail}");
    let v: Json = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["error"], "invariant");
}

#[test]
fn paradox_search_finds_a_pair() {
    let out = runwait(&[
        "paradox",
        "--r",
        "6",
        "--grid-denominator",
        "20",
        "--limit",
        "1",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: Json = serde_json::from_slice(&out.stdout).unwrap();
    let pair = &v["pairs"][0];
    for (die, h2, h3) in [
        ("die_a", "a_wait2", "a_wait3"),
        ("die_b", "b_wait2", "b_wait3"),
    ] {
        let dist = pair[die].as_str().unwrap();
        for (h, key) in [("2", h2), ("3", h3)] {
            let m = json(&[
                "moments", "--dist", dist, "--runs", h, "--route", "chain", "--format", "json",
            ]);
            assert_eq!(m["expectation"]["exact"], pair[key]);
        }
    }
}

#[test]
fn chain_dump_lists_transitions() {
    let out = runwait(&["chain", "--dist", "1/2,1/2", "--runs", "2"]);
    let text = stdout(&out);
    assert!(text.lines().any(|l| l == "0 1 1/2 1"));
    assert!(text.lines().any(|l| l.ends_with("ABSORBED")));
}

#[test]
fn threads_flag_is_accepted() {
    let out = runwait(&[
        "--threads",
        "2",
        "crosscheck",
        "--dist",
        "1/2,1/2",
        "--runs",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

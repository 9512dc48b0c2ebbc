use std::fmt::Write as _;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use runwait_core::domain::decimal_string;
use runwait_core::{render_rational, ExactRational};

/// Significant digits of the decimal sidecar.
pub const DECIMAL_DIGITS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    #[value(name = "closed")]
    ClosedForm,
    #[value(name = "operator")]
    Operator,
    #[value(name = "chain")]
    Chain,
    #[value(name = "tail")]
    TailSum,
    #[value(name = "sim")]
    Simulate,
}

impl Route {
    pub fn name(self) -> &'static str {
        match self {
            Route::ClosedForm => "closed_form",
            Route::Operator => "operator",
            Route::Chain => "chain",
            Route::TailSum => "tail_sum",
            Route::Simulate => "simulate",
        }
    }
}

/// A reported number. `exact` is present for exact routes, `lower`/`upper`
/// for enclosures; `decimal` is always derived from one of them or, for the
/// simulator only, from the floating-point estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Value {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
    pub decimal: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<String>,
}

impl Value {
    pub fn exact(x: &ExactRational) -> Self {
        Self {
            exact: Some(render_rational(x)),
            decimal: decimal_string(x, DECIMAL_DIGITS),
            lower: None,
            upper: None,
        }
    }

    /// Enclosure `[lower, upper]`; the decimal is the midpoint.
    pub fn enclosure(lower: &ExactRational, upper: &ExactRational) -> Self {
        let mid = (lower + upper) / ExactRational::from_integer(2.into());
        Self {
            exact: None,
            decimal: decimal_string(&mid, DECIMAL_DIGITS),
            lower: Some(render_rational(lower)),
            upper: Some(render_rational(upper)),
        }
    }

    pub fn estimate(x: f64) -> Self {
        Self {
            exact: None,
            decimal: format!("{x}"),
            lower: None,
            upper: None,
        }
    }

    fn num_den(&self) -> (String, String) {
        match self.exact.as_deref().and_then(|s| s.split_once('/')) {
            Some((n, d)) => (n.to_string(), d.to_string()),
            None => (String::new(), String::new()),
        }
    }

    fn display(&self) -> String {
        match (&self.exact, &self.lower, &self.upper) {
            (Some(x), _, _) => format!("{x} ({})", self.decimal),
            (None, Some(l), Some(u)) => format!("[{l}, {u}] (~{})", self.decimal),
            _ => format!("~{}", self.decimal),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transient_states: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryResult {
    pub r: usize,
    pub distribution: String,
    pub runs: String,
    pub j: usize,
    pub route: Route,
    pub expectation: Value,
    pub variance: Option<Value>,
    pub diagnostics: Diagnostics,
}

pub const CSV_HEADER: [&str; 9] = [
    "r",
    "dist",
    "runs",
    "j",
    "route",
    "expectation_num",
    "expectation_den",
    "variance_num",
    "variance_den",
];

impl QueryResult {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("serializable");
                s.push('\n');
                s
            }
            Format::Csv => self.to_csv(),
            Format::Table => self.to_table(),
        }
    }

    fn to_csv(&self) -> String {
        let (en, ed) = self.expectation.num_den();
        let (vn, vd) = self
            .variance
            .as_ref()
            .map(Value::num_den)
            .unwrap_or_default();
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("in-memory write");
        w.write_record([
            self.r.to_string(),
            self.distribution.clone(),
            self.runs.clone(),
            self.j.to_string(),
            self.route.name().to_string(),
            en,
            ed,
            vn,
            vd,
        ])
        .expect("in-memory write");
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "distribution  {}", self.distribution);
        let _ = writeln!(out, "runs          {}", self.runs);
        let _ = writeln!(out, "j             {}", self.j);
        let _ = writeln!(out, "route         {}", self.route.name());
        let _ = writeln!(out, "expectation   {}", self.expectation.display());
        if let Some(v) = &self.variance {
            let _ = writeln!(out, "variance      {}", v.display());
        }
        let d = &self.diagnostics;
        if let Some(n) = d.transient_states {
            let _ = writeln!(out, "states        {n}");
        }
        if let Some(n) = d.steps {
            let _ = writeln!(out, "steps         {n}");
        }
        if let Some(x) = &d.delta {
            let _ = writeln!(
                out,
                "delta         {x} (horizon {})",
                d.horizon.unwrap_or(0)
            );
        }
        if let (Some(seed), Some(trials)) = (d.seed, d.trials) {
            let _ = writeln!(out, "seed          {seed}");
            let _ = writeln!(out, "trials        {trials}");
        }
        if let Some(se) = d.std_error {
            let _ = writeln!(out, "std_error     {se}");
        }
        out
    }
}

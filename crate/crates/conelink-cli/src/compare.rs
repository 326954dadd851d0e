//! Improvement report between two runs: percentage RMSE reductions and
//! arrival/restoring time differences, in the style of the reference
//! performance tables.

use serde::{Deserialize, Serialize};

use crate::config::ConfigError;
use crate::export::RunSummary;

/// Relative improvement of `candidate` over `baseline` per metric.
/// Percentages are `(baseline - candidate) / baseline * 100`, so a positive
/// value means the candidate tracks better.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub baseline: String,
    pub candidate: String,
    pub rmse_x_improvement_pct: Option<f64>,
    pub rmse_y_improvement_pct: Option<f64>,
    pub rmse_rho_improvement_pct: Option<f64>,
    /// `baseline t_a - candidate t_a` in seconds (negative: candidate slower).
    pub cone_arrival_delta_s: Option<f64>,
    pub baseline_restoring_time_s: Option<f64>,
    pub candidate_restoring_time_s: Option<f64>,
}

fn improvement(baseline: Option<f64>, candidate: Option<f64>) -> Option<f64> {
    match (baseline, candidate) {
        (Some(b), Some(c)) if b != 0.0 => Some((b - c) / b * 100.0),
        _ => None,
    }
}

/// Compare two run summaries.
pub fn compare(baseline: &RunSummary, candidate: &RunSummary) -> Comparison {
    let b = &baseline.metrics;
    let c = &candidate.metrics;
    Comparison {
        baseline: baseline.name.clone(),
        candidate: candidate.name.clone(),
        rmse_x_improvement_pct: improvement(b.rmse_x, c.rmse_x),
        rmse_y_improvement_pct: improvement(b.rmse_y, c.rmse_y),
        rmse_rho_improvement_pct: improvement(b.rmse_rho, c.rmse_rho),
        cone_arrival_delta_s: match (b.cone_arrival_time, c.cone_arrival_time) {
            (Some(tb), Some(tc)) => Some(tb - tc),
            _ => None,
        },
        baseline_restoring_time_s: b.restoring_time,
        candidate_restoring_time_s: c.restoring_time,
    }
}

fn fmt_pct(value: Option<f64>) -> String {
    value.map_or_else(|| "--".into(), |v| format!("{v:+.2}%"))
}

fn fmt_s(value: Option<f64>) -> String {
    value.map_or_else(|| "--".into(), |v| format!("{v:.3} s"))
}

/// Human-readable rendering of a comparison.
pub fn render_comparison(cmp: &Comparison) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "improvement of {} over {}\n",
        cmp.candidate, cmp.baseline
    ));
    out.push_str(&format!(
        "  rmse_x:   {}\n",
        fmt_pct(cmp.rmse_x_improvement_pct)
    ));
    out.push_str(&format!(
        "  rmse_y:   {}\n",
        fmt_pct(cmp.rmse_y_improvement_pct)
    ));
    out.push_str(&format!(
        "  rmse_rho: {}\n",
        fmt_pct(cmp.rmse_rho_improvement_pct)
    ));
    out.push_str(&format!(
        "  t_a delta: {}\n",
        cmp.cone_arrival_delta_s
            .map_or_else(|| "--".into(), |v| format!("{v:+.3} s"))
    ));
    out.push_str(&format!(
        "  restoring time: baseline {} / candidate {}\n",
        fmt_s(cmp.baseline_restoring_time_s),
        fmt_s(cmp.candidate_restoring_time_s)
    ));
    out
}

/// Pick the run to compare out of a metrics document: a single-run document
/// yields that run.
pub fn sole_run(doc: &crate::export::MetricsDocument, path: &str) -> Result<RunSummary, ConfigError> {
    match doc.runs.as_slice() {
        [only] => Ok(only.clone()),
        runs => Err(ConfigError::Validation(format!(
            "{path} holds {} runs; expected exactly one",
            runs.len()
        ))),
    }
}

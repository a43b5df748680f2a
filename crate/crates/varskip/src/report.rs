//! JSON envelopes, per-query CSV export and aligned text summaries.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value};
use varskip_core::bench::{BenchReport, Estimator};

use crate::{AppError, AppResult};

/// `{"data": …, "meta": {…}}`. Everything reproducible lives in `data`;
/// the creation time only appears in `meta`.
pub fn envelope(data: &impl Serialize) -> AppResult<Value> {
    let created = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    Ok(json!({
        "data": serde_json::to_value(data)?,
        "meta": { "tool": "varskip", "version": env!("CARGO_PKG_VERSION"), "created_unix": created },
    }))
}

pub fn write_json(path: &Path, data: &impl Serialize) -> AppResult<()> {
    let mut text = serde_json::to_string_pretty(&envelope(data)?)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| AppError::io(path, e))
}

/// One CSV row per estimator × budget × repetition × query.
pub fn write_bench_csv(path: &Path, report: &BenchReport) -> AppResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| AppError::format(path, e.to_string()))?;
    w.write_record([
        "estimator",
        "budget",
        "order",
        "query",
        "truth",
        "estimate",
        "q_error",
        "forward_passes",
        "std_error",
    ])?;
    for row in &report.rows {
        for q in &row.queries {
            w.write_record([
                row.estimator.label().to_string(),
                row.budget.to_string(),
                row.order.to_string(),
                q.query.to_string(),
                q.truth.to_string(),
                q.estimate.to_string(),
                q.q_error.to_string(),
                q.forward_passes.to_string(),
                q.std_error.to_string(),
            ])?;
        }
    }
    w.flush().map_err(|e| AppError::io(path, e))
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn cell(values: &[f64], single_std: f64) -> String {
    let (m, s) = mean_std(values);
    let s = if values.len() == 1 { single_std } else { s };
    format!("{m:.3} ± {s:.3}")
}

/// Estimator × quantile table per budget. With several repetitions each cell
/// is mean ± std across them; with one, the bootstrap std.
pub fn render_summary(report: &BenchReport) -> String {
    let mut budgets: Vec<usize> = report.rows.iter().map(|r| r.budget).collect();
    budgets.sort_unstable();
    budgets.dedup();
    let mut estimators: Vec<Estimator> = Vec::new();
    for r in &report.rows {
        if !estimators.contains(&r.estimator) {
            estimators.push(r.estimator);
        }
    }
    let mut lines: Vec<[String; 6]> =
        vec![["estimator".into(), "budget".into(), "median".into(), "p99".into(), "max".into(), "passes/query".into()]];
    for &b in &budgets {
        for &e in &estimators {
            let rows: Vec<_> = report.rows.iter().filter(|r| r.budget == b && r.estimator == e).collect();
            if rows.is_empty() {
                continue;
            }
            let pick = |f: fn(&varskip_core::bench::QuantileSummary) -> f64| {
                rows.iter().map(|r| f(&r.summary)).collect::<Vec<_>>()
            };
            let passes = rows.iter().map(|r| r.mean_forward_passes).sum::<f64>() / rows.len() as f64;
            lines.push([
                e.label().to_string(),
                b.to_string(),
                cell(&pick(|s| s.median), rows[0].summary.median_std),
                cell(&pick(|s| s.p99), rows[0].summary.p99_std),
                cell(&pick(|s| s.max), rows[0].summary.max_std),
                format!("{passes:.1}"),
            ]);
        }
    }
    let widths: Vec<usize> = (0..6).map(|i| lines.iter().map(|l| l[i].chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for l in &lines {
        let cells: Vec<String> = l
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (c, &w))| if i == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
            .collect();
        writeln!(out, "{}", cells.join("  ").trim_end()).expect("string write");
    }
    out
}

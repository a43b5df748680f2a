//! Workload files: `#`-prefixed `key=value` header lines followed by one
//! query per line in the query text format.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use varskip_core::bench::WorkloadSpec;
use varskip_core::data::Column;
use varskip_core::inference::{format_query, parse_query, RangeQuery};

use crate::{AppError, AppResult};

pub fn render_workload(
    spec: &WorkloadSpec,
    table_name: &str,
    queries: &[RangeQuery],
    columns: &[Column],
) -> AppResult<String> {
    let ops: Vec<String> = spec.ops.iter().map(ToString::to_string).collect();
    let mut out = String::from("# varskip workload\n");
    writeln!(out, "# table={table_name}").expect("string write");
    writeln!(out, "# seed={}", spec.seed).expect("string write");
    writeln!(out, "# n_queries={}", queries.len()).expect("string write");
    writeln!(out, "# constraints={}..{}", spec.min_constraints, spec.max_constraints).expect("string write");
    writeln!(out, "# ops={}", ops.join(",")).expect("string write");
    for q in queries {
        out.push_str(&format_query(q, columns)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn write_workload(
    path: &Path,
    spec: &WorkloadSpec,
    table_name: &str,
    queries: &[RangeQuery],
    columns: &[Column],
) -> AppResult<()> {
    fs::write(path, render_workload(spec, table_name, queries, columns)?).map_err(|e| AppError::io(path, e))
}

/// Header fields and queries of a workload file.
pub fn read_workload(path: &Path, columns: &[Column]) -> AppResult<(BTreeMap<String, String>, Vec<RangeQuery>)> {
    let text = fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    let mut header = BTreeMap::new();
    let mut queries = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if let Some(h) = line.strip_prefix('#') {
            if let Some((k, v)) = h.split_once('=') {
                header.insert(k.trim().to_string(), v.trim().to_string());
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let q = parse_query(line, columns).map_err(|e| AppError::format(path, format!("line {}: {e}", i + 1)))?;
        queries.push(q);
    }
    Ok((header, queries))
}

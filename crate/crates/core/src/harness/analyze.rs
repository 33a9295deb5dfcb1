//! Analysis of an observed experiment: an edge list plus a metrics table
//! with one row per node (`node_id`, `z`, then one column per metric).

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{load_edge_list, Graph};
use crate::harness::output::Table;
use crate::inference::MetricReport;
use crate::randomization::Assignment;

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsTable {
    pub names: Vec<String>,
    pub z: Vec<bool>,
    /// columns[m][node]
    pub columns: Vec<Vec<f64>>,
}

impl MetricsTable {
    pub fn n(&self) -> usize {
        self.z.len()
    }
}

/// Parse a metrics TSV. A first line whose leading field is not an integer
/// is taken as a header naming the metric columns. Nodes must be exactly
/// `0..n` for the largest id seen (or `min_n`, if larger), each once.
pub fn load_metrics(path: impl AsRef<Path>, min_n: usize) -> Result<MetricsTable> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut names: Option<Vec<String>> = None;
    let mut width: Option<usize> = None;
    let mut rows: Vec<(usize, bool, Vec<f64>)> = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = trimmed.split('\t').map(str::trim).collect();
        if names.is_none() && rows.is_empty() && cols[0].parse::<i64>().is_err() {
            if cols.len() < 3 {
                return Err(Error::parse(path, lineno, "header needs node_id, z and at least one metric column"));
            }
            names = Some(cols[2..].iter().map(|s| s.to_string()).collect());
            width = Some(cols.len());
            continue;
        }
        let expected = *width.get_or_insert(cols.len());
        if cols.len() < 3 {
            return Err(Error::parse(path, lineno, format!("expected node_id, z and metrics, found {} columns", cols.len())));
        }
        if cols.len() != expected {
            return Err(Error::parse(path, lineno, format!("expected {expected} columns, found {}", cols.len())));
        }
        let node: usize = cols[0]
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("column 1 (node_id): bad node id {:?}", cols[0])))?;
        let z = match cols[1] {
            "1" => true,
            "0" => false,
            other => return Err(Error::parse(path, lineno, format!("column 2 (z): expected 0 or 1, got {other:?}"))),
        };
        let values = cols[2..]
            .iter()
            .enumerate()
            .map(|(c, s)| {
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::parse(path, lineno, format!("column {}: bad metric value {s:?}", c + 3)))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push((node, z, values));
    }
    let Some(width) = width else {
        return Err(Error::parse(path, 0, "no metric rows"));
    };
    let m = width - 2;
    let n = rows.iter().map(|r| r.0 + 1).max().unwrap_or(0).max(min_n);
    let mut seen = vec![false; n];
    let mut z = vec![false; n];
    let mut columns = vec![vec![0.0; n]; m];
    for (node, zi, values) in rows {
        if std::mem::replace(&mut seen[node], true) {
            return Err(Error::parse(path, 0, format!("duplicate node {node}")));
        }
        z[node] = zi;
        for (c, v) in values.into_iter().enumerate() {
            columns[c][node] = v;
        }
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::parse(path, 0, format!("missing node {missing}")));
    }
    let names = names.unwrap_or_else(|| (1..=m).map(|i| format!("metric_{i}")).collect());
    Ok(MetricsTable { names, z, columns })
}

/// Per-metric DIM, pseudo-inverse and contrast reports.
pub fn analyze_data(g: &Graph, metrics: &MetricsTable, p: f64, alpha: f64) -> Result<Vec<MetricReport>> {
    let n = metrics.n().max(g.n());
    let g = if g.n() < n {
        Graph::from_edges(n, g.edges())?.0
    } else {
        g.clone()
    };
    if metrics.n() != n {
        return Err(Error::Precondition(format!(
            "metrics cover {} nodes but the graph has {n}",
            metrics.n()
        )));
    }
    let z = Assignment::new(metrics.z.clone(), p)?;
    metrics
        .names
        .iter()
        .zip(&metrics.columns)
        .map(|(name, y)| MetricReport::compute(name.clone(), &g, y, &z, alpha))
        .collect()
}

pub fn analyze(edges: impl AsRef<Path>, metrics: impl AsRef<Path>, p: f64, alpha: f64) -> Result<Vec<MetricReport>> {
    let (g, report) = load_edge_list(edges)?;
    if report.self_loops + report.duplicates > 0 {
        log::warn!(
            "edge list: dropped {} self-loops and {} duplicate edges",
            report.self_loops,
            report.duplicates
        );
    }
    let table = load_metrics(metrics, g.n())?;
    analyze_data(&g, &table, p, alpha)
}

pub fn report_table(reports: &[MetricReport]) -> Table {
    let mut t = Table::new(MetricReport::CSV_HEADER);
    for r in reports {
        t.push(r.csv_record());
    }
    t
}

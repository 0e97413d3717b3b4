//! Writers for Pajek, GEXF, Graphviz, SVG, and CSV outputs.
//!
//! Every writer renders to a `String` first, so identical inputs always give identical bytes.

mod dot;
mod gexf;
mod pajek;
mod svg;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::cocite::{NodeId, WeightedGraph};
use crate::netalgo::{CentralityReport, CommunityPartition};
use crate::stats::DistributionTables;

pub use dot::{dot_string, write_dot};
pub use gexf::{gexf_string, parse_gexf, read_gexf, write_gexf};
pub use pajek::{pajek_string, parse_pajek, read_pajek, write_pajek};
pub use svg::{annual_svg_string, render_annual_svg, ChartGeometry};

pub const DEFAULT_PRECISION: usize = 6;

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("annual series is empty")]
    EmptySeries,
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// A graph plus the per-node values written alongside it.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphDocument {
    pub graph: WeightedGraph,
    pub community: BTreeMap<NodeId, usize>,
    pub degree: BTreeMap<NodeId, usize>,
    pub betweenness: BTreeMap<NodeId, f64>,
    /// Decimal places for weights and real-valued attributes.
    pub precision: usize,
}

impl GraphDocument {
    pub fn new(graph: WeightedGraph) -> Self {
        GraphDocument {
            graph,
            community: BTreeMap::new(),
            degree: BTreeMap::new(),
            betweenness: BTreeMap::new(),
            precision: DEFAULT_PRECISION,
        }
    }

    pub fn with_communities(mut self, partition: &CommunityPartition) -> Self {
        self.community = partition.assignment.clone();
        self
    }

    pub fn with_centrality(mut self, report: &CentralityReport) -> Self {
        self.degree = report.degree.clone();
        self.betweenness = report.betweenness.clone();
        self
    }

    pub(crate) fn format(&self, value: f64) -> String {
        format_decimal(value, self.precision)
    }
}

/// Fixed precision with trailing zeros and a bare point removed: `1.500000` becomes `1.5`,
/// `2.000000` becomes `2`.
pub fn format_decimal(value: f64, precision: usize) -> String {
    let mut s = format!("{value:.precision$}");
    if s.contains('.') {
        let trimmed = s.trim_end_matches('0').trim_end_matches('.').len();
        s.truncate(trimmed);
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<(), ExportError> {
    fs::write(path, contents).map_err(|source| ExportError::Write { path: path.to_path_buf(), source })
}

pub(crate) fn read_file(path: &Path) -> Result<String, ExportError> {
    fs::read_to_string(path).map_err(|source| ExportError::Read { path: path.to_path_buf(), source })
}

/// One CSV row per item with a header of the field names. An empty slice gives an empty file.
pub fn write_table_csv<T: Serialize>(rows: &[T], path: &Path) -> Result<(), ExportError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
    fs::write(path, bytes).map_err(|source| ExportError::Write { path: path.to_path_buf(), source })
}

#[derive(Serialize)]
struct DistributionRow<'a> {
    distribution: &'a str,
    n: usize,
    mean: f64,
    median: f64,
    mode: f64,
    std_dev: f64,
    min: f64,
    max: f64,
    range: f64,
}

/// The two citation distributions as rows `per_entry` and `per_article`.
pub fn write_distribution_csv(tables: &DistributionTables, path: &Path) -> Result<(), ExportError> {
    let rows: Vec<DistributionRow> = [("per_entry", &tables.per_entry), ("per_article", &tables.per_article)]
        .into_iter()
        .map(|(distribution, s)| DistributionRow {
            distribution,
            n: s.n,
            mean: s.mean,
            median: s.median,
            mode: s.mode,
            std_dev: s.std_dev,
            min: s.min,
            max: s.max,
            range: s.range,
        })
        .collect();
    write_table_csv(&rows, path)
}

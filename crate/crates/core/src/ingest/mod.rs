//! Readers for the mention export and the journal source list, and ISSN enrichment.

mod enrich;
mod mentions;
mod sources;

use std::path::PathBuf;

use serde::Serialize;
use thiserror::Error;

pub use enrich::{
    enrich_issn, enrich_with_cache, extract_issns_from_wikitext, normalize_title, EnrichError,
    EnrichReport, FixtureLookup, IssnCache, IssnLookup, LookupError, MediaWikiLookup,
};
pub use mentions::{
    parse_altmetric_export, read_mentions, write_mentions, RawMention, MENTIONS_HEADER,
};
pub use sources::{parse_scopus_source_list, read_sources, write_sources, SOURCES_HEADER};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed header: expected {expected:?}, found {found:?}")]
    MalformedHeader { expected: String, found: String },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// A data row that could not be turned into a record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowError {
    /// 1-based line number of the row in the file (the header is line 1).
    pub line: u64,
    pub message: String,
}

/// Row accounting for one parsed file.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ParseReport {
    pub rows: usize,
    pub skipped: usize,
    /// Rows kept without a usable date.
    pub undated: usize,
    pub errors: Vec<RowError>,
}

impl ParseReport {
    fn skip(&mut self, line: u64, message: impl Into<String>) {
        self.skipped += 1;
        self.errors.push(RowError { line, message: message.into() });
    }
}

fn check_header(first: Option<&csv::ByteRecord>, expected: &str) -> Result<(), IngestError> {
    let found = first
        .map(|r| {
            r.iter()
                .map(|f| String::from_utf8_lossy(f).into_owned())
                .collect::<Vec<_>>()
                .join(",")
        })
        .unwrap_or_default();
    let found_trimmed = found.trim_start_matches('\u{feff}');
    if found_trimmed != expected {
        return Err(IngestError::MalformedHeader { expected: expected.to_string(), found });
    }
    Ok(())
}

fn csv_reader<R: std::io::Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(input)
}

/// Splits a multi-valued cell, dropping empty parts.
fn split_list(cell: &str, sep: char) -> impl Iterator<Item = &str> {
    cell.split(sep).map(str::trim).filter(|s| !s.is_empty())
}

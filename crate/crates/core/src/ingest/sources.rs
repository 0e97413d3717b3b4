use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::catalog::{normalize_issn, Issn, JournalRecord};

use super::{check_header, csv_reader, split_list, IngestError, ParseReport};

pub const SOURCES_HEADER: &str = "title,print_issn,e_issn,asjc_codes,specialty_names,open_access,top_percentile,scholarly_output,citation_count";

const FIELDS: usize = 9;

pub fn parse_scopus_source_list(
    path: &Path,
) -> Result<(Vec<JournalRecord>, ParseReport), IngestError> {
    let file = File::open(path).map_err(|source| IngestError::Io { path: path.into(), source })?;
    read_sources(std::io::BufReader::new(file))
}

/// Parses a journal source list. Rows whose ISSNs are both unusable are skipped.
pub fn read_sources<R: Read>(input: R) -> Result<(Vec<JournalRecord>, ParseReport), IngestError> {
    let mut reader = csv_reader(input);
    let mut records = reader.byte_records();
    let first = match records.next() {
        Some(Ok(r)) => Some(r),
        Some(Err(e)) if !e.is_io_error() => None,
        Some(Err(e)) => return Err(e.into()),
        None => None,
    };
    check_header(first.as_ref(), SOURCES_HEADER)?;

    let mut report = ParseReport::default();
    let mut journals = Vec::new();
    let mut line = 1u64;
    for result in records {
        line += 1;
        report.rows += 1;
        let record = match result {
            Ok(r) => r,
            Err(e) if e.is_io_error() => return Err(e.into()),
            Err(e) => {
                report.skip(line, e.to_string());
                continue;
            }
        };
        if let Some(pos) = record.position() {
            line = pos.line();
        }
        match journal_from_row(&record) {
            Ok(j) => journals.push(j),
            Err(msg) => report.skip(line, msg),
        }
    }
    Ok((journals, report))
}

fn optional_issn(cell: &str) -> Option<Issn> {
    if cell.is_empty() {
        None
    } else {
        normalize_issn(cell).ok()
    }
}

fn journal_from_row(record: &csv::ByteRecord) -> Result<JournalRecord, String> {
    if record.len() != FIELDS {
        return Err(format!("expected {FIELDS} fields, found {}", record.len()));
    }
    let mut cells = Vec::with_capacity(FIELDS);
    for (i, raw) in record.iter().enumerate() {
        let cell = std::str::from_utf8(raw).map_err(|_| format!("field {} is not UTF-8", i + 1))?;
        cells.push(cell.trim());
    }
    let [title, print, e, codes, names, open_access, percentile, output, citations] = cells[..]
    else {
        unreachable!()
    };
    if title.is_empty() {
        return Err("empty title".into());
    }
    let print_issn = optional_issn(print);
    let e_issn = optional_issn(e);
    if print_issn.is_none() && e_issn.is_none() {
        return Err(format!("no valid ISSN in {print:?} / {e:?}"));
    }
    let open_access = match open_access {
        "true" => true,
        "false" => false,
        other => return Err(format!("open_access must be true|false, got {other:?}")),
    };
    let top_percentile: f64 =
        percentile.parse().map_err(|_| format!("bad top_percentile {percentile:?}"))?;
    if !(0.0..=100.0).contains(&top_percentile) {
        return Err(format!("top_percentile {top_percentile} outside [0, 100]"));
    }
    Ok(JournalRecord {
        title: title.to_string(),
        print_issn,
        e_issn,
        asjc_codes: split_list(codes, ';').map(str::to_string).collect(),
        specialty_names: split_list(names, ';').map(str::to_string).collect(),
        open_access,
        top_percentile,
        scholarly_output: output.parse().map_err(|_| format!("bad scholarly_output {output:?}"))?,
        citation_count: citations
            .parse()
            .map_err(|_| format!("bad citation_count {citations:?}"))?,
    })
}

pub fn write_sources<W: Write>(out: W, journals: &[JournalRecord]) -> Result<(), IngestError> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(SOURCES_HEADER.split(','))?;
    let join = |set: &std::collections::BTreeSet<String>| {
        set.iter().map(String::as_str).collect::<Vec<_>>().join(";")
    };
    for j in journals {
        writer.write_record([
            j.title.as_str(),
            &j.print_issn.as_ref().map(Issn::hyphenated).unwrap_or_default(),
            &j.e_issn.as_ref().map(Issn::hyphenated).unwrap_or_default(),
            &join(&j.asjc_codes),
            &join(&j.specialty_names),
            if j.open_access { "true" } else { "false" },
            &j.top_percentile.to_string(),
            &j.scholarly_output.to_string(),
            &j.citation_count.to_string(),
        ])?;
    }
    writer.flush().map_err(csv::Error::from)?;
    Ok(())
}

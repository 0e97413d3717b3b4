use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::{check_header, csv_reader, split_list, IngestError, ParseReport};

pub const MENTIONS_HEADER: &str =
    "mention_id,doi,article_title,journal_title,issns,wiki_page_title,wiki_language,mention_date,article_year";

const FIELDS: usize = 9;

/// One citation of a scholarly article from a Wikipedia page, as exported.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawMention {
    pub mention_id: String,
    pub doi: Option<String>,
    pub article_title: String,
    pub journal_title: String,
    /// Raw ISSN strings; not yet validated.
    pub issns: Vec<String>,
    pub wiki_page_title: String,
    pub wiki_language: String,
    pub mention_date: Option<NaiveDate>,
    pub article_year: Option<i32>,
}

pub fn parse_altmetric_export(path: &Path) -> Result<(Vec<RawMention>, ParseReport), IngestError> {
    let file = File::open(path).map_err(|source| IngestError::Io { path: path.into(), source })?;
    read_mentions(std::io::BufReader::new(file))
}

/// Parses a mention export. Row-level damage is counted in the report, never fatal.
pub fn read_mentions<R: Read>(input: R) -> Result<(Vec<RawMention>, ParseReport), IngestError> {
    let mut reader = csv_reader(input);
    let mut records = reader.byte_records();
    let first = match records.next() {
        Some(Ok(r)) => Some(r),
        Some(Err(e)) if !e.is_io_error() => None,
        Some(Err(e)) => return Err(e.into()),
        None => None,
    };
    check_header(first.as_ref(), MENTIONS_HEADER)?;

    let mut report = ParseReport::default();
    let mut mentions = Vec::new();
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
        match mention_from_row(&record) {
            Ok(m) => {
                if m.mention_date.is_none() {
                    report.undated += 1;
                }
                mentions.push(m);
            }
            Err(msg) => report.skip(line, msg),
        }
    }
    Ok((mentions, report))
}

fn mention_from_row(record: &csv::ByteRecord) -> Result<RawMention, String> {
    if record.len() != FIELDS {
        return Err(format!("expected {FIELDS} fields, found {}", record.len()));
    }
    let mut cells = Vec::with_capacity(FIELDS);
    for (i, raw) in record.iter().enumerate() {
        let cell = std::str::from_utf8(raw).map_err(|_| format!("field {} is not UTF-8", i + 1))?;
        cells.push(cell.trim());
    }
    let [mention_id, doi, article_title, journal_title, issns, page, language, date, year] =
        cells[..]
    else {
        unreachable!()
    };
    if mention_id.is_empty() {
        return Err("empty mention_id".into());
    }
    if page.is_empty() {
        return Err("empty wiki_page_title".into());
    }
    if !(2..=3).contains(&language.len()) || !language.bytes().all(|b| b.is_ascii_lowercase()) {
        return Err(format!("invalid wiki_language {language:?}"));
    }
    Ok(RawMention {
        mention_id: mention_id.to_string(),
        doi: (!doi.is_empty()).then(|| doi.to_string()),
        article_title: article_title.to_string(),
        journal_title: journal_title.to_string(),
        issns: split_list(issns, '|').map(str::to_string).collect(),
        wiki_page_title: page.to_string(),
        wiki_language: language.to_string(),
        mention_date: NaiveDate::parse_from_str(date, "%Y-%m-%d").ok(),
        article_year: year.parse().ok(),
    })
}

/// Writes mentions in the canonical export layout.
pub fn write_mentions<W: Write>(out: W, mentions: &[RawMention]) -> Result<(), IngestError> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(MENTIONS_HEADER.split(','))?;
    for m in mentions {
        writer.write_record([
            m.mention_id.as_str(),
            m.doi.as_deref().unwrap_or(""),
            &m.article_title,
            &m.journal_title,
            &m.issns.join("|"),
            &m.wiki_page_title,
            &m.wiki_language,
            &m.mention_date.map(|d| d.format("%Y-%m-%d").to_string()).unwrap_or_default(),
            &m.article_year.map(|y| y.to_string()).unwrap_or_default(),
        ])?;
    }
    writer.flush().map_err(csv::Error::from)?;
    Ok(())
}

//! Linking mentions to journals, deduplication, filtering, and the persisted corpus.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{
    normalize_issn, resolve_specialties, Issn, JournalIndex, LabelVocabulary, SpecialtySet,
};
use crate::ingest::RawMention;

/// A Wikipedia page in one language edition.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EntryId {
    pub language: String,
    pub title: String,
}

/// One linked citation: an entry citing an article published in a journal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CitationRecord {
    pub entry: EntryId,
    /// DOI when the mention has one, else the mention id.
    pub article_id: String,
    /// The mention this record was linked from.
    pub mention_id: String,
    pub journal: Issn,
    pub specialties: SpecialtySet,
    pub date: NaiveDate,
    pub year: i32,
}

impl CitationRecord {
    fn pair_key(&self) -> (&EntryId, &str) {
        (&self.entry, &self.article_id)
    }
}

/// Which date a citation is dated by.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DateSource {
    /// The date the mention was recorded.
    #[default]
    Mention,
    /// January 1st of the cited article's publication year.
    ArticleYear,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkReport {
    pub mentions: usize,
    pub linked: usize,
    pub undated: usize,
    pub no_issn: usize,
    pub unknown_issn: usize,
    pub unclassifiable: usize,
}

/// Links mentions to indexed journals. A mention links when any of its ISSNs resolves.
pub fn link_mentions(
    mentions: &[RawMention],
    index: &JournalIndex,
    vocabulary: &LabelVocabulary,
    date_source: DateSource,
) -> (Vec<CitationRecord>, LinkReport) {
    let mut report = LinkReport { mentions: mentions.len(), ..Default::default() };
    let mut specialties: BTreeMap<Issn, Option<SpecialtySet>> = BTreeMap::new();
    let mut records = Vec::new();
    for mention in mentions {
        let date = match date_source {
            DateSource::Mention => mention.mention_date,
            DateSource::ArticleYear => {
                mention.article_year.and_then(|y| NaiveDate::from_ymd_opt(y, 1, 1))
            }
        };
        let Some(date) = date else {
            report.undated += 1;
            continue;
        };
        if mention.issns.is_empty() {
            report.no_issn += 1;
            continue;
        }
        let journal = mention
            .issns
            .iter()
            .filter_map(|raw| normalize_issn(raw).ok())
            .find_map(|issn| index.get(&issn));
        let Some(journal) = journal else {
            report.unknown_issn += 1;
            continue;
        };
        let key = journal.key().clone();
        let resolved = specialties
            .entry(key.clone())
            .or_insert_with(|| resolve_specialties(journal, vocabulary).ok().map(|r| r.specialties));
        let Some(labels) = resolved else {
            report.unclassifiable += 1;
            continue;
        };
        records.push(CitationRecord {
            entry: EntryId {
                language: mention.wiki_language.clone(),
                title: mention.wiki_page_title.clone(),
            },
            article_id: mention.doi.clone().unwrap_or_else(|| mention.mention_id.clone()),
            mention_id: mention.mention_id.clone(),
            journal: key,
            specialties: labels.clone(),
            date,
            year: date.year(),
        });
    }
    report.linked = records.len();
    (records, report)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DedupReport {
    pub input: usize,
    pub removed: usize,
}

/// Keeps one record per (entry, article): the latest date, then the smallest mention id.
///
/// Output is sorted by (entry, article id).
pub fn dedupe_citations(records: Vec<CitationRecord>) -> (Vec<CitationRecord>, DedupReport) {
    let input = records.len();
    let mut best: BTreeMap<(EntryId, String), CitationRecord> = BTreeMap::new();
    for record in records {
        let key = (record.entry.clone(), record.article_id.clone());
        match best.get(&key) {
            Some(kept)
                if (kept.date, std::cmp::Reverse(&kept.mention_id))
                    >= (record.date, std::cmp::Reverse(&record.mention_id)) => {}
            _ => {
                best.insert(key, record);
            }
        }
    }
    let out: Vec<_> = best.into_values().collect();
    let removed = input - out.len();
    (out, DedupReport { input, removed })
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterRules {
    /// Keep records with at least one of these labels.
    pub discipline_labels: Option<BTreeSet<String>>,
    /// Keep records whose year lies in this inclusive range.
    pub year_window: Option<(i32, i32)>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FilterReport {
    pub input: usize,
    /// Mentions without a date, excluded when linking.
    pub undated_at_link: usize,
    pub outside_discipline: usize,
    pub before_window: usize,
    pub after_window: usize,
    pub retained: usize,
}

impl FilterReport {
    pub fn with_link_audit(mut self, link: &LinkReport) -> Self {
        self.undated_at_link = link.undated;
        self
    }
}

pub fn filter_corpus(
    records: Vec<CitationRecord>,
    rules: &FilterRules,
) -> (Vec<CitationRecord>, FilterReport) {
    let mut report = FilterReport { input: records.len(), ..Default::default() };
    let kept: Vec<_> = records
        .into_iter()
        .filter(|r| {
            if let Some(labels) = &rules.discipline_labels {
                if !r.specialties.intersects(labels) {
                    report.outside_discipline += 1;
                    return false;
                }
            }
            if let Some((lo, hi)) = rules.year_window {
                if r.year < lo {
                    report.before_window += 1;
                    return false;
                }
                if r.year > hi {
                    report.after_window += 1;
                    return false;
                }
            }
            true
        })
        .collect();
    report.retained = kept.len();
    (kept, report)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CorpusSummary {
    pub entries: usize,
    pub citations: usize,
    pub articles: usize,
    pub journals: usize,
    /// Fraction of distinct entries per language edition.
    pub language_shares: BTreeMap<String, f64>,
}

pub fn summarize_corpus(records: &[CitationRecord]) -> CorpusSummary {
    let entries: BTreeSet<&EntryId> = records.iter().map(|r| &r.entry).collect();
    let articles: BTreeSet<&str> = records.iter().map(|r| r.article_id.as_str()).collect();
    let journals: BTreeSet<&Issn> = records.iter().map(|r| &r.journal).collect();
    let mut per_language: BTreeMap<String, usize> = BTreeMap::new();
    for entry in &entries {
        *per_language.entry(entry.language.clone()).or_default() += 1;
    }
    let total = entries.len() as f64;
    CorpusSummary {
        entries: entries.len(),
        citations: records.len(),
        articles: articles.len(),
        journals: journals.len(),
        language_shares: per_language.into_iter().map(|(l, n)| (l, n as f64 / total)).collect(),
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

fn escape(field: &str) -> String {
    let mut out = String::with_capacity(field.len());
    for c in field.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

fn unescape(field: &str) -> String {
    let mut out = String::with_capacity(field.len());
    let mut chars = field.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some(other) => out.push(other),
            None => out.push('\\'),
        }
    }
    out
}

/// Writes `corpus.tsv`: language, page title, article id, ISSN, specialties, date, year,
/// mention id. Rows are sorted by (entry, article id, mention id).
pub fn write_corpus_tsv<W: Write>(mut out: W, records: &[CitationRecord]) -> std::io::Result<()> {
    let mut sorted: Vec<&CitationRecord> = records.iter().collect();
    sorted.sort_by(|a, b| {
        a.pair_key().cmp(&b.pair_key()).then_with(|| a.mention_id.cmp(&b.mention_id))
    });
    for r in sorted {
        let specialties: Vec<String> = r.specialties.iter().map(escape).collect();
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            escape(&r.entry.language),
            escape(&r.entry.title),
            escape(&r.article_id),
            r.journal,
            specialties.join(";"),
            r.date.format("%Y-%m-%d"),
            r.year,
            escape(&r.mention_id),
        )?;
    }
    Ok(())
}

pub fn read_corpus_tsv<R: BufRead>(input: R) -> Result<Vec<CitationRecord>, CorpusError> {
    let mut records = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let err = |message: String| CorpusError::Parse { line: i + 1, message };
        let fields: Vec<&str> = line.split('\t').collect();
        let [language, title, article_id, issn, specialties, date, year, mention_id] =
            fields[..]
        else {
            return Err(err(format!("expected 8 fields, found {}", fields.len())));
        };
        let date = NaiveDate::parse_from_str(date, "%Y-%m-%d").map_err(|e| err(e.to_string()))?;
        let year: i32 = year.parse().map_err(|_| err(format!("bad year {year:?}")))?;
        if year != date.year() {
            return Err(err(format!("year {year} does not match date {date}")));
        }
        records.push(CitationRecord {
            entry: EntryId { language: unescape(language), title: unescape(title) },
            article_id: unescape(article_id),
            mention_id: unescape(mention_id),
            journal: normalize_issn(issn).map_err(|e| err(e.to_string()))?,
            specialties: specialties.split(';').filter(|s| !s.is_empty()).map(unescape).collect(),
            date,
            year,
        });
    }
    Ok(records)
}

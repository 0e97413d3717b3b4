//! Descriptive statistics and the per-specialty, per-journal, and per-year tables.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{resolve_specialties, Issn, JournalIndex, LabelVocabulary};
use crate::corpus::{CitationRecord, EntryId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("no values to summarize")]
    Empty,
    #[error("no Scopus aggregate for specialty {0:?}")]
    MissingAggregate(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsSummary {
    pub n: usize,
    pub mean: f64,
    pub median: f64,
    pub mode: f64,
    /// Sample standard deviation; zero for a single value.
    pub std_dev: f64,
    pub min: f64,
    pub max: f64,
    pub range: f64,
}

pub fn descriptive_stats(values: &[f64]) -> Result<StatsSummary, StatsError> {
    if values.is_empty() {
        return Err(StatsError::Empty);
    }
    let n = values.len();
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mean = sorted.iter().sum::<f64>() / n as f64;
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    };
    // Runs of equal values in ascending order; the first longest run is the smallest mode.
    let mut mode = sorted[0];
    let mut best_run = 0;
    let mut i = 0;
    while i < n {
        let run = sorted[i..].iter().take_while(|&&v| v == sorted[i]).count();
        if run > best_run {
            best_run = run;
            mode = sorted[i];
        }
        i += run;
    }
    let std_dev = if n > 1 {
        let ss: f64 = sorted.iter().map(|v| (v - mean) * (v - mean)).sum();
        (ss / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    let (min, max) = (sorted[0], sorted[n - 1]);
    Ok(StatsSummary { n, mean, median, mode, std_dev, min, max, range: max - min })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionTables {
    /// References per citing entry.
    pub per_entry: StatsSummary,
    /// Citations per cited article.
    pub per_article: StatsSummary,
}

fn citations_per_article<'a>(
    records: impl IntoIterator<Item = &'a CitationRecord>,
) -> BTreeMap<&'a str, usize> {
    let mut counts = BTreeMap::new();
    for r in records {
        *counts.entry(r.article_id.as_str()).or_insert(0) += 1;
    }
    counts
}

pub fn distribution_tables(records: &[CitationRecord]) -> Result<DistributionTables, StatsError> {
    let mut per_entry: BTreeMap<&EntryId, usize> = BTreeMap::new();
    for r in records {
        *per_entry.entry(&r.entry).or_default() += 1;
    }
    let entry_counts: Vec<f64> = per_entry.values().map(|&c| c as f64).collect();
    let article_counts: Vec<f64> =
        citations_per_article(records).values().map(|&c| c as f64).collect();
    Ok(DistributionTables {
        per_entry: descriptive_stats(&entry_counts)?,
        per_article: descriptive_stats(&article_counts)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnualPoint {
    pub year: i32,
    pub citations: usize,
    pub mean_citations_per_article: f64,
}

/// Citations per year and, per year, citations divided by distinct articles cited.
pub fn annual_series(records: &[CitationRecord]) -> Vec<AnnualPoint> {
    let mut by_year: BTreeMap<i32, Vec<&CitationRecord>> = BTreeMap::new();
    for r in records {
        by_year.entry(r.year).or_default().push(r);
    }
    by_year
        .into_iter()
        .map(|(year, rs)| {
            let articles: BTreeSet<&str> = rs.iter().map(|r| r.article_id.as_str()).collect();
            AnnualPoint {
                year,
                citations: rs.len(),
                mean_citations_per_article: rs.len() as f64 / articles.len() as f64,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpecialtyRow {
    pub specialty: String,
    pub journals_cited: usize,
    /// Over distinct journals in the corpus.
    pub share_journals: f64,
    /// Over the label-expanded journal total, so the column sums to one.
    pub share_journals_normalized: f64,
    pub articles_cited: usize,
    pub citations: usize,
    /// Over all citations in the corpus.
    pub share_citations: f64,
    /// Over the label-expanded citation total.
    pub share_citations_normalized: f64,
    pub mean_citations_per_article: f64,
    /// Sample standard deviation of citations per article.
    pub std_citations_per_article: f64,
}

/// One row per specialty; a record counts toward every label of its journal.
pub fn specialty_table(records: &[CitationRecord]) -> Vec<SpecialtyRow> {
    let mut by_label: BTreeMap<&str, Vec<&CitationRecord>> = BTreeMap::new();
    for r in records {
        for label in r.specialties.iter() {
            by_label.entry(label).or_default().push(r);
        }
    }
    let total_journals = records.iter().map(|r| &r.journal).collect::<BTreeSet<_>>().len() as f64;
    let total_citations = records.len() as f64;

    let mut rows: Vec<SpecialtyRow> = by_label
        .into_iter()
        .map(|(label, rs)| {
            let journals = rs.iter().map(|r| &r.journal).collect::<BTreeSet<_>>().len();
            let per_article: Vec<f64> =
                citations_per_article(rs.iter().copied()).values().map(|&c| c as f64).collect();
            let summary = descriptive_stats(&per_article).expect("label has at least one record");
            SpecialtyRow {
                specialty: label.to_string(),
                journals_cited: journals,
                share_journals: journals as f64 / total_journals,
                share_journals_normalized: 0.0,
                articles_cited: per_article.len(),
                citations: rs.len(),
                share_citations: rs.len() as f64 / total_citations,
                share_citations_normalized: 0.0,
                mean_citations_per_article: rs.len() as f64 / per_article.len() as f64,
                std_citations_per_article: summary.std_dev,
            }
        })
        .collect();
    let expanded_journals: usize = rows.iter().map(|r| r.journals_cited).sum();
    let expanded_citations: usize = rows.iter().map(|r| r.citations).sum();
    for row in &mut rows {
        row.share_journals_normalized = row.journals_cited as f64 / expanded_journals as f64;
        row.share_citations_normalized = row.citations as f64 / expanded_citations as f64;
    }
    rows
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JournalRow {
    pub rank: usize,
    pub issn: String,
    pub title: String,
    pub citations: usize,
    pub articles_cited: usize,
    pub mean_citations: f64,
    pub open_access: bool,
    /// Among the top decile of cited journals.
    pub top_journal: bool,
}

/// The `k` most cited journals; ties by title, then ISSN.
pub fn journal_ranking(records: &[CitationRecord], index: &JournalIndex, k: usize) -> Vec<JournalRow> {
    let mut by_journal: BTreeMap<&Issn, Vec<&CitationRecord>> = BTreeMap::new();
    for r in records {
        by_journal.entry(&r.journal).or_default().push(r);
    }
    let mut rows: Vec<JournalRow> = by_journal
        .into_iter()
        .map(|(issn, rs)| {
            let articles = rs.iter().map(|r| r.article_id.as_str()).collect::<BTreeSet<_>>().len();
            let journal = index.get(issn);
            JournalRow {
                rank: 0,
                issn: issn.hyphenated(),
                title: journal.map_or_else(|| issn.hyphenated(), |j| j.title.clone()),
                citations: rs.len(),
                articles_cited: articles,
                mean_citations: rs.len() as f64 / articles as f64,
                open_access: journal.is_some_and(|j| j.open_access),
                top_journal: journal.is_some_and(|j| j.is_top_journal()),
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        b.citations.cmp(&a.citations).then_with(|| a.title.cmp(&b.title)).then_with(|| a.issn.cmp(&b.issn))
    });
    rows.truncate(k);
    for (i, row) in rows.iter_mut().enumerate() {
        row.rank = i + 1;
    }
    rows
}

/// Scopus-side totals of one specialty.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScopusAggregate {
    pub scholarly_output: u64,
    pub citation_count: u64,
}

/// Sums journal output and citations per unified label; journals count toward each label.
pub fn scopus_aggregates(index: &JournalIndex, vocabulary: &LabelVocabulary) -> BTreeMap<String, ScopusAggregate> {
    let mut out: BTreeMap<String, ScopusAggregate> = BTreeMap::new();
    for journal in index.journals() {
        let Ok(resolution) = resolve_specialties(journal, vocabulary) else { continue };
        for label in resolution.specialties.iter() {
            let agg = out.entry(label.to_string()).or_default();
            agg.scholarly_output += journal.scholarly_output;
            agg.citation_count += journal.citation_count;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageRow {
    pub specialty: String,
    pub wiki_article_share: f64,
    pub wiki_citation_share: f64,
    pub scopus_article_share: f64,
    pub scopus_citation_share: f64,
}

fn shares(values: &[f64]) -> Vec<f64> {
    let total: f64 = values.iter().sum();
    values.iter().map(|v| if total > 0.0 { v / total } else { 0.0 }).collect()
}

/// Specialty shares of articles and citations on both sides, each column summing to one
/// over the specialties present in the corpus.
pub fn coverage_table(
    records: &[CitationRecord],
    aggregates: &BTreeMap<String, ScopusAggregate>,
) -> Result<Vec<CoverageRow>, StatsError> {
    let table = specialty_table(records);
    let mut scopus = Vec::with_capacity(table.len());
    for row in &table {
        let agg = aggregates
            .get(&row.specialty)
            .ok_or_else(|| StatsError::MissingAggregate(row.specialty.clone()))?;
        scopus.push(*agg);
    }
    let column = |f: &dyn Fn(usize) -> f64| shares(&(0..table.len()).map(f).collect::<Vec<_>>());
    let wiki_articles = column(&|i| table[i].articles_cited as f64);
    let wiki_citations = column(&|i| table[i].citations as f64);
    let scopus_articles = column(&|i| scopus[i].scholarly_output as f64);
    let scopus_citations = column(&|i| scopus[i].citation_count as f64);
    Ok(table
        .iter()
        .enumerate()
        .map(|(i, row)| CoverageRow {
            specialty: row.specialty.clone(),
            wiki_article_share: wiki_articles[i],
            wiki_citation_share: wiki_citations[i],
            scopus_article_share: scopus_articles[i],
            scopus_citation_share: scopus_citations[i],
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build_journal_index, normalize_issn, JournalRecord};
    use crate::corpus::tests::record;

    #[test]
    fn basic_summaries() {
        let s = descriptive_stats(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!((s.mean, s.median, s.range), (2.0, 2.0, 2.0));
        assert_eq!(descriptive_stats(&[1.0, 1.0, 2.0]).unwrap().mode, 1.0);
        assert_eq!(descriptive_stats(&[3.0, 1.0, 3.0, 1.0]).unwrap().mode, 1.0);
        assert_eq!(descriptive_stats(&[4.0, 1.0]).unwrap().median, 2.5);
        assert_eq!(descriptive_stats(&[]), Err(StatsError::Empty));
        assert_eq!(descriptive_stats(&[7.0]).unwrap().std_dev, 0.0);
    }

    #[test]
    fn sample_standard_deviation() {
        let values = [2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0];
        // mean 5, squared deviations 9+1+1+1+0+0+4+16 = 32, over n-1 = 7.
        let expected = (32.0f64 / 7.0).sqrt();
        let s = descriptive_stats(&values).unwrap();
        assert_eq!(s.mean, 5.0);
        assert!((s.std_dev - expected).abs() < 1e-12);
        assert_eq!(s.mode, 4.0);
        assert_eq!(s.median, 4.5);
    }

    #[test]
    fn one_reference_per_entry() {
        let records: Vec<_> = (0..4)
            .map(|i| record("en", &format!("P{i}"), &format!("a{i}"), "0378-5955", &["History"], "2015-01-01"))
            .collect();
        let t = distribution_tables(&records).unwrap();
        assert_eq!((t.per_entry.mean, t.per_entry.range), (1.0, 0.0));
        assert_eq!(distribution_tables(&[]), Err(StatsError::Empty));
    }

    #[test]
    fn annual_points() {
        assert!(annual_series(&[]).is_empty());
        let records = vec![
            record("en", "P", "a1", "0378-5955", &["History"], "2015-02-01"),
            record("en", "Q", "a1", "0378-5955", &["History"], "2015-03-01"),
            record("en", "R", "a2", "0378-5955", &["History"], "2015-04-01"),
            record("en", "R", "a3", "0378-5955", &["History"], "2014-04-01"),
        ];
        let series = annual_series(&records);
        assert_eq!(series.len(), 2);
        assert_eq!(series[1], AnnualPoint { year: 2015, citations: 3, mean_citations_per_article: 1.5 });
        assert!(series[0].year < series[1].year);
    }

    #[test]
    fn multi_label_journal_counts_in_each_row() {
        let records = vec![record("en", "P", "a1", "0378-5955", &["History", "Philosophy"], "2015-01-01")];
        let rows = specialty_table(&records);
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.citations == 1 && r.journals_cited == 1));
        assert!(rows.iter().all(|r| r.share_journals == 1.0 && r.share_journals_normalized == 0.5));
    }

    fn journal(title: &str, issn: &str, pct: f64, oa: bool) -> JournalRecord {
        JournalRecord {
            title: title.into(),
            print_issn: Some(normalize_issn(issn).unwrap()),
            e_issn: None,
            asjc_codes: ["1202".to_string()].into(),
            specialty_names: BTreeSet::new(),
            open_access: oa,
            top_percentile: pct,
            scholarly_output: 10,
            citation_count: 100,
        }
    }

    #[test]
    fn ranking_order_and_flags() {
        let (index, _) = build_journal_index(&[
            journal("Beta", "0378-5955", 10.0, true),
            journal("Alpha", "0028-0836", 10.5, false),
            journal("Gamma", "0021-1753", 1.0, false),
        ]);
        let records = vec![
            record("en", "P", "a1", "0378-5955", &["History"], "2015-01-01"),
            record("en", "Q", "a1", "0378-5955", &["History"], "2015-01-01"),
            record("en", "P", "b1", "0028-0836", &["History"], "2015-01-01"),
            record("en", "Q", "b2", "0028-0836", &["History"], "2015-01-01"),
            record("en", "P", "c1", "0021-1753", &["History"], "2015-01-01"),
        ];
        let rows = journal_ranking(&records, &index, 2);
        assert_eq!(rows.len(), 2);
        assert_eq!((rows[0].rank, rows[0].title.as_str()), (1, "Alpha"));
        assert_eq!(rows[1].title, "Beta");
        assert!(!rows[0].top_journal && rows[1].top_journal);
        assert!(rows[1].open_access);
        assert_eq!((rows[1].citations, rows[1].articles_cited, rows[1].mean_citations), (2, 1, 2.0));
    }

    #[test]
    fn coverage_columns() {
        let records = vec![record("en", "P", "a1", "0378-5955", &["History"], "2015-01-01")];
        let aggregates = BTreeMap::from([("History".to_string(), ScopusAggregate { scholarly_output: 5, citation_count: 9 })]);
        let rows = coverage_table(&records, &aggregates).unwrap();
        assert_eq!(rows[0].wiki_article_share, 1.0);
        assert_eq!(rows[0].scopus_citation_share, 1.0);
        assert_eq!(
            coverage_table(&records, &BTreeMap::new()),
            Err(StatsError::MissingAggregate("History".into()))
        );
    }

    proptest::proptest! {
        #[test]
        fn summary_invariants(values in proptest::collection::vec(-1e6f64..1e6, 1..50)) {
            let s = descriptive_stats(&values).unwrap();
            proptest::prop_assert!(s.std_dev >= 0.0);
            proptest::prop_assert!(s.min <= s.median && s.median <= s.max);
            proptest::prop_assert_eq!(s.range, s.max - s.min);
            proptest::prop_assert!(values.contains(&s.mode));
        }
    }
}

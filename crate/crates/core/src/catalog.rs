//! ISSN canonicalization, the journal index, and specialty label resolution.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IssnError {
    #[error("ISSN {raw:?} has {len} significant characters, expected 8")]
    WrongLength { raw: String, len: usize },
    #[error("ISSN {raw:?} contains a non-digit in its first seven positions")]
    NonDigitBody { raw: String },
    #[error("ISSN {raw:?} has check character {found}, expected {expected}")]
    CheckDigitMismatch { raw: String, expected: char, found: char },
}

/// An ISSN in canonical form: eight characters, no hyphen, valid mod-11 check digit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Issn(String);

impl Issn {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Hyphenated display form, `NNNN-NNNC`.
    pub fn hyphenated(&self) -> String {
        format!("{}-{}", &self.0[..4], &self.0[4..])
    }
}

impl fmt::Display for Issn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for Issn {
    type Err = IssnError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        normalize_issn(s)
    }
}

impl TryFrom<String> for Issn {
    type Error = IssnError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        normalize_issn(&value)
    }
}

impl From<Issn> for String {
    fn from(value: Issn) -> Self {
        value.0
    }
}

fn check_character(body: &[u8]) -> char {
    let sum: u32 = body
        .iter()
        .zip((2..=8).rev())
        .map(|(digit, weight)| u32::from(digit - b'0') * weight)
        .sum();
    match (11 - sum % 11) % 11 {
        10 => 'X',
        d => char::from(b'0' + d as u8),
    }
}

/// Strips hyphens and whitespace, uppercases, and validates length and check digit.
pub fn normalize_issn(raw: &str) -> Result<Issn, IssnError> {
    let cleaned: String = raw
        .chars()
        .filter(|c| *c != '-' && !c.is_whitespace())
        .flat_map(char::to_uppercase)
        .collect();
    let len = cleaned.chars().count();
    if len != 8 {
        return Err(IssnError::WrongLength { raw: raw.to_string(), len });
    }
    let bytes = cleaned.as_bytes();
    if !bytes[..7].iter().all(u8::is_ascii_digit) {
        return Err(IssnError::NonDigitBody { raw: raw.to_string() });
    }
    let expected = check_character(&bytes[..7]);
    let found = char::from(bytes[7]);
    if expected != found {
        return Err(IssnError::CheckDigitMismatch { raw: raw.to_string(), expected, found });
    }
    Ok(Issn(cleaned))
}

/// A journal from the source list, with its ISSNs already canonical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JournalRecord {
    pub title: String,
    pub print_issn: Option<Issn>,
    pub e_issn: Option<Issn>,
    pub asjc_codes: BTreeSet<String>,
    pub specialty_names: BTreeSet<String>,
    pub open_access: bool,
    pub top_percentile: f64,
    pub scholarly_output: u64,
    pub citation_count: u64,
}

impl JournalRecord {
    pub fn issns(&self) -> impl Iterator<Item = &Issn> {
        self.print_issn.iter().chain(self.e_issn.iter())
    }

    /// The canonical key for this journal: the print ISSN when present, else the e-ISSN.
    pub fn key(&self) -> &Issn {
        self.print_issn
            .as_ref()
            .or(self.e_issn.as_ref())
            .expect("journal record without any ISSN")
    }

    /// Member of the top decile of cited journals.
    pub fn is_top_journal(&self) -> bool {
        self.top_percentile <= 10.0
    }
}

/// Two source-list rows claiming the same ISSN. The earlier row keeps it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Conflict {
    pub issn: Issn,
    pub kept: String,
    pub rejected: String,
}

/// Lookup of journals under each of their ISSNs.
#[derive(Debug, Clone, Default)]
pub struct JournalIndex {
    journals: Vec<JournalRecord>,
    by_issn: BTreeMap<Issn, usize>,
}

impl JournalIndex {
    pub fn get(&self, issn: &Issn) -> Option<&JournalRecord> {
        self.by_issn.get(issn).map(|&i| &self.journals[i])
    }

    pub fn len(&self) -> usize {
        self.by_issn.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_issn.is_empty()
    }

    /// Journals reachable from at least one key, in source-list order.
    pub fn journals(&self) -> impl Iterator<Item = &JournalRecord> {
        let reachable: BTreeSet<usize> = self.by_issn.values().copied().collect();
        reachable.into_iter().map(move |i| &self.journals[i])
    }

    pub fn keys(&self) -> impl Iterator<Item = &Issn> {
        self.by_issn.keys()
    }
}

pub fn build_journal_index(journals: &[JournalRecord]) -> (JournalIndex, Vec<Conflict>) {
    let mut index = JournalIndex { journals: journals.to_vec(), by_issn: BTreeMap::new() };
    let mut conflicts = Vec::new();
    for (pos, journal) in journals.iter().enumerate() {
        for issn in journal.issns() {
            match index.by_issn.get(issn) {
                Some(&owner) if owner != pos => conflicts.push(Conflict {
                    issn: issn.clone(),
                    kept: journals[owner].title.clone(),
                    rejected: journal.title.clone(),
                }),
                Some(_) => {}
                None => {
                    index.by_issn.insert(issn.clone(), pos);
                }
            }
        }
    }
    (index, conflicts)
}

#[derive(Debug, Error)]
pub enum VocabularyError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: expected `code = label [, folds_into]`, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("line {line}: code {code} mapped twice")]
    DuplicateCode { line: usize, code: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct LabelEntry {
    label: String,
    folds_into: Option<String>,
    discipline: Option<String>,
}

/// Mapping from classification codes to specialty labels.
///
/// Text format, one mapping per line:
///
/// ```text
/// [Arts and Humanities]
/// 1201 = Arts and Humanities (miscellaneous), Arts and Humanities
/// 1202 = History
/// ```
///
/// A `[name]` header assigns the following codes to a discipline. `#` starts a comment.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelVocabulary {
    codes: BTreeMap<String, LabelEntry>,
}

impl LabelVocabulary {
    pub fn load(path: &Path) -> Result<Self, VocabularyError> {
        let text = std::fs::read_to_string(path).map_err(|e| VocabularyError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        text.parse()
    }

    pub fn insert(&mut self, code: &str, label: &str, folds_into: Option<&str>, discipline: Option<&str>) {
        self.codes.insert(
            code.to_string(),
            LabelEntry {
                label: label.to_string(),
                folds_into: folds_into.map(str::to_string),
                discipline: discipline.map(str::to_string),
            },
        );
    }

    /// The label a code resolves to after folding.
    pub fn label_for_code(&self, code: &str) -> Option<&str> {
        self.codes
            .get(code)
            .map(|e| e.folds_into.as_deref().unwrap_or(&e.label))
    }

    /// Folds a label name (raw or already unified) to its unified form, if known.
    pub fn unify_label<'a>(&'a self, name: &str) -> Option<&'a str> {
        self.codes.values().find_map(|e| {
            if e.label == name {
                Some(e.folds_into.as_deref().unwrap_or(&e.label))
            } else if e.folds_into.as_deref() == Some(name) {
                e.folds_into.as_deref()
            } else {
                None
            }
        })
    }

    /// Unified labels belonging to a discipline.
    pub fn discipline_labels(&self, discipline: &str) -> BTreeSet<String> {
        self.codes
            .values()
            .filter(|e| e.discipline.as_deref() == Some(discipline))
            .map(|e| e.folds_into.clone().unwrap_or_else(|| e.label.clone()))
            .collect()
    }

    /// Every unified label.
    pub fn labels(&self) -> BTreeSet<String> {
        self.codes
            .values()
            .map(|e| e.folds_into.clone().unwrap_or_else(|| e.label.clone()))
            .collect()
    }
}

impl FromStr for LabelVocabulary {
    type Err = VocabularyError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut vocab = LabelVocabulary::default();
        let mut discipline: Option<String> = None;
        for (i, raw_line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw_line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                discipline = Some(name.trim().to_string());
                continue;
            }
            let syntax = || VocabularyError::Syntax { line: line_no, text: raw_line.to_string() };
            let (code, rest) = line.split_once('=').ok_or_else(syntax)?;
            let code = code.trim();
            let (label, folds) = match rest.split_once(',') {
                Some((label, folds)) => (label.trim(), Some(folds.trim())),
                None => (rest.trim(), None),
            };
            if code.is_empty() || label.is_empty() || folds.is_some_and(str::is_empty) {
                return Err(syntax());
            }
            if vocab.codes.contains_key(code) {
                return Err(VocabularyError::DuplicateCode { line: line_no, code: code.to_string() });
            }
            vocab.insert(code, label, folds, discipline.as_deref());
        }
        Ok(vocab)
    }
}

/// Unified, deduplicated specialty labels of a journal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct SpecialtySet(BTreeSet<String>);

impl SpecialtySet {
    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.0.contains(label)
    }

    pub fn intersects(&self, labels: &BTreeSet<String>) -> bool {
        self.0.iter().any(|l| labels.contains(l))
    }

    pub fn as_set(&self) -> &BTreeSet<String> {
        &self.0
    }
}

impl FromIterator<String> for SpecialtySet {
    fn from_iter<I: IntoIterator<Item = String>>(iter: I) -> Self {
        SpecialtySet(iter.into_iter().collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("journal {title:?} has no classification code or name known to the vocabulary")]
pub struct UnclassifiableJournal {
    pub title: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Resolution {
    pub specialties: SpecialtySet,
    /// Codes that the vocabulary does not know.
    pub unknown_codes: Vec<String>,
}

/// Resolves a journal's codes to unified labels.
///
/// Codes are resolved first; when none resolves, the journal's own specialty names are
/// matched against the vocabulary instead.
pub fn resolve_specialties(
    record: &JournalRecord,
    vocabulary: &LabelVocabulary,
) -> Result<Resolution, UnclassifiableJournal> {
    let mut labels = BTreeSet::new();
    let mut unknown_codes = Vec::new();
    for code in &record.asjc_codes {
        match vocabulary.label_for_code(code) {
            Some(label) => {
                labels.insert(label.to_string());
            }
            None => unknown_codes.push(code.clone()),
        }
    }
    if labels.is_empty() {
        labels.extend(
            record
                .specialty_names
                .iter()
                .filter_map(|name| vocabulary.unify_label(name))
                .map(str::to_string),
        );
    }
    if labels.is_empty() {
        return Err(UnclassifiableJournal { title: record.title.clone() });
    }
    Ok(Resolution { specialties: SpecialtySet(labels), unknown_codes })
}

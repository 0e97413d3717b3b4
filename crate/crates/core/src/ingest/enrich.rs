use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::RawMention;

#[derive(Debug, Error)]
pub enum LookupError {
    #[error("lookup endpoint unavailable: {0}")]
    Unavailable(String),
    #[error("unexpected lookup response: {0}")]
    BadResponse(String),
}

#[derive(Debug, Error)]
pub enum EnrichError {
    #[error("invalid ISSN cache {path}: {message}")]
    InvalidCache { path: PathBuf, message: String },
    #[error("cannot write ISSN cache {path}: {source}")]
    CacheWrite {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid lookup fixture {path}: {message}")]
    InvalidFixture { path: PathBuf, message: String },
}

/// Source of ISSNs for a journal title.
///
/// `Ok(None)` means the source answered and knows no ISSN for the title.
pub trait IssnLookup {
    fn lookup(&self, journal_title: &str) -> Result<Option<Vec<String>>, LookupError>;
}

/// Lowercases and collapses runs of whitespace.
pub fn normalize_title(title: &str) -> String {
    title.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

#[derive(Debug, Deserialize)]
struct FixtureDocument {
    title: String,
    issns: Vec<String>,
}

/// Offline lookup backed by a directory of `{"title": ..., "issns": [...]}` documents.
#[derive(Debug, Clone, Default)]
pub struct FixtureLookup {
    by_title: BTreeMap<String, Vec<String>>,
}

impl FixtureLookup {
    pub fn load(dir: &Path) -> Result<Self, EnrichError> {
        let invalid = |path: &Path, message: String| EnrichError::InvalidFixture {
            path: path.to_path_buf(),
            message,
        };
        let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
            .map_err(|e| invalid(dir, e.to_string()))?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
            .collect();
        paths.sort();
        let mut by_title = BTreeMap::new();
        for path in paths {
            let text = std::fs::read_to_string(&path).map_err(|e| invalid(&path, e.to_string()))?;
            let doc: FixtureDocument =
                serde_json::from_str(&text).map_err(|e| invalid(&path, e.to_string()))?;
            by_title.insert(normalize_title(&doc.title), doc.issns);
        }
        Ok(FixtureLookup { by_title })
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Self {
        let mut by_title: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (title, issn) in pairs {
            by_title.entry(normalize_title(title)).or_default().push(issn.to_string());
        }
        FixtureLookup { by_title }
    }
}

impl IssnLookup for FixtureLookup {
    fn lookup(&self, journal_title: &str) -> Result<Option<Vec<String>>, LookupError> {
        Ok(self.by_title.get(&normalize_title(journal_title)).cloned())
    }
}

/// Live lookup against a MediaWiki `api.php`, reading ISSNs from the journal's infobox.
pub struct MediaWikiLookup {
    endpoint: String,
    agent: ureq::Agent,
}

impl MediaWikiLookup {
    pub fn new(endpoint: impl Into<String>) -> Self {
        let config = ureq::Agent::config_builder()
            .timeout_global(Some(std::time::Duration::from_secs(30)))
            .user_agent(concat!("sciomap/", env!("CARGO_PKG_VERSION")))
            .build();
        MediaWikiLookup { endpoint: endpoint.into(), agent: config.into() }
    }
}

impl IssnLookup for MediaWikiLookup {
    fn lookup(&self, journal_title: &str) -> Result<Option<Vec<String>>, LookupError> {
        let body = self
            .agent
            .get(&self.endpoint)
            .query("action", "query")
            .query("format", "json")
            .query("formatversion", "2")
            .query("prop", "revisions")
            .query("rvprop", "content")
            .query("rvslots", "main")
            .query("redirects", "1")
            .query("titles", journal_title)
            .call()
            .map_err(|e| LookupError::Unavailable(e.to_string()))?
            .body_mut()
            .read_to_string()
            .map_err(|e| LookupError::Unavailable(e.to_string()))?;
        parse_query_response(&body)
    }
}

/// Extracts infobox ISSNs from an `action=query&prop=revisions` JSON response.
pub(crate) fn parse_query_response(body: &str) -> Result<Option<Vec<String>>, LookupError> {
    let json: serde_json::Value =
        serde_json::from_str(body).map_err(|e| LookupError::BadResponse(e.to_string()))?;
    let page = json
        .pointer("/query/pages/0")
        .ok_or_else(|| LookupError::BadResponse("no query.pages".into()))?;
    if page.get("missing").is_some() || page.get("invalid").is_some() {
        return Ok(None);
    }
    let content = page
        .pointer("/revisions/0/slots/main/content")
        .and_then(serde_json::Value::as_str)
        .ok_or_else(|| LookupError::BadResponse("no revision content".into()))?;
    let issns = extract_issns_from_wikitext(content);
    Ok((!issns.is_empty()).then_some(issns))
}

/// Collects `issn = ...` and `eissn = ...` infobox parameters, in order of appearance.
pub fn extract_issns_from_wikitext(text: &str) -> Vec<String> {
    static PATTERN: OnceLock<Regex> = OnceLock::new();
    let re = PATTERN.get_or_init(|| {
        Regex::new(r"(?i)\|\s*e?issn\d?\s*=\s*([0-9]{4}-?[0-9]{3}[0-9x])").unwrap()
    });
    let mut found: Vec<String> = Vec::new();
    for cap in re.captures_iter(text) {
        let issn = cap[1].to_uppercase();
        if !found.contains(&issn) {
            found.push(issn);
        }
    }
    found
}

/// Title → ISSN list cache persisted as a JSON object. Empty lists record known misses.
#[derive(Debug, Clone, Default)]
pub struct IssnCache {
    path: Option<PathBuf>,
    entries: BTreeMap<String, Vec<String>>,
    dirty: bool,
}

impl IssnCache {
    pub fn in_memory() -> Self {
        IssnCache::default()
    }

    /// Opens the cache at `path`; a missing file is an empty cache.
    pub fn open(path: &Path) -> Result<Self, EnrichError> {
        let entries = match std::fs::read_to_string(path) {
            Ok(text) => serde_json::from_str(&text).map_err(|e| EnrichError::InvalidCache {
                path: path.to_path_buf(),
                message: e.to_string(),
            })?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => BTreeMap::new(),
            Err(e) => {
                return Err(EnrichError::InvalidCache {
                    path: path.to_path_buf(),
                    message: e.to_string(),
                })
            }
        };
        Ok(IssnCache { path: Some(path.to_path_buf()), entries, dirty: false })
    }

    pub fn get(&self, title: &str) -> Option<&Vec<String>> {
        self.entries.get(&normalize_title(title))
    }

    pub fn insert(&mut self, title: &str, issns: Vec<String>) {
        self.entries.insert(normalize_title(title), issns);
        self.dirty = true;
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn save(&mut self) -> Result<(), EnrichError> {
        let Some(path) = &self.path else { return Ok(()) };
        if !self.dirty {
            return Ok(());
        }
        let write_err = |source| EnrichError::CacheWrite { path: path.clone(), source };
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).map_err(write_err)?;
        }
        let mut text = serde_json::to_string_pretty(&self.entries).expect("string map serializes");
        text.push('\n');
        std::fs::write(path, text).map_err(write_err)?;
        self.dirty = false;
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct EnrichReport {
    pub mentions: usize,
    /// Mentions that already carried an ISSN.
    pub passed_through: usize,
    pub cache_hits: usize,
    pub lookups: usize,
    /// Mentions that received at least one ISSN.
    pub resolved: usize,
    /// Mentions for which no source knows an ISSN.
    pub misses: usize,
    /// Mentions whose lookup could not be completed.
    pub failures: usize,
}

/// Fills missing ISSNs from `cache` first, then from `client` when one is given.
pub fn enrich_with_cache(
    mentions: Vec<RawMention>,
    client: Option<&dyn IssnLookup>,
    cache: &mut IssnCache,
) -> (Vec<RawMention>, EnrichReport) {
    let mut report = EnrichReport { mentions: mentions.len(), ..Default::default() };
    let mut out = Vec::with_capacity(mentions.len());
    for mut mention in mentions {
        if !mention.issns.is_empty() {
            report.passed_through += 1;
            out.push(mention);
            continue;
        }
        let found = if let Some(cached) = cache.get(&mention.journal_title) {
            report.cache_hits += 1;
            Some(cached.clone())
        } else if let Some(client) = client {
            report.lookups += 1;
            match client.lookup(&mention.journal_title) {
                Ok(issns) => {
                    let issns = issns.unwrap_or_default();
                    cache.insert(&mention.journal_title, issns.clone());
                    Some(issns)
                }
                Err(_) => None,
            }
        } else {
            None
        };
        match found {
            Some(issns) if !issns.is_empty() => {
                report.resolved += 1;
                mention.issns = issns;
            }
            Some(_) => report.misses += 1,
            None if client.is_some() => report.failures += 1,
            None => report.misses += 1,
        }
        out.push(mention);
    }
    (out, report)
}

/// Enriches against the cache file at `cache_path`, writing back new lookups.
pub fn enrich_issn(
    mentions: Vec<RawMention>,
    client: Option<&dyn IssnLookup>,
    cache_path: &Path,
) -> Result<(Vec<RawMention>, EnrichReport), EnrichError> {
    let mut cache = IssnCache::open(cache_path)?;
    let result = enrich_with_cache(mentions, client, &mut cache);
    cache.save()?;
    Ok(result)
}

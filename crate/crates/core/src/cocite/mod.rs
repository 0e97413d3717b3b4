//! Co-citation networks and the pruning steps applied before scaling.
//!
//! Two journals (or specialties) are co-cited when one Wikipedia entry cites articles
//! from both. At specialty level every cited article carries all labels of its journal,
//! but a label pair only counts when the two labels come from two different journals:
//! a journal filed under both History and Philosophy does not by itself link the two.

mod graph;

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use graph::{
    components, largest_component, ComponentPartition, GraphError, IndexedGraph, NodeAttrs,
    NodeId, WeightedGraph,
};

use crate::catalog::JournalIndex;
use crate::corpus::{CitationRecord, EntryId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Journal,
    Specialty,
}

/// How much one entry adds to an edge.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Counting {
    /// One per citing entry.
    #[default]
    Entries,
    /// One per pair of cited articles.
    Pairs,
}

/// What a single entry contributes.
#[derive(Default)]
struct Contribution {
    weights: BTreeMap<(NodeId, NodeId), u64>,
    /// (node, article id) pairs taking part in a co-citation.
    involved: BTreeSet<(NodeId, String)>,
}

struct CitedJournal<'a> {
    /// Hyphenated ISSN, the journal's node id.
    key: String,
    articles: BTreeSet<&'a str>,
    labels: BTreeSet<&'a str>,
}

fn group_by_journal<'a>(records: &[&'a CitationRecord]) -> Vec<CitedJournal<'a>> {
    let mut by_journal: BTreeMap<&str, CitedJournal<'a>> = BTreeMap::new();
    for r in records {
        let j = by_journal.entry(r.journal.as_str()).or_insert_with(|| CitedJournal {
            key: r.journal.hyphenated(),
            articles: BTreeSet::new(),
            labels: BTreeSet::new(),
        });
        j.articles.insert(&r.article_id);
        j.labels.extend(r.specialties.iter());
    }
    by_journal.into_values().collect()
}

fn pair(a: &str, b: &str) -> (NodeId, NodeId) {
    if a < b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

fn journal_contribution(journals: &[CitedJournal<'_>], counting: Counting) -> Contribution {
    let mut c = Contribution::default();
    for (i, a) in journals.iter().enumerate() {
        for b in &journals[i + 1..] {
            let add = match counting {
                Counting::Entries => 1,
                Counting::Pairs => (a.articles.len() * b.articles.len()) as u64,
            };
            *c.weights.entry(pair(&a.key, &b.key)).or_default() += add;
        }
    }
    if journals.len() >= 2 {
        for j in journals {
            c.involved.extend(j.articles.iter().map(|art| (j.key.clone(), art.to_string())));
        }
    }
    c
}

fn specialty_contribution(journals: &[CitedJournal<'_>], counting: Counting) -> Contribution {
    let mut c = Contribution::default();
    let mut seen_in_entry: BTreeSet<(NodeId, NodeId)> = BTreeSet::new();
    for (i, a) in journals.iter().enumerate() {
        for b in &journals[i + 1..] {
            let mut generated: BTreeSet<(NodeId, NodeId)> = BTreeSet::new();
            for &la in &a.labels {
                for &lb in &b.labels {
                    if la != lb {
                        generated.insert(pair(la, lb));
                    }
                }
            }
            let article_pairs = (a.articles.len() * b.articles.len()) as u64;
            for p in generated {
                match counting {
                    Counting::Pairs => *c.weights.entry(p).or_default() += article_pairs,
                    Counting::Entries => {
                        seen_in_entry.insert(p);
                    }
                }
            }
        }
    }
    for p in seen_in_entry {
        *c.weights.entry(p).or_default() += 1;
    }
    // A label of journal J is involved when another journal brings a different label.
    for (i, j) in journals.iter().enumerate() {
        for &label in &j.labels {
            let partnered = journals
                .iter()
                .enumerate()
                .any(|(k, other)| k != i && other.labels.iter().any(|&l| l != label));
            if partnered {
                c.involved.extend(j.articles.iter().map(|art| (label.to_string(), art.to_string())));
            }
        }
    }
    c
}

/// Builds the co-citation graph of deduplicated citation records.
///
/// Only nodes taking part in at least one co-citation appear. Journal nodes are labelled
/// with their ISSN; see [`label_journals`].
pub fn build_cocitation_graph(
    records: &[CitationRecord],
    level: Level,
    counting: Counting,
) -> WeightedGraph {
    let mut by_entry: BTreeMap<&EntryId, Vec<&CitationRecord>> = BTreeMap::new();
    for r in records {
        by_entry.entry(&r.entry).or_default().push(r);
    }
    let entries: Vec<Vec<&CitationRecord>> = by_entry.into_values().collect();
    let contributions: Vec<Contribution> = entries
        .par_iter()
        .map(|cited| {
            let journals = group_by_journal(cited);
            match level {
                Level::Journal => journal_contribution(&journals, counting),
                Level::Specialty => specialty_contribution(&journals, counting),
            }
        })
        .collect();

    let mut weights: BTreeMap<(NodeId, NodeId), u64> = BTreeMap::new();
    let mut involved: BTreeMap<NodeId, BTreeSet<String>> = BTreeMap::new();
    for c in contributions {
        for (p, w) in c.weights {
            *weights.entry(p).or_default() += w;
        }
        for (node, article) in c.involved {
            involved.entry(node).or_default().insert(article);
        }
    }

    let mut node_specialties: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    if level == Level::Journal {
        for r in records {
            node_specialties
                .entry(r.journal.hyphenated())
                .or_default()
                .extend(r.specialties.iter().map(str::to_string));
        }
    }

    let mut g = WeightedGraph::new();
    for (id, articles) in involved {
        let specialties = match level {
            Level::Journal => node_specialties.remove(id.as_str()).unwrap_or_default(),
            Level::Specialty => BTreeSet::from([id.clone()]),
        };
        let attrs = NodeAttrs { label: id.clone(), specialties, article_count: articles.len() };
        g.add_node(id, attrs);
    }
    for ((a, b), w) in weights {
        g.add_edge(&a, &b, w as f64).expect("co-citation endpoints are involved nodes");
    }
    g
}

/// Replaces ISSN labels with journal titles where the index knows them.
pub fn label_journals(g: &mut WeightedGraph, index: &JournalIndex) {
    let ids: Vec<NodeId> = g.node_ids().cloned().collect();
    for id in ids {
        let title = id.parse().ok().and_then(|issn| index.get(&issn)).map(|j| j.title.clone());
        if let (Some(title), Some(attrs)) = (title, g.node_mut(&id)) {
            attrs.label = title;
        }
    }
}

/// Removes edges lighter than `min_weight`; nodes are kept.
pub fn prune_threshold(g: &WeightedGraph, min_weight: f64) -> WeightedGraph {
    let mut out = g.clone();
    out.retain_edges(|_, _, w| w >= min_weight);
    out
}

pub fn drop_isolates(g: &WeightedGraph) -> WeightedGraph {
    let connected: BTreeSet<NodeId> =
        g.edges().flat_map(|(a, b, _)| [a.clone(), b.clone()]).collect();
    let mut out = g.clone();
    out.retain_nodes(|id| connected.contains(id));
    out
}

/// Divides every weight by the largest, so the maximum becomes exactly 1.
pub fn normalize_weights(g: &WeightedGraph) -> WeightedGraph {
    let max = g.edges().map(|(_, _, w)| w).fold(0.0, f64::max);
    if max == 0.0 {
        return g.clone();
    }
    g.map_weights(|w| w / max).expect("positive weights stay positive")
}

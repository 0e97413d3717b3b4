//! Slow, direct reimplementations used to check the library.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use rand::Rng;

use sciomap::cocite::{Counting, Level, WeightedGraph};
use sciomap::corpus::CitationRecord;

/// `NNNN-NNNC` with a valid check character.
pub fn issn_from_body(body: u32) -> String {
    let digits = format!("{body:07}");
    let mut sum = 0;
    for (i, c) in digits.chars().enumerate() {
        sum += c.to_digit(10).unwrap() * (8 - i as u32);
    }
    let check = (11 - sum % 11) % 11;
    let check = if check == 10 { "X".to_string() } else { check.to_string() };
    format!("{}-{}{}", &digits[..4], &digits[4..], check)
}

fn ordered(a: &str, b: &str) -> (String, String) {
    if a < b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

/// Co-citation weights by walking every pair of records cited by the same entry.
pub fn cocitation_weights(records: &[CitationRecord], level: Level, counting: Counting) -> BTreeMap<(String, String), u64> {
    let mut by_entry: BTreeMap<String, Vec<&CitationRecord>> = BTreeMap::new();
    for r in records {
        by_entry.entry(format!("{}\u{1}{}", r.entry.language, r.entry.title)).or_default().push(r);
    }
    let mut weights: BTreeMap<(String, String), u64> = BTreeMap::new();
    for cited in by_entry.values() {
        let mut seen: BTreeSet<(String, String)> = BTreeSet::new();
        for x in 0..cited.len() {
            for y in x + 1..cited.len() {
                let (a, b) = (cited[x], cited[y]);
                if a.journal == b.journal {
                    continue;
                }
                let mut keys = BTreeSet::new();
                match level {
                    Level::Journal => {
                        keys.insert(ordered(&a.journal.hyphenated(), &b.journal.hyphenated()));
                    }
                    Level::Specialty => {
                        for la in a.specialties.iter() {
                            for lb in b.specialties.iter() {
                                if la != lb {
                                    keys.insert(ordered(la, lb));
                                }
                            }
                        }
                    }
                }
                for key in keys {
                    match counting {
                        Counting::Pairs => *weights.entry(key).or_default() += 1,
                        Counting::Entries => {
                            seen.insert(key);
                        }
                    }
                }
            }
        }
        for key in seen {
            *weights.entry(key).or_default() += 1;
        }
    }
    weights
}

/// Random simple graph on `n` nodes; each edge present with probability `density`.
pub fn random_edges(rng: &mut impl Rng, n: usize, density: f64, weights: std::ops::RangeInclusive<u32>) -> Vec<(usize, usize, f64)> {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(density) {
                edges.push((i, j, f64::from(rng.random_range(weights.clone()))));
            }
        }
    }
    edges
}

pub fn node_name(i: usize) -> String {
    format!("v{i:02}")
}

pub fn to_graph(n: usize, edges: &[(usize, usize, f64)]) -> WeightedGraph {
    let mut g = WeightedGraph::new();
    for i in 0..n {
        g.add_node(node_name(i), sciomap::cocite::NodeAttrs::labelled(node_name(i)));
    }
    for &(a, b, w) in edges {
        g.add_edge(&node_name(a), &node_name(b), w).unwrap();
    }
    g
}

pub fn edge_set(g: &WeightedGraph) -> BTreeSet<(String, String)> {
    g.edges().map(|(a, b, _)| (a.clone(), b.clone())).collect()
}

fn adjacency(n: usize, edges: &[(usize, usize, f64)]) -> Vec<Vec<(usize, f64)>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b, w) in edges {
        adj[a].push((b, w));
        adj[b].push((a, w));
    }
    adj
}

/// Path cost in the Minkowski metric: `None` is r = infinity (the largest link), otherwise
/// the sum of `d^r` (comparing these sums is equivalent to comparing their r-th roots).
fn link_cost(d: f64, r: Option<i32>) -> f64 {
    match r {
        None => d,
        Some(r) => d.powi(r),
    }
}

fn extend(cost: f64, link: f64, r: Option<i32>) -> f64 {
    match r {
        None => cost.max(link),
        Some(_) => cost + link,
    }
}

/// Edges kept by Pathfinder: an edge goes when some other simple path with at most `q`
/// links is strictly cheaper.
pub fn pathfinder_edges(n: usize, edges: &[(usize, usize, f64)], r: Option<i32>, q: usize) -> BTreeSet<(usize, usize)> {
    let adj = adjacency(n, edges);
    // cheapest[s][t]: cheapest path from s to t with 2..=q links.
    let mut cheapest = vec![vec![f64::INFINITY; n]; n];
    for s in 0..n {
        let mut on_path = vec![false; n];
        on_path[s] = true;
        let mut stack = Vec::new();
        walk(&adj, s, 0.0, 0, q, r, &mut on_path, &mut cheapest[s], &mut stack);
    }
    edges
        .iter()
        .filter(|&&(a, b, w)| cheapest[a][b] >= link_cost(w, r))
        .map(|&(a, b, _)| (a, b))
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn walk(
    adj: &[Vec<(usize, f64)>],
    v: usize,
    cost: f64,
    links: usize,
    q: usize,
    r: Option<i32>,
    on_path: &mut [bool],
    cheapest: &mut [f64],
    stack: &mut Vec<usize>,
) {
    if links >= 2 && cost < cheapest[v] {
        cheapest[v] = cost;
    }
    if links == q {
        return;
    }
    for &(w, d) in &adj[v] {
        if !on_path[w] {
            on_path[w] = true;
            stack.push(w);
            walk(adj, w, extend(cost, link_cost(d, r), r), links + 1, q, r, on_path, cheapest, stack);
            stack.pop();
            on_path[w] = false;
        }
    }
}

/// Betweenness by listing every shortest path between every pair. Weights must be exact
/// in floating point (small integers) so that equal-length paths compare equal.
pub fn betweenness(n: usize, edges: &[(usize, usize, f64)], weighted: bool) -> Vec<f64> {
    let adj = adjacency(n, edges);
    let mut total = vec![0.0; n];
    for s in 0..n {
        let mut paths: Vec<Vec<(f64, Vec<usize>)>> = vec![Vec::new(); n];
        let mut on_path = vec![false; n];
        on_path[s] = true;
        let mut path = vec![s];
        list_paths(&adj, weighted, 0.0, &mut path, &mut on_path, &mut paths);
        for targets in paths.iter().skip(s + 1) {
            let best = targets.iter().map(|(c, _)| *c).fold(f64::INFINITY, f64::min);
            let shortest: Vec<&Vec<usize>> = targets.iter().filter(|(c, _)| *c == best).map(|(_, p)| p).collect();
            if shortest.is_empty() {
                continue;
            }
            for p in &shortest {
                for &v in &p[1..p.len() - 1] {
                    total[v] += 1.0 / shortest.len() as f64;
                }
            }
        }
    }
    total
}

fn list_paths(
    adj: &[Vec<(usize, f64)>],
    weighted: bool,
    cost: f64,
    path: &mut Vec<usize>,
    on_path: &mut [bool],
    out: &mut [Vec<(f64, Vec<usize>)>],
) {
    let v = *path.last().unwrap();
    if path.len() > 1 {
        out[v].push((cost, path.clone()));
    }
    for &(w, d) in &adj[v] {
        if !on_path[w] {
            on_path[w] = true;
            path.push(w);
            list_paths(adj, weighted, cost + if weighted { d } else { 1.0 }, path, on_path, out);
            path.pop();
            on_path[w] = false;
        }
    }
}

pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut x = x;
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }

    /// Components as sorted member lists.
    pub fn groups(&mut self) -> Vec<Vec<usize>> {
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for x in 0..self.parent.len() {
            let root = self.find(x);
            groups.entry(root).or_default().push(x);
        }
        groups.into_values().collect()
    }
}

/// Components of a named graph.
pub fn component_sets(g: &WeightedGraph) -> Vec<BTreeSet<String>> {
    let ids: Vec<String> = g.node_ids().cloned().collect();
    let index: HashMap<&str, usize> = ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
    let mut uf = UnionFind::new(ids.len());
    for (a, b, _) in g.edges() {
        uf.union(index[a.as_str()], index[b.as_str()]);
    }
    uf.groups().into_iter().map(|members| members.into_iter().map(|i| ids[i].clone()).collect()).collect()
}

/// (n, mean, median, smallest mode, sample std dev, min, max).
pub fn summary(values: &[f64]) -> (usize, f64, f64, f64, f64, f64, f64) {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = if n % 2 == 1 { sorted[n / 2] } else { (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0 };
    let mut counts: BTreeMap<u64, (f64, usize)> = BTreeMap::new();
    for v in values {
        counts.entry(v.to_bits()).or_insert((*v, 0)).1 += 1;
    }
    let top = counts.values().map(|c| c.1).max().unwrap();
    let mode = counts.values().filter(|c| c.1 == top).map(|c| c.0).fold(f64::INFINITY, f64::min);
    let var = if n > 1 { values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64 } else { 0.0 };
    (n, mean, median, mode, var.sqrt(), sorted[0], sorted[n - 1])
}

/// Count of records under each key.
pub fn tally<K: Ord>(keys: impl IntoIterator<Item = K>) -> BTreeMap<K, usize> {
    let mut out = BTreeMap::new();
    for k in keys {
        *out.entry(k).or_insert(0) += 1;
    }
    out
}

/// Rows of a CSV file as header-keyed maps.
pub fn read_csv_rows(path: &Path) -> Vec<BTreeMap<String, String>> {
    let mut reader = csv::Reader::from_path(path).unwrap();
    let headers = reader.headers().unwrap().clone();
    reader
        .records()
        .map(|r| headers.iter().map(String::from).zip(r.unwrap().iter().map(String::from)).collect())
        .collect()
}

/// Code to unified label, read straight from a vocabulary file.
pub fn code_labels(path: &Path) -> BTreeMap<String, String> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut out = BTreeMap::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('[') {
            continue;
        }
        let (code, rest) = line.split_once('=').unwrap();
        let label = rest.rsplit(',').next().unwrap().trim();
        out.insert(code.trim().to_string(), label.to_string());
    }
    out
}

/// Per journal of a source list: ISSNs (hyphenated), title, open access, percentile,
/// output, citations, labels.
pub struct SourceRow {
    pub issns: Vec<String>,
    pub title: String,
    pub open_access: bool,
    pub percentile: f64,
    pub output: u64,
    pub citations: u64,
    pub labels: BTreeSet<String>,
}

pub fn source_rows(sources: &Path, labels: &Path) -> Vec<SourceRow> {
    let codes = code_labels(labels);
    read_csv_rows(sources)
        .into_iter()
        .map(|row| SourceRow {
            issns: [&row["print_issn"], &row["e_issn"]].into_iter().filter(|s| !s.is_empty()).map(|s| s.to_uppercase()).collect(),
            title: row["title"].clone(),
            open_access: row["open_access"] == "true",
            percentile: row["top_percentile"].parse().unwrap_or(100.0),
            output: row["scholarly_output"].parse().unwrap_or(0),
            citations: row["citation_count"].parse().unwrap_or(0),
            labels: row["asjc_codes"].split(';').filter_map(|c| codes.get(c.trim()).cloned()).collect(),
        })
        .collect()
}

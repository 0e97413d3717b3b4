use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Node identifier: a journal's canonical ISSN or a specialty label.
pub type NodeId = String;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("self-loop on {0:?}")]
    SelfLoop(NodeId),
    #[error("edge {a:?}-{b:?} has non-positive or non-finite weight {weight}")]
    BadWeight { a: NodeId, b: NodeId, weight: f64 },
    #[error("edge endpoint {0:?} is not a node")]
    UnknownNode(NodeId),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeAttrs {
    pub label: String,
    #[serde(default)]
    pub specialties: BTreeSet<String>,
    /// Distinct articles under this node involved in at least one co-citation.
    #[serde(default)]
    pub article_count: usize,
}

impl NodeAttrs {
    pub fn labelled(label: impl Into<String>) -> Self {
        NodeAttrs { label: label.into(), ..Default::default() }
    }
}

/// Undirected graph with positive edge weights and ordered node ids.
///
/// Edges are stored once under `(min, max)` of their endpoints.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(into = "GraphFile", try_from = "GraphFile")]
pub struct WeightedGraph {
    nodes: BTreeMap<NodeId, NodeAttrs>,
    edges: BTreeMap<(NodeId, NodeId), f64>,
}

fn ordered(a: &str, b: &str) -> (NodeId, NodeId) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

impl WeightedGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts a node or replaces its attributes.
    pub fn add_node(&mut self, id: impl Into<NodeId>, attrs: NodeAttrs) {
        self.nodes.insert(id.into(), attrs);
    }

    /// Inserts or overwrites an edge. Both endpoints must exist.
    pub fn add_edge(&mut self, a: &str, b: &str, weight: f64) -> Result<(), GraphError> {
        if a == b {
            return Err(GraphError::SelfLoop(a.to_string()));
        }
        if !(weight.is_finite() && weight > 0.0) {
            return Err(GraphError::BadWeight { a: a.into(), b: b.into(), weight });
        }
        for end in [a, b] {
            if !self.nodes.contains_key(end) {
                return Err(GraphError::UnknownNode(end.to_string()));
            }
        }
        self.edges.insert(ordered(a, b), weight);
        Ok(())
    }

    /// Builds a graph from an edge list, creating nodes labelled by their ids.
    pub fn from_edges<'a>(
        edges: impl IntoIterator<Item = (&'a str, &'a str, f64)>,
    ) -> Result<Self, GraphError> {
        let mut g = WeightedGraph::new();
        for (a, b, w) in edges {
            for end in [a, b] {
                if !g.nodes.contains_key(end) {
                    g.add_node(end, NodeAttrs::labelled(end));
                }
            }
            g.add_edge(a, b, w)?;
        }
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains_node(&self, id: &str) -> bool {
        self.nodes.contains_key(id)
    }

    pub fn node(&self, id: &str) -> Option<&NodeAttrs> {
        self.nodes.get(id)
    }

    pub fn node_mut(&mut self, id: &str) -> Option<&mut NodeAttrs> {
        self.nodes.get_mut(id)
    }

    /// Nodes in id order.
    pub fn nodes(&self) -> impl Iterator<Item = (&NodeId, &NodeAttrs)> {
        self.nodes.iter()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = &NodeId> {
        self.nodes.keys()
    }

    /// Edges as `(a, b, weight)` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (&NodeId, &NodeId, f64)> {
        self.edges.iter().map(|((a, b), w)| (a, b, *w))
    }

    pub fn weight(&self, a: &str, b: &str) -> Option<f64> {
        self.edges.get(&ordered(a, b)).copied()
    }

    pub fn degree(&self, id: &str) -> usize {
        self.edges.keys().filter(|(a, b)| a == id || b == id).count()
    }

    /// Keeps edges for which `keep(a, b, w)` holds. Nodes are untouched.
    pub fn retain_edges(&mut self, mut keep: impl FnMut(&str, &str, f64) -> bool) {
        self.edges.retain(|(a, b), w| keep(a, b, *w));
    }

    pub fn retain_nodes(&mut self, mut keep: impl FnMut(&str) -> bool) {
        self.nodes.retain(|id, _| keep(id));
        let nodes = &self.nodes;
        self.edges.retain(|(a, b), _| nodes.contains_key(a) && nodes.contains_key(b));
    }

    /// Applies `f` to every weight. `f` must keep weights positive and finite.
    pub fn map_weights(&self, mut f: impl FnMut(f64) -> f64) -> Result<Self, GraphError> {
        let mut out = WeightedGraph { nodes: self.nodes.clone(), edges: BTreeMap::new() };
        for ((a, b), w) in &self.edges {
            out.add_edge(a, b, f(*w))?;
        }
        Ok(out)
    }

    pub fn induced_subgraph<'a>(&self, keep: impl IntoIterator<Item = &'a NodeId>) -> Self {
        let keep: BTreeSet<&NodeId> = keep.into_iter().collect();
        let mut g = self.clone();
        g.retain_nodes(|id| keep.iter().any(|k| k.as_str() == id));
        g
    }

    /// Dense index view: node `i` is the `i`-th id in sorted order.
    pub fn indexed(&self) -> IndexedGraph {
        let ids: Vec<NodeId> = self.nodes.keys().cloned().collect();
        let position: BTreeMap<&str, usize> =
            ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
        let mut adjacency = vec![Vec::new(); ids.len()];
        let mut edges = Vec::with_capacity(self.edges.len());
        for ((a, b), w) in &self.edges {
            let (i, j) = (position[a.as_str()], position[b.as_str()]);
            adjacency[i].push((j, *w));
            adjacency[j].push((i, *w));
            edges.push((i, j, *w));
        }
        IndexedGraph { ids, adjacency, edges }
    }
}

/// Integer-indexed adjacency of a [`WeightedGraph`], for the numeric kernels.
#[derive(Debug, Clone)]
pub struct IndexedGraph {
    pub ids: Vec<NodeId>,
    pub adjacency: Vec<Vec<(usize, f64)>>,
    /// `(i, j, w)` with `i < j`.
    pub edges: Vec<(usize, usize, f64)>,
}

impl IndexedGraph {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    nodes: Vec<NodeRecord>,
    edges: Vec<EdgeRecord>,
}

#[derive(Serialize, Deserialize)]
struct NodeRecord {
    id: NodeId,
    #[serde(flatten)]
    attrs: NodeAttrs,
}

#[derive(Serialize, Deserialize)]
struct EdgeRecord {
    source: NodeId,
    target: NodeId,
    weight: f64,
}

impl From<WeightedGraph> for GraphFile {
    fn from(g: WeightedGraph) -> Self {
        GraphFile {
            nodes: g.nodes.into_iter().map(|(id, attrs)| NodeRecord { id, attrs }).collect(),
            edges: g
                .edges
                .into_iter()
                .map(|((source, target), weight)| EdgeRecord { source, target, weight })
                .collect(),
        }
    }
}

impl TryFrom<GraphFile> for WeightedGraph {
    type Error = GraphError;

    fn try_from(file: GraphFile) -> Result<Self, Self::Error> {
        let mut g = WeightedGraph::new();
        for n in file.nodes {
            g.add_node(n.id, n.attrs);
        }
        for e in file.edges {
            g.add_edge(&e.source, &e.target, e.weight)?;
        }
        Ok(g)
    }
}

/// Connected components, numbered by descending size; ties by smallest member id.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ComponentPartition {
    pub assignment: BTreeMap<NodeId, usize>,
    pub sizes: Vec<usize>,
}

pub fn components(g: &WeightedGraph) -> ComponentPartition {
    let indexed = g.indexed();
    let n = indexed.len();
    let mut seen = vec![false; n];
    // Components discovered from the smallest unvisited id, so discovery order is the tie order.
    let mut found: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut members = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &(w, _) in &indexed.adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    members.push(w);
                    queue.push_back(w);
                }
            }
        }
        found.push(members);
    }
    found.sort_by_key(|c| std::cmp::Reverse(c.len()));
    let mut assignment = BTreeMap::new();
    for (c, members) in found.iter().enumerate() {
        for &v in members {
            assignment.insert(indexed.ids[v].clone(), c);
        }
    }
    ComponentPartition { assignment, sizes: found.iter().map(Vec::len).collect() }
}

/// Induced subgraph of the largest component (component 0).
pub fn largest_component(g: &WeightedGraph) -> WeightedGraph {
    let partition = components(g);
    let keep: Vec<&NodeId> =
        partition.assignment.iter().filter(|(_, &c)| c == 0).map(|(id, _)| id).collect();
    g.induced_subgraph(keep)
}

use std::collections::BTreeMap;
use std::path::Path;

use quick_xml::escape::escape;
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::{read_file, write_file, ExportError, GraphDocument};
use crate::cocite::{NodeAttrs, WeightedGraph};

const ATTRIBUTES: [(&str, &str); 4] =
    [("community", "integer"), ("degree", "integer"), ("betweenness", "double"), ("article_count", "integer")];

/// Undirected GEXF 1.2 with one attribute value per node for each entry of [`ATTRIBUTES`].
pub fn gexf_string(doc: &GraphDocument) -> String {
    let g = &doc.graph;
    let mut out = String::from(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <gexf xmlns=\"http://www.gexf.net/1.2draft\" version=\"1.2\">\n  \
         <graph mode=\"static\" defaultedgetype=\"undirected\">\n    \
         <attributes class=\"node\">\n",
    );
    for (i, (title, kind)) in ATTRIBUTES.iter().enumerate() {
        out.push_str(&format!("      <attribute id=\"{i}\" title=\"{title}\" type=\"{kind}\"/>\n"));
    }
    out.push_str("    </attributes>\n    <nodes>\n");
    for (id, attrs) in g.nodes() {
        let values = [
            doc.community.get(id).copied().unwrap_or(0).to_string(),
            doc.degree.get(id).copied().unwrap_or(0).to_string(),
            doc.format(doc.betweenness.get(id).copied().unwrap_or(0.0)),
            attrs.article_count.to_string(),
        ];
        out.push_str(&format!("      <node id=\"{}\" label=\"{}\">\n        <attvalues>\n", escape(id), escape(&attrs.label)));
        for (i, v) in values.iter().enumerate() {
            out.push_str(&format!("          <attvalue for=\"{i}\" value=\"{v}\"/>\n"));
        }
        out.push_str("        </attvalues>\n      </node>\n");
    }
    out.push_str("    </nodes>\n    <edges>\n");
    for (i, (a, b, w)) in g.edges().enumerate() {
        out.push_str(&format!(
            "      <edge id=\"{i}\" source=\"{}\" target=\"{}\" weight=\"{}\"/>\n",
            escape(a),
            escape(b),
            doc.format(w)
        ));
    }
    out.push_str("    </edges>\n  </graph>\n</gexf>\n");
    out
}

pub fn write_gexf(doc: &GraphDocument, path: &Path) -> Result<(), ExportError> {
    write_file(path, &gexf_string(doc))
}

fn attributes(e: &BytesStart, reader: &Reader<&[u8]>, line: usize) -> Result<BTreeMap<String, String>, ExportError> {
    e.attributes()
        .map(|a| {
            let a = a.map_err(|err| ExportError::Parse { line, message: err.to_string() })?;
            let key = String::from_utf8_lossy(a.key.as_ref()).into_owned();
            let value = a
                .decode_and_unescape_value(reader.decoder())
                .map_err(|err| ExportError::Parse { line, message: err.to_string() })?;
            Ok((key, value.into_owned()))
        })
        .collect()
}

fn line_of(text: &str, offset: u64) -> usize {
    text.as_bytes()[..(offset as usize).min(text.len())].iter().filter(|&&b| b == b'\n').count() + 1
}

/// Recovers nodes, labels, edge weights, and the node attributes from a GEXF document.
pub fn parse_gexf(text: &str) -> Result<GraphDocument, ExportError> {
    let mut reader = Reader::from_str(text);
    let mut titles: BTreeMap<String, String> = BTreeMap::new();
    let mut nodes: Vec<(String, NodeAttrs)> = Vec::new();
    let mut values: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
    let mut edges: Vec<(String, String, String, usize)> = Vec::new();
    let mut current: Option<String> = None;
    loop {
        let line = line_of(text, reader.buffer_position());
        let event = reader.read_event().map_err(|e| ExportError::Parse { line, message: e.to_string() })?;
        let (start, empty) = match &event {
            Event::Start(e) => (e, false),
            Event::Empty(e) => (e, true),
            Event::End(e) if e.name().as_ref() == b"node" => {
                current = None;
                continue;
            }
            Event::Eof => break,
            _ => continue,
        };
        let mut attrs = attributes(start, &reader, line)?;
        let mut take = |key: &str| {
            attrs.remove(key).ok_or_else(|| ExportError::Parse { line, message: format!("missing attribute {key:?}") })
        };
        match start.name().as_ref() {
            b"attribute" => {
                let id = take("id")?;
                titles.insert(id, take("title")?);
            }
            b"node" => {
                let id = take("id")?;
                let label = take("label").unwrap_or_else(|_| id.clone());
                nodes.push((id.clone(), NodeAttrs::labelled(label)));
                current = (!empty).then_some(id);
            }
            b"attvalue" => {
                let node = current.clone().ok_or_else(|| ExportError::Parse { line, message: "attvalue outside node".into() })?;
                let key = take("for")?;
                let title = titles.get(&key).cloned().unwrap_or(key);
                values.entry(node).or_default().insert(title, take("value")?);
            }
            b"edge" => edges.push((take("source")?, take("target")?, take("weight").unwrap_or_else(|_| "1".into()), line)),
            _ => {}
        }
    }

    let mut g = WeightedGraph::new();
    let mut doc_values: Vec<(String, BTreeMap<String, String>)> = Vec::new();
    for (id, mut node) in nodes {
        let vals = values.remove(&id).unwrap_or_default();
        if let Some(count) = vals.get("article_count") {
            node.article_count = count.parse().map_err(|_| ExportError::Parse { line: 0, message: format!("bad article_count for {id:?}") })?;
        }
        g.add_node(id.clone(), node);
        doc_values.push((id, vals));
    }
    for (a, b, w, line) in edges {
        let weight: f64 = w.parse().map_err(|_| ExportError::Parse { line, message: format!("bad weight {w:?}") })?;
        g.add_edge(&a, &b, weight).map_err(|e| ExportError::Parse { line, message: e.to_string() })?;
    }
    let mut doc = GraphDocument::new(g);
    for (id, vals) in doc_values {
        let bad = |key: &str| ExportError::Parse { line: 0, message: format!("bad {key} for {id:?}") };
        if let Some(v) = vals.get("community") {
            doc.community.insert(id.clone(), v.parse().map_err(|_| bad("community"))?);
        }
        if let Some(v) = vals.get("degree") {
            doc.degree.insert(id.clone(), v.parse().map_err(|_| bad("degree"))?);
        }
        if let Some(v) = vals.get("betweenness") {
            doc.betweenness.insert(id.clone(), v.parse().map_err(|_| bad("betweenness"))?);
        }
    }
    Ok(doc)
}

pub fn read_gexf(path: &Path) -> Result<GraphDocument, ExportError> {
    parse_gexf(&read_file(path)?)
}

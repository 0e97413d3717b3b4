use std::path::Path;

use super::{read_file, write_file, ExportError, GraphDocument};
use crate::cocite::{NodeAttrs, WeightedGraph};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Pajek network. Vertex labels are node ids, so a re-read graph has the same ids.
pub fn pajek_string(doc: &GraphDocument) -> String {
    let g = &doc.graph;
    let mut out = format!("*Vertices {}\n", g.node_count());
    let mut position = std::collections::BTreeMap::new();
    for (i, id) in g.node_ids().enumerate() {
        position.insert(id.as_str(), i + 1);
        out.push_str(&format!("{} {}\n", i + 1, quote(id)));
    }
    out.push_str("*Edges\n");
    for (a, b, w) in g.edges() {
        out.push_str(&format!("{} {} {}\n", position[a.as_str()], position[b.as_str()], doc.format(w)));
    }
    out
}

pub fn write_pajek(doc: &GraphDocument, path: &Path) -> Result<(), ExportError> {
    write_file(path, &pajek_string(doc))
}

fn parse_error(line: usize, message: impl Into<String>) -> ExportError {
    ExportError::Parse { line, message: message.into() }
}

/// Splits a vertex line into its number and unescaped quoted label.
fn vertex_line(line: &str) -> Option<(usize, String)> {
    let (number, rest) = line.trim().split_once(char::is_whitespace)?;
    let rest = rest.trim_start().strip_prefix('"')?;
    let mut label = String::new();
    let mut chars = rest.chars();
    loop {
        match chars.next()? {
            '\\' => label.push(chars.next()?),
            '"' => break,
            c => label.push(c),
        }
    }
    Some((number.parse().ok()?, label))
}

/// Reads the subset of Pajek written by [`pajek_string`].
pub fn parse_pajek(text: &str) -> Result<GraphDocument, ExportError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| !l.trim().is_empty());
    let (n, header) = lines.next().ok_or_else(|| parse_error(1, "empty file"))?;
    let count: usize = header
        .trim()
        .strip_prefix("*Vertices")
        .and_then(|c| c.trim().parse().ok())
        .ok_or_else(|| parse_error(n, "expected `*Vertices n`"))?;

    let mut g = WeightedGraph::new();
    let mut ids = Vec::with_capacity(count);
    for expected in 1..=count {
        let (n, line) = lines.next().ok_or_else(|| parse_error(n, "missing vertex lines"))?;
        let (number, id) = vertex_line(line).ok_or_else(|| parse_error(n, "expected `i \"label\"`"))?;
        if number != expected {
            return Err(parse_error(n, format!("vertex {number} out of order")));
        }
        g.add_node(id.clone(), NodeAttrs::labelled(&id));
        ids.push(id);
    }
    match lines.next() {
        Some((_, l)) if l.trim() == "*Edges" => {}
        Some((n, _)) => return Err(parse_error(n, "expected `*Edges`")),
        None => return Err(parse_error(n, "missing `*Edges`")),
    }
    for (n, line) in lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [a, b, w] = fields[..] else {
            return Err(parse_error(n, "expected `i j w`"));
        };
        let endpoint = |s: &str| {
            s.parse::<usize>()
                .ok()
                .filter(|&i| (1..=count).contains(&i))
                .map(|i| ids[i - 1].clone())
                .ok_or_else(|| parse_error(n, format!("bad vertex number {s:?}")))
        };
        let (a, b) = (endpoint(a)?, endpoint(b)?);
        let w: f64 = w.parse().map_err(|_| parse_error(n, format!("bad weight {w:?}")))?;
        g.add_edge(&a, &b, w).map_err(|e| parse_error(n, e.to_string()))?;
    }
    Ok(GraphDocument::new(g))
}

pub fn read_pajek(path: &Path) -> Result<GraphDocument, ExportError> {
    parse_pajek(&read_file(path)?)
}

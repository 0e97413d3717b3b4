use std::path::Path;

use super::{write_file, ExportError, GraphDocument};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Graphviz source with one line per node and per edge between the header and closing brace.
pub fn dot_string(doc: &GraphDocument) -> String {
    let g = &doc.graph;
    if g.is_empty() {
        return "graph G { }\n".into();
    }
    let mut out = String::from("graph G {\n");
    for (id, attrs) in g.nodes() {
        out.push_str(&format!("  {} [label={}];\n", quote(id), quote(&attrs.label)));
    }
    for (a, b, w) in g.edges() {
        let w = doc.format(w);
        out.push_str(&format!("  {} -- {} [weight={w}, label=\"{w}\"];\n", quote(a), quote(b)));
    }
    out.push_str("}\n");
    out
}

pub fn write_dot(doc: &GraphDocument, path: &Path) -> Result<(), ExportError> {
    write_file(path, &dot_string(doc))
}

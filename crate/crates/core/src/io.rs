//! Edge-list text and annotated JSON graph formats.
//!
//! Edge list: a header line `n m` followed by `m` lines `u v` (0-based,
//! `u < v`, lexicographic order). Annotated JSON: an object with `n`, `edges`
//! and optional `roles` (vertex id to role) and `component` (vertex id to
//! index) maps. Both writers are byte-deterministic for a fixed graph.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError, Vertex};
use crate::ErrorClass;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("edge list line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("{path}: {source}")]
    File {
        path: String,
        source: std::io::Error,
    },
    #[error("missing annotation: {0}")]
    MissingAnnotation(String),
}

impl IoError {
    pub fn class(&self) -> ErrorClass {
        match self {
            IoError::Graph(e) => e.class(),
            _ => ErrorClass::Io,
        }
    }
}

/// Vertex roles in an annotated graph file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Sa,
    Sb,
    First,
    Last,
    Leaf,
    Path,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotatedGraph {
    pub n: usize,
    pub edges: Vec<[Vertex; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roles: Option<BTreeMap<Vertex, Role>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub component: Option<BTreeMap<Vertex, usize>>,
    /// Construction parameters, when the file was produced by a builder.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<serde_json::Value>,
}

impl AnnotatedGraph {
    pub fn plain(g: &Graph) -> Self {
        AnnotatedGraph {
            n: g.vertex_count(),
            edges: g.edges().map(|(u, v)| [u, v]).collect(),
            roles: None,
            component: None,
            params: None,
        }
    }

    pub fn graph(&self) -> Result<Graph, GraphError> {
        Graph::from_edges(self.n, self.edges.iter().map(|&[u, v]| (u, v)))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("annotated graph serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, IoError> {
        let ann: AnnotatedGraph = serde_json::from_str(text)?;
        // validates ranges and loops
        ann.graph()?;
        Ok(ann)
    }
}

pub fn write_edge_list(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.vertex_count(), g.edge_count());
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}").expect("write to string");
    }
    out
}

pub fn read_edge_list(text: &str) -> Result<Graph, IoError> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (hline, header) = lines.next().ok_or(IoError::Parse {
        line: 1,
        message: "missing header".into(),
    })?;
    let nums = parse_pair(header, hline + 1)?;
    let (n, m) = (nums.0, nums.1);
    let mut edges = Vec::with_capacity(m);
    for (i, line) in lines {
        edges.push(parse_pair(line, i + 1)?);
    }
    if edges.len() != m {
        return Err(IoError::Parse {
            line: 1,
            message: format!("header announces {m} edges, found {}", edges.len()),
        });
    }
    Ok(Graph::from_edges(n, edges)?)
}

fn parse_pair(line: &str, lineno: usize) -> Result<(usize, usize), IoError> {
    let err = |message: String| IoError::Parse {
        line: lineno,
        message,
    };
    let parts: Vec<&str> = line.split_whitespace().collect();
    if parts.len() != 2 {
        return Err(err(format!("expected two integers, got {:?}", line)));
    }
    let a = parts[0]
        .parse()
        .map_err(|e| err(format!("{}: {e}", parts[0])))?;
    let b = parts[1]
        .parse()
        .map_err(|e| err(format!("{}: {e}", parts[1])))?;
    Ok((a, b))
}

pub fn read_file(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })
}

/// Writes via a sibling temporary file and a rename, so readers never see a
/// partially written file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), IoError> {
    let wrap = |source| IoError::File {
        path: path.display().to_string(),
        source,
    };
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    fs::write(&tmp, contents).map_err(wrap)?;
    fs::rename(&tmp, path).map_err(wrap)
}

/// Loads a graph from either format, chosen by a leading `{`.
pub fn load_graph(path: &Path) -> Result<AnnotatedGraph, IoError> {
    let text = read_file(path)?;
    if text.trim_start().starts_with('{') {
        AnnotatedGraph::from_json(&text)
    } else {
        Ok(AnnotatedGraph::plain(&read_edge_list(&text)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_list_format() {
        let g = Graph::cycle(4);
        let text = write_edge_list(&g);
        assert_eq!(text, "4 4\n0 1\n0 3\n1 2\n2 3\n");
        assert_eq!(read_edge_list(&text).unwrap(), g);
        assert!(matches!(
            read_edge_list("3 2\n0 1\n"),
            Err(IoError::Parse { .. })
        ));
        assert!(read_edge_list("2 1\n0 x\n").is_err());
    }

    #[test]
    fn annotated_json_layout() {
        let g = Graph::path(3);
        let mut ann = AnnotatedGraph::plain(&g);
        ann.roles = Some(BTreeMap::from([(0, Role::Sa), (2, Role::Leaf)]));
        ann.component = Some(BTreeMap::from([(2, 0)]));
        let text = ann.to_json();
        assert_eq!(
            text,
            "{\"n\":3,\"edges\":[[0,1],[1,2]],\"roles\":{\"0\":\"sa\",\"2\":\"leaf\"},\"component\":{\"2\":0}}\n"
        );
        let back = AnnotatedGraph::from_json(&text).unwrap();
        assert_eq!(back, ann);
        assert_eq!(back.graph().unwrap(), g);
    }

    #[test]
    fn rejects_bad_json_graph() {
        assert!(AnnotatedGraph::from_json("{\"n\":2,\"edges\":[[0,0]]}").is_err());
        assert!(AnnotatedGraph::from_json("{\"n\":2}").is_err());
    }
}

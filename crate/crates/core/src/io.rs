//! The graph file format.
//!
//! A graph is a UTF-8 JSON document `{"n":N,"edges":[[u,v,c],...]}` with
//! `u < v`, triples sorted lexicographically, no insignificant whitespace
//! and a single trailing newline. Writers produce exactly this byte
//! sequence; readers reject documents whose edge list is not normalised.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{ColouredGraph, GraphError};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed graph document: {0}")]
    Json(#[from] serde_json::Error),
    #[error(
        "edge {index} ([{u},{v},{c}]) is not normalised: expected u < v in lexicographic order"
    )]
    NotNormalised {
        index: usize,
        u: u64,
        v: u64,
        c: u64,
    },
    #[error("colour {0} does not fit in 32 bits")]
    ColourRange(u64),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub n: usize,
    pub edges: Vec<[u64; 3]>,
}

impl GraphDocument {
    pub fn from_graph(g: &ColouredGraph) -> Self {
        GraphDocument {
            n: g.n(),
            edges: g
                .edges()
                .iter()
                .map(|e| [e.u as u64, e.v as u64, e.colour.0 as u64])
                .collect(),
        }
    }

    pub fn into_graph(self) -> Result<ColouredGraph, FormatError> {
        let mut prev: Option<(u64, u64)> = None;
        for (index, &[u, v, c]) in self.edges.iter().enumerate() {
            if u == v {
                return Err(GraphError::SelfLoop(u as usize).into());
            }
            if u > v || prev.is_some_and(|p| p > (u, v)) {
                return Err(FormatError::NotNormalised { index, u, v, c });
            }
            if c > u32::MAX as u64 {
                return Err(FormatError::ColourRange(c));
            }
            prev = Some((u, v));
        }
        let triples = self
            .edges
            .iter()
            .map(|&[u, v, c]| (u as usize, v as usize, c as u32));
        Ok(ColouredGraph::new(self.n, triples)?)
    }
}

pub fn to_json_string(g: &ColouredGraph) -> String {
    let mut s = serde_json::to_string(&GraphDocument::from_graph(g))
        .expect("graph documents always serialise");
    s.push('\n');
    s
}

pub fn from_json_str(s: &str) -> Result<ColouredGraph, FormatError> {
    let doc: GraphDocument = serde_json::from_str(s)?;
    doc.into_graph()
}

pub fn read_graph(path: &Path) -> Result<ColouredGraph, FormatError> {
    let text = fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.to_owned(),
        source,
    })?;
    from_json_str(&text)
}

pub fn write_graph(path: &Path, g: &ColouredGraph) -> Result<(), FormatError> {
    fs::write(path, to_json_string(g)).map_err(|source| FormatError::Io {
        path: path.to_owned(),
        source,
    })
}

/// Serialises any value as one line of JSON plus newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), FormatError> {
    let mut s = serde_json::to_string(value)?;
    s.push('\n');
    fs::write(path, s).map_err(|source| FormatError::Io {
        path: path.to_owned(),
        source,
    })
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, FormatError> {
    let text = fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.to_owned(),
        source,
    })?;
    Ok(serde_json::from_str(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::k4_three_matchings;

    #[test]
    fn exact_bytes() {
        let g = ColouredGraph::new(3, [(2, 1, 5), (0, 1, 9)]).unwrap();
        assert_eq!(
            to_json_string(&g),
            "{\"n\":3,\"edges\":[[0,1,9],[1,2,5]]}\n"
        );
    }

    #[test]
    fn round_trip_through_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("k4.json");
        let g = k4_three_matchings();
        write_graph(&path, &g).unwrap();
        assert_eq!(read_graph(&path).unwrap(), g);
    }

    #[test]
    fn rejects_unnormalised_documents() {
        assert!(matches!(
            from_json_str("{\"n\":3,\"edges\":[[1,0,1]]}"),
            Err(FormatError::NotNormalised { index: 0, .. })
        ));
        assert!(matches!(
            from_json_str("{\"n\":3,\"edges\":[[1,2,1],[0,1,1]]}"),
            Err(FormatError::NotNormalised { index: 1, .. })
        ));
        assert!(matches!(
            from_json_str("{\"n\":3,\"edges\":[[0,1,1],[0,1,2]]}"),
            Err(FormatError::Graph(GraphError::DuplicateEdge(0, 1)))
        ));
        assert!(matches!(
            from_json_str("{\"n\":2,\"edges\":[[0,5,1]]}"),
            Err(FormatError::Graph(GraphError::OutOfRange { .. }))
        ));
        assert!(matches!(
            from_json_str("{\"n\":2}"),
            Err(FormatError::Json(_))
        ));
    }
}

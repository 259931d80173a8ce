//! Plain-text edge lists: a header line `n m`, then one `u v` pair per line.

use crate::graph::{Edge, Graph, GraphError, Vertex};
use std::collections::HashSet;
use std::io::{BufRead, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EdgeListError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: duplicate edge {edge}")]
    Duplicate { line: usize, edge: Edge },
    #[error("line {line}: {source}")]
    Graph { line: usize, source: GraphError },
    #[error("header promised {expected} edges, found {found}")]
    CountMismatch { expected: usize, found: usize },
}

pub fn read_edge_list<R: BufRead>(reader: R) -> Result<Graph, EdgeListError> {
    let mut lines = reader
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| l.as_ref().map_or(true, |s| !s.trim().is_empty()));
    let (line, header) = lines.next().ok_or(EdgeListError::Parse {
        line: 1,
        msg: "missing header".into(),
    })?;
    let header = header?;
    let [n, m] = parse_pair::<usize>(&header, line)?;
    let mut seen = HashSet::with_capacity(m);
    let mut edges = Vec::with_capacity(m);
    for (line, text) in lines {
        let [u, v] = parse_pair::<Vertex>(&text?, line)?;
        if u as usize >= n || v as usize >= n {
            return Err(EdgeListError::Graph {
                line,
                source: GraphError::EndpointOutOfRange { u, v, n },
            });
        }
        let edge = Edge::new(u, v).ok_or(EdgeListError::Graph {
            line,
            source: GraphError::SelfLoop(u),
        })?;
        if !seen.insert(edge) {
            return Err(EdgeListError::Duplicate { line, edge });
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(EdgeListError::CountMismatch {
            expected: m,
            found: edges.len(),
        });
    }
    Graph::from_edges(n, edges).map_err(|source| EdgeListError::Graph { line: 0, source })
}

pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{} {}", g.vertex_count(), g.edge_count())?;
    for e in g.edges() {
        writeln!(out, "{} {}", e.lo(), e.hi())?;
    }
    out.flush()
}

fn parse_pair<T: std::str::FromStr>(text: &str, line: usize) -> Result<[T; 2], EdgeListError> {
    let mut it = text.split_whitespace();
    let mut next = || {
        it.next()
            .and_then(|tok| tok.parse::<T>().ok())
            .ok_or_else(|| EdgeListError::Parse {
                line,
                msg: format!("expected two non-negative integers, got {text:?}"),
            })
    };
    let pair = [next()?, next()?];
    if it.next().is_some() {
        return Err(EdgeListError::Parse {
            line,
            msg: format!("trailing tokens in {text:?}"),
        });
    }
    Ok(pair)
}

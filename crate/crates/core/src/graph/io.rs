//! Plain-text edge lists.
//!
//! ```text
//! # optional comments
//! n m
//! u v        (m lines, 0-based, u < v)
//! A: i1 i2 … (optional, bipartite files only)
//! ```

use std::fmt::Write as _;

use super::{Bipartition, Graph};
use crate::error::{Error, Result};

/// A parsed edge-list file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeList {
    pub graph: Graph,
    pub bipartition: Option<Bipartition>,
}

pub fn parse(text: &str) -> Result<EdgeList> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or(Error::Parse { line: 0, message: "empty input".into() })?;
    let [n, m] = parse_pair(hline, header)?;

    let mut edges = Vec::with_capacity(m);
    let mut bipartition = None;
    for (line, content) in lines {
        if let Some(rest) = content.strip_prefix("A:") {
            if bipartition.is_some() {
                return Err(Error::Parse { line, message: "duplicate side line".into() });
            }
            let side = rest
                .split_whitespace()
                .map(|t| parse_usize(line, t))
                .collect::<Result<Vec<_>>>()?;
            bipartition = Some(Bipartition::new(n, side)?);
            continue;
        }
        if bipartition.is_some() {
            return Err(Error::Parse { line, message: "edge after side line".into() });
        }
        let [u, v] = parse_pair(line, content)?;
        if u >= v {
            return Err(Error::Parse { line, message: format!("expected u < v, got {u} {v}") });
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(Error::Parse {
            line: 1,
            message: format!("header announces {m} edges, found {}", edges.len()),
        });
    }
    let graph = Graph::new(n, edges)?;
    if graph.edge_count() != m {
        return Err(Error::Parse { line: 1, message: "duplicate edges".into() });
    }
    Ok(EdgeList { graph, bipartition })
}

pub fn write(graph: &Graph, bipartition: Option<&Bipartition>) -> String {
    let mut out = format!("{} {}\n", graph.n(), graph.edge_count());
    for (u, v) in graph.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    if let Some(part) = bipartition {
        out.push_str("A:");
        for v in part.side_a() {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
    }
    out
}

fn parse_usize(line: usize, token: &str) -> Result<usize> {
    token
        .parse()
        .map_err(|_| Error::Parse { line, message: format!("not a vertex id: {token:?}") })
}

fn parse_pair(line: usize, content: &str) -> Result<[usize; 2]> {
    let tokens: Vec<&str> = content.split_whitespace().collect();
    if tokens.len() != 2 {
        return Err(Error::Parse { line, message: format!("expected two integers, got {content:?}") });
    }
    Ok([parse_usize(line, tokens[0])?, parse_usize(line, tokens[1])?])
}

//! Plain-text edge-list format.
//!
//! ```text
//! # comment
//! v 3
//! e 0 1
//! e 1 2
//! e 0 1
//! ```
//!
//! `v <n>` appears once, before any edge. Each `e <u> <v>` line is one edge
//! instance; repeated lines are parallel edges and get consecutive ids.

use super::{GraphError, Multigraph};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing `v <n>` header")]
    MissingHeader,
    #[error("line {line}: {source}")]
    Graph {
        line: usize,
        #[source]
        source: GraphError,
    },
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

pub fn parse_edge_list(text: &str) -> Result<Multigraph, ParseError> {
    let mut vertex_count: Option<usize> = None;
    let mut pairs = Vec::new();
    let mut lines = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let tag = tokens.next().unwrap_or_default();
        let mut number = |what: &str| -> Result<usize, ParseError> {
            let tok = tokens
                .next()
                .ok_or_else(|| syntax(line_no, format!("expected {what}")))?;
            tok.parse()
                .map_err(|_| syntax(line_no, format!("invalid {what} `{tok}`")))
        };
        match tag {
            "v" => {
                if vertex_count.is_some() {
                    return Err(syntax(line_no, "duplicate `v` line"));
                }
                vertex_count = Some(number("vertex count")?);
            }
            "e" => {
                if vertex_count.is_none() {
                    return Err(syntax(line_no, "edge before `v` line"));
                }
                let u = number("endpoint")?;
                let v = number("endpoint")?;
                pairs.push((u, v));
                lines.push(line_no);
            }
            other => return Err(syntax(line_no, format!("unknown record `{other}`"))),
        }
        if tokens.next().is_some() {
            return Err(syntax(line_no, "trailing tokens"));
        }
    }
    let n = vertex_count.ok_or(ParseError::MissingHeader)?;
    Multigraph::build(n, &pairs).map_err(|source| {
        let index = match &source {
            GraphError::LoopEdge { index, .. } => Some(*index),
            GraphError::VertexOutOfRange { vertex, .. } => {
                pairs.iter().position(|&(u, v)| u == vertex.0 || v == vertex.0)
            }
            _ => None,
        };
        ParseError::Graph {
            line: index.map_or(0, |i| lines[i]),
            source,
        }
    })
}

/// Writes edges in id order. Ids are not stored, so a graph whose ids are not
/// `0..m` reads back with renumbered ids.
pub fn write_edge_list(g: &Multigraph) -> String {
    let mut out = String::new();
    writeln!(out, "v {}", g.vertex_count()).unwrap();
    for e in g.edges() {
        writeln!(out, "e {} {}", e.u.0, e.v.0).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named::petersen;

    #[test]
    fn parses_with_comments_and_parallel_edges() {
        let g = parse_edge_list("# digon\nv 2\ne 0 1  # first\n\ne 0 1\n").unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.max_multiplicity(), 2);
    }

    #[test]
    fn reports_line_numbers() {
        match parse_edge_list("v 3\ne 0 1\ne 2 2\n") {
            Err(ParseError::Graph { line, source }) => {
                assert_eq!(line, 3);
                assert!(matches!(source, GraphError::LoopEdge { .. }));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_edge_list("e 0 1\n"),
            Err(ParseError::Syntax { line: 1, .. })
        ));
        assert!(matches!(parse_edge_list("# nothing\n"), Err(ParseError::MissingHeader)));
        assert!(matches!(
            parse_edge_list("v 2\ne 0 x\n"),
            Err(ParseError::Syntax { line: 2, .. })
        ));
    }

    #[test]
    fn write_then_parse() {
        let p = petersen();
        assert_eq!(parse_edge_list(&write_edge_list(&p)).unwrap(), p);
    }
}

//! Plain-text graph documents.
//!
//! ```text
//! # comments start with '#'
//! [nodes]
//! X partial
//! Y partial
//! O full
//! R_X indicator X     # optional; partial nodes get R_<name> automatically
//! [edges]
//! X -> Y
//! X -> R_Y
//! ```

use std::fmt::Write as _;
use std::path::Path;

use mdimp_core::graph::{GraphBuilder, GraphError, MissingDataGraph, NodeRole};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphDocError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Nodes,
    Edges,
}

pub fn parse_graph(text: &str) -> Result<MissingDataGraph, GraphDocError> {
    let mut builder = GraphBuilder::new();
    let mut section = Section::None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |message: String| GraphDocError::Syntax {
            line: line_no,
            message,
        };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match line {
            "[nodes]" => {
                section = Section::Nodes;
                continue;
            }
            "[edges]" => {
                section = Section::Edges;
                continue;
            }
            _ if line.starts_with('[') => return Err(err(format!("unknown section {line}"))),
            _ => {}
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        match section {
            Section::None => return Err(err("expected [nodes] or [edges] first".into())),
            Section::Nodes => match words.as_slice() {
                [name, "partial"] => builder.add_partially_observed(name),
                [name, "full"] => builder.add_fully_observed(name),
                [name, "indicator", owner] => builder.add_indicator(name, owner),
                _ => {
                    return Err(err(format!(
                        "expected `<name> partial`, `<name> full` or `<name> indicator <owner>`, got `{line}`"
                    )))
                }
            },
            Section::Edges => match words.as_slice() {
                [parent, "->", child] => builder.add_edge(parent, child),
                _ => return Err(err(format!("expected `<parent> -> <child>`, got `{line}`"))),
            },
        }
    }
    Ok(builder.build()?)
}

pub fn read_graph(path: &Path) -> Result<MissingDataGraph, GraphDocError> {
    let text = std::fs::read_to_string(path).map_err(|source| GraphDocError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_graph(&text)
}

/// Canonical rendering: every node declared explicitly, edges sorted by name.
pub fn render_graph(g: &MissingDataGraph) -> String {
    let mut out = String::from("[nodes]\n");
    for node in g.nodes() {
        match &node.role {
            NodeRole::FullyObserved => writeln!(out, "{} full", node.id),
            NodeRole::PartiallyObserved => writeln!(out, "{} partial", node.id),
            NodeRole::ResponseIndicator { owner } => {
                writeln!(out, "{} indicator {}", node.id, owner)
            }
        }
        .expect("writing to a String");
    }
    out.push_str("[edges]\n");
    for (p, c) in g.edges() {
        writeln!(out, "{p} -> {c}").expect("writing to a String");
    }
    out
}

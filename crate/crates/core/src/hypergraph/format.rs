//! The `.hg` text format.
//!
//! ```text
//! # optional comment lines start with '#'
//! r n m
//! v_1 ... v_r        (m lines, ascending 0-based ids)
//! ```
//!
//! Blank lines are skipped. The writer emits edges in canonical order, so
//! writing a parsed file reproduces it exactly (minus comments).

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use super::{validate_edge, Hypergraph, Vertex};
use crate::error::{Error, Result};

pub fn to_hg_string(graph: &Hypergraph) -> String {
    let mut out = String::with_capacity(16 + graph.edge_count() * graph.r() * 6);
    write_body(graph, &mut out);
    out
}

pub(crate) fn write_body(graph: &Hypergraph, out: &mut String) {
    let _ = writeln!(out, "{} {} {}", graph.r(), graph.n(), graph.edge_count());
    for e in graph.edges() {
        let mut first = true;
        for v in e {
            if !first {
                out.push(' ');
            }
            first = false;
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
}

pub fn parse_hg(text: &str) -> Result<Hypergraph> {
    parse_with_comments(text).map(|(g, _)| g)
}

pub fn read_hg(path: impl AsRef<Path>) -> Result<Hypergraph> {
    parse_hg(&std::fs::read_to_string(path)?)
}

pub fn write_hg(graph: &Hypergraph, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_hg_string(graph))?;
    Ok(())
}

/// Parses a `.hg` document and returns the comment lines (with their 1-based
/// line numbers, without the leading `#`) alongside the graph.
pub(crate) fn parse_with_comments(text: &str) -> Result<(Hypergraph, Vec<(usize, String)>)> {
    let mut comments = Vec::new();
    let mut header: Option<(usize, usize, usize)> = None;
    let mut flat: Vec<Vertex> = Vec::new();
    let mut seen: HashSet<Vec<Vertex>> = HashSet::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if let Some(comment) = line.strip_prefix('#') {
            comments.push((line_no, comment.to_string()));
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match header {
            None => {
                if fields.len() != 3 {
                    return Err(Error::parse(line_no, "header must be `r n m`"));
                }
                let nums = fields
                    .iter()
                    .map(|f| f.parse::<usize>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| Error::parse(line_no, format!("bad header integer: {e}")))?;
                if nums[0] < 2 {
                    return Err(Error::parse(line_no, "uniformity must be at least 2"));
                }
                if nums[1] > Vertex::MAX as usize {
                    return Err(Error::parse(line_no, "vertex count too large"));
                }
                header = Some((nums[0], nums[1], nums[2]));
                flat.reserve(nums[0] * nums[2].min(1 << 24));
            }
            Some((r, n, m)) => {
                if seen.len() == m {
                    return Err(Error::parse(line_no, format!("more than the declared {m} edges")));
                }
                let mut edge = fields
                    .iter()
                    .map(|f| f.parse::<Vertex>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| Error::parse(line_no, format!("bad vertex id: {e}")))?;
                validate_edge(r, n, &mut edge).map_err(|e| Error::parse(line_no, e.to_string()))?;
                if !seen.insert(edge.clone()) {
                    return Err(Error::parse(line_no, format!("duplicate edge {edge:?}")));
                }
                flat.extend_from_slice(&edge);
            }
        }
    }

    let (r, n, m) = header.ok_or_else(|| Error::parse(last_line.max(1), "missing `r n m` header"))?;
    if seen.len() != m {
        return Err(Error::parse(
            last_line.max(1),
            format!("declared {m} edges but found {}", seen.len()),
        ));
    }
    let graph = Hypergraph::from_flat_edges(r, n, flat)?;
    Ok((graph, comments))
}

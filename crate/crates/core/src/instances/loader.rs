use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::{CsrGraph, InstanceError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphFormat {
    /// `p sp n m` header, then `a u v w` arcs, 1-indexed. `c` lines are comments.
    DimacsGr,
    /// `u v [w]` per line, 0-indexed, weight defaults to 1. `#`/`%` lines are comments.
    EdgeList,
}

impl GraphFormat {
    /// `.gr` files are DIMACS, everything else an edge list.
    pub fn from_path(path: &Path) -> GraphFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("gr") => GraphFormat::DimacsGr,
            _ => GraphFormat::EdgeList,
        }
    }
}

pub fn load_graph(
    path: &Path,
    format: GraphFormat,
    symmetrize: bool,
) -> Result<CsrGraph, InstanceError> {
    let file = File::open(path)?;
    parse_graph(BufReader::new(file), format, symmetrize)
}

pub fn parse_graph<R: BufRead>(
    reader: R,
    format: GraphFormat,
    symmetrize: bool,
) -> Result<CsrGraph, InstanceError> {
    let (n, edges) = match format {
        GraphFormat::DimacsGr => parse_dimacs(reader)?,
        GraphFormat::EdgeList => parse_edge_list(reader)?,
    };
    Ok(if symmetrize {
        CsrGraph::from_undirected(n, &edges)
    } else {
        CsrGraph::from_edges(n, &edges)
    })
}

fn format_error(line: usize, message: impl Into<String>) -> InstanceError {
    InstanceError::Format {
        line,
        message: message.into(),
    }
}

fn field<T: std::str::FromStr>(
    token: Option<&str>,
    line: usize,
    what: &str,
) -> Result<T, InstanceError> {
    let token = token.ok_or_else(|| format_error(line, format!("missing {what}")))?;
    token
        .parse()
        .map_err(|_| format_error(line, format!("bad {what} '{token}'")))
}

type Edges = Vec<(usize, usize, u64)>;

fn parse_dimacs<R: BufRead>(reader: R) -> Result<(usize, Edges), InstanceError> {
    let mut n = None;
    let mut edges = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            None | Some("c") => {}
            Some("p") => {
                let kind: String = field(tokens.next(), line_no, "problem kind")?;
                if kind != "sp" {
                    return Err(format_error(
                        line_no,
                        format!("expected 'p sp', got 'p {kind}'"),
                    ));
                }
                let vertices: usize = field(tokens.next(), line_no, "vertex count")?;
                let arcs: usize = field(tokens.next(), line_no, "arc count")?;
                n = Some(vertices);
                edges.reserve(arcs);
            }
            Some("a") => {
                let n = n.ok_or_else(|| format_error(line_no, "arc before 'p' line"))?;
                let u: usize = field(tokens.next(), line_no, "source")?;
                let v: usize = field(tokens.next(), line_no, "target")?;
                let w: u64 = field(tokens.next(), line_no, "weight")?;
                if u == 0 || v == 0 || u > n || v > n {
                    return Err(format_error(
                        line_no,
                        format!("vertex out of range 1..={n}"),
                    ));
                }
                if w == 0 {
                    return Err(format_error(line_no, "weights must be >= 1"));
                }
                edges.push((u - 1, v - 1, w));
            }
            Some(other) => {
                return Err(format_error(
                    line_no,
                    format!("unknown line type '{other}'"),
                ))
            }
        }
    }
    let n = n.ok_or_else(|| format_error(0, "missing 'p sp' header"))?;
    Ok((n, edges))
}

fn parse_edge_list<R: BufRead>(reader: R) -> Result<(usize, Edges), InstanceError> {
    let mut edges = Vec::new();
    let mut n = 0;
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let u: usize = field(tokens.next(), line_no, "source")?;
        let v: usize = field(tokens.next(), line_no, "target")?;
        let w: u64 = match tokens.next() {
            Some(t) => field(Some(t), line_no, "weight")?,
            None => 1,
        };
        if w == 0 {
            return Err(format_error(line_no, "weights must be >= 1"));
        }
        n = n.max(u + 1).max(v + 1);
        edges.push((u, v, w));
    }
    Ok((n, edges))
}

//! Readers for METIS, Matrix Market (coordinate) and plain edge-list files.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;
use std::str::FromStr;

use super::Graph;
use crate::error::{Error, Result};

/// Supported on-disk graph formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    Metis,
    MatrixMarket,
    EdgeList,
}

impl GraphFormat {
    /// Guesses the format from a file extension (`.graph`/`.metis`, `.mtx`,
    /// anything else is treated as an edge list).
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("graph" | "metis") => Self::Metis,
            Some("mtx") => Self::MatrixMarket,
            _ => Self::EdgeList,
        }
    }
}

impl FromStr for GraphFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "metis" => Ok(Self::Metis),
            "matrix-market" | "mtx" => Ok(Self::MatrixMarket),
            "edge-list" | "edges" => Ok(Self::EdgeList),
            other => Err(Error::InvalidArgument(format!(
                "unknown graph format `{other}`"
            ))),
        }
    }
}

/// Reads a graph file, inferring the format from its extension when
/// `format` is `None`.
pub fn read_graph(path: &Path, format: Option<GraphFormat>) -> Result<Graph> {
    let format = format.unwrap_or_else(|| GraphFormat::from_path(path));
    parse_graph(File::open(path)?, format)
}

/// Parses a graph from a byte stream. Vertex ids in the input are 1-based.
pub fn parse_graph<R: Read>(source: R, format: GraphFormat) -> Result<Graph> {
    let lines = BufReader::new(source)
        .lines()
        .collect::<std::io::Result<Vec<String>>>()?;
    match format {
        GraphFormat::Metis => parse_metis(&lines),
        GraphFormat::MatrixMarket => parse_matrix_market(&lines),
        GraphFormat::EdgeList => parse_edge_list(&lines),
    }
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_usize(tok: &str, line: usize, what: &str) -> Result<usize> {
    tok.parse()
        .map_err(|_| err(line, format!("expected {what}, found `{tok}`")))
}

fn parse_weight(tok: &str, line: usize) -> Result<f64> {
    let w: f64 = tok
        .parse()
        .map_err(|_| err(line, format!("expected edge weight, found `{tok}`")))?;
    if !(w.is_finite() && w > 0.0) {
        return Err(err(line, format!("non-positive edge weight {tok}")));
    }
    Ok(w)
}

fn vertex_id(tok: &str, n: usize, line: usize) -> Result<usize> {
    let id = parse_usize(tok, line, "vertex id")?;
    if id == 0 || id > n {
        return Err(err(line, format!("vertex id {id} out of range 1..={n}")));
    }
    Ok(id - 1)
}

/// Accumulates undirected edges and reports duplicates with their line.
#[derive(Default)]
struct EdgeSink {
    seen: HashMap<(usize, usize), usize>,
    edges: Vec<(usize, usize, f64)>,
}

impl EdgeSink {
    fn push(&mut self, i: usize, j: usize, w: f64, line: usize) -> Result<()> {
        if i == j {
            return Err(err(line, format!("self-loop at vertex {}", i + 1)));
        }
        let key = (i.min(j), i.max(j));
        if let Some(first) = self.seen.insert(key, line) {
            return Err(err(
                line,
                format!(
                    "duplicate edge {}-{} (first seen on line {first})",
                    key.0 + 1,
                    key.1 + 1
                ),
            ));
        }
        self.edges.push((key.0, key.1, w));
        Ok(())
    }
}

fn is_comment(line: &str, markers: &[char]) -> bool {
    line.trim_start().starts_with(markers)
}

fn parse_metis(lines: &[String]) -> Result<Graph> {
    let mut body = lines
        .iter()
        .enumerate()
        .map(|(k, l)| (k + 1, l.as_str()))
        .filter(|(_, l)| !is_comment(l, &['%']));

    let (hline, header) = body
        .by_ref()
        .find(|(_, l)| !l.trim().is_empty())
        .ok_or_else(|| err(1, "missing METIS header"))?;
    let head: Vec<&str> = header.split_whitespace().collect();
    if head.len() < 2 || head.len() > 4 {
        return Err(err(hline, "METIS header must be `n m [fmt [ncon]]`"));
    }
    let n = parse_usize(head[0], hline, "vertex count")?;
    let m = parse_usize(head[1], hline, "edge count")?;
    let fmt = head.get(2).copied().unwrap_or("0");
    if fmt.len() > 3 || !fmt.chars().all(|c| c == '0' || c == '1') {
        return Err(err(hline, format!("invalid METIS fmt field `{fmt}`")));
    }
    let flags: Vec<bool> = format!("{fmt:0>3}").chars().map(|c| c == '1').collect();
    let (has_size, has_vwgt, has_ewgt) = (flags[0], flags[1], flags[2]);
    let ncon = match head.get(3) {
        Some(tok) => parse_usize(tok, hline, "ncon")?,
        None => usize::from(has_vwgt),
    };
    if head.len() == 4 && !has_vwgt {
        return Err(err(hline, "ncon given without vertex weights in fmt"));
    }
    let skip = usize::from(has_size) + if has_vwgt { ncon } else { 0 };

    // Directed adjacency entries: (i, j) -> (weight, line).
    let mut directed: HashMap<(usize, usize), (f64, usize)> = HashMap::new();
    let mut order = Vec::new();
    for v in 0..n {
        let (line, text) = body
            .next()
            .ok_or_else(|| err(lines.len(), format!("expected {n} vertex lines, found {v}")))?;
        let toks: Vec<&str> = text.split_whitespace().collect();
        if toks.len() < skip {
            return Err(err(line, "missing vertex size/weight fields"));
        }
        let adj = &toks[skip..];
        let stride = if has_ewgt { 2 } else { 1 };
        if !adj.len().is_multiple_of(stride) {
            return Err(err(line, "neighbor without edge weight"));
        }
        for chunk in adj.chunks(stride) {
            let j = vertex_id(chunk[0], n, line)?;
            if j == v {
                return Err(err(line, format!("self-loop at vertex {}", v + 1)));
            }
            let w = if has_ewgt {
                parse_weight(chunk[1], line)?
            } else {
                1.0
            };
            if directed.insert((v, j), (w, line)).is_some() {
                return Err(err(line, format!("duplicate edge {}-{}", v + 1, j + 1)));
            }
            order.push((v, j));
        }
    }
    if let Some((line, _)) = body.find(|(_, l)| !l.trim().is_empty()) {
        return Err(err(
            line,
            format!("unexpected content after {n} vertex lines"),
        ));
    }

    let mut edges = Vec::new();
    for (i, j) in order {
        let (w, line) = directed[&(i, j)];
        match directed.get(&(j, i)) {
            None => {
                return Err(err(
                    line,
                    format!(
                        "asymmetric adjacency: {} lists {} but not vice versa",
                        i + 1,
                        j + 1
                    ),
                ))
            }
            Some(&(w_back, _)) if w_back != w => {
                return Err(err(
                    line,
                    format!(
                        "asymmetric weight on edge {}-{}: {w} vs {w_back}",
                        i + 1,
                        j + 1
                    ),
                ))
            }
            Some(_) => {}
        }
        if i < j {
            edges.push((i, j, w));
        }
    }
    if edges.len() != m {
        return Err(err(
            hline,
            format!(
                "header declares {m} edges but adjacency has {}",
                edges.len()
            ),
        ));
    }
    Graph::from_edges(n, edges)
}

fn parse_matrix_market(lines: &[String]) -> Result<Graph> {
    let banner = lines
        .first()
        .ok_or_else(|| err(1, "empty Matrix Market file"))?;
    let words: Vec<String> = banner
        .split_whitespace()
        .map(|w| w.to_ascii_lowercase())
        .collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(err(
            1,
            "expected `%%MatrixMarket matrix coordinate <field> <symmetry>`",
        ));
    }
    if words[2] != "coordinate" {
        return Err(err(1, format!("unsupported storage `{}`", words[2])));
    }
    let pattern = match words[3].as_str() {
        "real" | "integer" => false,
        "pattern" => true,
        other => return Err(err(1, format!("unsupported field `{other}`"))),
    };
    let symmetric = match words[4].as_str() {
        "symmetric" => true,
        "general" => false,
        other => return Err(err(1, format!("unsupported symmetry `{other}`"))),
    };

    let mut body = lines
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, l)| (k + 1, l.as_str()))
        .filter(|(_, l)| !is_comment(l, &['%']) && !l.trim().is_empty());
    let (sline, size) = body
        .next()
        .ok_or_else(|| err(lines.len(), "missing size line"))?;
    let dims: Vec<&str> = size.split_whitespace().collect();
    if dims.len() != 3 {
        return Err(err(sline, "size line must be `rows cols nnz`"));
    }
    let rows = parse_usize(dims[0], sline, "row count")?;
    let cols = parse_usize(dims[1], sline, "column count")?;
    let nnz = parse_usize(dims[2], sline, "entry count")?;
    if rows != cols {
        return Err(err(
            sline,
            format!("adjacency matrix must be square, got {rows}x{cols}"),
        ));
    }
    let n = rows;

    let mut sink = EdgeSink::default();
    let mut directed: Vec<(usize, usize, f64, usize)> = Vec::new();
    let mut count = 0;
    for (line, text) in body {
        let toks: Vec<&str> = text.split_whitespace().collect();
        let want = if pattern { 2 } else { 3 };
        if toks.len() != want {
            return Err(err(line, format!("expected {want} fields per entry")));
        }
        let i = vertex_id(toks[0], n, line)?;
        let j = vertex_id(toks[1], n, line)?;
        let w = if pattern {
            1.0
        } else {
            parse_weight(toks[2], line)?
        };
        if i == j {
            return Err(err(line, format!("self-loop at vertex {}", i + 1)));
        }
        count += 1;
        if symmetric {
            sink.push(i, j, w, line)?;
        } else {
            directed.push((i, j, w, line));
        }
    }
    if count != nnz {
        return Err(err(
            sline,
            format!("size line declares {nnz} entries, found {count}"),
        ));
    }

    if !symmetric {
        let mut map: HashMap<(usize, usize), (f64, usize)> = HashMap::new();
        for &(i, j, w, line) in &directed {
            if map.insert((i, j), (w, line)).is_some() {
                return Err(err(line, format!("duplicate entry ({}, {})", i + 1, j + 1)));
            }
        }
        for &(i, j, w, line) in &directed {
            match map.get(&(j, i)) {
                Some(&(w_back, _)) if w_back == w => {
                    if i < j {
                        sink.push(i, j, w, line)?;
                    }
                }
                _ => {
                    return Err(err(
                        line,
                        format!(
                            "asymmetric input: entry ({}, {}) has no matching ({}, {})",
                            i + 1,
                            j + 1,
                            j + 1,
                            i + 1
                        ),
                    ))
                }
            }
        }
    }
    Graph::from_edges(n, sink.edges)
}

fn parse_edge_list(lines: &[String]) -> Result<Graph> {
    let mut declared: Option<usize> = None;
    let mut raw = Vec::new();
    let mut max_id = 0;
    for (k, text) in lines.iter().enumerate() {
        let line = k + 1;
        let trimmed = text.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('#') {
            let mut toks = rest.split_whitespace();
            if toks.next() == Some("vertices") {
                let tok = toks
                    .next()
                    .ok_or_else(|| err(line, "missing vertex count"))?;
                declared = Some(parse_usize(tok, line, "vertex count")?);
            }
            continue;
        }
        if trimmed.starts_with('%') {
            continue;
        }
        let toks: Vec<&str> = trimmed.split_whitespace().collect();
        if toks.len() != 2 && toks.len() != 3 {
            return Err(err(line, "expected `i j [w]`"));
        }
        let i = parse_usize(toks[0], line, "vertex id")?;
        let j = parse_usize(toks[1], line, "vertex id")?;
        if i == 0 || j == 0 {
            return Err(err(line, "vertex ids are 1-based"));
        }
        let w = match toks.get(2) {
            Some(tok) => parse_weight(tok, line)?,
            None => 1.0,
        };
        max_id = max_id.max(i).max(j);
        raw.push((i - 1, j - 1, w, line));
    }
    let n = match declared {
        Some(d) if d < max_id => {
            let line = raw.iter().find(|r| r.0 >= d || r.1 >= d).map_or(1, |r| r.3);
            return Err(err(line, format!("vertex id exceeds declared count {d}")));
        }
        Some(d) => d,
        None => max_id,
    };
    let mut sink = EdgeSink::default();
    for (i, j, w, line) in raw {
        sink.push(i, j, w, line)?;
    }
    Graph::from_edges(n, sink.edges)
}

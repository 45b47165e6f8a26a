//! Sparse undirected weighted graphs and the cut primitives built on them.
//!
//! A [`Graph`] stores every undirected edge exactly once (`u < v`) together
//! with a symmetric CSR adjacency. The total variation
//! `TV(f) = sum_{(u,v) in E} w_uv |f_u - f_v|` is the continuous counterpart
//! of the cut: `TV(1_A) = cut(A, V \ A)`.

mod moons;
mod parse;

use std::collections::VecDeque;
use std::fmt;
use std::io::Write;

pub use moons::{two_moons_graph, TwoMoons};
pub use parse::{parse_graph, read_graph, GraphFormat};

use crate::error::{check_len, Error, Result};

/// An undirected edge with `u < v` and strictly positive weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

/// Immutable undirected weighted graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    weights: Vec<f64>,
}

impl Graph {
    /// Builds a graph from `(i, j, w)` triples with 0-based vertex ids.
    ///
    /// Endpoints may come in either order. Self-loops, duplicate edges,
    /// out-of-range ids and non-positive or non-finite weights are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut list = Vec::new();
        for (i, j, w) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({i}, {j}) references a vertex outside 0..{n}"
                )));
            }
            if i == j {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {i}")));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidGraph(format!(
                    "edge ({i}, {j}) has non-positive weight {w}"
                )));
            }
            let (u, v) = if i < j { (i, j) } else { (j, i) };
            list.push(Edge { u, v, w });
        }
        list.sort_by_key(|e| (e.u, e.v));
        if let Some(pair) = list
            .windows(2)
            .find(|p| (p[0].u, p[0].v) == (p[1].u, p[1].v))
        {
            return Err(Error::InvalidGraph(format!(
                "duplicate edge ({}, {})",
                pair[0].u, pair[0].v
            )));
        }

        let mut degree = vec![0usize; n];
        for e in &list {
            degree[e.u] += 1;
            degree[e.v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..n].to_vec();
        let mut neighbors = vec![0; 2 * list.len()];
        let mut weights = vec![0.0; 2 * list.len()];
        for e in &list {
            neighbors[cursor[e.u]] = e.v;
            weights[cursor[e.u]] = e.w;
            cursor[e.u] += 1;
            neighbors[cursor[e.v]] = e.u;
            weights[cursor[e.v]] = e.w;
            cursor[e.v] += 1;
        }
        // Edges are sorted by (u, v), so rows come out partially ordered;
        // sort each row for a canonical CSR.
        for i in 0..n {
            let (lo, hi) = (offsets[i], offsets[i + 1]);
            let mut row: Vec<(usize, f64)> = neighbors[lo..hi]
                .iter()
                .copied()
                .zip(weights[lo..hi].iter().copied())
                .collect();
            row.sort_by_key(|&(j, _)| j);
            for (k, (j, w)) in row.into_iter().enumerate() {
                neighbors[lo + k] = j;
                weights[lo + k] = w;
            }
        }

        Ok(Self {
            n,
            edges: list,
            offsets,
            neighbors,
            weights,
        })
    }

    /// Path graph `0 - 1 - ... - (n-1)` with unit weights.
    pub fn path(n: usize) -> Self {
        Self::from_edges(n, (1..n).map(|i| (i - 1, i, 1.0))).expect("path graph is valid")
    }

    /// Complete graph with unit weights.
    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j, 1.0)));
        Self::from_edges(n, edges).expect("complete graph is valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Neighbors of `i` with the corresponding edge weights.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[i]..self.offsets[i + 1];
        self.neighbors[range.clone()]
            .iter()
            .copied()
            .zip(self.weights[range].iter().copied())
    }

    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn weighted_degree(&self, i: usize) -> f64 {
        self.weights[self.offsets[i]..self.offsets[i + 1]]
            .iter()
            .sum()
    }

    /// Largest unweighted degree.
    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|i| self.degree(i)).max().unwrap_or(0)
    }

    pub fn max_weighted_degree(&self) -> f64 {
        (0..self.n)
            .map(|i| self.weighted_degree(i))
            .fold(0.0, f64::max)
    }

    /// Connected component label per vertex, plus the component count.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut label = vec![usize::MAX; self.n];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for start in 0..self.n {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = count;
            queue.push_back(start);
            while let Some(i) = queue.pop_front() {
                for (j, _) in self.neighbors(i) {
                    if label[j] == usize::MAX {
                        label[j] = count;
                        queue.push_back(j);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    pub fn is_connected(&self) -> bool {
        self.components().1 <= 1
    }

    /// `cut(A, V \ A)`: total weight of edges leaving `a`.
    pub fn cut_value(&self, a: &VertexSet) -> Result<f64> {
        check_len(self.n, a.n())?;
        Ok(self
            .edges
            .iter()
            .filter(|e| a.contains(e.u) != a.contains(e.v))
            .map(|e| e.w)
            .sum())
    }

    /// Graph total variation `sum_e w_e |f_u - f_v|`.
    pub fn total_variation(&self, f: &[f64]) -> Result<f64> {
        check_len(self.n, f.len())?;
        Ok(self.tv_unchecked(f))
    }

    /// Subgradient of the total variation with `sign(0) = 0`:
    /// `s_i = sum_j w_ij sign(f_i - f_j)`.
    pub fn tv_subgradient(&self, f: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n, f.len())?;
        Ok(self.tv_subgradient_unchecked(f))
    }

    pub(crate) fn tv_unchecked(&self, f: &[f64]) -> f64 {
        self.edges
            .iter()
            .map(|e| e.w * (f[e.u] - f[e.v]).abs())
            .sum()
    }

    pub(crate) fn tv_subgradient_unchecked(&self, f: &[f64]) -> Vec<f64> {
        let mut s = vec![0.0; self.n];
        for e in &self.edges {
            let d = f[e.u] - f[e.v];
            let t = if d > 0.0 {
                e.w
            } else if d < 0.0 {
                -e.w
            } else {
                0.0
            };
            s[e.u] += t;
            s[e.v] -= t;
        }
        s
    }

    /// Laplacian action `(D - W) x`.
    pub fn laplacian_apply(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..self.n {
            let mut acc = 0.0;
            for (j, w) in self.neighbors(i) {
                acc += w * (x[i] - x[j]);
            }
            out[i] = acc;
        }
    }

    /// Writes the graph as a 1-based whitespace edge list.
    ///
    /// The first line is a `# vertices N` directive so that isolated
    /// trailing vertices survive a round trip; weights use Rust's shortest
    /// round-trip float formatting.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# vertices {}", self.n)?;
        for e in &self.edges {
            writeln!(out, "{} {} {}", e.u + 1, e.v + 1, e.w)?;
        }
        Ok(())
    }

    pub fn to_edge_list_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_edge_list(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("edge list is ASCII")
    }
}

/// A subset `A` of the vertex set, stored as a membership mask.
///
/// Serializes as `{"n": .., "members": [..]}`.
#[derive(
    Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize,
)]
#[serde(into = "SetRepr", try_from = "SetRepr")]
pub struct VertexSet {
    mask: Vec<bool>,
}

#[derive(serde::Serialize, serde::Deserialize)]
struct SetRepr {
    n: usize,
    members: Vec<usize>,
}

impl From<VertexSet> for SetRepr {
    fn from(s: VertexSet) -> Self {
        SetRepr {
            n: s.n(),
            members: s.members(),
        }
    }
}

impl TryFrom<SetRepr> for VertexSet {
    type Error = String;

    fn try_from(r: SetRepr) -> std::result::Result<Self, String> {
        match r.members.iter().find(|&&i| i >= r.n) {
            Some(i) => Err(format!("member {i} out of range for n = {}", r.n)),
            None => Ok(VertexSet::from_members(r.n, r.members)),
        }
    }
}

impl VertexSet {
    pub fn empty(n: usize) -> Self {
        Self {
            mask: vec![false; n],
        }
    }

    pub fn full(n: usize) -> Self {
        Self {
            mask: vec![true; n],
        }
    }

    pub fn from_mask(mask: Vec<bool>) -> Self {
        Self { mask }
    }

    /// Panics if a member is out of range.
    pub fn from_members<I: IntoIterator<Item = usize>>(n: usize, members: I) -> Self {
        let mut mask = vec![false; n];
        for i in members {
            assert!(i < n, "vertex {i} out of range for n = {n}");
            mask[i] = true;
        }
        Self { mask }
    }

    /// Set encoded by the low `n` bits of `bits` (bit `i` = vertex `i`).
    pub fn from_bits(n: usize, bits: u64) -> Self {
        Self {
            mask: (0..n).map(|i| (bits >> i) & 1 == 1).collect(),
        }
    }

    /// Super-level set `{i : f_i > t}`.
    pub fn above(f: &[f64], t: f64) -> Self {
        Self {
            mask: f.iter().map(|&x| x > t).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.mask.len()
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&b| b)
    }

    pub fn is_full(&self) -> bool {
        self.mask.iter().all(|&b| b)
    }

    pub fn contains(&self, i: usize) -> bool {
        self.mask[i]
    }

    pub fn insert(&mut self, i: usize) {
        self.mask[i] = true;
    }

    pub fn remove(&mut self, i: usize) {
        self.mask[i] = false;
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn complement(&self) -> Self {
        Self {
            mask: self.mask.iter().map(|&b| !b).collect(),
        }
    }

    pub fn members(&self) -> Vec<usize> {
        self.mask
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
            .collect()
    }

    /// Characteristic vector `1_A`.
    pub fn indicator(&self) -> Vec<f64> {
        self.mask
            .iter()
            .map(|&b| if b { 1.0 } else { 0.0 })
            .collect()
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.members().into_iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

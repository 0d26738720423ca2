//! Uniform hypergraphs on dense vertex ids.
//!
//! A [`Hypergraph`] stores its edges as a flat, lexicographically sorted
//! buffer of `r`-sets, each in ascending vertex order. That canonical form
//! makes equality structural, membership a binary search and the text format
//! reproducible byte for byte.

mod degeneracy;
pub mod format;

use std::cmp::Ordering;
use std::collections::VecDeque;

use crate::error::{Error, Result};

pub use degeneracy::{check_degree_tail, degeneracy_ordering, DegeneracyOrdering, DegreeTail};

/// Vertex id. Vertices of a hypergraph on `n` vertices are `0..n`.
pub type Vertex = u32;

/// A set of `r - 1` vertices in ascending order, as found in links.
pub type LinkSet = Vec<Vertex>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Hypergraph {
    r: usize,
    n: usize,
    edges: Vec<Vertex>,
}

impl Hypergraph {
    /// Builds a hypergraph from arbitrary edge lists. Each edge is sorted;
    /// edges with the wrong arity, repeated or out-of-range vertices, and
    /// duplicate edges are rejected.
    pub fn new<I, E>(r: usize, n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = E>,
        E: AsRef<[Vertex]>,
    {
        check_shape(r, n)?;
        let mut flat = Vec::new();
        for edge in edges {
            let mut e = edge.as_ref().to_vec();
            validate_edge(r, n, &mut e)?;
            flat.extend_from_slice(&e);
        }
        let mut graph = Hypergraph { r, n, edges: flat };
        graph.canonicalize()?;
        Ok(graph)
    }

    /// The empty `r`-graph on `n` vertices.
    pub fn empty(r: usize, n: usize) -> Result<Self> {
        check_shape(r, n)?;
        Ok(Hypergraph {
            r,
            n,
            edges: Vec::new(),
        })
    }

    /// The complete `r`-graph on `n` vertices.
    pub fn complete(r: usize, n: usize) -> Result<Self> {
        check_shape(r, n)?;
        let mut edges = Vec::new();
        if n >= r {
            let mut comb: Vec<Vertex> = (0..r as Vertex).collect();
            loop {
                edges.extend_from_slice(&comb);
                if !next_combination(&mut comb, n) {
                    break;
                }
            }
        }
        Ok(Hypergraph { r, n, edges })
    }

    /// Wraps an edge buffer whose edges are already ascending and valid.
    /// Sorts and rejects duplicates.
    pub(crate) fn from_flat_edges(r: usize, n: usize, edges: Vec<Vertex>) -> Result<Self> {
        check_shape(r, n)?;
        debug_assert_eq!(edges.len() % r, 0);
        let mut graph = Hypergraph { r, n, edges };
        graph.canonicalize()?;
        Ok(graph)
    }

    fn canonicalize(&mut self) -> Result<()> {
        let r = self.r;
        let m = self.edges.len() / r;
        let already_sorted = (1..m).all(|i| {
            self.edges[(i - 1) * r..i * r].cmp(&self.edges[i * r..(i + 1) * r]) == Ordering::Less
        });
        if already_sorted {
            return Ok(());
        }
        if r <= 4 {
            return self.canonicalize_packed();
        }
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_unstable_by(|&a, &b| self.edges[a * r..(a + 1) * r].cmp(&self.edges[b * r..(b + 1) * r]));
        let mut sorted = Vec::with_capacity(self.edges.len());
        for (pos, &i) in order.iter().enumerate() {
            let e = &self.edges[i * r..(i + 1) * r];
            if pos > 0 && &sorted[sorted.len() - r..] == e {
                return Err(Error::DuplicateEdge(e.to_vec()));
            }
            sorted.extend_from_slice(e);
        }
        self.edges = sorted;
        Ok(())
    }

    /// Sorts edges of at most four vertices as packed 128-bit keys.
    fn canonicalize_packed(&mut self) -> Result<()> {
        let r = self.r;
        let mut keys: Vec<u128> = self
            .edges
            .chunks_exact(r)
            .map(|e| e.iter().fold(0u128, |acc, &v| (acc << 32) | v as u128))
            .collect();
        keys.sort_unstable();
        if let Some(w) = keys.windows(2).find(|w| w[0] == w[1]) {
            let dup = (0..r).rev().map(|i| (w[0] >> (32 * i)) as Vertex).collect();
            return Err(Error::DuplicateEdge(dup));
        }
        for (slot, key) in self.edges.chunks_exact_mut(r).zip(keys) {
            for (i, v) in slot.iter_mut().enumerate() {
                *v = (key >> (32 * (r - 1 - i))) as Vertex;
            }
        }
        Ok(())
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len() / self.r
    }

    /// Edges in canonical (lexicographic) order.
    pub fn edges(&self) -> impl ExactSizeIterator<Item = &[Vertex]> + '_ {
        self.edges.chunks_exact(self.r)
    }

    pub fn edge(&self, index: usize) -> &[Vertex] {
        &self.edges[index * self.r..(index + 1) * self.r]
    }

    /// Membership test for an ascending `r`-set.
    pub fn contains_edge(&self, edge: &[Vertex]) -> bool {
        if edge.len() != self.r {
            return false;
        }
        let (mut lo, mut hi) = (0, self.edge_count());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.edge(mid).cmp(edge) {
                Ordering::Less => lo = mid + 1,
                Ordering::Greater => hi = mid,
                Ordering::Equal => return true,
            }
        }
        false
    }

    /// Membership test for `set ∪ {v}` where `set` is ascending and does not
    /// contain `v`.
    pub fn contains_extended(&self, set: &[Vertex], v: Vertex) -> bool {
        let mut edge = Vec::with_capacity(set.len() + 1);
        let at = set.partition_point(|&x| x < v);
        edge.extend_from_slice(&set[..at]);
        edge.push(v);
        edge.extend_from_slice(&set[at..]);
        self.contains_edge(&edge)
    }

    /// Number of edges containing each vertex.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n];
        for &v in &self.edges {
            deg[v as usize] += 1;
        }
        deg
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    /// For each vertex, the indices of the edges containing it.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.n];
        for (i, e) in self.edges().enumerate() {
            for &v in e {
                inc[v as usize].push(i);
            }
        }
        inc
    }

    /// The link of `v`: every `(r-1)`-set that forms an edge together with `v`.
    pub fn link(&self, v: Vertex) -> Result<Vec<LinkSet>> {
        self.check_vertex(v)?;
        let mut out: Vec<LinkSet> = self
            .edges()
            .filter(|e| e.contains(&v))
            .map(|e| e.iter().copied().filter(|&x| x != v).collect())
            .collect();
        out.sort_unstable();
        Ok(out)
    }

    /// The back-link of the vertex at `position` of `ordering`: link sets made
    /// only of vertices placed earlier.
    pub fn back_link(&self, ordering: &DegeneracyOrdering, position: usize) -> Result<Vec<LinkSet>> {
        if ordering.len() != self.n {
            return Err(Error::InvalidOrdering(format!(
                "ordering has {} vertices, hypergraph has {}",
                ordering.len(),
                self.n
            )));
        }
        if position >= self.n {
            return Err(Error::PositionOutOfRange {
                position,
                n: self.n,
            });
        }
        let v = ordering.vertex_at(position);
        let mut out: Vec<LinkSet> = self
            .link(v)?
            .into_iter()
            .filter(|set| set.iter().all(|&u| ordering.position_of(u) < position))
            .collect();
        out.sort_unstable();
        Ok(out)
    }

    /// Back-links of every position of `ordering`, computed in one pass over
    /// the edges: each edge belongs to the back-link of its last vertex.
    pub fn back_links(&self, ordering: &DegeneracyOrdering) -> Vec<Vec<LinkSet>> {
        let mut out = vec![Vec::new(); self.n];
        for e in self.edges() {
            let last = e
                .iter()
                .copied()
                .max_by_key(|&u| ordering.position_of(u))
                .expect("edges are nonempty");
            let set: LinkSet = e.iter().copied().filter(|&u| u != last).collect();
            out[ordering.position_of(last)].push(set);
        }
        for sets in &mut out {
            sets.sort_unstable();
        }
        out
    }

    /// Connectivity of the co-occurrence relation: two vertices are adjacent
    /// when some edge contains both. Graphs on at most one vertex are connected.
    pub fn is_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        let inc = self.incidence();
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(v) = queue.pop_front() {
            for &ei in &inc[v] {
                for &u in self.edge(ei) {
                    let u = u as usize;
                    if !seen[u] {
                        seen[u] = true;
                        reached += 1;
                        queue.push_back(u);
                    }
                }
            }
        }
        reached == self.n
    }

    fn check_vertex(&self, v: Vertex) -> Result<()> {
        if (v as usize) < self.n {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                vertex: v as usize,
                n: self.n,
            })
        }
    }
}

fn check_shape(r: usize, n: usize) -> Result<()> {
    if r < 2 {
        return Err(Error::InvalidParams(format!("uniformity r = {r} must be at least 2")));
    }
    if n > Vertex::MAX as usize {
        return Err(Error::InvalidParams(format!("{n} vertices exceed the vertex id range")));
    }
    Ok(())
}

/// Sorts `edge` in place and checks arity, range and distinctness.
pub(crate) fn validate_edge(r: usize, n: usize, edge: &mut [Vertex]) -> Result<()> {
    if edge.len() != r {
        return Err(Error::InvalidEdge {
            edge: edge.to_vec(),
            reason: format!("expected {r} vertices, found {}", edge.len()),
        });
    }
    edge.sort_unstable();
    if let Some(&v) = edge.iter().find(|&&v| v as usize >= n) {
        return Err(Error::InvalidEdge {
            edge: edge.to_vec(),
            reason: format!("vertex {v} out of range (n = {n})"),
        });
    }
    if edge.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidEdge {
            edge: edge.to_vec(),
            reason: "repeated vertex".into(),
        });
    }
    Ok(())
}

/// Advances `comb` to the next ascending combination of `0..n` in
/// lexicographic order. Returns false after the last one.
pub(crate) fn next_combination(comb: &mut [Vertex], n: usize) -> bool {
    let k = comb.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if (comb[i] as usize) < n - k + i {
            comb[i] += 1;
            for j in i + 1..k {
                comb[j] = comb[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

use std::collections::BTreeSet;

use serde::Serialize;

use super::{Hypergraph, Vertex};
use crate::error::{Error, Result};

/// A vertex ordering together with the back-degree of every position.
///
/// The back-degree of position `i` is the number of edges whose last vertex
/// in the ordering is `order[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegeneracyOrdering {
    order: Vec<Vertex>,
    position: Vec<usize>,
    back_degrees: Vec<usize>,
}

impl DegeneracyOrdering {
    /// Wraps `order`, which must be a permutation of the vertices of `graph`,
    /// and computes its back-degrees.
    pub fn from_order(graph: &Hypergraph, order: Vec<Vertex>) -> Result<Self> {
        let n = graph.n();
        if order.len() != n {
            return Err(Error::InvalidOrdering(format!(
                "ordering has {} entries for {} vertices",
                order.len(),
                n
            )));
        }
        let mut position = vec![usize::MAX; n];
        for (i, &v) in order.iter().enumerate() {
            let slot = position.get_mut(v as usize).ok_or_else(|| {
                Error::InvalidOrdering(format!("vertex {v} out of range"))
            })?;
            if *slot != usize::MAX {
                return Err(Error::InvalidOrdering(format!("vertex {v} appears twice")));
            }
            *slot = i;
        }
        let mut back_degrees = vec![0usize; n];
        for e in graph.edges() {
            let last = e.iter().map(|&u| position[u as usize]).max().expect("nonempty edge");
            back_degrees[last] += 1;
        }
        Ok(DegeneracyOrdering {
            order,
            position,
            back_degrees,
        })
    }

    /// The ordering `0, 1, ..., n-1`.
    pub fn identity(graph: &Hypergraph) -> Self {
        Self::from_order(graph, (0..graph.n() as Vertex).collect()).expect("identity is a permutation")
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn order(&self) -> &[Vertex] {
        &self.order
    }

    pub fn vertex_at(&self, position: usize) -> Vertex {
        self.order[position]
    }

    pub fn position_of(&self, v: Vertex) -> usize {
        self.position[v as usize]
    }

    pub fn back_degrees(&self) -> &[usize] {
        &self.back_degrees
    }

    /// The degeneracy bound this ordering certifies.
    pub fn max_back_degree(&self) -> usize {
        self.back_degrees.iter().copied().max().unwrap_or(0)
    }
}

/// Minimum-degree peeling. Repeatedly removes a vertex of minimum degree in
/// the remaining induced subgraph (smallest id on ties); the reversed removal
/// order is returned with its certified degeneracy, which is optimal.
pub fn degeneracy_ordering(graph: &Hypergraph) -> (DegeneracyOrdering, usize) {
    let n = graph.n();
    let incidence = graph.incidence();
    let mut degree: Vec<usize> = incidence.iter().map(Vec::len).collect();
    let mut queue: BTreeSet<(usize, Vertex)> =
        (0..n).map(|v| (degree[v], v as Vertex)).collect();
    let mut edge_alive = vec![true; graph.edge_count()];
    let mut removed = Vec::with_capacity(n);

    while let Some((_, v)) = queue.pop_first() {
        removed.push(v);
        for &ei in &incidence[v as usize] {
            if !std::mem::replace(&mut edge_alive[ei], false) {
                continue;
            }
            for &u in graph.edge(ei) {
                if u != v {
                    let du = &mut degree[u as usize];
                    queue.remove(&(*du, u));
                    *du -= 1;
                    queue.insert((*du, u));
                }
            }
        }
    }
    removed.reverse();
    let ordering = DegeneracyOrdering::from_order(graph, removed).expect("peeling visits every vertex once");
    let d = ordering.max_back_degree();
    (ordering, d)
}

/// Result of the degree-tail audit: how many vertices have degree at least
/// `k`, and whether that count respects `r·D·n/k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeTail {
    pub count: usize,
    pub bound_ok: bool,
}

/// Counts vertices of degree at least `k` and compares against `r·D·n/k`,
/// where `d` is a certified degeneracy of `graph`.
pub fn check_degree_tail(graph: &Hypergraph, k: usize, d: usize) -> Result<DegreeTail> {
    if k == 0 {
        return Err(Error::Precondition("degree threshold k must be at least 1".into()));
    }
    let count = graph.degrees().into_iter().filter(|&deg| deg >= k).count();
    // count <= r D n / k, compared without division
    let bound_ok = (count as u128) * (k as u128) <= (graph.r() * d) as u128 * graph.n() as u128;
    Ok(DegreeTail { count, bound_ok })
}

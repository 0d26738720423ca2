//! Exact checks used to validate the model and the embedder at small sizes.

mod backtrack;
mod enumerate;
mod well_behaved;

use serde::Serialize;

use crate::hypergraph::{Hypergraph, Vertex};

pub use backtrack::{backtrack_embed, BacktrackOutcome};
pub use enumerate::{class_size, enumerate_class, for_each_in_class, universality_check, ClassSpec, Universality};
pub use well_behaved::{check_well_behaved, lemma_bound, measure_candidate_density, DensityRow, WbViolation};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    WrongLength { expected: usize, found: usize },
    OutOfRange { guest_vertex: Vertex, host_vertex: Vertex },
    Collision { guest_vertices: (Vertex, Vertex), host_vertex: Vertex },
    MissingEdge { guest_edge: Vec<Vertex>, image: Vec<Vertex> },
}

/// Checks that `map` (indexed by guest vertex) is injective into the host
/// and sends every guest edge to a host edge.
pub fn verify_embedding(guest: &Hypergraph, host: &Hypergraph, map: &[Vertex]) -> Result<(), Vec<Violation>> {
    if map.len() != guest.n() {
        return Err(vec![Violation::WrongLength {
            expected: guest.n(),
            found: map.len(),
        }]);
    }
    let mut violations = Vec::new();
    let mut owner: Vec<Option<Vertex>> = vec![None; host.n()];
    for (g, &h) in map.iter().enumerate() {
        let g = g as Vertex;
        match owner.get_mut(h as usize) {
            None => violations.push(Violation::OutOfRange {
                guest_vertex: g,
                host_vertex: h,
            }),
            Some(Some(prev)) => violations.push(Violation::Collision {
                guest_vertices: (*prev, g),
                host_vertex: h,
            }),
            Some(slot) => *slot = Some(g),
        }
    }
    if guest.r() != host.r() {
        // every edge image has the wrong size
        for e in guest.edges() {
            violations.push(Violation::MissingEdge {
                guest_edge: e.to_vec(),
                image: e.iter().map(|&v| map[v as usize]).collect(),
            });
        }
    } else {
        for e in guest.edges() {
            let mut image: Vec<Vertex> = e.iter().map(|&v| map[v as usize]).collect();
            image.sort_unstable();
            if !host.contains_edge(&image) {
                violations.push(Violation::MissingEdge {
                    guest_edge: e.to_vec(),
                    image,
                });
            }
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

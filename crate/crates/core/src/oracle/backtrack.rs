use fixedbitset::FixedBitSet;
use serde::Serialize;

use super::verify_embedding;
use crate::error::{Error, Result};
use crate::hypergraph::{degeneracy_ordering, Hypergraph, LinkSet, Vertex};
use crate::link_index::LinkIndex;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum BacktrackOutcome {
    /// An embedding, indexed by guest vertex.
    Found { map: Vec<Vertex> },
    NotFound,
    /// The search visited `nodes` placements without deciding.
    BudgetExhausted { nodes: u64 },
}

/// Complete search for an embedding of `guest` into `host`.
///
/// Guest vertices are placed in degeneracy order; the candidates for a vertex
/// are the unused host vertices whose link contains the image of its
/// back-link. Each placement costs one node of `node_budget`.
pub fn backtrack_embed(guest: &Hypergraph, host: &Hypergraph, node_budget: u64) -> Result<BacktrackOutcome> {
    if guest.r() != host.r() {
        return Err(Error::Precondition(format!(
            "guest is {}-uniform, host is {}-uniform",
            guest.r(),
            host.r()
        )));
    }
    let n = guest.n();
    if n > host.n() {
        return Ok(BacktrackOutcome::NotFound);
    }
    let (ordering, _) = degeneracy_ordering(guest);
    let back_links = guest.back_links(&ordering);
    let index = LinkIndex::build(host);
    let all = 0..host.n() as Vertex;

    let mut map: Vec<Option<Vertex>> = vec![None; n];
    let mut used = FixedBitSet::with_capacity(host.n());
    // per depth: remaining candidates, consumed from the front
    let mut frames: Vec<(Vec<Vertex>, usize)> = Vec::with_capacity(n);
    let mut nodes: u64 = 0;

    let candidates_at = |depth: usize, map: &[Option<Vertex>], used: &FixedBitSet| -> Vec<Vertex> {
        let image: Vec<LinkSet> = back_links[depth]
            .iter()
            .map(|b| {
                let mut s: LinkSet = b.iter().map(|&u| map[u as usize].expect("placed")).collect();
                s.sort_unstable();
                s
            })
            .collect();
        index.common_members(&image, all.clone(), used)
    };

    if n > 0 {
        frames.push((candidates_at(0, &map, &used), 0));
    }
    while let Some(depth) = frames.len().checked_sub(1) {
        let v = ordering.vertex_at(depth) as usize;
        if let Some(old) = map[v].take() {
            used.set(old as usize, false);
        }
        let (cands, next) = &mut frames[depth];
        let Some(&u) = cands.get(*next) else {
            frames.pop();
            continue;
        };
        *next += 1;
        if nodes == node_budget {
            return Ok(BacktrackOutcome::BudgetExhausted { nodes });
        }
        nodes += 1;
        map[v] = Some(u);
        used.insert(u as usize);
        if depth + 1 == n {
            let map: Vec<Vertex> = map.into_iter().map(|x| x.expect("all placed")).collect();
            verify_embedding(guest, host, &map)
                .map_err(|v| Error::Internal(format!("backtracking produced an invalid map: {v:?}")))?;
            return Ok(BacktrackOutcome::Found { map });
        }
        let next_cands = candidates_at(depth + 1, &map, &used);
        frames.push((next_cands, 0));
    }
    if n == 0 {
        return Ok(BacktrackOutcome::Found { map: Vec::new() });
    }
    Ok(BacktrackOutcome::NotFound)
}

//! Greedy embedding of a `D`-degenerate guest into a sampled host.
//!
//! Guest vertices are placed in degeneracy order. A vertex of degree `d`
//! goes to the first block `W_k` with `Δ_k < d` (or the last block), in the
//! first sub-block holding an unused host vertex whose link contains the
//! image of its back-link. The smallest such host vertex is taken. There is
//! no backtracking: when a block offers no candidate the run stops and the
//! report says where.

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypergraph::{DegeneracyOrdering, Hypergraph, LinkSet, Vertex};
use crate::model::{log2, BlockGraph, ModelParams};

/// Least `k` with `Δ_k < degree`, or `N` when there is none.
pub fn target_block(params: &ModelParams, degree: usize) -> usize {
    let levels = params.levels();
    (1..=levels)
        .find(|&k| params.delta(k) < degree as f64)
        .unwrap_or(levels)
}

/// `L_{k,j} = (4 log n)^(1-j) · rnD/Δ_k` for `k < N` and `(4 log n)^(1-j) · n`
/// for `k = N`, indexed `[k-1][j-1]`.
pub fn fill_thresholds(params: &ModelParams) -> Vec<Vec<f64>> {
    let n = params.n() as f64;
    let shrink = 4.0 * log2(n);
    (1..=params.levels())
        .map(|k| {
            let top = if k < params.levels() {
                (params.r() * params.n() * params.d()) as f64 / params.delta(k)
            } else {
                n
            };
            (0..params.subblock_count(k))
                .map(|j| top / shrink.powi(j as i32))
                .collect()
        })
        .collect()
}

/// Unused vertices `u` of `W_{k,j}` with `b ∪ {u}` a host edge for every `b`
/// in `back_link`, ascending.
pub fn candidates(host: &BlockGraph, back_link: &[LinkSet], k: usize, j: usize, used: &FixedBitSet) -> Vec<Vertex> {
    host.links().common_members(back_link, host.subblock_range(k, j), used)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Outcome {
    Success,
    /// No candidate in the target block at 1-based step `time`.
    Failed { time: usize, vertex: Vertex, block: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Step {
    pub vertex: Vertex,
    pub degree: usize,
    pub back_degree: usize,
    pub block: usize,
    pub subblock: usize,
    pub host_vertex: Vertex,
    /// Available candidates in the chosen sub-block.
    pub candidates: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmbedReport {
    pub outcome: Outcome,
    /// Image of each guest vertex; `None` for vertices not placed.
    pub map: Vec<Option<Vertex>>,
    pub steps: Vec<Step>,
    /// Used host vertices per sub-block, `[k-1][j-1]`. Placements are never
    /// undone, so this is also the peak.
    pub occupancy: Vec<Vec<usize>>,
    pub thresholds: Vec<Vec<f64>>,
}

impl EmbedReport {
    pub fn is_success(&self) -> bool {
        self.outcome == Outcome::Success
    }

    /// The full map, when every guest vertex was placed.
    pub fn full_map(&self) -> Option<Vec<Vertex>> {
        self.map.iter().copied().collect()
    }

    /// Number of guest vertices placed.
    pub fn placed(&self) -> usize {
        self.steps.len()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

fn check_preconditions(guest: &Hypergraph, ordering: &DegeneracyOrdering, host: &BlockGraph) -> Result<()> {
    let params = host.params();
    if guest.r() != params.r() {
        return Err(Error::Precondition(format!(
            "guest is {}-uniform, host is {}-uniform",
            guest.r(),
            params.r()
        )));
    }
    if ordering.len() != guest.n() {
        return Err(Error::Precondition(format!(
            "ordering covers {} vertices, guest has {}",
            ordering.len(),
            guest.n()
        )));
    }
    let recomputed = DegeneracyOrdering::from_order(guest, ordering.order().to_vec())?;
    if recomputed.back_degrees() != ordering.back_degrees() {
        return Err(Error::Precondition("ordering was not computed for this guest".into()));
    }
    if ordering.max_back_degree() > params.d() {
        return Err(Error::Precondition(format!(
            "ordering has back-degree {}, host is built for D = {}",
            ordering.max_back_degree(),
            params.d()
        )));
    }
    if guest.n() > host.vertex_count() {
        return Err(Error::Precondition(format!(
            "guest has {} vertices, host only {}",
            guest.n(),
            host.vertex_count()
        )));
    }
    Ok(())
}

fn image(map: &[Option<Vertex>], sets: &[LinkSet]) -> Vec<LinkSet> {
    sets.iter()
        .map(|b| {
            let mut s: LinkSet = b.iter().map(|&u| map[u as usize].expect("back-link vertices are placed")).collect();
            s.sort_unstable();
            s
        })
        .collect()
}

/// Runs the greedy strategy for `guest` in `ordering` on `host`.
pub fn embed(guest: &Hypergraph, ordering: &DegeneracyOrdering, host: &BlockGraph) -> Result<EmbedReport> {
    check_preconditions(guest, ordering, host)?;
    let params = host.params();
    let degrees = guest.degrees();
    let back_links = guest.back_links(ordering);
    let mut used = FixedBitSet::with_capacity(host.vertex_count());
    let mut map: Vec<Option<Vertex>> = vec![None; guest.n()];
    let mut occupancy: Vec<Vec<usize>> = params.all_subblock_sizes().iter().map(|s| vec![0; s.len()]).collect();
    let mut steps = Vec::with_capacity(guest.n());
    let mut outcome = Outcome::Success;

    for (t, sets) in back_links.iter().enumerate() {
        let v = ordering.vertex_at(t);
        let embedded = image(&map, sets);
        let k = target_block(params, degrees[v as usize]);
        let placed = (1..=params.subblock_count(k)).find_map(|j| {
            let found = candidates(host, &embedded, k, j, &used);
            found.first().map(|&u| (j, u, found.len()))
        });
        let Some((j, u, count)) = placed else {
            outcome = Outcome::Failed {
                time: t + 1,
                vertex: v,
                block: k,
            };
            break;
        };
        used.insert(u as usize);
        map[v as usize] = Some(u);
        occupancy[k - 1][j - 1] += 1;
        steps.push(Step {
            vertex: v,
            degree: degrees[v as usize],
            back_degree: sets.len(),
            block: k,
            subblock: j,
            host_vertex: u,
            candidates: count,
        });
    }
    debug_assert_eq!(occupancy, recount_occupancy(host, &map));

    Ok(EmbedReport {
        outcome,
        map,
        steps,
        occupancy,
        thresholds: fill_thresholds(params),
    })
}

fn recount_occupancy(host: &BlockGraph, map: &[Option<Vertex>]) -> Vec<Vec<usize>> {
    let mut occ: Vec<Vec<usize>> = host.params().all_subblock_sizes().iter().map(|s| vec![0; s.len()]).collect();
    for &u in map.iter().flatten() {
        let (k, j) = host.vertex_block(u);
        occ[k - 1][j - 1] += 1;
    }
    occ
}

/// Embedded back-links of the placed guest vertices, grouped by the
/// sub-block `(k, j)` each vertex landed in, in placement order.
pub fn harvest_back_links(
    guest: &Hypergraph,
    ordering: &DegeneracyOrdering,
    report: &EmbedReport,
) -> BTreeMap<(usize, usize), Vec<Vec<LinkSet>>> {
    let back_links = guest.back_links(ordering);
    let mut out: BTreeMap<(usize, usize), Vec<Vec<LinkSet>>> = BTreeMap::new();
    for (t, step) in report.steps.iter().enumerate() {
        out.entry((step.block, step.subblock))
            .or_default()
            .push(image(&report.map, &back_links[t]));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::degeneracy_ordering;
    use crate::model::{compute_params, Scaling};

    fn example_params() -> ModelParams {
        compute_params(2, 65536, 2, Scaling::PaperExact).unwrap()
    }

    #[test]
    fn target_block_examples() {
        let p = example_params();
        assert_eq!(target_block(&p, 300), 1);
        assert_eq!(target_block(&p, 256), 2);
        assert_eq!(target_block(&p, 5), 3);
        assert_eq!(target_block(&p, 3), 3);
        assert_eq!(target_block(&p, 0), 3);
    }

    #[test]
    fn thresholds() {
        let p = example_params();
        let l = fill_thresholds(&p);
        assert_eq!(l[2][0], 65536.0);
        assert_eq!(l[0][0], 2.0 * 65536.0 * 2.0 / 256.0);
        assert!((l[1][1] - l[1][0] / 64.0).abs() < 1e-9);
    }

    fn one_block_host(r: usize, size: usize, complete: bool) -> BlockGraph {
        let params = ModelParams::from_layout(r, size, 2, vec![4.0, 1.0], vec![vec![size]], 1.0).unwrap();
        let graph = if complete {
            Hypergraph::complete(r, size).unwrap()
        } else {
            Hypergraph::empty(r, size).unwrap()
        };
        BlockGraph::new(params, graph).unwrap()
    }

    #[test]
    fn candidate_examples() {
        let params = ModelParams::from_layout(3, 5, 2, vec![4.0, 2.0, 1.0], vec![vec![2], vec![3]], 1.0).unwrap();
        let graph = Hypergraph::new(3, 5, [[0u32, 1, 2], [0, 1, 3]]).unwrap();
        let host = BlockGraph::new(params, graph).unwrap();
        let mut used = FixedBitSet::with_capacity(5);
        assert_eq!(candidates(&host, &[vec![0, 1]], 2, 1, &used), vec![2, 3]);
        assert_eq!(candidates(&host, &[], 2, 1, &used), vec![2, 3, 4]);
        used.insert_range(2..5);
        assert!(candidates(&host, &[], 2, 1, &used).is_empty());
    }

    #[test]
    fn single_vertex_lands_in_last_block() {
        let params = ModelParams::from_layout(3, 1, 2, vec![4.0, 2.0, 1.0], vec![vec![2], vec![3]], 1.0).unwrap();
        let host = BlockGraph::new(params, Hypergraph::empty(3, 5).unwrap()).unwrap();
        let guest = Hypergraph::empty(3, 1).unwrap();
        let (ord, _) = degeneracy_ordering(&guest);
        let report = embed(&guest, &ord, &host).unwrap();
        assert!(report.is_success());
        assert_eq!(report.map, vec![Some(2)]);
        assert_eq!((report.steps[0].block, report.steps[0].subblock), (2, 1));
    }

    #[test]
    fn single_edge_into_complete_host() {
        let host = one_block_host(3, 4, true);
        let guest = Hypergraph::new(3, 3, [[0u32, 1, 2]]).unwrap();
        let (ord, _) = degeneracy_ordering(&guest);
        let report = embed(&guest, &ord, &host).unwrap();
        assert!(report.is_success());
        let map = report.full_map().unwrap();
        let mut image: Vec<u32> = map.clone();
        image.sort();
        assert!(host.graph().contains_edge(&image));
        assert_eq!(report.occupancy, vec![vec![3]]);
    }

    #[test]
    fn empty_host_fails_at_the_closing_vertex() {
        let host = one_block_host(3, 4, false);
        let guest = Hypergraph::new(3, 3, [[0u32, 1, 2]]).unwrap();
        let (ord, _) = degeneracy_ordering(&guest);
        let report = embed(&guest, &ord, &host).unwrap();
        assert_eq!(
            report.outcome,
            Outcome::Failed {
                time: 3,
                vertex: ord.vertex_at(2),
                block: 1
            }
        );
        assert_eq!(report.placed(), 2);
        assert!(report.full_map().is_none());
    }

    #[test]
    fn preconditions() {
        let host = one_block_host(3, 4, true);
        let wrong_r = Hypergraph::new(2, 2, [[0u32, 1]]).unwrap();
        let (ord, _) = degeneracy_ordering(&wrong_r);
        assert!(matches!(embed(&wrong_r, &ord, &host), Err(Error::Precondition(_))));
        let dense = Hypergraph::complete(3, 4).unwrap();
        let (ord, d) = degeneracy_ordering(&dense);
        assert_eq!(d, 3);
        assert!(matches!(embed(&dense, &ord, &host), Err(Error::Precondition(_))));
        let big = Hypergraph::empty(3, 9).unwrap();
        let (ord, _) = degeneracy_ordering(&big);
        assert!(matches!(embed(&big, &ord, &host), Err(Error::Precondition(_))));
    }
}

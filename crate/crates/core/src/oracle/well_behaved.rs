//! Well-behaved multisets of embedded back-links and the candidate density
//! they induce in a sub-block.

use std::collections::{BTreeMap, BTreeSet};

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypergraph::{LinkSet, Vertex};
use crate::model::{log2, BlockGraph, ModelParams};

/// The first clause a multiset violates, with a witness.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "clause")]
pub enum WbViolation {
    /// A set in the multiset names a vertex the host does not have.
    UnknownVertex { entry: usize, vertex: Vertex },
    /// Entry `entry` holds more than `D` link sets.
    WB1 { entry: usize, size: usize, limit: usize },
    /// `vertex` of block `block` lies in more than `Δ_{k-1}` entries.
    WB2 { vertex: Vertex, block: usize, count: usize, limit: f64 },
    /// More than half of sub-block `(block, subblock)` is covered.
    WB3 { block: usize, subblock: usize, covered: usize, size: usize },
}

fn entry_vertices(entry: &[LinkSet]) -> BTreeSet<Vertex> {
    entry.iter().flatten().copied().collect()
}

/// Checks the multiset `ms` (one entry per guest vertex) against the host's
/// block layout, clause by clause.
pub fn check_well_behaved(host: &BlockGraph, ms: &[Vec<LinkSet>]) -> Result<(), WbViolation> {
    let params = host.params();
    let n = host.vertex_count();
    for (i, entry) in ms.iter().enumerate() {
        if let Some(&v) = entry.iter().flatten().find(|&&v| v as usize >= n) {
            return Err(WbViolation::UnknownVertex { entry: i, vertex: v });
        }
    }
    for (i, entry) in ms.iter().enumerate() {
        if entry.len() > params.d() {
            return Err(WbViolation::WB1 {
                entry: i,
                size: entry.len(),
                limit: params.d(),
            });
        }
    }
    let mut multiplicity: BTreeMap<Vertex, usize> = BTreeMap::new();
    for entry in ms {
        for v in entry_vertices(entry) {
            *multiplicity.entry(v).or_default() += 1;
        }
    }
    for (&v, &count) in &multiplicity {
        let block = host.block_of(v);
        let limit = params.delta(block - 1);
        if count as f64 > limit {
            return Err(WbViolation::WB2 {
                vertex: v,
                block,
                count,
                limit,
            });
        }
    }
    let mut covered: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for &v in multiplicity.keys() {
        *covered.entry(host.vertex_block(v)).or_default() += 1;
    }
    for (&(k, j), &count) in &covered {
        let size = params.subblock_sizes(k)[j - 1];
        if 2 * count > size {
            return Err(WbViolation::WB3 {
                block: k,
                subblock: j,
                covered: count,
                size,
            });
        }
    }
    Ok(())
}

/// `min{1/16, (t/4)(log n)²(log log n)^D n^(D^(1-k) - 1)}`.
pub fn lemma_bound(params: &ModelParams, k: usize, t: usize) -> f64 {
    let n = params.n() as f64;
    let d = params.d() as f64;
    let logn = log2(n);
    let exponent = d.powi(1 - k as i32) - 1.0;
    let value = t as f64 / 4.0 * logn * logn * log2(logn).powi(params.d() as i32) * n.powf(exponent);
    value.min(1.0 / 16.0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityRow {
    pub k: usize,
    pub j: usize,
    pub t: usize,
    /// Fraction of `W_{k,j}` whose link contains some entry of the multiset.
    pub observed: f64,
    pub bound: f64,
}

/// Measures which fraction of `W_{k,j}` are candidates for at least one entry
/// of the multiset, next to the lemma's lower bound for that `t`.
pub fn measure_candidate_density(host: &BlockGraph, ms: &[Vec<LinkSet>], k: usize, j: usize) -> Result<DensityRow> {
    let params = host.params();
    if k == 0 || k > params.levels() || j == 0 || j > params.subblock_count(k) {
        return Err(Error::InvalidParams(format!("no sub-block ({k}, {j})")));
    }
    let range = host.subblock_range(k, j);
    if range.is_empty() {
        return Err(Error::InvalidParams(format!("sub-block ({k}, {j}) is empty")));
    }
    if let Err(v) = check_well_behaved(host, ms) {
        return Err(Error::Precondition(format!("multiset is not well-behaved: {v:?}")));
    }
    let none_used = FixedBitSet::with_capacity(host.vertex_count());
    let mut hit = FixedBitSet::with_capacity(host.vertex_count());
    let distinct: BTreeSet<&Vec<LinkSet>> = ms.iter().collect();
    for entry in distinct {
        for u in host.links().common_members(entry, range.clone(), &none_used) {
            hit.insert(u as usize);
        }
    }
    let size = range.len();
    Ok(DensityRow {
        k,
        j,
        t: ms.len(),
        observed: hit.count_ones(..) as f64 / size as f64,
        bound: lemma_bound(params, k, ms.len()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::Hypergraph;

    fn host() -> BlockGraph {
        let params =
            ModelParams::from_layout(3, 16, 2, vec![32.0, 4.0, 2.0], vec![vec![2, 2], vec![4, 2]], 0.5).unwrap();
        let graph = Hypergraph::new(3, 10, [[0u32, 1, 4], [0, 1, 5], [0, 1, 8], [4, 5, 6], [2, 4, 6]]).unwrap();
        BlockGraph::new(params, graph).unwrap()
    }

    #[test]
    fn empty_multiset_is_fine() {
        assert_eq!(check_well_behaved(&host(), &[]), Ok(()));
    }

    #[test]
    fn oversized_entry_breaks_wb1() {
        let ms = vec![vec![vec![0, 1], vec![0, 2], vec![1, 2]]];
        assert!(matches!(check_well_behaved(&host(), &ms), Err(WbViolation::WB1 { entry: 0, size: 3, limit: 2 })));
    }

    #[test]
    fn heavy_vertex_breaks_wb2() {
        // vertex 4 lies in block 2, whose limit is Δ_1 = 4
        let ms: Vec<Vec<LinkSet>> = (0..5).map(|_| vec![vec![4, 8]]).collect();
        assert!(matches!(
            check_well_behaved(&host(), &ms),
            Err(WbViolation::WB2 { vertex: 4, block: 2, count: 5, .. })
        ));
    }

    #[test]
    fn covering_a_first_subblock_breaks_wb3() {
        let ms = vec![vec![vec![0, 1]]];
        assert_eq!(
            check_well_behaved(&host(), &ms),
            Err(WbViolation::WB3 {
                block: 1,
                subblock: 1,
                covered: 2,
                size: 2
            })
        );
    }

    #[test]
    fn unknown_vertex() {
        let ms = vec![vec![vec![3, 40]]];
        assert!(matches!(check_well_behaved(&host(), &ms), Err(WbViolation::UnknownVertex { vertex: 40, .. })));
    }

    #[test]
    fn density() {
        let h = host();
        let row = measure_candidate_density(&h, &[vec![]], 2, 1).unwrap();
        assert_eq!(row.observed, 1.0);
        assert_eq!(row.t, 1);
        // {4,6} is in the links of 2 and 5; only 5 lies in W_{2,1} = 4..8
        let row = measure_candidate_density(&h, &[vec![vec![4, 6]]], 2, 1).unwrap();
        assert_eq!(row.observed, 0.25);
        assert!(measure_candidate_density(&h, &[], 3, 1).is_err());
        assert!(measure_candidate_density(&h, &[vec![vec![0, 1]]], 2, 1).is_err());
    }

    #[test]
    fn bound_caps_at_one_sixteenth_in_the_first_block() {
        let params = crate::model::compute_params(2, 1 << 40, 2, crate::model::Scaling::PaperExact).unwrap();
        assert_eq!(lemma_bound(&params, 1, 1), 1.0 / 16.0);
        assert!(lemma_bound(&params, 3, 1) < 1.0 / 16.0);
        assert_eq!(lemma_bound(&params, 3, 0), 0.0);
    }
}

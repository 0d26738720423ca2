//! Stratified sampling of the block model.
//!
//! Each stratum draws its edge count from `Binomial(M, p)` and then that many
//! distinct `r`-sets of the stratum, each identified by a rank in `0..M` and
//! unranked block by block. Every stratum owns a random stream derived from
//! `(seed, stratum index)`, so the output does not depend on how strata are
//! scheduled across threads.

use std::collections::HashSet;

use fixedbitset::FixedBitSet;
use num_traits::ToPrimitive;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use super::block_graph::BlockGraph;
use super::params::ModelParams;
use super::strata::{probability_unchecked, strata, stratum_cardinality};
use crate::error::{Error, Result};
use crate::hypergraph::{next_combination, Hypergraph, Vertex};
use crate::seeds::{stream, Role};

/// Limits checked before any sampling work starts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleCaps {
    /// Upper limit on the expected edge count summed over strata.
    pub max_edges: f64,
    pub max_vertices: usize,
}

impl Default for SampleCaps {
    fn default() -> Self {
        SampleCaps {
            max_edges: 2.0e7,
            max_vertices: 1 << 30,
        }
    }
}

/// One block's share of a stratum: `count` vertices from `size` starting at `offset`.
#[derive(Clone, Copy, Debug)]
struct Part {
    offset: Vertex,
    size: u64,
    count: usize,
}

/// Largest rank range tracked with a bitset rather than a hash set.
const BITSET_RANKS: u64 = 1 << 28;

/// A set of ranks in `0..length`.
enum RankSet {
    Bits(FixedBitSet),
    Hashed(HashSet<u64>),
}

impl RankSet {
    fn new(length: u64, amount: u64) -> Self {
        if length <= BITSET_RANKS {
            RankSet::Bits(FixedBitSet::with_capacity(length as usize))
        } else {
            RankSet::Hashed(HashSet::with_capacity(amount as usize))
        }
    }

    /// Whether `x` was absent.
    fn insert(&mut self, x: u64) -> bool {
        match self {
            RankSet::Bits(bits) => !bits.put(x as usize),
            RankSet::Hashed(set) => set.insert(x),
        }
    }

    fn contains(&self, x: u64) -> bool {
        match self {
            RankSet::Bits(bits) => bits.contains(x as usize),
            RankSet::Hashed(set) => set.contains(&x),
        }
    }
}

struct Stratum {
    parts: Vec<Part>,
    radices: Vec<u64>,
    cardinality: u64,
    probability: f64,
}

fn plan_stratum(params: &ModelParams, pattern: &[usize]) -> Result<Stratum> {
    let mut parts = Vec::new();
    let mut offset: u64 = 0;
    for (i, &count) in pattern.iter().enumerate() {
        let size = params.block_size(i + 1) as u64;
        if count > 0 {
            parts.push(Part {
                offset: offset as Vertex,
                size,
                count,
            });
        }
        offset += size;
    }
    let cardinality = stratum_cardinality(params, pattern)?;
    let cardinality = cardinality.to_u64().ok_or_else(|| {
        Error::ResourceCap(format!("stratum {pattern:?} has {cardinality} r-sets, beyond the 64-bit rank range"))
    })?;
    let radices = parts.iter().map(|p| choose(p.size, p.count as u64)).collect();
    Ok(Stratum {
        parts,
        radices,
        cardinality,
        probability: probability_unchecked(params, pattern),
    })
}

fn choose(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// The `rank`-th `k`-subset of `0..n` in colexicographic order, ascending.
fn unrank_combination(mut rank: u64, n: u64, k: usize, out: &mut Vec<Vertex>) {
    let start = out.len();
    for i in (1..=k as u64).rev() {
        // largest c with C(c, i) <= rank
        let (mut lo, mut hi) = (i - 1, n - 1);
        while lo < hi {
            let mid = lo + (hi - lo).div_ceil(2);
            if choose(mid, i) <= rank {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        rank -= choose(lo, i);
        out.push(lo as Vertex);
    }
    out[start..].reverse();
}

impl Stratum {
    fn unrank(&self, mut rank: u64, out: &mut Vec<Vertex>) {
        let mut digits = vec![0u64; self.parts.len()];
        for (slot, &radix) in digits.iter_mut().zip(&self.radices).rev() {
            *slot = rank % radix;
            rank /= radix;
        }
        for (part, digit) in self.parts.iter().zip(digits) {
            let start = out.len();
            unrank_combination(digit, part.size, part.count, out);
            for v in &mut out[start..] {
                *v += part.offset;
            }
        }
    }

    /// Every `r`-set of the stratum whose rank passes `keep`, in rank order.
    fn enumerate(&self, keep: impl Fn(u64) -> bool, out: &mut Vec<Vertex>) {
        let mut combs: Vec<Vec<Vertex>> = self.parts.iter().map(|p| (0..p.count as Vertex).collect()).collect();
        let mut rank: u64 = 0;
        loop {
            if keep(rank) {
                for (part, comb) in self.parts.iter().zip(&combs) {
                    out.extend(comb.iter().map(|&v| v + part.offset));
                }
            }
            rank += 1;
            let mut b = self.parts.len();
            loop {
                if b == 0 {
                    return;
                }
                b -= 1;
                if next_combination(&mut combs[b], self.parts[b].size as usize) {
                    break;
                }
                for (i, v) in combs[b].iter_mut().enumerate() {
                    *v = i as Vertex;
                }
            }
        }
    }
}

/// `amount` distinct ranks from `0..length` in draw order, by rejection.
fn distinct_ranks<R: Rng>(rng: &mut R, length: u64, amount: u64) -> Result<(Vec<u64>, RankSet)> {
    let mut seen = RankSet::new(length, amount);
    let mut order = Vec::with_capacity(amount as usize);
    let mut rejections: u64 = 0;
    while (order.len() as u64) < amount {
        let x = rng.random_range(0..length);
        if seen.insert(x) {
            order.push(x);
        } else {
            rejections += 1;
            if rejections > 100 * amount {
                return Err(Error::Internal(format!(
                    "{rejections} rejections drawing {amount} of {length} ranks"
                )));
            }
        }
    }
    Ok((order, seen))
}

fn sample_planned(stratum: &Stratum, seed: u64, index: usize) -> Result<Vec<Vertex>> {
    let m = stratum.cardinality;
    let p = stratum.probability;
    let r: usize = stratum.parts.iter().map(|x| x.count).sum();
    let mut rng = stream(seed, Role::Stratum, index as u64);
    let x = if p >= 1.0 {
        m
    } else if p <= 0.0 || m == 0 {
        0
    } else {
        Binomial::new(m, p)
            .map_err(|e| Error::Internal(format!("binomial({m}, {p}): {e}")))?
            .sample(&mut rng)
    };
    let mut out = Vec::with_capacity(x as usize * r);
    if x == m {
        stratum.enumerate(|_| true, &mut out);
    } else if x > m / 2 {
        let (_, skip) = distinct_ranks(&mut rng, m, m - x)?;
        stratum.enumerate(|rank| !skip.contains(rank), &mut out);
    } else if m <= BITSET_RANKS && x >= m / 16 {
        let (_, chosen) = distinct_ranks(&mut rng, m, x)?;
        stratum.enumerate(|rank| chosen.contains(rank), &mut out);
    } else {
        let (ranks, _) = distinct_ranks(&mut rng, m, x)?;
        for rank in ranks {
            stratum.unrank(rank, &mut out);
        }
    }
    Ok(out)
}

fn check_caps(params: &ModelParams, planned: &[(Vec<usize>, Stratum)], caps: &SampleCaps) -> Result<()> {
    let vertices = params.total_vertices();
    if vertices > caps.max_vertices || vertices > Vertex::MAX as usize {
        return Err(Error::ResourceCap(format!(
            "host needs {vertices} vertices, cap is {}",
            caps.max_vertices.min(Vertex::MAX as usize)
        )));
    }
    let mut total = 0.0;
    for (pattern, stratum) in planned {
        let expectation = stratum.probability * stratum.cardinality as f64;
        total += expectation;
        if total > caps.max_edges {
            return Err(Error::ResourceCap(format!(
                "stratum {pattern:?} expects {expectation:.4e} edges, bringing the total to {total:.4e} \
                 over the cap of {:.4e}",
                caps.max_edges
            )));
        }
    }
    Ok(())
}

fn plan_all(params: &ModelParams) -> Result<Vec<(Vec<usize>, Stratum)>> {
    strata(params)
        .into_iter()
        .map(|pattern| {
            let s = plan_stratum(params, &pattern)?;
            Ok((pattern, s))
        })
        .collect()
}

/// Samples a host `Γ(r, n, D)` for `params`. Deterministic in `(params, seed)`.
pub fn sample_model(params: &ModelParams, seed: u64, caps: &SampleCaps) -> Result<BlockGraph> {
    BlockGraph::new(params.clone(), sample_edges(params, seed, caps)?)
}

/// The edge set of `sample_model(params, seed, caps)` without the block
/// bookkeeping and link index.
pub fn sample_edges(params: &ModelParams, seed: u64, caps: &SampleCaps) -> Result<Hypergraph> {
    let planned = plan_all(params)?;
    check_caps(params, &planned, caps)?;
    let chunks: Vec<Vec<Vertex>> = planned
        .par_iter()
        .enumerate()
        .map(|(i, (_, stratum))| sample_planned(stratum, seed, i))
        .collect::<Result<_>>()?;
    let mut flat = Vec::with_capacity(chunks.iter().map(Vec::len).sum());
    for chunk in chunks {
        flat.extend(chunk);
    }
    Hypergraph::from_flat_edges(params.r(), params.total_vertices(), flat)
}

/// The edges one stratum contributes to `sample_model(params, seed, _)`,
/// as a flat list of ascending `r`-sets.
pub fn sample_stratum(params: &ModelParams, seed: u64, index: usize) -> Result<Vec<Vertex>> {
    let patterns = strata(params);
    let pattern = patterns.get(index).ok_or_else(|| {
        Error::InvalidParams(format!("stratum index {index} out of range ({} strata)", patterns.len()))
    })?;
    sample_planned(&plan_stratum(params, pattern)?, seed, index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::params::{compute_params, Scaling};
    use crate::model::strata::expected_edges;

    fn small() -> ModelParams {
        ModelParams::from_layout(3, 6, 2, vec![12.0, 2.5, 1.5], vec![vec![3, 2], vec![3, 1, 1]], 0.1).unwrap()
    }

    #[test]
    fn unranking_is_a_bijection() {
        for (n, k) in [(7u64, 3usize), (5, 1), (6, 6), (9, 2)] {
            let mut seen = HashSet::new();
            for rank in 0..choose(n, k as u64) {
                let mut out = Vec::new();
                unrank_combination(rank, n, k, &mut out);
                assert!(out.windows(2).all(|w| w[0] < w[1]));
                assert!(out.iter().all(|&v| (v as u64) < n));
                assert!(seen.insert(out));
            }
        }
    }

    #[test]
    fn stratum_unrank_matches_enumeration() {
        let params = small();
        for pattern in strata(&params) {
            let s = plan_stratum(&params, &pattern).unwrap();
            let mut listed = Vec::new();
            s.enumerate(|_| true, &mut listed);
            let mut ranked = Vec::new();
            for rank in 0..s.cardinality {
                s.unrank(rank, &mut ranked);
            }
            let mut a: Vec<_> = listed.chunks(3).map(<[u32]>::to_vec).collect();
            let mut b: Vec<_> = ranked.chunks(3).map(<[u32]>::to_vec).collect();
            assert_eq!(a.len() as u64, s.cardinality);
            a.sort();
            b.sort();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn certain_and_impossible_strata() {
        let sure = ModelParams::from_layout(3, 6, 2, vec![12.0, 2.5, 1.5], vec![vec![3, 2], vec![3, 1, 1]], 1.0).unwrap();
        let host = sample_model(&sure, 1, &SampleCaps::default()).unwrap();
        assert_eq!(host.edge_count(), 120); // C(10, 3)
        let none = ModelParams::from_layout(3, 6, 2, vec![12.0, 2.5, 1.5], vec![vec![3, 2], vec![3, 1, 1]], 0.0).unwrap();
        assert_eq!(sample_model(&none, 1, &SampleCaps::default()).unwrap().edge_count(), 0);
    }

    #[test]
    fn deterministic_and_pattern_consistent() {
        let params = compute_params(3, 2000, 2, Scaling::Scaled { scale: 0.5, pstar_mult: 3e-8 }).unwrap();
        let a = sample_model(&params, 9, &SampleCaps::default()).unwrap();
        let b = sample_model(&params, 9, &SampleCaps::default()).unwrap();
        assert_eq!(a.graph(), b.graph());
        let counts = a.stratum_counts();
        let total: usize = counts.iter().map(|(_, c)| c).sum();
        assert_eq!(total, a.edge_count());
        for (i, (_, c)) in counts.iter().enumerate() {
            assert_eq!(*c * 3, sample_stratum(&params, 9, i).unwrap().len());
        }
        let expected = expected_edges(&params).expected;
        assert!((a.edge_count() as f64 - expected).abs() < 0.2 * expected);
    }

    #[test]
    fn caps_name_the_stratum() {
        let params = compute_params(3, 2000, 2, Scaling::Scaled { scale: 2.0, pstar_mult: 1.0 }).unwrap();
        let caps = SampleCaps {
            max_edges: 10.0,
            max_vertices: 1 << 30,
        };
        let err = sample_model(&params, 1, &caps).unwrap_err();
        assert!(matches!(err, Error::ResourceCap(ref m) if m.contains("stratum [")), "{err}");
        let caps = SampleCaps {
            max_edges: 1e12,
            max_vertices: 10,
        };
        assert!(matches!(sample_model(&params, 1, &caps), Err(Error::ResourceCap(_))));
    }
}

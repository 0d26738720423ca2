//! Random `D`-degenerate `r`-graphs built vertex by vertex.
//!
//! Vertex `i` (for `i >= r-1`) receives a number of back-edges, each an
//! `(r-1)`-subset of `{0, ..., i-1}` completed by `i`. The identity order is
//! therefore a degeneracy ordering of every output.

use rand::seq::{index, IndexedRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, Vertex};

const REDRAWS: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    /// Back-degrees uniform in `min_back..=D`, endpoints uniform.
    Uniform,
    /// Back-degrees uniform in `max(1, min_back)..=D`, endpoints restricted
    /// to vertices of current degree at most `rD`.
    Capped,
    /// Like `Uniform`, with endpoints weighted by `(degree + 1)^alpha`.
    Skew { alpha: f64 },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Uniform => "uniform",
            Family::Capped => "capped",
            Family::Skew { .. } => "skew",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GenSpec {
    pub r: usize,
    pub n: usize,
    pub d: usize,
    pub family: Family,
    pub seed: u64,
    /// Least back-degree of vertices `r-1, ..., n-1`.
    pub min_back: usize,
}

impl GenSpec {
    pub fn new(r: usize, n: usize, d: usize, family: Family, seed: u64) -> Self {
        GenSpec {
            r,
            n,
            d,
            family,
            seed,
            min_back: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        let min_d = if self.family == Family::Capped { 1 } else { 2 };
        if self.r < 2 || self.d < min_d {
            return Err(Error::InvalidParams(format!(
                "{} family needs r >= 2 and D >= {min_d}, got r = {}, D = {}",
                self.family.name(),
                self.r,
                self.d
            )));
        }
        if self.n < self.r {
            return Err(Error::InvalidParams(format!("need n >= r, got n = {}, r = {}", self.n, self.r)));
        }
        if self.min_back > self.d {
            return Err(Error::InvalidParams(format!(
                "minimum back-degree {} exceeds D = {}",
                self.min_back, self.d
            )));
        }
        if let Family::Skew { alpha } = self.family {
            if !(alpha.is_finite() && alpha >= 0.0) {
                return Err(Error::InvalidParams(format!("skew exponent must be nonnegative, got {alpha}")));
            }
        }
        Ok(())
    }
}

pub fn generate(spec: &GenSpec) -> Result<Hypergraph> {
    match spec.family {
        Family::Uniform => gen_uniform(spec),
        Family::Capped => gen_capped(spec),
        Family::Skew { .. } => gen_skew(spec),
    }
}

fn family_mismatch(spec: &GenSpec, wanted: &str) -> Error {
    Error::InvalidParams(format!("expected the {wanted} family, got {}", spec.family.name()))
}

/// Draws up to `count` distinct back-edges for vertex `i`, each from
/// `draw`, redrawing duplicates at most `REDRAWS` times in total.
fn distinct_back_edges(
    count: usize,
    mut draw: impl FnMut(&[Vec<Vertex>]) -> Result<Vec<Vertex>>,
) -> Result<Vec<Vec<Vertex>>> {
    let mut chosen: Vec<Vec<Vertex>> = Vec::with_capacity(count);
    let mut redraws = 0;
    while chosen.len() < count {
        let mut set = draw(&chosen)?;
        set.sort_unstable();
        if chosen.contains(&set) {
            redraws += 1;
            if redraws >= REDRAWS {
                break;
            }
        } else {
            chosen.push(set);
        }
    }
    Ok(chosen)
}

fn count_subsets(i: usize, k: usize) -> u128 {
    let mut acc: u128 = 1;
    for x in 0..k {
        if x >= i {
            return 0;
        }
        acc = acc.saturating_mul((i - x) as u128) / (x + 1) as u128;
    }
    acc
}

fn back_degree(rng: &mut ChaCha8Rng, lo: usize, d: usize, i: usize, r: usize) -> usize {
    let available = count_subsets(i, r - 1);
    let draw = rng.random_range(lo..=d);
    (draw as u128).min(available) as usize
}

fn assemble(spec: &GenSpec, edges: Vec<Vertex>) -> Result<Hypergraph> {
    Hypergraph::from_flat_edges(spec.r, spec.n, edges)
}

fn push_edge(edges: &mut Vec<Vertex>, set: &[Vertex], i: usize) {
    edges.extend_from_slice(set);
    edges.push(i as Vertex);
}

/// Back-degrees uniform in `{min_back, ..., D}`, endpoints uniform over the
/// `(r-1)`-subsets of the prefix.
pub fn gen_uniform(spec: &GenSpec) -> Result<Hypergraph> {
    if spec.family != Family::Uniform {
        return Err(family_mismatch(spec, "uniform"));
    }
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut edges = Vec::new();
    for i in spec.r - 1..spec.n {
        let count = back_degree(&mut rng, spec.min_back, spec.d, i, spec.r);
        let sets = distinct_back_edges(count, |_| {
            Ok(index::sample(&mut rng, i, spec.r - 1).into_iter().map(|x| x as Vertex).collect())
        })?;
        for set in sets {
            push_edge(&mut edges, &set, i);
        }
    }
    assemble(spec, edges)
}

/// Between 1 and `D` back-edges per vertex, every endpoint having degree at
/// most `rD` when its edge is added. Maximum degree is at most `rD + 1`, and
/// since each vertex attaches to the prefix the result is connected.
pub fn gen_capped(spec: &GenSpec) -> Result<Hypergraph> {
    if spec.family != Family::Capped {
        return Err(family_mismatch(spec, "capped"));
    }
    spec.validate()?;
    let cap = spec.r * spec.d;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut degree = vec![0usize; spec.n];
    let mut edges = Vec::new();
    for i in spec.r - 1..spec.n {
        let count = back_degree(&mut rng, spec.min_back.max(1), spec.d, i, spec.r);
        let mut added: Vec<Vec<Vertex>> = Vec::with_capacity(count);
        let mut redraws = 0;
        while added.len() < count {
            let eligible: Vec<Vertex> = (0..i as Vertex).filter(|&u| degree[u as usize] <= cap).collect();
            if eligible.len() < spec.r - 1 {
                if added.is_empty() {
                    return Err(Error::Internal(format!(
                        "vertex {i}: only {} vertices of degree at most {cap}",
                        eligible.len()
                    )));
                }
                break;
            }
            let mut set: Vec<Vertex> = index::sample(&mut rng, eligible.len(), spec.r - 1)
                .into_iter()
                .map(|x| eligible[x])
                .collect();
            set.sort_unstable();
            if added.contains(&set) {
                redraws += 1;
                if redraws >= REDRAWS {
                    break;
                }
                continue;
            }
            for &u in &set {
                degree[u as usize] += 1;
            }
            degree[i] += 1;
            push_edge(&mut edges, &set, i);
            added.push(set);
        }
    }
    assemble(spec, edges)
}

/// Like [`gen_uniform`], but each back-edge draws its endpoints without
/// replacement with weights `(degree + 1)^alpha`, degrees updated edge by edge.
pub fn gen_skew(spec: &GenSpec) -> Result<Hypergraph> {
    let Family::Skew { alpha } = spec.family else {
        return Err(family_mismatch(spec, "skew"));
    };
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut degree = vec![0usize; spec.n];
    let mut edges = Vec::new();
    for i in spec.r - 1..spec.n {
        let count = back_degree(&mut rng, spec.min_back, spec.d, i, spec.r);
        let prefix: Vec<Vertex> = (0..i as Vertex).collect();
        let mut added: Vec<Vec<Vertex>> = Vec::with_capacity(count);
        let mut redraws = 0;
        while added.len() < count {
            let mut set: Vec<Vertex> = prefix
                .choose_multiple_weighted(&mut rng, spec.r - 1, |&u| ((degree[u as usize] + 1) as f64).powf(alpha))
                .map_err(|e| Error::Internal(format!("weighted draw failed: {e}")))?
                .copied()
                .collect();
            set.sort_unstable();
            if added.contains(&set) {
                redraws += 1;
                if redraws >= REDRAWS {
                    break;
                }
                continue;
            }
            for &u in &set {
                degree[u as usize] += 1;
            }
            degree[i] += 1;
            push_edge(&mut edges, &set, i);
            added.push(set);
        }
    }
    assemble(spec, edges)
}

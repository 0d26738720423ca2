//! Exhaustive enumeration of labeled `D`-degenerate `r`-graphs for which
//! `0, 1, ..., n-1` is a degeneracy ordering.
//!
//! Vertex `i` chooses its back-link: a set of at most `D` of the
//! `(r-1)`-subsets of `{0, ..., i-1}`. Every combination of choices is a
//! distinct graph, since each edge is recovered from its largest vertex.

use rayon::prelude::*;
use serde::Serialize;

use super::backtrack::{backtrack_embed, BacktrackOutcome};
use crate::error::{Error, Result};
use crate::hypergraph::{next_combination, Hypergraph, LinkSet, Vertex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ClassSpec {
    pub r: usize,
    pub n: usize,
    pub d: usize,
    /// Require at least one back-edge at every vertex that can have one, and
    /// keep only connected graphs.
    pub connected_only: bool,
    /// Keep only graphs whose maximum degree is at most this.
    pub degree_cap: Option<usize>,
}

fn binomial_u128(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k.min(n - k) {
        acc = acc.saturating_mul((n - i) as u128) / (i + 1) as u128;
    }
    acc
}

fn min_back_degree(spec: &ClassSpec, i: usize) -> usize {
    usize::from(spec.connected_only && i + 1 >= spec.r)
}

/// Number of choice combinations the enumeration walks through, before the
/// connectivity and degree filters.
pub fn class_size(spec: &ClassSpec) -> u128 {
    (0..spec.n)
        .map(|i| {
            let sets = binomial_u128(i, spec.r - 1);
            (min_back_degree(spec, i)..=spec.d)
                .map(|s| binomial_u128(sets as usize, s))
                .fold(0u128, u128::saturating_add)
        })
        .fold(1u128, u128::saturating_mul)
}

fn subsets_of_prefix(i: usize, size: usize) -> Vec<LinkSet> {
    if size > i {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut comb: Vec<Vertex> = (0..size as Vertex).collect();
    loop {
        out.push(comb.clone());
        if size == 0 || !next_combination(&mut comb, i) {
            return out;
        }
    }
}

fn back_link_choices(spec: &ClassSpec, i: usize) -> Vec<Vec<LinkSet>> {
    let sets = if i + 1 >= spec.r { subsets_of_prefix(i, spec.r - 1) } else { Vec::new() };
    let mut out = Vec::new();
    for s in min_back_degree(spec, i)..=spec.d.min(sets.len()) {
        if s == 0 {
            out.push(Vec::new());
            continue;
        }
        let mut pick: Vec<Vertex> = (0..s as Vertex).collect();
        loop {
            out.push(pick.iter().map(|&x| sets[x as usize].clone()).collect());
            if !next_combination(&mut pick, sets.len()) {
                break;
            }
        }
    }
    out
}

fn validate(spec: &ClassSpec, cap: u128) -> Result<()> {
    if spec.r < 2 {
        return Err(Error::InvalidParams(format!("need r >= 2, got {}", spec.r)));
    }
    if spec.n > Vertex::MAX as usize {
        return Err(Error::InvalidParams(format!("{} vertices exceed the vertex id range", spec.n)));
    }
    let size = class_size(spec);
    if size > cap {
        return Err(Error::ResourceCap(format!(
            "enumerating r = {}, n = {}, D = {} walks {size} states, cap is {cap}",
            spec.r, spec.n, spec.d
        )));
    }
    Ok(())
}

/// Calls `visit` on every graph of the class in enumeration order and returns
/// how many were visited.
pub fn for_each_in_class(spec: &ClassSpec, cap: u128, mut visit: impl FnMut(Hypergraph)) -> Result<usize> {
    validate(spec, cap)?;
    let choices: Vec<Vec<Vec<LinkSet>>> = (0..spec.n).map(|i| back_link_choices(spec, i)).collect();
    if choices.iter().any(Vec::is_empty) {
        return Ok(0);
    }
    let mut digits = vec![0usize; spec.n];
    let mut visited = 0;
    loop {
        let mut flat = Vec::new();
        for (i, &c) in digits.iter().enumerate() {
            for b in &choices[i][c] {
                flat.extend_from_slice(b);
                flat.push(i as Vertex);
            }
        }
        let graph = Hypergraph::from_flat_edges(spec.r, spec.n, flat)?;
        let keep = spec.degree_cap.is_none_or(|cap| graph.max_degree() <= cap)
            && (!spec.connected_only || graph.is_connected());
        if keep {
            visited += 1;
            visit(graph);
        }
        // advance the last vertex fastest
        let mut i = spec.n;
        loop {
            if i == 0 {
                return Ok(visited);
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < choices[i].len() {
                break;
            }
            digits[i] = 0;
        }
    }
}

pub fn enumerate_class(spec: &ClassSpec, cap: u128) -> Result<Vec<Hypergraph>> {
    let mut out = Vec::new();
    for_each_in_class(spec, cap, |g| out.push(g))?;
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Universality {
    /// Every one of `guests` graphs embeds.
    Universal { guests: usize },
    /// The first guest, by enumeration index, with no embedding.
    Counterexample { index: usize, guest: Hypergraph },
    /// The first guest whose search ran out of budget.
    Undecided { index: usize, guest: Hypergraph },
}

/// Tries every graph of the class against `host` and reports the first
/// guest, by enumeration index, that does not embed or could not be decided.
pub fn universality_check(host: &Hypergraph, spec: &ClassSpec, node_budget: u64, cap: u128) -> Result<Universality> {
    if host.r() != spec.r {
        return Err(Error::Precondition(format!(
            "host is {}-uniform, class is {}-uniform",
            host.r(),
            spec.r
        )));
    }
    let guests = enumerate_class(spec, cap)?;
    let outcomes: Vec<BacktrackOutcome> = guests
        .par_iter()
        .map(|g| backtrack_embed(g, host, node_budget))
        .collect::<Result<_>>()?;
    for (index, (outcome, guest)) in outcomes.into_iter().zip(&guests).enumerate() {
        match outcome {
            BacktrackOutcome::Found { .. } => {}
            BacktrackOutcome::NotFound => {
                return Ok(Universality::Counterexample {
                    index,
                    guest: guest.clone(),
                })
            }
            BacktrackOutcome::BudgetExhausted { .. } => {
                return Ok(Universality::Undecided {
                    index,
                    guest: guest.clone(),
                })
            }
        }
    }
    Ok(Universality::Universal { guests: guests.len() })
}

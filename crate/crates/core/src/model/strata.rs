//! Strata of the block model: all `r`-sets sharing one intersection pattern.
//!
//! A pattern `π` has one entry per block, `π_k = |s ∩ W_k|`, summing to `r`.
//! Strata are listed in lexicographic order of their sorted block tuples,
//! and a stratum's position in that list is its index everywhere else
//! (seed derivation, reports).

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use super::params::{log2, ModelParams};
use crate::error::{Error, Result};

pub type Pattern = Vec<usize>;

/// Every intersection pattern of an `r`-set over the `N` blocks.
pub fn strata(params: &ModelParams) -> Vec<Pattern> {
    let (levels, r) = (params.levels(), params.r());
    let mut out = Vec::new();
    let mut tuple = vec![0usize; r];
    loop {
        let mut pattern = vec![0usize; levels];
        for &b in &tuple {
            pattern[b] += 1;
        }
        out.push(pattern);
        // next nondecreasing tuple
        let Some(i) = (0..r).rev().find(|&i| tuple[i] + 1 < levels) else {
            break;
        };
        let next = tuple[i] + 1;
        for slot in &mut tuple[i..] {
            *slot = next;
        }
    }
    out
}

/// The pattern of an ascending vertex set, given each vertex's block (1-based).
pub fn pattern_of(params: &ModelParams, blocks: impl IntoIterator<Item = usize>) -> Pattern {
    let mut pattern = vec![0usize; params.levels()];
    for k in blocks {
        pattern[k - 1] += 1;
    }
    pattern
}

pub(crate) fn validate_pattern(params: &ModelParams, pattern: &[usize]) -> Result<()> {
    let malformed = |reason: String| Error::MalformedPattern {
        pattern: pattern.to_vec(),
        reason,
    };
    if pattern.len() != params.levels() {
        return Err(malformed(format!("expected {} entries", params.levels())));
    }
    let total: usize = pattern.iter().sum();
    if total != params.r() {
        return Err(malformed(format!("entries sum to {total}, expected r = {}", params.r())));
    }
    for (i, &pi) in pattern.iter().enumerate() {
        if pi > params.block_size(i + 1) {
            return Err(malformed(format!(
                "block {} has only {} vertices",
                i + 1,
                params.block_size(i + 1)
            )));
        }
    }
    Ok(())
}

/// `min{1, p* · Π Δ_i^{π_i}}`.
pub fn edge_probability(params: &ModelParams, pattern: &[usize]) -> Result<f64> {
    validate_pattern(params, pattern)?;
    Ok(probability_unchecked(params, pattern))
}

pub(crate) fn probability_unchecked(params: &ModelParams, pattern: &[usize]) -> f64 {
    let mut p = params.pstar();
    for (i, &pi) in pattern.iter().enumerate() {
        p *= params.delta(i + 1).powi(pi as i32);
    }
    p.min(1.0)
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::ZERO;
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Number of `r`-sets with the given pattern: `Π_k C(|W_k|, π_k)`.
pub fn stratum_cardinality(params: &ModelParams, pattern: &[usize]) -> Result<BigUint> {
    validate_pattern(params, pattern)?;
    Ok(pattern
        .iter()
        .enumerate()
        .map(|(i, &pi)| binomial(params.block_size(i + 1), pi))
        .product())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExpectedEdges {
    /// `Σ_strata p·M`.
    pub expected: f64,
    /// `2·(20·3^D·r)^r (log log n)^(2r+1) (log n)^(2/D) n^(r-1/D)`.
    pub closed_form_bound: f64,
}

impl ExpectedEdges {
    pub fn bound_ratio(&self) -> f64 {
        self.expected / self.closed_form_bound
    }
}

pub fn expected_edges(params: &ModelParams) -> ExpectedEdges {
    let expected = strata(params)
        .iter()
        .map(|pattern| {
            let p = probability_unchecked(params, pattern);
            if p == 0.0 {
                return 0.0;
            }
            let m = stratum_cardinality(params, pattern).expect("strata are well formed");
            p * m.to_f64().unwrap_or(f64::INFINITY)
        })
        .sum();
    ExpectedEdges {
        expected,
        closed_form_bound: closed_form_edge_bound(params.r(), params.n(), params.d()),
    }
}

pub fn closed_form_edge_bound(r: usize, n: usize, d: usize) -> f64 {
    let (r_f, d_f, n_f) = (r as f64, d as f64, n as f64);
    let logn = log2(n_f);
    let loglogn = log2(logn);
    2.0 * (20.0 * 3f64.powi(d as i32) * r_f).powi(r as i32)
        * loglogn.powi(2 * r as i32 + 1)
        * logn.powf(2.0 / d_f)
        * n_f.powf(r_f - 1.0 / d_f)
}

/// Edge count below which no host can contain every connected
/// `D`-degenerate `r`-graph of maximum degree `rD+1`: `n^(r-1/D) / (100 r² D)`.
pub fn lower_bound_value(r: usize, n: usize, d: usize) -> f64 {
    let (r_f, d_f) = (r as f64, d as f64);
    (n as f64).powf(r_f - 1.0 / d_f) / (100.0 * r_f * r_f * d_f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::params::{compute_params, Scaling};

    fn two_block(sizes: [usize; 2], pstar: f64) -> ModelParams {
        ModelParams::from_layout(2, 10, 2, vec![20.0, 4.0, 2.0], vec![vec![sizes[0]], vec![sizes[1]]], pstar)
            .unwrap()
    }

    #[test]
    fn strata_enumeration() {
        let p = compute_params(3, 2000, 2, Scaling::Scaled { scale: 1.0, pstar_mult: 1.0 }).unwrap();
        assert_eq!(strata(&p), vec![vec![3, 0], vec![2, 1], vec![1, 2], vec![0, 3]]);
        let p = compute_params(2, 65536, 2, Scaling::PaperExact).unwrap();
        // C(N + r - 1, r) = C(4, 2)
        assert_eq!(strata(&p).len(), 6);
    }

    #[test]
    fn cardinality_examples() {
        let p = two_block([4, 5], 0.1);
        assert_eq!(stratum_cardinality(&p, &[1, 1]).unwrap(), BigUint::from(20u32));
        assert_eq!(stratum_cardinality(&p, &[2, 0]).unwrap(), BigUint::from(6u32));
        assert!(matches!(stratum_cardinality(&p, &[0, 0]), Err(Error::MalformedPattern { .. })));
        assert!(matches!(stratum_cardinality(&p, &[1, 1, 0]), Err(Error::MalformedPattern { .. })));
    }

    #[test]
    fn probability_examples() {
        let p = two_block([4, 5], 0.1);
        assert!((edge_probability(&p, &[0, 2]).unwrap() - 0.4).abs() < 1e-12);
        assert_eq!(edge_probability(&p, &[2, 0]).unwrap(), 1.0);
        let sure = two_block([4, 5], 1.0);
        for pattern in strata(&sure) {
            assert_eq!(edge_probability(&sure, &pattern).unwrap(), 1.0);
        }
        assert!(edge_probability(&p, &[3, 0]).is_err());
    }

    #[test]
    fn paper_exact_first_block_is_complete() {
        for (r, n, d) in [(2, 1 << 16, 2), (3, 1 << 20, 2), (2, 1 << 40, 2), (3, 1 << 30, 3)] {
            let p = compute_params(r, n, d, Scaling::PaperExact).unwrap();
            let mut pattern = vec![0; p.levels()];
            pattern[0] = r;
            assert_eq!(edge_probability(&p, &pattern).unwrap(), 1.0);
        }
        let p = compute_params(2, 1 << 40, 2, Scaling::PaperExact).unwrap();
        assert_eq!(edge_probability(&p, &[0, 2, 0, 0]).unwrap(), 1.0);
    }

    #[test]
    fn zero_multiplier_means_no_edges() {
        let p = compute_params(3, 2000, 2, Scaling::Scaled { scale: 1.0, pstar_mult: 0.0 }).unwrap();
        assert_eq!(expected_edges(&p).expected, 0.0);
    }

    #[test]
    fn first_block_edges_exceed_n_to_the_r_minus_r_over_d() {
        for (r, n, d) in [(2, 1 << 16, 2), (3, 1 << 20, 3), (2, 1 << 30, 4)] {
            let p = compute_params(r, n, d, Scaling::PaperExact).unwrap();
            let w1 = binomial(p.block_size(1), r).to_f64().unwrap();
            let rf = r as f64;
            assert!(w1 > (n as f64).powf(rf - rf / d as f64));
        }
    }

    #[test]
    fn lower_bound_examples() {
        assert!((lower_bound_value(2, 100, 1) - 0.25).abs() < 1e-12);
        assert!((lower_bound_value(2, 1, 2) - 1.0 / 800.0).abs() < 1e-15);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigUint::from(10u32));
        assert_eq!(binomial(5, 0), BigUint::one());
        assert_eq!(binomial(3, 4), BigUint::ZERO);
        assert_eq!(binomial(60, 30).to_string(), "118264581564861424");
    }
}

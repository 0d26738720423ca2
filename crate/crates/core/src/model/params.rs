use serde::Serialize;

use crate::error::{Error, Result};

/// How block sizes and the base edge probability are scaled.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum Scaling {
    /// Block sizes `100·3^D·r·n/Δ_k` and the unscaled `p*`.
    PaperExact,
    /// `scale` replaces the factor `100·3^D`; `pstar_mult` multiplies `p*`.
    Scaled { scale: f64, pstar_mult: f64 },
    /// Layout supplied directly through [`ModelParams::from_layout`].
    Custom,
}

impl Scaling {
    pub fn name(&self) -> &'static str {
        match self {
            Scaling::PaperExact => "paper-exact",
            Scaling::Scaled { .. } => "scaled",
            Scaling::Custom => "custom",
        }
    }
}

/// All derived quantities of the random block model.
///
/// Blocks and sub-blocks are numbered from 1, matching `Δ_k` where `Δ_0 = D·n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModelParams {
    r: usize,
    n: usize,
    d: usize,
    scaling: Scaling,
    scale: f64,
    pstar_mult: f64,
    levels: usize,
    delta: Vec<f64>,
    block_sizes: Vec<usize>,
    subblock_sizes: Vec<Vec<usize>>,
    pstar: f64,
}

/// `log2(n)`, the base of every logarithm in the model.
pub fn log2(x: f64) -> f64 {
    x.log2()
}

/// Number of block levels: the least `N >= 1` with `n^(D^(1-N)) <= 3^(D^2)`,
/// evaluated exactly as `n <= 3^(D^(N+1))`.
pub fn level_count(n: usize, d: usize) -> usize {
    let mut levels = 1usize;
    loop {
        if pow3_at_least(n, d, levels + 1) {
            return levels;
        }
        levels += 1;
    }
}

/// Whether `3^(d^e) >= n`.
fn pow3_at_least(n: usize, d: usize, e: usize) -> bool {
    let Some(exp) = (d as u128).checked_pow(e as u32) else {
        return true;
    };
    if exp >= 41 {
        // 3^41 > 2^64 > n
        return true;
    }
    3u128.pow(exp as u32) >= n as u128
}

/// `n^(1/e)`, snapped to the exact integer root when one exists.
fn root(n: usize, e: u128) -> f64 {
    let approx = (n as f64).powf(1.0 / e as f64);
    let guess = approx.round() as u128;
    for m in guess.saturating_sub(1)..=guess + 1 {
        if m >= 1 && exact_power_is(m, e, n as u128) {
            return m as f64;
        }
    }
    approx
}

fn exact_power_is(base: u128, e: u128, target: u128) -> bool {
    let mut acc: u128 = 1;
    for _ in 0..e {
        acc = match acc.checked_mul(base) {
            Some(v) if v <= target => v,
            _ => return false,
        };
        if base == 1 {
            break;
        }
    }
    acc == target
}

/// Rounds up, treating values within a relative 1e-12 of an integer as that
/// integer so that exact quotients are not pushed up by rounding noise.
pub(crate) fn ceil_snap(x: f64) -> usize {
    let nearest = x.round();
    if (x - nearest).abs() <= 1e-12 * nearest.abs().max(1.0) {
        nearest as usize
    } else {
        x.ceil() as usize
    }
}

/// Splits a block of `size` vertices into `parts` sub-blocks: the first gets
/// `ceil(size/2)`, the rest share the remainder evenly with larger shares first.
pub fn split_block(size: usize, parts: usize) -> Vec<usize> {
    assert!(parts >= 1);
    let first = size.div_ceil(2);
    if parts == 1 {
        return vec![size];
    }
    let rest = size - first;
    let base = rest / (parts - 1);
    let extra = rest % (parts - 1);
    let mut out = Vec::with_capacity(parts);
    out.push(first);
    out.extend((0..parts - 1).map(|i| base + usize::from(i < extra)));
    out
}

/// Base probability before the `pstar_mult` knob:
/// `2^(r-1) (2(r-1)D)^(1/D) (log n)^(2/D) (log log n)^(r+1) / Δ_1`.
fn base_pstar(r: usize, n: usize, d: usize, delta1: f64) -> f64 {
    let (r_f, d_f) = (r as f64, d as f64);
    let logn = log2(n as f64);
    let loglogn = log2(logn);
    2f64.powi(r as i32 - 1)
        * (2.0 * (r_f - 1.0) * d_f).powf(1.0 / d_f)
        * logn.powf(2.0 / d_f)
        * loglogn.powi(r as i32 + 1)
        / delta1
}

pub fn compute_params(r: usize, n: usize, d: usize, scaling: Scaling) -> Result<ModelParams> {
    if r < 2 || d < 2 {
        return Err(Error::InvalidParams(format!("need r >= 2 and D >= 2, got r = {r}, D = {d}")));
    }
    if n < 2 {
        return Err(Error::InvalidParams(format!("need n >= 2, got {n}")));
    }
    let (scale, pstar_mult) = match scaling {
        Scaling::PaperExact => (100.0 * 3f64.powi(d as i32), 1.0),
        Scaling::Scaled { scale, pstar_mult } => {
            if !(scale.is_finite() && scale > 0.0) {
                return Err(Error::InvalidParams(format!("scale must be positive, got {scale}")));
            }
            if !(pstar_mult.is_finite() && pstar_mult >= 0.0) {
                return Err(Error::InvalidParams(format!(
                    "pstar multiplier must be nonnegative, got {pstar_mult}"
                )));
            }
            (scale, pstar_mult)
        }
        Scaling::Custom => {
            return Err(Error::InvalidParams("custom layouts are built with ModelParams::from_layout".into()))
        }
    };

    let levels = level_count(n, d);
    if levels < 2 {
        let cutoff = 3u128.pow((d * d) as u32);
        return Err(Error::InvalidParams(format!(
            "n = {n} is too small for D = {d}: the model needs at least two levels, \
             which requires n > 3^(D^2) = {cutoff}"
        )));
    }

    let mut delta = Vec::with_capacity(levels + 1);
    delta.push((d * n) as f64);
    for k in 1..=levels {
        let e = (d as u128).pow(k as u32);
        delta.push(root(n, e));
    }

    let block_sizes: Vec<usize> = (1..=levels)
        .map(|k| ceil_snap(scale * r as f64 * n as f64 / delta[k]))
        .collect();
    let parts = log2(n as f64).ceil() as usize;
    let subblock_sizes = block_sizes.iter().map(|&w| split_block(w, parts.max(1))).collect();
    let pstar = pstar_mult * base_pstar(r, n, d, delta[1]);

    Ok(ModelParams {
        r,
        n,
        d,
        scaling,
        scale,
        pstar_mult,
        levels,
        delta,
        block_sizes,
        subblock_sizes,
        pstar,
    })
}

impl ModelParams {
    /// A hand-specified layout: `delta` holds `Δ_0..Δ_N`, `subblock_sizes`
    /// one vector per block. Used for small explicit hosts.
    pub fn from_layout(
        r: usize,
        n: usize,
        d: usize,
        delta: Vec<f64>,
        subblock_sizes: Vec<Vec<usize>>,
        pstar: f64,
    ) -> Result<Self> {
        if r < 2 {
            return Err(Error::InvalidParams(format!("need r >= 2, got {r}")));
        }
        let levels = subblock_sizes.len();
        if levels == 0 || delta.len() != levels + 1 {
            return Err(Error::InvalidParams(format!(
                "{levels} blocks need {} delta values, got {}",
                levels + 1,
                delta.len()
            )));
        }
        if delta.iter().any(|&x| !(x.is_finite() && x > 0.0)) {
            return Err(Error::InvalidParams("delta values must be positive".into()));
        }
        if subblock_sizes.iter().any(Vec::is_empty) {
            return Err(Error::InvalidParams("every block needs at least one sub-block".into()));
        }
        if !(pstar.is_finite() && pstar >= 0.0) {
            return Err(Error::InvalidParams(format!("p* must be nonnegative, got {pstar}")));
        }
        let block_sizes = subblock_sizes.iter().map(|s| s.iter().sum()).collect();
        Ok(ModelParams {
            r,
            n,
            d,
            scaling: Scaling::Custom,
            scale: 0.0,
            pstar_mult: 1.0,
            levels,
            delta,
            block_sizes,
            subblock_sizes,
            pstar,
        })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn scaling(&self) -> Scaling {
        self.scaling
    }

    /// The factor replacing `100·3^D` in block sizes.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn pstar_mult(&self) -> f64 {
        self.pstar_mult
    }

    /// `N`, the number of blocks.
    pub fn levels(&self) -> usize {
        self.levels
    }

    /// `Δ_0..Δ_N`.
    pub fn deltas(&self) -> &[f64] {
        &self.delta
    }

    pub fn delta(&self, k: usize) -> f64 {
        self.delta[k]
    }

    /// `|W_1|..|W_N|`.
    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn block_size(&self, k: usize) -> usize {
        self.block_sizes[k - 1]
    }

    pub fn subblock_sizes(&self, k: usize) -> &[usize] {
        &self.subblock_sizes[k - 1]
    }

    pub fn all_subblock_sizes(&self) -> &[Vec<usize>] {
        &self.subblock_sizes
    }

    pub fn subblock_count(&self, k: usize) -> usize {
        self.subblock_sizes[k - 1].len()
    }

    pub fn pstar(&self) -> f64 {
        self.pstar
    }

    pub fn total_vertices(&self) -> usize {
        self.block_sizes.iter().sum()
    }
}

//! Seeded experiments over sampled hosts and generated guests.
//!
//! Hosts, guest families and guests draw from separate streams of the master
//! seed, so adding hosts or guests leaves the earlier ones unchanged. Trials
//! run in parallel and are reported in trial order.

mod config;

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::embed::{embed, harvest_back_links, Outcome};
use crate::error::{Error, Result};
use crate::generators::{generate, GenSpec};
use crate::hypergraph::degeneracy_ordering;
use crate::model::{expected_edges, sample_edges, sample_model, BlockGraph, ModelParams};
use crate::oracle::{check_well_behaved, measure_candidate_density, verify_embedding, WbViolation};
use crate::seeds::{derive_seed, Role};

pub use config::{ExperimentConfig, FamilyName, Mode};

pub fn host_seed(master: u64, host: usize) -> u64 {
    derive_seed(master, Role::Host, host as u64)
}

pub fn guest_seed(master: u64, family: FamilyName, trial: usize) -> u64 {
    derive_seed(derive_seed(master, Role::GuestFamily, family as u64), Role::Guest, trial as u64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HostSummary {
    pub host: usize,
    pub vertices: usize,
    pub edges: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialResult {
    pub host: usize,
    pub family: FamilyName,
    pub guest: usize,
    pub guest_edges: usize,
    pub outcome: Outcome,
    pub placed: usize,
    #[serde(skip)]
    pub occupancy: Vec<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyTally {
    pub family: FamilyName,
    pub trials: usize,
    pub successes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuccessRateReport {
    pub config: ExperimentConfig,
    pub trials: usize,
    pub successes: usize,
    /// `None` when no trial ran.
    pub success_fraction: Option<f64>,
    pub families: Vec<FamilyTally>,
    pub hosts: Vec<HostSummary>,
    /// Failed trials only.
    pub failures: Vec<TrialResult>,
    /// Largest occupancy of each sub-block over all trials, `[k-1][j-1]`.
    pub peak_occupancy: Vec<Vec<usize>>,
    pub thresholds: Vec<Vec<f64>>,
}

impl SuccessRateReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

fn trial_plan(cfg: &ExperimentConfig, host: usize) -> Vec<(FamilyName, usize)> {
    cfg.families
        .iter()
        .flat_map(|&f| (0..cfg.guests).map(move |i| (f, host * cfg.guests + i)))
        .collect()
}

/// Generates guest `index` of `family`, embeds it greedily and verifies any
/// success independently.
pub fn run_trial(
    cfg: &ExperimentConfig,
    host: &BlockGraph,
    host_index: usize,
    family: FamilyName,
    index: usize,
    master: u64,
) -> Result<TrialResult> {
    let spec = GenSpec::new(
        cfg.r,
        cfg.guest_vertices(),
        cfg.d,
        cfg.family(family),
        guest_seed(master, family, index),
    );
    let guest = generate(&spec)?;
    let (ordering, _) = degeneracy_ordering(&guest);
    let report = embed(&guest, &ordering, host)?;
    if let Some(map) = report.full_map() {
        if let Err(v) = verify_embedding(&guest, host.graph(), &map) {
            return Err(Error::Internal(format!(
                "greedy embedding of {} guest {index} failed verification: {v:?}",
                family.as_str()
            )));
        }
    }
    Ok(TrialResult {
        host: host_index,
        family,
        guest: index,
        guest_edges: guest.edge_count(),
        placed: report.placed(),
        outcome: report.outcome,
        occupancy: report.occupancy,
    })
}

fn success_rate_with(cfg: &ExperimentConfig, params: &ModelParams, master: u64) -> Result<SuccessRateReport> {
    let mut hosts = Vec::new();
    let mut results = Vec::new();
    if cfg.guests > 0 {
        for h in 0..cfg.hosts {
            let host = sample_model(params, host_seed(master, h), &cfg.caps())?;
            hosts.push(HostSummary {
                host: h,
                vertices: host.vertex_count(),
                edges: host.edge_count(),
            });
            let batch: Vec<TrialResult> = trial_plan(cfg, h)
                .into_par_iter()
                .map(|(family, index)| run_trial(cfg, &host, h, family, index, master))
                .collect::<Result<_>>()?;
            results.extend(batch);
        }
    }
    let mut peak: Vec<Vec<usize>> = params.all_subblock_sizes().iter().map(|s| vec![0; s.len()]).collect();
    for r in &results {
        for (row, occ) in peak.iter_mut().zip(&r.occupancy) {
            for (p, &o) in row.iter_mut().zip(occ) {
                *p = (*p).max(o);
            }
        }
    }
    let families = cfg
        .families
        .iter()
        .map(|&family| {
            let mine: Vec<&TrialResult> = results.iter().filter(|r| r.family == family).collect();
            FamilyTally {
                family,
                trials: mine.len(),
                successes: mine.iter().filter(|r| r.outcome == Outcome::Success).count(),
            }
        })
        .collect();
    let successes = results.iter().filter(|r| r.outcome == Outcome::Success).count();
    Ok(SuccessRateReport {
        config: cfg.clone(),
        trials: results.len(),
        successes,
        success_fraction: (!results.is_empty()).then(|| successes as f64 / results.len() as f64),
        families,
        hosts,
        failures: results.into_iter().filter(|r| r.outcome != Outcome::Success).collect(),
        peak_occupancy: peak,
        thresholds: crate::embed::fill_thresholds(params),
    })
}

/// Embeds `guests` guests of every family into each of `hosts` hosts.
pub fn success_rate(cfg: &ExperimentConfig) -> Result<SuccessRateReport> {
    let params = cfg.validate()?;
    success_rate_with(cfg, &params, cfg.seed)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EdgesReport {
    pub config: ExperimentConfig,
    pub edge_counts: Vec<usize>,
    pub mean: Option<f64>,
    pub expected: f64,
    pub closed_form_bound: f64,
    /// `expected / closed_form_bound`.
    pub bound_ratio: f64,
    /// `(mean - expected) / expected`.
    pub relative_error: Option<f64>,
}

impl EdgesReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// Samples `samples` hosts and compares their edge counts with the exact
/// expectation and the closed-form bound.
pub fn edges(cfg: &ExperimentConfig) -> Result<EdgesReport> {
    let params = cfg.validate()?;
    let analytic = expected_edges(&params);
    let mut edge_counts = Vec::with_capacity(cfg.samples);
    for s in 0..cfg.samples {
        edge_counts.push(sample_edges(&params, host_seed(cfg.seed, s), &cfg.caps())?.edge_count());
    }
    let mean = (!edge_counts.is_empty()).then(|| edge_counts.iter().sum::<usize>() as f64 / edge_counts.len() as f64);
    Ok(EdgesReport {
        config: cfg.clone(),
        mean,
        expected: analytic.expected,
        closed_form_bound: analytic.closed_form_bound,
        bound_ratio: analytic.bound_ratio(),
        relative_error: mean.map(|m| (m - analytic.expected) / analytic.expected),
        edge_counts,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lemma45Row {
    pub host: usize,
    pub family: FamilyName,
    pub guest: usize,
    /// Sub-block whose embedded back-links form the multiset.
    pub source: (usize, usize),
    pub k: usize,
    pub j: usize,
    pub t: usize,
    pub observed: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lemma45Report {
    pub config: ExperimentConfig,
    pub rows: Vec<Lemma45Row>,
    /// Harvested multisets left out because they cover more than half of
    /// some sub-block.
    pub skipped: Vec<(usize, FamilyName, usize, (usize, usize))>,
}

impl Lemma45Report {
    /// Tab-separated table preceded by the resolved configuration as comments.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        for line in self.config.to_text().lines() {
            let _ = writeln!(out, "# {line}");
        }
        for (h, f, g, (k, j)) in &self.skipped {
            let _ = writeln!(out, "# skipped host {h} {} guest {g} source ({k},{j}): not well-behaved", f.as_str());
        }
        out.push_str("host\tfamily\tguest\tsource_k\tsource_j\tk\tj\tt\tobserved\tbound\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.host,
                r.family.as_str(),
                r.guest,
                r.source.0,
                r.source.1,
                r.k,
                r.j,
                r.t,
                r.observed,
                r.bound
            );
        }
        out
    }
}

type Harvest = (Vec<Lemma45Row>, Vec<(usize, FamilyName, usize, (usize, usize))>);

fn lemma45_trial(cfg: &ExperimentConfig, host: &BlockGraph, h: usize, family: FamilyName, index: usize) -> Result<Harvest> {
    let spec = GenSpec::new(
        cfg.r,
        cfg.guest_vertices(),
        cfg.d,
        cfg.family(family),
        guest_seed(cfg.seed, family, index),
    );
    let guest = generate(&spec)?;
    let (ordering, _) = degeneracy_ordering(&guest);
    let report = embed(&guest, &ordering, host)?;
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for ((sk, sj), ms) in harvest_back_links(&guest, &ordering, &report) {
        match check_well_behaved(host, &ms) {
            Ok(()) => {}
            Err(WbViolation::WB3 { .. }) => {
                skipped.push((h, family, index, (sk, sj)));
                continue;
            }
            Err(v) => {
                return Err(Error::Internal(format!(
                    "embedded back-links of sub-block ({sk},{sj}) violate {v:?}"
                )))
            }
        }
        for j in 1..=host.params().subblock_count(sk) {
            if host.subblock_range(sk, j).is_empty() {
                continue;
            }
            let row = measure_candidate_density(host, &ms, sk, j)?;
            rows.push(Lemma45Row {
                host: h,
                family,
                guest: index,
                source: (sk, sj),
                k: row.k,
                j: row.j,
                t: row.t,
                observed: row.observed,
                bound: row.bound,
            });
        }
    }
    Ok((rows, skipped))
}

/// Harvests the embedded back-links per sub-block from greedy runs and
/// measures the candidate density each multiset induces across its block.
pub fn lemma45(cfg: &ExperimentConfig) -> Result<Lemma45Report> {
    let params = cfg.validate()?;
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    if cfg.guests > 0 {
        for h in 0..cfg.hosts {
            let host = sample_model(&params, host_seed(cfg.seed, h), &cfg.caps())?;
            let batch: Vec<Harvest> = trial_plan(cfg, h)
                .into_par_iter()
                .map(|(family, index)| lemma45_trial(cfg, &host, h, family, index))
                .collect::<Result<_>>()?;
            for (r, s) in batch {
                rows.extend(r);
                skipped.extend(s);
            }
        }
    }
    Ok(Lemma45Report {
        config: cfg.clone(),
        rows,
        skipped,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Probe {
    pub pstar_mult: f64,
    pub trials: usize,
    pub successes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CalibrationReport {
    pub config: ExperimentConfig,
    pub probes: Vec<Probe>,
    /// Smallest probed multiplier reaching the target.
    pub minimal: f64,
    /// Twice `minimal`; the value written to the calibrated configuration.
    pub calibrated: f64,
}

impl CalibrationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// The input configuration with the calibrated multiplier.
    pub fn calibrated_config(&self) -> ExperimentConfig {
        let mut cfg = self.config.clone();
        cfg.pstar_mult = self.calibrated;
        cfg
    }
}

fn probe(cfg: &ExperimentConfig, mult: f64) -> Result<Probe> {
    let mut c = cfg.clone();
    c.pstar_mult = mult;
    c.hosts = 1;
    let families = c.families.len();
    c.guests = cfg.calibrate_trials.div_ceil(families);
    let params = c.validate()?;
    // its own stream, so calibration guests are not reused by later runs
    let master = derive_seed(cfg.seed, Role::Sample, 0);
    let report = success_rate_with(&c, &params, master)?;
    Ok(Probe {
        pstar_mult: mult,
        trials: report.trials,
        successes: report.successes,
    })
}

/// Bisects `pstar_mult` on a log scale between `calibrate_lo` and
/// `calibrate_hi` for the smallest value whose probe reaches
/// `calibrate_target` successes out of `calibrate_trials`, then doubles it.
pub fn calibrate(cfg: &ExperimentConfig) -> Result<CalibrationReport> {
    cfg.validate()?;
    let target = |p: &Probe| p.successes as f64 >= cfg.calibrate_target as f64 * p.trials as f64 / cfg.calibrate_trials as f64;
    let mut probes = Vec::new();
    let top = probe(cfg, cfg.calibrate_hi)?;
    let top_ok = target(&top);
    probes.push(top);
    if !top_ok {
        return Err(Error::Config(format!(
            "pstar_mult = {} does not reach {} of {} successes; raise calibrate_hi",
            cfg.calibrate_hi, cfg.calibrate_target, cfg.calibrate_trials
        )));
    }
    let (mut lo, mut hi) = (cfg.calibrate_lo.ln(), cfg.calibrate_hi.ln());
    for _ in 0..cfg.calibrate_steps {
        let mid = 0.5 * (lo + hi);
        let p = probe(cfg, mid.exp())?;
        if target(&p) {
            hi = mid;
        } else {
            lo = mid;
        }
        probes.push(p);
    }
    let minimal = hi.exp();
    Ok(CalibrationReport {
        config: cfg.clone(),
        probes,
        minimal,
        calibrated: 2.0 * minimal,
    })
}

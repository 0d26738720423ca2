//! Flat `key = value` experiment configuration.
//!
//! Files hold one assignment per line; `#` starts a comment. Unknown keys
//! and malformed values are rejected with the offending line. Overrides
//! given as `key=value` strings are applied after the file, in order.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::generators::Family;
use crate::model::{compute_params, ModelParams, SampleCaps, Scaling};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    PaperExact,
    Scaled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyName {
    Uniform,
    Capped,
    Skew,
}

impl FamilyName {
    pub fn as_str(&self) -> &'static str {
        match self {
            FamilyName::Uniform => "uniform",
            FamilyName::Capped => "capped",
            FamilyName::Skew => "skew",
        }
    }
}

impl FromStr for FamilyName {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "uniform" => Ok(FamilyName::Uniform),
            "capped" => Ok(FamilyName::Capped),
            "skew" => Ok(FamilyName::Skew),
            other => Err(format!("unknown family `{other}` (expected uniform, capped or skew)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub r: usize,
    pub n: usize,
    pub d: usize,
    pub mode: Mode,
    pub scale: f64,
    pub pstar_mult: f64,
    /// Master seed; every random stream is derived from it.
    pub seed: u64,
    /// Hosts sampled by `success-rate` and `lemma45`.
    pub hosts: usize,
    /// Guests per family and host.
    pub guests: usize,
    pub families: Vec<FamilyName>,
    /// Guest vertex count; defaults to `n`.
    pub guest_n: Option<usize>,
    /// Skew family exponent.
    pub alpha: f64,
    /// Hosts sampled by `edges`.
    pub samples: usize,
    pub cap_edges: f64,
    pub cap_vertices: usize,
    /// `calibrate`: guests per probe and successes required.
    pub calibrate_trials: usize,
    pub calibrate_target: usize,
    /// `calibrate`: bracket for the multiplier search and number of bisections.
    pub calibrate_lo: f64,
    pub calibrate_hi: f64,
    pub calibrate_steps: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let caps = SampleCaps::default();
        ExperimentConfig {
            r: 3,
            n: 2000,
            d: 2,
            mode: Mode::Scaled,
            scale: 3.0,
            pstar_mult: 1.0,
            seed: 1,
            hosts: 1,
            guests: 100,
            families: vec![FamilyName::Uniform, FamilyName::Capped],
            guest_n: None,
            alpha: 1.0,
            samples: 20,
            cap_edges: caps.max_edges,
            cap_vertices: caps.max_vertices,
            calibrate_trials: 100,
            calibrate_target: 99,
            calibrate_lo: 1e-9,
            calibrate_hi: 1.0,
            calibrate_steps: 14,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| Error::Config(format!("bad value `{value}` for `{key}`: {e}")))
}

impl ExperimentConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "r" => self.r = parse_value(key, value)?,
            "n" => self.n = parse_value(key, value)?,
            "D" | "d" => self.d = parse_value(key, value)?,
            "mode" => {
                self.mode = match value {
                    "paper-exact" => Mode::PaperExact,
                    "scaled" => Mode::Scaled,
                    _ => return Err(Error::Config(format!("unknown mode `{value}` (paper-exact or scaled)"))),
                }
            }
            "scale" => self.scale = parse_value(key, value)?,
            "pstar_mult" => self.pstar_mult = parse_value(key, value)?,
            "seed" => self.seed = parse_value(key, value)?,
            "hosts" => self.hosts = parse_value(key, value)?,
            "guests" => self.guests = parse_value(key, value)?,
            "families" => {
                self.families = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<FamilyName>().map_err(Error::Config))
                    .collect::<Result<_>>()?
            }
            "guest_n" => {
                self.guest_n = match value {
                    "auto" => None,
                    v => Some(parse_value(key, v)?),
                }
            }
            "alpha" => self.alpha = parse_value(key, value)?,
            "samples" => self.samples = parse_value(key, value)?,
            "cap_edges" => self.cap_edges = parse_value(key, value)?,
            "cap_vertices" => self.cap_vertices = parse_value(key, value)?,
            "calibrate_trials" => self.calibrate_trials = parse_value(key, value)?,
            "calibrate_target" => self.calibrate_target = parse_value(key, value)?,
            "calibrate_lo" => self.calibrate_lo = parse_value(key, value)?,
            "calibrate_hi" => self.calibrate_hi = parse_value(key, value)?,
            "calibrate_steps" => self.calibrate_steps = parse_value(key, value)?,
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Applies the assignments in `text` on top of `self`.
    pub fn merge_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value, found `{line}`", i + 1)))?;
            self.set(key, value)
                .map_err(|e| Error::Config(format!("line {}: {}", i + 1, strip_prefix(&e))))?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.merge_text(text)?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_text(&text)
    }

    /// Applies `key=value` overrides in order.
    pub fn apply_overrides<S: AsRef<str>>(&mut self, overrides: &[S]) -> Result<()> {
        for item in overrides {
            let item = item.as_ref();
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("override `{item}` is not key=value")))?;
            self.set(key, value)?;
        }
        Ok(())
    }

    pub fn scaling(&self) -> Scaling {
        match self.mode {
            Mode::PaperExact => Scaling::PaperExact,
            Mode::Scaled => Scaling::Scaled {
                scale: self.scale,
                pstar_mult: self.pstar_mult,
            },
        }
    }

    pub fn params(&self) -> Result<ModelParams> {
        compute_params(self.r, self.n, self.d, self.scaling())
    }

    pub fn caps(&self) -> SampleCaps {
        SampleCaps {
            max_edges: self.cap_edges,
            max_vertices: self.cap_vertices,
        }
    }

    pub fn guest_vertices(&self) -> usize {
        self.guest_n.unwrap_or(self.n)
    }

    pub fn family(&self, name: FamilyName) -> Family {
        match name {
            FamilyName::Uniform => Family::Uniform,
            FamilyName::Capped => Family::Capped,
            FamilyName::Skew => Family::Skew { alpha: self.alpha },
        }
    }

    /// Checks every field and returns the model parameters.
    pub fn validate(&self) -> Result<ModelParams> {
        let params = self.params().map_err(|e| Error::Config(strip_prefix(&e)))?;
        let gn = self.guest_vertices();
        if gn < self.r {
            return Err(Error::Config(format!("guest_n = {gn} is below r = {}", self.r)));
        }
        if gn > params.total_vertices() {
            return Err(Error::Config(format!(
                "guest_n = {gn} exceeds the host's {} vertices",
                params.total_vertices()
            )));
        }
        if self.families.is_empty() {
            return Err(Error::Config("families must name at least one family".into()));
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(Error::Config(format!("alpha must be nonnegative, got {}", self.alpha)));
        }
        if self.cap_edges.is_nan() || self.cap_edges <= 0.0 {
            return Err(Error::Config(format!("cap_edges must be positive, got {}", self.cap_edges)));
        }
        if self.calibrate_target > self.calibrate_trials {
            return Err(Error::Config(format!(
                "calibrate_target = {} exceeds calibrate_trials = {}",
                self.calibrate_target, self.calibrate_trials
            )));
        }
        if !(self.calibrate_lo > 0.0 && self.calibrate_lo < self.calibrate_hi && self.calibrate_hi.is_finite()) {
            return Err(Error::Config(format!(
                "need 0 < calibrate_lo < calibrate_hi, got {} and {}",
                self.calibrate_lo, self.calibrate_hi
            )));
        }
        Ok(params)
    }

    /// Every key with its resolved value, one assignment per line.
    pub fn to_text(&self) -> String {
        let families: Vec<&str> = self.families.iter().map(FamilyName::as_str).collect();
        let mode = match self.mode {
            Mode::PaperExact => "paper-exact",
            Mode::Scaled => "scaled",
        };
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        put("r", self.r.to_string());
        put("n", self.n.to_string());
        put("D", self.d.to_string());
        put("mode", mode.into());
        put("scale", self.scale.to_string());
        put("pstar_mult", self.pstar_mult.to_string());
        put("seed", self.seed.to_string());
        put("hosts", self.hosts.to_string());
        put("guests", self.guests.to_string());
        put("families", families.join(","));
        put("guest_n", self.guest_vertices().to_string());
        put("alpha", self.alpha.to_string());
        put("samples", self.samples.to_string());
        put("cap_edges", self.cap_edges.to_string());
        put("cap_vertices", self.cap_vertices.to_string());
        put("calibrate_trials", self.calibrate_trials.to_string());
        put("calibrate_target", self.calibrate_target.to_string());
        put("calibrate_lo", self.calibrate_lo.to_string());
        put("calibrate_hi", self.calibrate_hi.to_string());
        put("calibrate_steps", self.calibrate_steps.to_string());
        out
    }
}

fn strip_prefix(e: &Error) -> String {
    match e {
        Error::Config(m) => m.clone(),
        other => other.to_string(),
    }
}

use std::fmt::Write as _;
use std::ops::Range;
use std::path::Path;

use super::params::{compute_params, ModelParams, Scaling};
use super::strata::{pattern_of, Pattern};
use crate::error::{Error, Result};
use crate::hypergraph::format::{parse_with_comments, write_body};
use crate::hypergraph::{Hypergraph, Vertex};
use crate::link_index::LinkIndex;

/// A sampled host: the hypergraph, its block partition and a link index.
///
/// Blocks occupy contiguous vertex ranges in order `W_1, W_2, ...`, and each
/// block is cut into contiguous sub-blocks `W_{k,1}, W_{k,2}, ...`.
#[derive(Clone, Debug)]
pub struct BlockGraph {
    params: ModelParams,
    graph: Hypergraph,
    subblock_starts: Vec<Vec<Vertex>>,
    block_starts: Vec<Vertex>,
    links: LinkIndex,
}

impl BlockGraph {
    pub fn new(params: ModelParams, graph: Hypergraph) -> Result<Self> {
        if graph.r() != params.r() {
            return Err(Error::Precondition(format!(
                "host graph is {}-uniform, parameters say r = {}",
                graph.r(),
                params.r()
            )));
        }
        if graph.n() != params.total_vertices() {
            return Err(Error::Precondition(format!(
                "host graph has {} vertices, the layout has {}",
                graph.n(),
                params.total_vertices()
            )));
        }
        let mut block_starts = Vec::with_capacity(params.levels() + 1);
        let mut subblock_starts = Vec::with_capacity(params.levels());
        let mut next: Vertex = 0;
        for k in 1..=params.levels() {
            block_starts.push(next);
            let mut starts = Vec::with_capacity(params.subblock_count(k) + 1);
            for &size in params.subblock_sizes(k) {
                starts.push(next);
                next += size as Vertex;
            }
            starts.push(next);
            subblock_starts.push(starts);
        }
        block_starts.push(next);
        let links = LinkIndex::build(&graph);
        Ok(BlockGraph {
            params,
            graph,
            subblock_starts,
            block_starts,
            links,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn graph(&self) -> &Hypergraph {
        &self.graph
    }

    pub fn links(&self) -> &LinkIndex {
        &self.links
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.n()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn levels(&self) -> usize {
        self.params.levels()
    }

    pub fn block_range(&self, k: usize) -> Range<Vertex> {
        self.block_starts[k - 1]..self.block_starts[k]
    }

    pub fn subblock_range(&self, k: usize, j: usize) -> Range<Vertex> {
        let starts = &self.subblock_starts[k - 1];
        starts[j - 1]..starts[j]
    }

    /// `(block, sub-block)` of `v`, both 1-based.
    pub fn vertex_block(&self, v: Vertex) -> (usize, usize) {
        assert!((v as usize) < self.vertex_count(), "vertex {v} out of range");
        let k = self.block_starts.partition_point(|&s| s <= v);
        let starts = &self.subblock_starts[k - 1];
        let j = starts.partition_point(|&s| s <= v);
        (k, j)
    }

    pub fn block_of(&self, v: Vertex) -> usize {
        self.block_starts.partition_point(|&s| s <= v)
    }

    /// Intersection pattern of a vertex set.
    pub fn pattern(&self, set: &[Vertex]) -> Pattern {
        pattern_of(&self.params, set.iter().map(|&v| self.block_of(v)))
    }

    /// Edges per stratum pattern, in the order of `strata(params)`.
    pub fn stratum_counts(&self) -> Vec<(Pattern, usize)> {
        let patterns = super::strata::strata(&self.params);
        let mut counts = vec![0usize; patterns.len()];
        for e in self.graph.edges() {
            let pat = self.pattern(e);
            let idx = patterns.iter().position(|p| *p == pat).expect("every edge has a stratum");
            counts[idx] += 1;
        }
        patterns.into_iter().zip(counts).collect()
    }

    /// Serializes to the `.bhg` format: a `.hg` body preceded by
    /// `#model`, `#blocks` and `#subblocks` header comments.
    pub fn to_bhg_string(&self) -> String {
        let p = &self.params;
        let mut out = String::new();
        match p.scaling() {
            Scaling::PaperExact => {
                let _ = writeln!(out, "#model r={} n={} D={} mode=paper-exact", p.r(), p.n(), p.d());
            }
            Scaling::Scaled { scale, pstar_mult } => {
                let _ = writeln!(
                    out,
                    "#model r={} n={} D={} mode=scaled scale={} pstar_mult={}",
                    p.r(),
                    p.n(),
                    p.d(),
                    scale,
                    pstar_mult
                );
            }
            Scaling::Custom => {
                let deltas: Vec<String> = p.deltas().iter().map(|x| x.to_string()).collect();
                let _ = writeln!(
                    out,
                    "#model r={} n={} D={} mode=custom pstar={} delta={}",
                    p.r(),
                    p.n(),
                    p.d(),
                    p.pstar(),
                    deltas.join(",")
                );
            }
        }
        let _ = write!(out, "#blocks {}", p.levels());
        for size in p.block_sizes() {
            let _ = write!(out, " {size}");
        }
        out.push('\n');
        let width = p.all_subblock_sizes().iter().map(Vec::len).max().unwrap_or(0);
        let _ = write!(out, "#subblocks {} {}", p.levels(), width);
        for k in 1..=p.levels() {
            let subs = p.subblock_sizes(k);
            for j in 0..width {
                let _ = write!(out, " {}", subs.get(j).copied().unwrap_or(0));
            }
        }
        out.push('\n');
        write_body(&self.graph, &mut out);
        out
    }

    pub fn parse_bhg(text: &str) -> Result<Self> {
        let (graph, comments) = parse_with_comments(text)?;
        let mut model = None;
        let mut blocks = None;
        let mut subblocks = None;
        for (line, comment) in &comments {
            let mut fields = comment.split_whitespace();
            match fields.next() {
                Some("model") => model = Some((*line, parse_model_line(*line, fields)?)),
                Some("blocks") => blocks = Some((*line, parse_numbers(*line, fields)?)),
                Some("subblocks") => subblocks = Some((*line, parse_numbers(*line, fields)?)),
                _ => {}
            }
        }
        let (model_line, model) = model.ok_or_else(|| Error::parse(1, "missing #model header"))?;
        let (blocks_line, blocks) = blocks.ok_or_else(|| Error::parse(1, "missing #blocks header"))?;
        let (sub_line, subs) = subblocks.ok_or_else(|| Error::parse(1, "missing #subblocks header"))?;

        if blocks.is_empty() || blocks.len() != blocks[0] + 1 {
            return Err(Error::parse(blocks_line, "#blocks must list k followed by k sizes"));
        }
        if subs.len() < 2 || subs.len() != 2 + subs[0] * subs[1] || subs[0] != blocks[0] {
            return Err(Error::parse(sub_line, "#subblocks must list k, j and k*j counts"));
        }
        let (levels, width) = (subs[0], subs[1]);
        let grid: Vec<Vec<usize>> = (0..levels).map(|k| subs[2 + k * width..2 + (k + 1) * width].to_vec()).collect();

        let params = match model {
            ModelLine::Computed { r, n, d, scaling } => {
                let params = compute_params(r, n, d, scaling).map_err(|e| Error::parse(model_line, e.to_string()))?;
                if params.block_sizes() != &blocks[1..] {
                    return Err(Error::parse(blocks_line, "block sizes disagree with the #model parameters"));
                }
                let padded: Vec<Vec<usize>> = params
                    .all_subblock_sizes()
                    .iter()
                    .map(|s| {
                        let mut s = s.clone();
                        s.resize(width, 0);
                        s
                    })
                    .collect();
                if padded != grid {
                    return Err(Error::parse(sub_line, "sub-block sizes disagree with the #model parameters"));
                }
                params
            }
            ModelLine::Custom { r, n, d, pstar, delta } => {
                let trimmed: Vec<Vec<usize>> = grid
                    .into_iter()
                    .map(|mut s| {
                        while s.len() > 1 && s.last() == Some(&0) {
                            s.pop();
                        }
                        s
                    })
                    .collect();
                let params = ModelParams::from_layout(r, n, d, delta, trimmed, pstar)
                    .map_err(|e| Error::parse(model_line, e.to_string()))?;
                if params.block_sizes() != &blocks[1..] {
                    return Err(Error::parse(blocks_line, "block sizes disagree with the sub-block counts"));
                }
                params
            }
        };
        BlockGraph::new(params, graph)
    }

    pub fn read_bhg(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_bhg(&std::fs::read_to_string(path)?)
    }

    pub fn write_bhg(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_bhg_string())?;
        Ok(())
    }
}

enum ModelLine {
    Computed { r: usize, n: usize, d: usize, scaling: Scaling },
    Custom { r: usize, n: usize, d: usize, pstar: f64, delta: Vec<f64> },
}

fn parse_model_line<'a>(line: usize, fields: impl Iterator<Item = &'a str>) -> Result<ModelLine> {
    let mut kv = std::collections::BTreeMap::new();
    for field in fields {
        let (k, v) = field
            .split_once('=')
            .ok_or_else(|| Error::parse(line, format!("expected key=value, found `{field}`")))?;
        kv.insert(k, v);
    }
    let get = |key: &str| kv.get(key).copied().ok_or_else(|| Error::parse(line, format!("#model lacks `{key}`")));
    let int = |key: &str| -> Result<usize> {
        get(key)?.parse().map_err(|e| Error::parse(line, format!("bad `{key}`: {e}")))
    };
    let float = |key: &str| -> Result<f64> {
        get(key)?.parse().map_err(|e| Error::parse(line, format!("bad `{key}`: {e}")))
    };
    let (r, n, d) = (int("r")?, int("n")?, int("D")?);
    match get("mode")? {
        "paper-exact" => Ok(ModelLine::Computed { r, n, d, scaling: Scaling::PaperExact }),
        "scaled" => Ok(ModelLine::Computed {
            r,
            n,
            d,
            scaling: Scaling::Scaled {
                scale: float("scale")?,
                pstar_mult: float("pstar_mult")?,
            },
        }),
        "custom" => {
            let delta = get("delta")?
                .split(',')
                .map(|x| x.parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| Error::parse(line, format!("bad `delta`: {e}")))?;
            Ok(ModelLine::Custom {
                r,
                n,
                d,
                pstar: float("pstar")?,
                delta,
            })
        }
        other => Err(Error::parse(line, format!("unknown mode `{other}`"))),
    }
}

fn parse_numbers<'a>(line: usize, fields: impl Iterator<Item = &'a str>) -> Result<Vec<usize>> {
    fields
        .map(|f| f.parse::<usize>().map_err(|e| Error::parse(line, format!("bad integer `{f}`: {e}"))))
        .collect()
}

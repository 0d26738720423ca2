use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hyperuni::embed::embed;
use hyperuni::experiment::{self, ExperimentConfig};
use hyperuni::generators::{generate, Family, GenSpec};
use hyperuni::hypergraph::format::{parse_hg, to_hg_string};
use hyperuni::hypergraph::degeneracy_ordering;
use hyperuni::model::{
    compute_params, expected_edges, lower_bound_value, sample_model, strata, BlockGraph, ModelParams, SampleCaps,
    Scaling,
};
use hyperuni::oracle::{
    backtrack_embed, class_size, for_each_in_class, universality_check, verify_embedding, BacktrackOutcome, ClassSpec,
    Universality,
};
use hyperuni::{Error, Hypergraph, Result, Vertex};

#[derive(Parser)]
#[command(name = "hyperuni", version, about = "Random block-model hosts and greedy embedding of degenerate hypergraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the derived model parameters.
    Params {
        #[command(flatten)]
        model: ModelArgs,
        /// Print JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Sample a host and write it as .bhg.
    GenModel {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = SampleCaps::default().max_edges)]
        cap_edges: f64,
        #[arg(long, default_value_t = SampleCaps::default().max_vertices)]
        cap_vertices: usize,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Generate a random D-degenerate guest in .hg format.
    GenH {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        n: usize,
        #[arg(long = "D")]
        d: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Skew exponent.
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        /// Least back-degree per vertex.
        #[arg(long, default_value_t = 0)]
        min_back: usize,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Greedily embed a guest (.hg) into a host (.bhg) and print the report.
    Embed {
        #[arg(long)]
        guest: PathBuf,
        #[arg(long)]
        host: PathBuf,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Check a vertex map: injective, and every guest edge maps to a host edge.
    Verify {
        #[arg(long)]
        guest: PathBuf,
        /// Host as .hg or .bhg.
        #[arg(long)]
        host: PathBuf,
        /// Either an embed report or whitespace-separated host ids, one per guest vertex.
        #[arg(long)]
        map: PathBuf,
    },
    /// Exhaustive backtracking search for an embedding.
    OracleEmbed {
        #[arg(long)]
        guest: PathBuf,
        #[arg(long)]
        host: PathBuf,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
    },
    /// Test a host against every graph of a small degenerate class.
    UniversalCheck {
        #[arg(long)]
        host: PathBuf,
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
    },
    /// List every graph of a small degenerate class.
    Enumerate {
        #[command(flatten)]
        class: ClassArgs,
        /// Print only the number of graphs.
        #[arg(long)]
        count: bool,
    },
    /// Run a configured experiment.
    Experiment {
        #[command(subcommand)]
        which: ExperimentKind,
    },
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long)]
    r: usize,
    #[arg(long)]
    n: usize,
    #[arg(long = "D")]
    d: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Scaled)]
    mode: ModeArg,
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, default_value_t = 1.0)]
    pstar_mult: f64,
}

impl ModelArgs {
    fn params(&self) -> Result<ModelParams> {
        let scaling = match self.mode {
            ModeArg::PaperExact => Scaling::PaperExact,
            ModeArg::Scaled => Scaling::Scaled {
                scale: self.scale,
                pstar_mult: self.pstar_mult,
            },
        };
        compute_params(self.r, self.n, self.d, scaling)
    }
}

#[derive(Args)]
struct ClassArgs {
    #[arg(long)]
    r: usize,
    #[arg(long)]
    n: usize,
    #[arg(long = "D")]
    d: usize,
    /// Only connected graphs, each vertex closing at least one edge.
    #[arg(long)]
    connected: bool,
    /// Only graphs of maximum degree at most this.
    #[arg(long)]
    degree_cap: Option<usize>,
    /// Largest number of choice combinations to walk.
    #[arg(long, default_value_t = 10_000_000)]
    cap: u128,
}

impl ClassArgs {
    fn spec(&self) -> ClassSpec {
        ClassSpec {
            r: self.r,
            n: self.n,
            d: self.d,
            connected_only: self.connected,
            degree_cap: self.degree_cap,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    PaperExact,
    Scaled,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Uniform,
    Capped,
    Skew,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Configuration file of key = value lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a configuration key, as key=value. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

impl ExperimentArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        cfg.apply_overrides(&self.overrides)?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum ExperimentKind {
    /// Success fraction of greedy embeddings of generated guests.
    SuccessRate(ExperimentArgs),
    /// Sampled edge counts against the exact expectation and closed-form bound.
    Edges(ExperimentArgs),
    /// Candidate density of harvested back-link multisets, as a table.
    Lemma45(ExperimentArgs),
    /// Search the smallest pstar_mult reaching the success target, doubled.
    Calibrate(ExperimentArgs),
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))
}

fn read_hg(path: &Path) -> Result<Hypergraph> {
    parse_hg(&read(path)?)
}

/// A host given either as .bhg (with block layout) or plain .hg.
fn read_any_host(path: &Path) -> Result<Hypergraph> {
    let text = read(path)?;
    if text.lines().any(|l| l.starts_with("#model")) {
        Ok(BlockGraph::parse_bhg(&text)?.graph().clone())
    } else {
        parse_hg(&text)
    }
}

fn read_map(path: &Path) -> Result<Vec<Vertex>> {
    let text = read(path)?;
    if text.trim_start().starts_with('{') {
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let entries = value
            .get("map")
            .and_then(|m| m.as_array())
            .ok_or_else(|| Error::Config(format!("{}: no `map` array", path.display())))?;
        entries
            .iter()
            .enumerate()
            .map(|(i, v)| {
                v.as_u64()
                    .map(|x| x as Vertex)
                    .ok_or_else(|| Error::Config(format!("guest vertex {i} is not mapped")))
            })
            .collect()
    } else {
        text.split_whitespace()
            .map(|t| t.parse::<Vertex>().map_err(|e| Error::Config(format!("bad host id `{t}`: {e}"))))
            .collect()
    }
}

fn fmt_list<T: std::fmt::Display>(items: &[T]) -> String {
    items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

fn params_text(p: &ModelParams) -> String {
    let mut s = String::new();
    let e = expected_edges(p);
    s += &format!("r = {}\nn = {}\nD = {}\nmode = {}\n", p.r(), p.n(), p.d(), p.scaling().name());
    if let Scaling::Scaled { scale, pstar_mult } = p.scaling() {
        s += &format!("scale = {scale}\npstar_mult = {pstar_mult}\n");
    }
    s += &format!("N = {}\n", p.levels());
    s += &format!("delta = ({})\n", fmt_list(p.deltas()));
    s += &format!("block_sizes = ({})\n", fmt_list(p.block_sizes()));
    for k in 1..=p.levels() {
        s += &format!("subblock_sizes[{k}] = ({})\n", fmt_list(p.subblock_sizes(k)));
    }
    s += &format!("vertices = {}\n", p.total_vertices());
    s += &format!("pstar = {}\n", p.pstar());
    s += &format!("strata = {}\n", strata(p).len());
    s += &format!("expected_edges = {}\n", e.expected);
    s += &format!("closed_form_bound = {}\n", e.closed_form_bound);
    s += &format!("bound_ratio = {}\n", e.bound_ratio());
    s += &format!("lower_bound = {}\n", lower_bound_value(p.r(), p.n(), p.d()));
    s
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Params { model, json } => {
            let p = model.params()?;
            if json {
                let e = expected_edges(&p);
                let value = serde_json::json!({
                    "params": p,
                    "expected_edges": e,
                    "lower_bound": lower_bound_value(p.r(), p.n(), p.d()),
                });
                emit(None, &format!("{}\n", serde_json::to_string_pretty(&value).expect("serializable")))
            } else {
                emit(None, &params_text(&p))
            }
        }
        Command::GenModel {
            model,
            seed,
            cap_edges,
            cap_vertices,
            out,
        } => {
            let params = model.params()?;
            let caps = SampleCaps {
                max_edges: cap_edges,
                max_vertices: cap_vertices,
            };
            let host = sample_model(&params, seed, &caps)?;
            emit(out.as_deref(), &host.to_bhg_string())
        }
        Command::GenH {
            family,
            r,
            n,
            d,
            seed,
            alpha,
            min_back,
            out,
        } => {
            let family = match family {
                FamilyArg::Uniform => Family::Uniform,
                FamilyArg::Capped => Family::Capped,
                FamilyArg::Skew => Family::Skew { alpha },
            };
            let mut spec = GenSpec::new(r, n, d, family, seed);
            spec.min_back = min_back;
            emit(out.as_deref(), &to_hg_string(&generate(&spec)?))
        }
        Command::Embed { guest, host, out } => {
            let guest = read_hg(&guest)?;
            let host = BlockGraph::parse_bhg(&read(&host)?)?;
            let (ordering, _) = degeneracy_ordering(&guest);
            let report = embed(&guest, &ordering, &host)?;
            emit(out.as_deref(), &format!("{}\n", report.to_json()))
        }
        Command::Verify { guest, host, map } => {
            let guest = read_hg(&guest)?;
            let host = read_any_host(&host)?;
            let map = read_map(&map)?;
            match verify_embedding(&guest, &host, &map) {
                Ok(()) => emit(None, "ok\n"),
                Err(violations) => {
                    let text = serde_json::to_string_pretty(&violations).expect("serializable");
                    emit(None, &format!("{text}\n"))?;
                    Err(Error::Precondition(format!("{} violations", violations.len())))
                }
            }
        }
        Command::OracleEmbed { guest, host, budget } => {
            let guest = read_hg(&guest)?;
            let host = read_any_host(&host)?;
            let outcome = backtrack_embed(&guest, &host, budget)?;
            let text = serde_json::to_string_pretty(&outcome).expect("serializable");
            emit(None, &format!("{text}\n"))?;
            match outcome {
                BacktrackOutcome::BudgetExhausted { nodes } => {
                    Err(Error::ResourceCap(format!("search budget of {nodes} nodes exhausted")))
                }
                _ => Ok(()),
            }
        }
        Command::UniversalCheck { host, class, budget } => {
            let host = read_any_host(&host)?;
            match universality_check(&host, &class.spec(), budget, class.cap)? {
                Universality::Universal { guests } => emit(None, &format!("universal: all {guests} guests embed\n")),
                Universality::Counterexample { index, guest } => emit(
                    None,
                    &format!("# counterexample: guest {index} does not embed\n{}", to_hg_string(&guest)),
                ),
                Universality::Undecided { index, guest } => {
                    emit(
                        None,
                        &format!("# undecided: guest {index} exhausted the budget\n{}", to_hg_string(&guest)),
                    )?;
                    Err(Error::ResourceCap(format!("guest {index} exhausted the search budget")))
                }
            }
        }
        Command::Enumerate { class, count } => {
            let spec = class.spec();
            if count {
                let found = for_each_in_class(&spec, class.cap, |_| {})?;
                return emit(None, &format!("{found}\n"));
            }
            let mut stdout = std::io::stdout().lock();
            let mut io_err = None;
            let mut index = 0usize;
            for_each_in_class(&spec, class.cap, |g| {
                if io_err.is_none() {
                    if let Err(e) = write!(stdout, "# graph {index}\n{}", to_hg_string(&g)) {
                        io_err = Some(e);
                    }
                }
                index += 1;
            })?;
            if let Some(e) = io_err {
                return Err(e.into());
            }
            writeln!(stdout, "# {index} graphs of {} walked", class_size(&spec))?;
            Ok(())
        }
        Command::Experiment { which } => match which {
            ExperimentKind::SuccessRate(args) => {
                let report = experiment::success_rate(&args.config()?)?;
                emit(args.out.as_deref(), &format!("{}\n", report.to_json()))
            }
            ExperimentKind::Edges(args) => {
                let report = experiment::edges(&args.config()?)?;
                emit(args.out.as_deref(), &format!("{}\n", report.to_json()))
            }
            ExperimentKind::Lemma45(args) => {
                let report = experiment::lemma45(&args.config()?)?;
                emit(args.out.as_deref(), &report.to_table())
            }
            ExperimentKind::Calibrate(args) => {
                let report = experiment::calibrate(&args.config()?)?;
                eprintln!("{}", report.to_json());
                let text = format!(
                    "# pstar_mult is twice the smallest value reaching {} of {} successes\n{}",
                    report.config.calibrate_target,
                    report.config.calibrate_trials,
                    report.calibrated_config().to_text()
                );
                emit(args.out.as_deref(), &text)
            }
        },
    }
}

fn init_threads() -> Result<()> {
    if let Ok(value) = std::env::var("HYPERUNI_THREADS") {
        let threads: usize = value
            .parse()
            .map_err(|e| Error::Config(format!("HYPERUNI_THREADS = `{value}`: {e}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match init_threads().and_then(|()| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

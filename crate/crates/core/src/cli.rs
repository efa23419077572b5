//! Experiment harness: one subcommand per module, parameters from flags or a
//! sectioned `key = value` config file (flags win), JSON or CSV output.
//!
//! Errors are reported on stderr as `{"error": class, "kind": …, "detail": …}`
//! with exit codes 2 (config), 3 (precondition), 4 (numeric), 5 (budget).

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::branching::{root_ball_census, root_degree_distribution};
use crate::decompose::{expander_decompose, ExpanderDecomposition};
use crate::electric::{effective_resistance, kostochka_log_upper, log_spanning_tree_count, normalized_tree_count, graphon_tree_rate};
use crate::error::{Error, Result};
use crate::extremal::{degree_density_bound, optimize_lemma, sharpness_graph};
use crate::freq::{freq_graph, freq_graphon, freq_minus};
use crate::graph::MultiGraph;
use crate::graphon::{sample_w_random_graph, StepGraphon};
use crate::trees::{degree_counts, local_census, merge_census, RootedTree};
use crate::ust::{sample_many, Sampler};
use crate::walk::{hitting_before_return_exact, hitting_before_return_mc, spectral_profile, EXACT_CHEEGER_LIMIT};

#[derive(Debug, Parser)]
#[command(name = "ust-graphon", version, about = "Uniform spanning trees of dense graphs and graphon limits")]
pub struct Cli {
    /// Config file with `key = value` lines, optionally under `[subcommand]` sections.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads (output does not depend on this).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed, required by stochastic subcommands.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a graph as an edge list.
    Gen(GenArgs),
    /// Sample USTs; report degree counts and the local census.
    Ust(UstArgs),
    /// Frequency functional of a rooted-tree pattern.
    Freq(FreqArgs),
    /// Root-ball census of the branching process.
    Branching(BranchingArgs),
    /// Expander decomposition with its verification report.
    Decompose(DecomposeArgs),
    /// Spanning-tree count and its normalizations.
    CountTrees(CountArgs),
    /// Effective resistances.
    Resistance(ResistanceArgs),
    /// Spectral profile, mixing bound and hitting probabilities.
    Walk(WalkArgs),
    /// Degree-density bounds and the optimizer cross-check.
    Extremal(ExtremalArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Complete,
    Cycle,
    Path,
    Gnp,
    Graphon,
    TwoCliques,
    Sharpness,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    #[arg(long)]
    pub graphon: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<u64>,
    /// Edge probability for `gnp`, cross probability for `sharpness`.
    #[arg(long)]
    pub p: Option<f64>,
    /// Degree parameter for `sharpness`.
    #[arg(long)]
    pub k: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SamplerArg {
    Wilson,
    AldousBroder,
}

#[derive(Debug, Args)]
pub struct UstArgs {
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub radius: Option<u64>,
    #[arg(long, value_enum)]
    pub sampler: Option<SamplerArg>,
}

#[derive(Debug, Args)]
pub struct FreqArgs {
    #[arg(long)]
    pub pattern: Option<PathBuf>,
    #[arg(long)]
    pub graphon: Option<PathBuf>,
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub decomp: Option<PathBuf>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BranchingArgs {
    #[arg(long)]
    pub graphon: Option<PathBuf>,
    #[arg(long, visible_alias = "radius")]
    pub depth: Option<u64>,
    #[arg(long)]
    pub samples: Option<u64>,
    /// Emit the closed-form root-degree law up to this degree (JSON) instead of the census.
    #[arg(long)]
    pub degree_law: Option<u64>,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Graphon whose tree rate is reported alongside.
    #[arg(long)]
    pub graphon: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ResistanceArgs {
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub u: Option<u64>,
    #[arg(long)]
    pub v: Option<u64>,
}

#[derive(Debug, Args)]
pub struct WalkArgs {
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Target total-variation distance for the mixing bound.
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub w: Option<u64>,
    #[arg(long)]
    pub u: Option<u64>,
    #[arg(long)]
    pub v: Option<u64>,
    #[arg(long)]
    pub samples: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ExtremalArgs {
    #[arg(long)]
    pub k_max: Option<u64>,
    #[arg(long)]
    pub tol: Option<f64>,
}

/// Parameter lookup: flag, then `[section] key`, then top-level `key`.
struct Settings {
    table: toml::Table,
    section: &'static str,
}

impl Settings {
    fn load(path: Option<&Path>, section: &'static str) -> Result<Self> {
        let table = match path {
            None => toml::Table::new(),
            Some(p) => std::fs::read_to_string(p)?
                .parse::<toml::Table>()
                .map_err(|e| Error::Config(format!("{}: {e}", p.display())))?,
        };
        Ok(Settings { table, section })
    }

    fn lookup(&self, key: &str) -> Option<&toml::Value> {
        let alt = key.replace('-', "_");
        let in_section = self.table.get(self.section).and_then(|s| s.as_table());
        in_section
            .and_then(|t| t.get(key).or_else(|| t.get(&alt)))
            .or_else(|| self.table.get(key).or_else(|| self.table.get(&alt)).filter(|v| !v.is_table()))
    }

    fn path(&self, flag: Option<PathBuf>, key: &str) -> Result<Option<PathBuf>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.lookup(key) {
            None => Ok(None),
            Some(toml::Value::String(s)) => Ok(Some(PathBuf::from(s))),
            Some(v) => Err(Error::Config(format!("`{key}` must be a string, got {v}"))),
        }
    }

    fn string(&self, key: &str) -> Result<Option<String>> {
        match self.lookup(key) {
            None => Ok(None),
            Some(toml::Value::String(s)) => Ok(Some(s.clone())),
            Some(v) => Err(Error::Config(format!("`{key}` must be a string, got {v}"))),
        }
    }

    fn uint(&self, flag: Option<u64>, key: &str) -> Result<Option<u64>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.lookup(key) {
            None => Ok(None),
            Some(toml::Value::Integer(i)) if *i >= 0 => Ok(Some(*i as u64)),
            Some(v) => Err(Error::Config(format!("`{key}` must be a nonnegative integer, got {v}"))),
        }
    }

    fn real(&self, flag: Option<f64>, key: &str) -> Result<Option<f64>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.lookup(key) {
            None => Ok(None),
            Some(toml::Value::Float(x)) => Ok(Some(*x)),
            Some(toml::Value::Integer(i)) => Ok(Some(*i as f64)),
            Some(v) => Err(Error::Config(format!("`{key}` must be a number, got {v}"))),
        }
    }
}

fn required<T>(value: Option<T>, key: &str) -> Result<T> {
    value.ok_or_else(|| Error::Config(format!("missing required parameter `{key}`")))
}

fn as_index(x: u64) -> usize {
    usize::try_from(x).unwrap_or(usize::MAX)
}

/// Result of one run: the primary text plus extra files to write next to `--out`.
pub struct Output {
    pub text: String,
    pub extra: Vec<(&'static str, String)>,
}

impl Output {
    fn text(text: String) -> Self {
        Output { text, extra: Vec::new() }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn census_csv<V: std::fmt::Display>(census: &BTreeMap<String, V>) -> String {
    let mut s = String::from("code,count\n");
    for (code, count) in census {
        let _ = writeln!(s, "{code},{count}");
    }
    s
}

/// Parses arguments and runs the subcommand, writing `--out` files when given.
pub fn execute<I, T>(args: I) -> Result<String>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Error::Config(e.to_string()))?;
    let out = run_cli(&cli)?;
    if let Some(path) = &cli.out {
        std::fs::write(path, &out.text)?;
        for (ext, text) in &out.extra {
            std::fs::write(path.with_extension(ext), text)?;
        }
    }
    Ok(out.text)
}

/// Runs a parsed command inside a pool of `--threads` workers.
pub fn run_cli(cli: &Cli) -> Result<Output> {
    let section = match &cli.command {
        Command::Gen(_) => "gen",
        Command::Ust(_) => "ust",
        Command::Freq(_) => "freq",
        Command::Branching(_) => "branching",
        Command::Decompose(_) => "decompose",
        Command::CountTrees(_) => "count-trees",
        Command::Resistance(_) => "resistance",
        Command::Walk(_) => "walk",
        Command::Extremal(_) => "extremal",
    };
    let settings = Settings::load(cli.config.as_deref(), section)?;
    let threads = settings.uint(cli.threads.map(|t| t as u64), "threads")?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        if t == 0 {
            return Err(Error::Config("`threads` must be positive".into()));
        }
        pool = pool.num_threads(as_index(t));
    }
    let pool = pool.build().map_err(|e| Error::Config(e.to_string()))?;
    let seed = settings.uint(cli.seed, "seed")?;
    pool.install(|| dispatch(&cli.command, &settings, seed))
}

fn dispatch(command: &Command, s: &Settings, seed: Option<u64>) -> Result<Output> {
    let need_seed = || required(seed, "seed");
    match command {
        Command::Gen(a) => {
            let family = match a.family {
                Some(f) => f,
                None => match s.string("family")? {
                    Some(name) => Family::from_str(&name, true).map_err(|e| Error::Config(e.to_string()))?,
                    None if s.path(a.graphon.clone(), "graphon")?.is_some() => Family::Graphon,
                    None => return Err(Error::Config("missing required parameter `family`".into())),
                },
            };
            let n = as_index(required(s.uint(a.n, "n")?, "n")?);
            let g = match family {
                Family::Complete => MultiGraph::complete(n),
                Family::Cycle => MultiGraph::cycle(n),
                Family::Path => MultiGraph::path(n),
                Family::Gnp => {
                    let p = required(s.real(a.p, "p")?, "p")?;
                    if !(0.0..=1.0).contains(&p) {
                        return Err(Error::ParameterOutOfRange { name: "p", value: p });
                    }
                    sample_w_random_graph(&StepGraphon::constant(p), n, need_seed()?)?.0
                }
                Family::Graphon => {
                    let w = StepGraphon::read(required(s.path(a.graphon.clone(), "graphon")?, "graphon")?)?;
                    sample_w_random_graph(&w, n, need_seed()?)?.0
                }
                Family::TwoCliques => {
                    let mut pairs = Vec::new();
                    for side in [0, n] {
                        for x in 0..n {
                            for y in x + 1..n {
                                pairs.push((side + x, side + y));
                            }
                        }
                    }
                    pairs.extend((0..n).map(|i| (i, n + i)));
                    MultiGraph::from_pairs(2 * n, &pairs)?
                }
                Family::Sharpness => {
                    let k = as_index(required(s.uint(a.k, "k")?, "k")?);
                    let p = required(s.real(a.p, "p")?, "p")?;
                    sharpness_graph(n, k, p, need_seed()?)?
                }
            };
            Ok(Output::text(g.to_edge_list()))
        }
        Command::Ust(a) => {
            let g = MultiGraph::read_edge_list(required(s.path(a.graph.clone(), "graph")?, "graph")?)?;
            let samples = as_index(required(s.uint(a.samples, "samples")?, "samples")?);
            let radius = as_index(s.uint(a.radius, "radius")?.unwrap_or(1));
            let sampler = match a.sampler {
                Some(SamplerArg::AldousBroder) => Sampler::AldousBroder,
                Some(SamplerArg::Wilson) => Sampler::Wilson,
                None => match s.string("sampler")?.as_deref() {
                    None | Some("wilson") => Sampler::Wilson,
                    Some("aldous-broder") => Sampler::AldousBroder,
                    Some(other) => return Err(Error::Config(format!("unknown sampler `{other}`"))),
                },
            };
            let seed = need_seed()?;
            let trees = sample_many(&g, samples, seed, sampler)?;
            let mut census = BTreeMap::new();
            let mut degrees: BTreeMap<usize, usize> = BTreeMap::new();
            for t in &trees {
                merge_census(&mut census, &local_census(t, radius));
                for (k, c) in degree_counts(t) {
                    *degrees.entry(k).or_insert(0) += c;
                }
            }
            let total = (g.n() * samples) as f64;
            let density: BTreeMap<usize, f64> = degrees.iter().map(|(&k, &c)| (k, c as f64 / total)).collect();
            let report = json!({
                "n": g.n(),
                "samples": samples,
                "radius": radius,
                "seed": seed,
                "degree_counts": degrees,
                "degree_density": density,
                "census": census,
            });
            Ok(Output { text: to_json(&report), extra: vec![("csv", census_csv(&census))] })
        }
        Command::Freq(a) => {
            let t = RootedTree::read(required(s.path(a.pattern.clone(), "pattern")?, "pattern")?)?;
            let graphon = s.path(a.graphon.clone(), "graphon")?;
            let graph = s.path(a.graph.clone(), "graph")?;
            let report = match (graphon, graph) {
                (Some(w), None) => freq_graphon(&t, &StepGraphon::read(w)?)?,
                (None, Some(g)) => {
                    let g = MultiGraph::read_edge_list(g)?;
                    match s.path(a.decomp.clone(), "decomp")? {
                        None => freq_minus(&t, &g, &[], &[])?,
                        Some(d) => {
                            let dec = ExpanderDecomposition::read(d)?;
                            let alpha = s.real(a.alpha, "alpha")?.unwrap_or(1e-4);
                            let eps = s.real(a.eps, "eps")?.unwrap_or(dec.eps);
                            freq_graph(&t, &g, &dec, alpha, eps)?
                        }
                    }
                }
                _ => return Err(Error::Config("give exactly one of `graphon` and `graph`".into())),
            };
            Ok(Output::text(to_json(&report)))
        }
        Command::Branching(a) => {
            let w = StepGraphon::read(required(s.path(a.graphon.clone(), "graphon")?, "graphon")?)?;
            if let Some(k_max) = s.uint(a.degree_law, "degree_law")? {
                return Ok(Output::text(to_json(&root_degree_distribution(&w, as_index(k_max))?)));
            }
            let depth = s.uint(a.depth, "depth")?.or(s.uint(None, "radius")?);
            let depth = as_index(required(depth, "depth")?);
            let samples = as_index(required(s.uint(a.samples, "samples")?, "samples")?);
            let census = root_ball_census(&w, depth, samples, need_seed()?)?;
            Ok(Output::text(census_csv(&census)))
        }
        Command::Decompose(a) => {
            let g = MultiGraph::read_edge_list(required(s.path(a.graph.clone(), "graph")?, "graph")?)?;
            let gamma = s.real(a.gamma, "gamma")?.unwrap_or(0.1);
            let eta = s.real(a.eta, "eta")?.unwrap_or(0.01);
            let eps = s.real(a.eps, "eps")?.unwrap_or(0.1);
            let dec = expander_decompose(&g, gamma, eta, eps)?;
            Ok(Output::text(to_json(&dec)))
        }
        Command::CountTrees(a) => {
            let g = MultiGraph::read_edge_list(required(s.path(a.graph.clone(), "graph")?, "graph")?)?;
            let log_t = log_spanning_tree_count(&g)?;
            let mut report = json!({
                "n": g.n(),
                "log_t": log_t,
                "normalized": normalized_tree_count(log_t, g.n()),
                "log_degree_bound": kostochka_log_upper(&g),
            });
            if let Some(w) = s.path(a.graphon.clone(), "graphon")? {
                report["graphon_rate"] = json!(graphon_tree_rate(&StepGraphon::read(w)?)?);
            }
            Ok(Output::text(to_json(&report)))
        }
        Command::Resistance(a) => {
            let g = MultiGraph::read_edge_list(required(s.path(a.graph.clone(), "graph")?, "graph")?)?;
            let u = s.uint(a.u, "u")?;
            let v = s.uint(a.v, "v")?;
            let report = match (u, v) {
                (Some(u), Some(v)) => {
                    let r = effective_resistance(&g, as_index(u), as_index(v))?;
                    json!({ "u": u, "v": v, "resistance": r.is_finite().then_some(r) })
                }
                (None, None) => {
                    let sys = crate::electric::LaplacianSystem::new(&g)?;
                    let mut edges = Vec::new();
                    let mut foster = 0.0;
                    for ((x, y), m) in g.edges() {
                        let r = sys.resistance(x, y)?;
                        foster += m as f64 * r;
                        edges.push(json!({ "u": x, "v": y, "multiplicity": m, "resistance": r }));
                    }
                    json!({ "edges": edges, "foster_sum": foster, "n_minus_one": g.n() - 1 })
                }
                _ => return Err(Error::Config("give both `u` and `v`, or neither".into())),
            };
            Ok(Output::text(to_json(&report)))
        }
        Command::Walk(a) => {
            let g = MultiGraph::read_edge_list(required(s.path(a.graph.clone(), "graph")?, "graph")?)?;
            let eps = s.real(a.eps, "eps")?.unwrap_or(0.25);
            if !(eps > 0.0 && eps < 0.5) {
                return Err(Error::ParameterOutOfRange { name: "eps", value: eps });
            }
            let profile = spectral_profile(&g, EXACT_CHEEGER_LIMIT)?;
            let mut report = json!({
                "profile": profile,
                "mixing_bound": profile.mixing_bound(eps),
                "cheeger_sandwich": profile.cheeger_sandwich_holds(1e-9),
            });
            let triple = (s.uint(a.w, "w")?, s.uint(a.u, "u")?, s.uint(a.v, "v")?);
            match triple {
                (Some(w), Some(u), Some(v)) => {
                    let (w, u, v) = (as_index(w), as_index(u), as_index(v));
                    let mut hit = json!({
                        "w": w, "u": u, "v": v,
                        "exact": hitting_before_return_exact(&g, w, u, v)?,
                        "degree_ratio": g.degree(v) as f64 / (g.degree(u) + g.degree(v)) as f64,
                    });
                    if let Some(samples) = s.uint(a.samples, "samples")? {
                        let (p, se) = hitting_before_return_mc(&g, w, u, v, as_index(samples), need_seed()?)?;
                        hit["monte_carlo"] = json!({ "estimate": p, "stderr": se, "samples": samples });
                    }
                    report["hitting"] = hit;
                }
                (None, None, None) => {}
                _ => return Err(Error::Config("hitting probabilities need all of `w`, `u`, `v`".into())),
            }
            Ok(Output::text(to_json(&report)))
        }
        Command::Extremal(a) => {
            let k_max = as_index(s.uint(a.k_max, "k_max")?.unwrap_or(8));
            let tol = s.real(a.tol, "tol")?.unwrap_or(1e-6);
            if k_max < 2 {
                return Err(Error::InvalidDegree(k_max));
            }
            let bounds = (1..=k_max).map(degree_density_bound).collect::<Result<Vec<_>>>()?;
            let lemma = (2..=k_max).map(|k| optimize_lemma(k, tol)).collect::<Result<Vec<_>>>()?;
            Ok(Output::text(to_json(&json!({ "bounds": bounds, "lemma": lemma }))))
        }
    }
}

fn error_record(e: &Error) -> String {
    json!({ "error": e.class().as_str(), "kind": e.kind(), "detail": e.to_string() }).to_string()
}

/// Entry point for the binary: returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help / --version
            print!("{e}");
            return 0;
        }
        Err(e) => {
            let err = Error::Config(e.to_string());
            eprintln!("{}", error_record(&err));
            return err.class().exit_code();
        }
    };
    let result = run_cli(&cli).and_then(|out| {
        match &cli.out {
            Some(path) => {
                std::fs::write(path, &out.text)?;
                for (ext, text) in &out.extra {
                    std::fs::write(path.with_extension(ext), text)?;
                }
            }
            None => print!("{}", out.text),
        }
        Ok(())
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", error_record(&e));
            e.class().exit_code()
        }
    }
}

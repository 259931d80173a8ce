//! `bisq`: generate graphs, run the estimators behind a metered oracle, and
//! collect benchmark and distinguishing-experiment tables.

use bisq::edgelist::{read_edge_list, write_edge_list, EdgeListError};
use bisq::experiment::{bench, run_distinguisher, AlgorithmId, BenchInstance, ExperimentError};
use bisq::generators::{complete, complete_bipartite, gen_bipartite, gen_er, path, star};
use bisq::hard::{gen_hard, gen_padded, validate_instance, Flavor, HardError, HardInstanceSpec, PaddedSpec};
use bisq::triangle::{triangle_est, ClosureMode, EstimateError, EstimatorConfig};
use bisq::{EeBacked, Graph, GraphError, OracleHandle, Seed};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use thiserror::Error;

#[derive(Parser)]
#[command(name = "bisq", version, about = "Triangle estimation through independent set oracles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated graph as an edge list plus a JSON sidecar with n, m and T.
    Generate(GenerateArgs),
    /// Estimate the triangle count of an edge-list file; prints a JSON report.
    Estimate(EstimateArgs),
    /// Run algorithms over a set of graphs and seeds; one CSV row per run.
    Bench(BenchArgs),
    /// Yes/No classification of planted instances through the EE oracle; CSV rows.
    Distinguish(DistinguishArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Er,
    Complete,
    Bipartite,
    Star,
    Path,
    Hard,
    Padded,
}

#[derive(Args)]
struct GenerateArgs {
    kind: Kind,
    /// Vertex count (er, complete, path) or leaf count (star).
    #[arg(long)]
    n: Option<usize>,
    /// Edge probability (er, bipartite).
    #[arg(long)]
    p: Option<f64>,
    /// Side sizes (bipartite).
    #[arg(long)]
    a: Option<usize>,
    #[arg(long)]
    b: Option<usize>,
    /// Planted instance parameters (hard, padded).
    #[arg(long)]
    m: Option<u64>,
    #[arg(long)]
    t: Option<u64>,
    #[arg(long, default_value = "yes")]
    flavor: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short = 'o', long = "out")]
    out: PathBuf,
}

#[derive(Args, Clone)]
struct EstimatorArgs {
    #[arg(long, default_value_t = 0.2)]
    epsilon: f64,
    /// Failure probability; defaults to 1/n.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Rebuild the closure of the edge sample by full neighborhood enumeration
    /// instead of probing wedges.
    #[arg(long)]
    full_closure: bool,
}

impl EstimatorArgs {
    fn config(&self) -> EstimatorConfig {
        let mut cfg = EstimatorConfig::new(self.epsilon, self.seed);
        cfg.delta = self.delta;
        if self.full_closure {
            cfg.closure = ClosureMode::Full;
        }
        cfg
    }
}

#[derive(Args)]
struct EstimateArgs {
    input: PathBuf,
    #[command(flatten)]
    est: EstimatorArgs,
    /// Answer every query through the EE oracle.
    #[arg(long)]
    ee: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated graph specs: `er:N:P`, `complete:N`, `bipartite:A:B:P`,
    /// `hard:M:T:FLAVOR`, or `file:PATH`.
    #[arg(long, value_delimiter = ',', required = true)]
    graphs: Vec<String>,
    /// Comma-separated algorithms: triangle-est, exact, high, low.
    #[arg(long, value_delimiter = ',', default_value = "triangle-est")]
    algorithms: Vec<String>,
    /// Seeds `seed..seed + trials` are run per graph and algorithm.
    #[arg(long, default_value_t = 1)]
    trials: u64,
    #[command(flatten)]
    est: EstimatorArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DistinguishArgs {
    #[arg(long)]
    m: u64,
    #[arg(long)]
    t: u64,
    /// Instances per flavor.
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, default_value = "triangle-est")]
    algorithm: String,
    #[command(flatten)]
    est: EstimatorArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Input { path: PathBuf, source: EdgeListError },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Spec(#[from] HardError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Internal(_) => 3,
            _ => 2,
        }
    }
}

impl From<EstimateError> for CliError {
    fn from(e: EstimateError) -> Self {
        match e {
            EstimateError::InvalidConfig(msg) => CliError::Usage(msg),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Spec(e) => CliError::Spec(e),
            ExperimentError::Estimate(e) => e.into(),
            ExperimentError::UnknownAlgorithm(_) => CliError::Usage(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("bisq: {e}");
        return ExitCode::from(e.exit_code());
    }
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(&a),
        Command::Estimate(a) => cmd_estimate(&a),
        Command::Bench(a) => cmd_bench(&a),
        Command::Distinguish(a) => cmd_distinguish(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bisq: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

/// Honour `BISQ_THREADS` as a cap on worker threads.
fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("BISQ_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .parse()
        .ok()
        .filter(|&k| k > 0)
        .ok_or_else(|| CliError::Usage(format!("BISQ_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Internal(e.to_string()))
}

fn need<T>(v: Option<T>, flag: &str, kind: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("generate {kind} needs --{flag}")))
}

#[derive(Serialize)]
struct Sidecar {
    spec: serde_json::Value,
    n: usize,
    m: usize,
    #[serde(rename = "T")]
    triangles: u64,
}

fn cmd_generate(a: &GenerateArgs) -> Result<(), CliError> {
    let seed = Seed(a.seed);
    let flavor: Flavor = a.flavor.parse()?;
    let (g, spec) = match a.kind {
        Kind::Er => {
            let (n, p) = (need(a.n, "n", "er")?, need(a.p, "p", "er")?);
            (gen_er(n, p, seed)?, serde_json::json!({"kind": "er", "n": n, "p": p, "seed": a.seed}))
        }
        Kind::Complete => {
            let n = need(a.n, "n", "complete")?;
            (complete(n), serde_json::json!({"kind": "complete", "n": n}))
        }
        Kind::Bipartite => {
            let (x, y) = (need(a.a, "a", "bipartite")?, need(a.b, "b", "bipartite")?);
            let g = match a.p {
                Some(p) => gen_bipartite(x, y, p, seed)?,
                None => complete_bipartite(x, y),
            };
            (g, serde_json::json!({"kind": "bipartite", "a": x, "b": y, "p": a.p, "seed": a.seed}))
        }
        Kind::Star => {
            let n = need(a.n, "n", "star")?;
            (star(n), serde_json::json!({"kind": "star", "leaves": n}))
        }
        Kind::Path => {
            let n = need(a.n, "n", "path")?;
            (path(n), serde_json::json!({"kind": "path", "n": n}))
        }
        Kind::Hard | Kind::Padded => {
            let (m, t) = (need(a.m, "m", "hard")?, need(a.t, "t", "hard")?);
            let hs = HardInstanceSpec::new(m, t, flavor, seed);
            hs.validate()?;
            if matches!(a.kind, Kind::Hard) {
                let (g, labels) = gen_hard(&hs)?;
                let audit = validate_instance(&g, &labels, &hs);
                (g, serde_json::json!({"kind": "hard", "spec": hs, "validation": audit}))
            } else {
                let ps = PaddedSpec::new(hs);
                let (g, _) = gen_padded(&ps)?;
                (g, serde_json::json!({"kind": "padded", "spec": ps}))
            }
        }
    };
    write_edge_list(&g, BufWriter::new(File::create(&a.out)?))?;
    let sidecar = Sidecar {
        spec,
        n: g.vertex_count(),
        m: g.edge_count(),
        triangles: g.count_triangles_exact(),
    };
    let mut f = BufWriter::new(File::create(sidecar_path(&a.out))?);
    serde_json::to_writer_pretty(&mut f, &sidecar).map_err(io::Error::from)?;
    writeln!(f)?;
    Ok(())
}

/// `g.el` gets `g.el.json`.
fn sidecar_path(p: &Path) -> PathBuf {
    let mut s = p.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn load(path: &Path) -> Result<Graph, CliError> {
    let input = |source| CliError::Input {
        path: path.to_owned(),
        source,
    };
    let f = File::open(path).map_err(|e| input(e.into()))?;
    read_edge_list(BufReader::new(f)).map_err(input)
}

/// Write to `out`, or stdout when absent.
fn sink(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn cmd_estimate(a: &EstimateArgs) -> Result<(), CliError> {
    let g = load(&a.input)?;
    let n = g.vertex_count();
    let cfg = a.est.config();
    let handle = OracleHandle::new(g);
    let report = if a.ee {
        triangle_est(&EeBacked(&handle), &cfg, n)?
    } else {
        triangle_est(&handle, &cfg, n)?
    };
    let mut w = sink(a.out.as_deref())?;
    serde_json::to_writer_pretty(&mut w, &report).map_err(io::Error::from)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn parse_graph(spec: &str, seed: Seed) -> Result<BenchInstance, CliError> {
    let bad = || CliError::Usage(format!("bad graph spec {spec:?}"));
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |i: usize| parts.get(i).and_then(|s| s.parse::<f64>().ok()).ok_or_else(bad);
    let graph = match parts[0] {
        "file" => load(Path::new(parts.get(1).ok_or_else(bad)?))?,
        "er" if parts.len() == 3 => gen_er(num(1)? as usize, num(2)?, seed)?,
        "complete" if parts.len() == 2 => complete(num(1)? as usize),
        "bipartite" if parts.len() == 4 => gen_bipartite(num(1)? as usize, num(2)? as usize, num(3)?, seed)?,
        "hard" if parts.len() == 4 => {
            let hs = HardInstanceSpec::new(num(1)? as u64, num(2)? as u64, parts[3].parse()?, seed);
            hs.validate()?;
            gen_hard(&hs)?.0
        }
        _ => return Err(bad()),
    };
    Ok(BenchInstance {
        name: spec.to_string(),
        graph,
    })
}

fn cmd_bench(a: &BenchArgs) -> Result<(), CliError> {
    let instances = a
        .graphs
        .iter()
        .map(|s| parse_graph(s, Seed(a.est.seed)))
        .collect::<Result<Vec<_>, _>>()?;
    let algorithms = a
        .algorithms
        .iter()
        .map(|s| s.parse::<AlgorithmId>())
        .collect::<Result<Vec<_>, _>>()?;
    let cfg = a.est.config();
    cfg.validate()?;
    let seeds: Vec<u64> = (a.est.seed..a.est.seed + a.trials).collect();
    let rows = bench(&instances, &algorithms, &seeds, &cfg);
    let mut w = csv::Writer::from_writer(sink(a.out.as_deref())?);
    for r in &rows {
        w.serialize(r).map_err(io::Error::from)?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_distinguish(a: &DistinguishArgs) -> Result<(), CliError> {
    let algorithm: AlgorithmId = a.algorithm.parse()?;
    let spec = HardInstanceSpec::new(a.m, a.t, Flavor::Yes, Seed(a.est.seed));
    let report = run_distinguisher(&spec, algorithm, &a.est.config(), a.trials)?;
    let mut w = csv::Writer::from_writer(sink(a.out.as_deref())?);
    for r in &report.rows {
        w.serialize(r).map_err(io::Error::from)?;
    }
    w.flush()?;
    eprintln!(
        "accuracy {:.3} (yes {:.3}, no {:.3}); median ee queries yes {} no {}",
        report.accuracy,
        report.yes.accuracy,
        report.no.accuracy,
        report.yes.ee_queries.map_or(0.0, |q| q.p50),
        report.no.ee_queries.map_or(0.0, |q| q.p50),
    );
    Ok(())
}

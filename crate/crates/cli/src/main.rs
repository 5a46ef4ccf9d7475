use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fracsub::analysis::Bandwidth;
use fracsub::error::StageExt;
use fracsub::io::{ingest_csv, series_to_csv};
use fracsub::kv::KvMap;
use fracsub::{
    run_analysis, run_monte_carlo, simulate_model, AnalysisConfig, Error, ErrorKind, InputKind,
    McSpec, Result, SimSpec, Stage, SubspacePartition,
};

#[derive(Parser)]
#[command(name = "fracsub", version, about = "Fractional cointegrating subspace estimation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate cointegrating subspaces, memory parameters and the test for one data set.
    Analyze(AnalyzeArgs),
    /// Simulate the common-components model and write the series as CSV.
    Simulate(SimulateArgs),
    /// Run a Monte Carlo experiment described by a spec file.
    Montecarlo(MonteCarloArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// `key = value` configuration file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV file, one row per time point.
    #[arg(long)]
    input: Option<PathBuf>,
    /// `levels` (difference p − 1 times first) or `stationary`.
    #[arg(long, value_parser = parse_with::<InputKind>)]
    kind: Option<InputKind>,
    /// Taper order.
    #[arg(long)]
    p: Option<usize>,
    /// Averaged-periodogram bandwidth (default q + 4).
    #[arg(long)]
    m: Option<usize>,
    /// GSE bandwidth: an integer or `auto` for ⌊n^0.6⌋.
    #[arg(long, value_parser = parse_with::<Bandwidth>)]
    mn: Option<Bandwidth>,
    #[arg(long, allow_hyphen_values = true)]
    delta1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    delta2: Option<f64>,
    /// Test level.
    #[arg(long)]
    alpha: Option<f64>,
    /// Identification threshold constant.
    #[arg(long = "C")]
    c: Option<f64>,
    /// Identification threshold exponent.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Use the lowest frequencies for the GSE as well.
    #[arg(long)]
    no_omit_low: bool,
    /// Fixed partition `a0,a1,...`; skips identification.
    #[arg(long, value_parser = parse_with::<SubspacePartitionArg>)]
    partition: Option<SubspacePartitionArg>,
    /// Estimate memory of each input column only (allows a single series).
    #[arg(long)]
    gse_only: bool,
    /// Permit m ≤ q + 3.
    #[arg(long)]
    allow_small_m: bool,
    /// Guess of the smallest memory gap, checked against the bandwidth.
    #[arg(long)]
    gap_guess: Option<f64>,
    /// Report JSON file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for report.json plus CSV tables.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Clone)]
struct SubspacePartitionArg(SubspacePartition);

impl std::str::FromStr for SubspacePartitionArg {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SubspacePartition::parse(s).map(SubspacePartitionArg)
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// `key = value` simulation spec; flags override its entries.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Group sizes `a0,a1,...`.
    #[arg(long)]
    partition: Option<String>,
    /// Memory parameters `d0,d1,...`, strictly decreasing.
    #[arg(long, allow_hyphen_values = true)]
    d: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    burn_in: Option<usize>,
    /// Seed of the random mixing matrix.
    #[arg(long)]
    mixing_seed: Option<u64>,
    /// Explicit mixing matrix, rows separated by `;`.
    #[arg(long, allow_hyphen_values = true)]
    mixing_matrix: Option<String>,
    /// Innovation covariance, rows separated by `;`.
    #[arg(long, allow_hyphen_values = true)]
    innovation_cov: Option<String>,
    /// Emit levels (p − 1 cumulative sums) instead of the stationary series.
    #[arg(long)]
    levels: bool,
    /// Output CSV (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MonteCarloArgs {
    /// `key = value` experiment spec.
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    reps: Option<usize>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: available parallelism). Results do not depend on it.
    #[arg(long)]
    workers: Option<usize>,
    /// Summary JSON file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_with<T: std::str::FromStr<Err = Error>>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn read_kv(path: &Path) -> Result<KvMap> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
    KvMap::parse(&text)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => Ok(fs::write(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn analyze(args: AnalyzeArgs) -> Result<()> {
    let file = match &args.config {
        Some(path) => AnalysisConfig::from_kv(&read_kv(path)?)?,
        None => AnalysisConfig::default(),
    };
    let flags = AnalysisConfig {
        input_path: args.input,
        input_kind: args.kind,
        p: args.p,
        m: args.m,
        m_n: args.mn,
        delta1: args.delta1,
        delta2: args.delta2,
        alpha: args.alpha,
        c: args.c,
        epsilon: args.epsilon,
        omit_low: args.no_omit_low.then_some(false),
        partition_override: args.partition.map(|p| p.0),
        output_path: args.out,
        gse_only: args.gse_only.then_some(true),
        allow_small_m: args.allow_small_m.then_some(true),
        gap_guess: args.gap_guess,
    };
    let config = flags.over(file);
    let input = config
        .input_path
        .clone()
        .ok_or_else(|| Error::InvalidConfig("no input file given (--input or `input` key)".into()))?;
    let data = ingest_csv(&input, config.input_kind.unwrap_or_default()).stage(Stage::Ingest)?;
    let report = run_analysis(&config, &data.series)?;
    if let Some(dir) = &args.out_dir {
        report.write_dir(dir)?;
    }
    if config.output_path.is_some() || args.out_dir.is_none() {
        emit(config.output_path.as_deref(), &report.to_json())?;
    }
    Ok(())
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let mut kv = match &args.spec {
        Some(path) => read_kv(path)?,
        None => KvMap::default(),
    };
    let flags: [(&str, Option<String>); 9] = [
        ("partition", args.partition),
        ("d", args.d),
        ("n", args.n.map(|v| v.to_string())),
        ("p", args.p.map(|v| v.to_string())),
        ("seed", args.seed.map(|v| v.to_string())),
        ("burn_in", args.burn_in.map(|v| v.to_string())),
        ("mixing_seed", args.mixing_seed.map(|v| v.to_string())),
        ("innovation_cov", args.innovation_cov),
        ("emit_levels", args.levels.then(|| "true".to_string())),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            kv.insert(key, v);
        }
    }
    if let Some(a) = args.mixing_matrix {
        kv.insert("mixing", "explicit");
        kv.insert("mixing_matrix", a);
    } else if args.mixing_seed.is_some() {
        kv.insert("mixing", "random");
    }
    let spec = SimSpec::from_kv(&kv)?;
    let sim = simulate_model(&spec).stage(Stage::Simulation)?;
    let header: Vec<String> = (1..=spec.q()).map(|c| format!("y{c}")).collect();
    emit(args.out.as_deref(), &series_to_csv(&sim.series, Some(&header)))
}

fn montecarlo(args: MonteCarloArgs) -> Result<()> {
    let mut kv = read_kv(&args.spec)?;
    if let Some(r) = args.reps {
        kv.insert("reps", r);
    }
    if let Some(s) = args.seed {
        kv.insert("master_seed", s);
    }
    let workers = args.workers.or(kv.get("workers")?).unwrap_or_else(|| {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    });
    kv.insert("workers", workers);
    let spec = McSpec::from_kv(&kv)?;
    let summary = run_monte_carlo(&spec)?;
    for point in summary.grid.iter().filter(|g| !g.complete) {
        eprintln!(
            "warning: n = {}: {} of {} replications failed",
            point.n,
            point.failures.len(),
            spec.reps
        );
    }
    emit(args.out.as_deref(), &summary.to_json())
}

fn exit_code(err: &Error) -> u8 {
    match err.kind() {
        ErrorKind::Config => 2,
        ErrorKind::Data => 3,
        ErrorKind::Numeric => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Simulate(a) => simulate(a),
        Command::Montecarlo(a) => montecarlo(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

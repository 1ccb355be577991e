use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use causeway::dag::parse_dot;
use causeway::discovery::{run_lingam, run_pc, DEFAULT_ALPHA};
use causeway::identify::{identify_effect_with, IdentifyOptions};
use causeway::phenomena::ohm::{generate_ohm_dataset, OhmConstants, OhmRanges};
use causeway::phenomena::quantum::build_entanglement_dataset;
use causeway::phenomena::tides::{read_tide_dataset, synthetic_tide_fixture, TideModel};
use causeway::pipeline::{
    read_summary_csv, render_summary_table, run_pipeline, DatasetSpec, DiscoverAlgo, EffectSpec, ModelSpec,
    PipelineConfig, RefuteSpec, Report,
};
use causeway::DataTable;

#[derive(Parser)]
#[command(
    name = "causeway",
    version,
    about = "Model, identify, estimate and refute causal effects"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Learn a graph from a CSV file and print it as DOT.
    Discover {
        #[arg(long, value_enum)]
        algo: Algo,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
        /// Columns to use, comma separated; all columns by default.
        #[arg(long, value_delimiter = ',')]
        columns: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the estimands identified for a treatment and outcome.
    Identify {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        effect: EffectArgs,
        #[arg(long, value_delimiter = ',')]
        unobserved: Vec<String>,
        #[arg(long)]
        mediation: bool,
    },
    /// Estimate a causal effect from data and a graph.
    Estimate(EstimateArgs),
    /// Estimate, then run refuters against the estimate.
    Refute {
        #[command(flatten)]
        base: EstimateArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        refuters: Vec<String>,
        #[arg(long, default_value_t = 100)]
        k: usize,
        #[arg(long, default_value_t = 0.8)]
        fraction: f64,
    },
    /// Write a generated dataset.
    Simulate {
        #[arg(value_enum)]
        kind: SimKind,
        #[arg(long, default_value_t = 10_000)]
        rows: usize,
        #[arg(long, default_value_t = 20)]
        states: usize,
        #[arg(long, default_value_t = 100)]
        shots: usize,
        #[arg(long, default_value_t = 365)]
        days: u32,
        #[arg(long)]
        seed: u64,
        /// Output file; for tides, a directory receiving the three raw files
        /// and the joined `tides.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Combine saved CSV summaries into one aligned table.
    Report {
        #[arg(long = "in", required = true, num_args = 1..)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every stage described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Directory receiving `report.txt` and `report.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Pc,
    Lingam,
}

impl From<Algo> for DiscoverAlgo {
    fn from(a: Algo) -> Self {
        match a {
            Algo::Pc => DiscoverAlgo::Pc,
            Algo::Lingam => DiscoverAlgo::Lingam,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SimKind {
    Ohm,
    Quantum,
    Tides,
}

#[derive(Clone, Copy, ValueEnum)]
enum EstimatorArg {
    Backdoor,
    Iv,
    Frontdoor,
    Mediation,
}

impl EstimatorArg {
    fn name(self) -> &'static str {
        match self {
            EstimatorArg::Backdoor => "backdoor",
            EstimatorArg::Iv => "iv",
            EstimatorArg::Frontdoor => "frontdoor",
            EstimatorArg::Mediation => "mediation",
        }
    }
}

#[derive(Args)]
struct EffectArgs {
    #[arg(long)]
    treatment: String,
    #[arg(long)]
    outcome: String,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, conflicts_with = "discover")]
    graph: Option<PathBuf>,
    #[arg(long, value_enum)]
    discover: Option<Algo>,
    #[arg(long)]
    alpha: Option<f64>,
    #[command(flatten)]
    effect: EffectArgs,
    #[arg(long, value_enum)]
    estimator: Option<EstimatorArg>,
    #[arg(long, value_delimiter = ',')]
    unobserved: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Directory receiving `report.txt` and `report.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure(format!("{}: {e}", p.display()))),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn path_str(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

fn config_for(a: &EstimateArgs, refute: Option<RefuteSpec>) -> Result<PipelineConfig, Failure> {
    let model = match (&a.graph, a.discover) {
        (Some(g), None) => ModelSpec {
            graph: Some(path_str(g)),
            ..ModelSpec::default()
        },
        (None, Some(algo)) => ModelSpec {
            discover: Some(algo.into()),
            alpha: a.alpha,
            ..ModelSpec::default()
        },
        _ => unreachable!("checked by the caller"),
    };
    let cfg = PipelineConfig {
        name: None,
        seed: a.seed,
        dataset: DatasetSpec::Csv {
            path: path_str(&a.input),
        },
        model: ModelSpec {
            unobserved: a.unobserved.clone(),
            ..model
        },
        effect: EffectSpec {
            treatment: a.effect.treatment.clone(),
            outcome: a.effect.outcome.clone(),
            estimator: a.estimator.map(|e| e.name().to_string()),
            mediation: matches!(a.estimator, Some(EstimatorArg::Mediation)),
            do_draws: None,
        },
        refute,
        base_dir: PathBuf::from("."),
    };
    cfg.validate()?;
    Ok(cfg)
}

fn write_report(report: &Report, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            fs::write(dir.join("report.txt"), &report.text)?;
            fs::write(dir.join("report.csv"), report.csv())?;
            Ok(())
        }
        None => emit(None, &report.text),
    }
}

fn finish(report: &Report, out: Option<&Path>) -> Result<(), Failure> {
    write_report(report, out)?;
    match &report.failure {
        Some(f) => Err(Failure(f.to_string())),
        None => Ok(()),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Discover {
            algo,
            input,
            alpha,
            columns,
            out,
        } => {
            let data = DataTable::from_csv_path(&input).map_err(|e| Failure(format!("{}: {e}", input.display())))?;
            let data = if columns.is_empty() {
                data
            } else {
                data.select_columns(&columns)?
            };
            let dot = match algo {
                Algo::Pc => run_pc(&data, alpha).to_dot(),
                Algo::Lingam => causeway::dag::serialize_dot(&run_lingam(&data)?),
            };
            emit(out.as_deref(), &dot)
        }
        Command::Identify {
            graph,
            effect,
            unobserved,
            mediation,
        } => {
            let text = fs::read_to_string(&graph).map_err(|e| Failure(format!("{}: {e}", graph.display())))?;
            let g = parse_dot(&text)?;
            let opts = IdentifyOptions {
                unobserved: unobserved.into_iter().collect::<BTreeSet<_>>(),
                include_mediation: mediation,
            };
            let id = identify_effect_with(&g, &effect.treatment, &effect.outcome, &opts)?;
            emit(None, &format!("{id}"))
        }
        Command::Estimate(a) => {
            let cfg = config_for(&a, None)?;
            finish(&run_pipeline(&cfg), a.out.as_deref())
        }
        Command::Refute {
            base,
            refuters,
            k,
            fraction,
        } => {
            let spec = RefuteSpec {
                methods: refuters,
                k,
                fraction,
            };
            let cfg = config_for(&base, Some(spec))?;
            finish(&run_pipeline(&cfg), base.out.as_deref())
        }
        Command::Simulate {
            kind,
            rows,
            states,
            shots,
            days,
            seed,
            out,
        } => match kind {
            SimKind::Ohm => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let t = generate_ohm_dataset(rows, &OhmRanges::default(), &OhmConstants::default(), &mut rng)?;
                emit(out.as_deref(), &t.to_csv_string())
            }
            SimKind::Quantum => emit(
                out.as_deref(),
                &build_entanglement_dataset(states, shots, seed).to_csv_string(),
            ),
            SimKind::Tides => {
                let dir = out.ok_or_else(|| Failure("simulate tides needs --out <directory>".into()))?;
                let fx = synthetic_tide_fixture(&TideModel::default(), days, seed);
                fs::create_dir_all(&dir)?;
                fs::write(dir.join("earth_sun.csv"), &fx.earth_sun)?;
                fs::write(dir.join("earth_moon.csv"), &fx.earth_moon)?;
                fs::write(dir.join("tide.csv"), &fx.tide)?;
                let joined = read_tide_dataset(fx.earth_sun.as_bytes(), fx.earth_moon.as_bytes(), fx.tide.as_bytes())?;
                fs::write(dir.join("tides.csv"), joined.table.to_csv_string())?;
                Ok(())
            }
        },
        Command::Report { inputs, out } => {
            let mut rows = Vec::new();
            for p in &inputs {
                let f = fs::File::open(p).map_err(|e| Failure(format!("{}: {e}", p.display())))?;
                rows.extend(read_summary_csv(f).map_err(|e| Failure(format!("{}: {e}", p.display())))?);
            }
            emit(out.as_deref(), &render_summary_table(&rows))
        }
        Command::Run { config, out } => {
            let cfg = PipelineConfig::from_path(&config)?;
            finish(&run_pipeline(&cfg), out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Command::Estimate(a) | Command::Refute { base: a, .. } = &cli.command {
        if a.graph.is_none() && a.discover.is_none() {
            use clap::CommandFactory;
            Cli::command()
                .error(
                    clap::error::ErrorKind::MissingRequiredArgument,
                    "one of --graph or --discover is required",
                )
                .exit();
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

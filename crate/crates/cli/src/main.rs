use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use doleans::experiments::{reproduce, ReproduceOptions};
use doleans::suites::{self, SuiteReport};
use doleans::{
    evaluate_condition_with, jacod_functional, log_stoch_exponential, sde_residual,
    theorem1_functional, ConditionKind, ConditionSpec, EvaluationOptions, JumpPath, ModelKind,
    PredictableControl, ProcessModel, Sampling, SeedSpec,
};
use serde_json::{json, Value};

const CONTROL_HELP: &str = "\
Control process for theorem1. Accepted forms:
  <a> or const:<a>                      constant a in [0, 1]
  indicator:<t0>                        0 on [0, t0], 1 afterwards
  piecewise:<b1,b2,..>|<v0,v1,v2,..>    v0 up to b1, v1 on (b1, b2], ...
Controls are left-continuous: a jump at a break sees the earlier value.";

#[derive(Parser)]
#[command(
    name = "doleans",
    version,
    about = "Stochastic exponentials of jump martingales and their integrability conditions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw paths from a model.
    Sample(SampleArgs),
    /// Evaluate the stochastic exponential and the Jacod functional along one path.
    Exponential(ExponentialArgs),
    /// Evaluate an integrability condition for a model.
    Condition(ConditionArgs),
    /// Run the full checks for one of the three worked examples.
    Reproduce(ReproduceArgs),
    /// Run the grid and random suites for the scalar inequalities.
    Lemmas(LemmaArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Independent random streams; results depend on it, not on the thread count.
    #[arg(long, default_value_t = 64)]
    streams: usize,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long, value_parser = parse_model)]
    model: ModelKind,
    #[arg(long, default_value_t = 10)]
    n: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ExponentialArgs {
    /// Path document in JSON; without it a path is drawn from --model.
    #[arg(long, conflicts_with = "model")]
    path: Option<PathBuf>,
    #[arg(long, value_parser = parse_model, required_unless_present = "path")]
    model: Option<ModelKind>,
    /// Evaluation time; defaults to the horizon.
    #[arg(long)]
    t: Option<f64>,
    #[arg(long, help = CONTROL_HELP)]
    a: Option<String>,
    #[arg(long, requires = "a")]
    eps: Option<f64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ConditionArgs {
    #[arg(long, value_parser = parse_model)]
    model: ModelKind,
    /// jacod, protter-shimbo, lepingle-memin, theorem1 or lemma1.
    #[arg(long, value_parser = parse_kind)]
    kind: ConditionKind,
    #[arg(long, help = CONTROL_HELP)]
    a: Option<String>,
    /// ε in (0, 1) for theorem1.
    #[arg(long)]
    eps: Option<f64>,
    /// Monte Carlo paths; 0 skips Monte Carlo.
    #[arg(long, default_value_t = 100_000)]
    n: usize,
    /// Comma-separated truncation levels replacing the default ladder.
    #[arg(long, value_delimiter = ',')]
    levels: Option<Vec<f64>>,
    /// Monte Carlo draws: straight from the driver laws, or from a
    /// 10% uniform mixture on bounded supports with likelihood weights.
    #[arg(long, value_enum, default_value = "defensive")]
    sampling: SamplingArg,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ReproduceArgs {
    #[arg(value_parser = clap::value_parser!(u8).range(1..=3))]
    example: u8,
    #[arg(long, default_value_t = 1_000_000)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 64)]
    streams: usize,
    /// Directory receiving example<k>.json and example<k>.csv.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SamplingArg {
    Direct,
    Defensive,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mutant {
    FlipIndicator,
}

#[derive(Args)]
struct LemmaArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, hide = true)]
    mutant: Option<Mutant>,
}

fn parse_model(s: &str) -> std::result::Result<ModelKind, String> {
    s.parse().map_err(|e: doleans::Error| e.to_string())
}

fn parse_kind(s: &str) -> std::result::Result<ConditionKind, String> {
    s.parse().map_err(|e: doleans::Error| e.to_string())
}

fn usage_error(msg: impl std::fmt::Display) -> ! {
    Cli::command()
        .error(clap::error::ErrorKind::ArgumentConflict, msg)
        .exit()
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}

fn seeds(seed: u64, streams: usize) -> Result<SeedSpec> {
    Ok(SeedSpec::new(seed, streams)?)
}

fn control(a: &str) -> PredictableControl {
    a.parse()
        .unwrap_or_else(|e: doleans::Error| usage_error(format!("--a: {e}")))
}

fn cmd_sample(args: &SampleArgs) -> Result<u8> {
    let m = args.model.build::<f64>();
    let paths: Vec<(JumpPath, bool)> = (0..args.n)
        .map(|i| {
            let s = m.sample_seeded(args.common.seed, i as u64);
            (s.path, s.capped)
        })
        .collect();
    let text = match args.common.format {
        Format::Json => pretty(&json!({
            "model": args.model.to_string(),
            "seed": args.common.seed,
            "paths": paths
                .iter()
                .map(|(p, capped)| {
                    let mut v = serde_json::to_value(p.to_document()).expect("path serializes");
                    v["capped"] = json!(capped);
                    v
                })
                .collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let mut s = String::from("path,horizon,t,dm\n");
            for (i, (p, _)) in paths.iter().enumerate() {
                for j in p.jumps() {
                    s.push_str(&format!("{i},{:e},{:e},{:e}\n", p.horizon(), j.t, j.dm));
                }
            }
            s
        }
    };
    emit(args.common.out.as_deref(), &text)?;
    Ok(0)
}

fn cmd_exponential(args: &ExponentialArgs) -> Result<u8> {
    let path = match (&args.path, args.model) {
        (Some(file), _) => {
            let text =
                fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
            JumpPath::from_json(&text)?
        }
        (None, Some(model)) => model.build::<f64>().sample_seeded(args.common.seed, 0).path,
        (None, None) => usage_error("either --path or --model is required"),
    };
    let t = args.t.unwrap_or(path.horizon());
    let log_e = log_stoch_exponential(&path, t)?;
    let jacod = jacod_functional(&path, t)?.log_value;
    let residual = if path.cont_qv().is_zero() {
        Some(sde_residual(&path, t)?)
    } else {
        None
    };
    let theorem1 = match &args.a {
        Some(a) => {
            let spec = ConditionSpec::theorem1(control(a), args.eps)?;
            let eps = spec.epsilon().expect("theorem1 carries epsilon");
            Some(json!({
                "condition": spec.to_string(),
                "log_value": theorem1_functional(&path, spec.control().expect("theorem1 carries a control"), eps, t)?.log_value,
            }))
        }
        None => None,
    };
    let text = match args.common.format {
        Format::Json => pretty(&json!({
            "t": t,
            "horizon": path.horizon(),
            "log_exponential": log_e,
            "exponential": log_e.exp(),
            "jacod_log_value": jacod,
            "sde_residual": residual,
            "theorem1": theorem1,
        })),
        Format::Csv => {
            let mut s =
                String::from("t,log_exponential,exponential,jacod_log_value,sde_residual\n");
            s.push_str(&format!(
                "{t:e},{log_e:e},{:e},{jacod:e},{}\n",
                log_e.exp(),
                residual.map(|r| format!("{r:e}")).unwrap_or_default()
            ));
            s
        }
    };
    emit(args.common.out.as_deref(), &text)?;
    Ok(0)
}

fn cmd_condition(args: &ConditionArgs) -> Result<u8> {
    let theorem1 = args.kind == ConditionKind::Theorem1;
    if theorem1 && args.a.is_none() {
        usage_error("--kind theorem1 needs --a");
    }
    if !theorem1 && (args.a.is_some() || args.eps.is_some()) {
        usage_error(format!(
            "--a and --eps only apply to --kind theorem1, not {}",
            args.kind
        ));
    }
    let spec = ConditionSpec::new(args.kind, args.a.as_deref().map(control), args.eps)
        .unwrap_or_else(|e| usage_error(e));
    let mut opts = EvaluationOptions::new(seeds(args.common.seed, args.common.streams)?, args.n);
    opts.levels = args.levels.clone();
    if let SamplingArg::Direct = args.sampling {
        opts.sampling = Sampling::Direct;
    }
    let model = args.model.build::<f64>();
    let report = evaluate_condition_with(&model, &spec, &opts)?;
    let text = match args.common.format {
        Format::Json => {
            let mut v = serde_json::to_value(&report).expect("report serializes");
            v["model"] = json!(args.model.to_string());
            v["seed"] = json!(args.common.seed);
            v["streams"] = json!(args.common.streams);
            if args.n >= 2 {
                v["sampling"] = serde_json::to_value(opts.sampling).expect("sampling serializes");
            }
            pretty(&v)
        }
        Format::Csv => report.to_csv(),
    };
    emit(args.common.out.as_deref(), &text)?;
    Ok(0)
}

fn cmd_reproduce(args: &ReproduceArgs) -> Result<u8> {
    let opts = ReproduceOptions {
        seeds: seeds(args.seed, args.streams)?,
        n: args.n,
    };
    let report = reproduce(args.example, &opts)?;
    let json_text = pretty(&serde_json::to_value(&report).expect("report serializes"));
    match &args.out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            let stem = format!("example{}", args.example);
            emit(Some(&dir.join(format!("{stem}.json"))), &json_text)?;
            emit(Some(&dir.join(format!("{stem}.csv"))), &report.to_csv())?;
        }
        None => emit(None, &json_text)?,
    }
    for c in &report.claims {
        eprintln!(
            "{:<40} expected {:<12} got {:<12} {}",
            c.label,
            c.expected.to_string(),
            c.report.verdict.to_string(),
            if c.matches { "ok" } else { "MISMATCH" }
        );
    }
    let mismatches = report.mismatches();
    if mismatches.is_empty() {
        eprintln!("example {}: all checks match", args.example);
        Ok(0)
    } else {
        eprintln!(
            "example {}: {} mismatch(es)",
            args.example,
            mismatches.len()
        );
        for m in &mismatches {
            eprintln!("  - {m}");
        }
        Ok(1)
    }
}

fn cmd_lemmas(args: &LemmaArgs) -> Result<u8> {
    let reports: Vec<SuiteReport> = match args.mutant {
        None => suites::run_all(doleans::lemma2_lhs, args.seed)?,
        Some(Mutant::FlipIndicator) => {
            suites::run_all(suites::lemma2_flipped_indicator, args.seed)?
        }
    };
    emit(
        args.out.as_deref(),
        &pretty(&serde_json::to_value(&reports).expect("suites serialize")),
    )?;
    let mut status = 0;
    for r in &reports {
        match r.first_violation {
            None => eprintln!(
                "{}: {} checked, min {:e}, ok",
                r.name, r.checked, r.min_value
            ),
            Some([p, q, v]) => {
                status = 1;
                eprintln!(
                    "{}: {} of {} violate; first at ({p}, {q}) with value {v:e}",
                    r.name, r.violations, r.checked
                );
            }
        }
    }
    Ok(status)
}

fn configure_threads() -> Result<()> {
    let Ok(s) = std::env::var("DOLEANS_THREADS") else {
        return Ok(());
    };
    let n: usize = s
        .trim()
        .parse()
        .with_context(|| format!("DOLEANS_THREADS={s}"))?;
    if n == 0 {
        bail!("DOLEANS_THREADS must be at least 1");
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()?;
    Ok(())
}

fn run(cli: &Cli) -> Result<u8> {
    configure_threads()?;
    match &cli.command {
        Command::Sample(a) => cmd_sample(a),
        Command::Exponential(a) => cmd_exponential(a),
        Command::Condition(a) => cmd_condition(a),
        Command::Reproduce(a) => cmd_reproduce(a),
        Command::Lemmas(a) => cmd_lemmas(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use ietlab::dynamics::DiagnosticConfig;
use ietlab::exec::Execution;
use ietlab::experiment::{
    diagnose, run_alpha_sweep, run_mixed_sign_sweep, run_oracle_check, AlphaSource,
    ExperimentConfig, OracleConfig, SweepReport,
};
use ietlab::io::{config_hash, write_trace_csv, CsvHeader, SpecJson};
use ietlab::numerics::{Fixed, NumericsConfig, Rational, Scalar};
use ietlab::surface::{
    first_return, flow_trace, horizontal_cylinders, is_square_tiled, moduli_commensurable,
    return_time, Direction, StackedSurface,
};

#[derive(Parser)]
#[command(
    name = "ietlab",
    version,
    about = "Experiments on IETs composed with rotations"
)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample α uniformly and diagnose S_α for each sample.
    Sweep(SweepArgs),
    /// Same as `sweep` for coefficients of either sign (Σc ≠ 0).
    MixedSweep(SweepArgs),
    /// Compare surface first returns with composed IETs on random configurations.
    OracleCheck(OracleArgs),
    /// Diagnose S_α for a single α.
    Diagnose(DiagnoseArgs),
    /// Describe the stacked surface of a positive spec.
    SurfaceInfo(SurfaceArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendArg {
    Rational,
    Fixed,
}

#[derive(Args, Clone)]
struct Common {
    /// Composition spec: {"iets": [{"lengths": [...], "permutation": [...]}], "coefficients": [...]}.
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fixed-point fraction bits; also the bit length of sampled α.
    #[arg(long, default_value_t = 256)]
    precision: u32,
    #[arg(long, value_enum, default_value_t = BackendArg::Fixed)]
    backend: BackendArg,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Leave the generation time out of the output.
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Args, Clone)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Largest orbit length exponent: the ladder is 2^10 … 2^e.
    #[arg(long, default_value_t = 20)]
    ladder_max: u32,
    /// Use these α values instead of sampling (repeatable).
    #[arg(long = "alpha")]
    alphas: Vec<String>,
    /// Also write the full JSON report here.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct OracleArgs {
    #[arg(long, default_value_t = 100)]
    configs: usize,
    #[arg(long, default_value_t = 1000)]
    starts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 256)]
    precision: u32,
    /// Fixed-point α used for every configuration (default: random).
    #[arg(long)]
    fixed_alpha: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct DiagnoseArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    alpha: String,
    #[arg(long, default_value_t = 20)]
    ladder_max: u32,
    /// Accept negative coefficients.
    #[arg(long)]
    mixed: bool,
}

#[derive(Args, Clone)]
struct SurfaceArgs {
    #[command(flatten)]
    common: Common,
    /// Flow direction as inverse slope; enables the first-return fields.
    #[arg(long)]
    alpha: Option<String>,
    /// Start on the bottom of the first rectangle.
    #[arg(long, default_value = "0")]
    x0: String,
    /// Write the flow trace from x0 as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    with_threads(cli.threads, || match &cli.command {
        Command::Sweep(args) => dispatch(args.common.backend, |b| b.sweep(args, false)),
        Command::MixedSweep(args) => dispatch(args.common.backend, |b| b.sweep(args, true)),
        Command::OracleCheck(args) => oracle(args),
        Command::Diagnose(args) => dispatch(args.common.backend, |b| b.diagnose(args)),
        Command::SurfaceInfo(args) => dispatch(args.common.backend, |b| b.surface(args)),
    })
}

#[cfg(feature = "parallel")]
fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}

#[cfg(not(feature = "parallel"))]
fn with_threads<R>(_threads: Option<usize>, f: impl FnOnce() -> R) -> R {
    f()
}

/// Runs a backend-generic command with the chosen scalar type.
trait Run {
    fn sweep(&self, args: &SweepArgs, mixed: bool) -> Result<()>;
    fn diagnose(&self, args: &DiagnoseArgs) -> Result<()>;
    fn surface(&self, args: &SurfaceArgs) -> Result<()>;
}

struct Backend<S>(std::marker::PhantomData<S>);

fn dispatch(backend: BackendArg, f: impl FnOnce(&dyn Run) -> Result<()>) -> Result<()> {
    match backend {
        BackendArg::Rational => f(&Backend::<Rational>(Default::default())),
        BackendArg::Fixed => f(&Backend::<Fixed>(Default::default())),
    }
}

fn numerics(precision: u32) -> Result<NumericsConfig> {
    NumericsConfig::new(precision).context("bad --precision")
}

fn read_spec(path: &Path) -> Result<SpecJson> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    SpecJson::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn timestamp(common: &Common) -> Option<String> {
    if common.no_timestamp {
        return None;
    }
    let secs = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    Some(format!("unix {secs}"))
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => fs::write(path, bytes).with_context(|| format!("writing {}", path.display())),
        None => Ok(io::stdout().lock().write_all(bytes)?),
    }
}

fn emit_json(out: Option<&Path>, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit(out, text.as_bytes())
}

impl<S: Scalar> Backend<S> {
    fn parse(text: &str, cfg: &NumericsConfig) -> Result<S> {
        S::parse(text, cfg).with_context(|| format!("bad number {text:?}"))
    }
}

impl<S: Scalar> Run for Backend<S> {
    fn sweep(&self, args: &SweepArgs, mixed: bool) -> Result<()> {
        let common = &args.common;
        let cfg = numerics(common.precision)?;
        let spec = read_spec(&common.spec)?.to_spec::<S>(&cfg, mixed)?;
        let mut config = ExperimentConfig::new(spec, args.samples, common.seed, cfg);
        config.diagnostic = DiagnosticConfig::default().with_ladder_max(args.ladder_max);
        if !args.alphas.is_empty() {
            config.alphas = AlphaSource::Given(args.alphas.clone());
        }
        let exec = Execution::default();
        let report: SweepReport = if mixed {
            run_mixed_sign_sweep(&config, exec)?
        } else {
            run_alpha_sweep(&config, exec)?
        };
        let mut csv = Vec::new();
        report.write_csv(&mut csv, timestamp(common))?;
        emit(common.out.as_deref(), &csv)?;
        if let Some(path) = &args.json {
            emit_json(Some(path), &serde_json::to_value(&report)?)?;
        }
        let a = &report.aggregates;
        eprintln!(
            "{} samples, {} nonconvergent, median D* {:.3e}, median spread {:.3e}, median beta {:.3}",
            report.rows.len(),
            a.nonconvergent,
            a.dstar.median,
            a.spread.median,
            a.beta_hat.median
        );
        Ok(())
    }

    fn diagnose(&self, args: &DiagnoseArgs) -> Result<()> {
        let common = &args.common;
        let cfg = numerics(common.precision)?;
        let spec_json = read_spec(&common.spec)?;
        let spec = spec_json.to_spec::<S>(&cfg, args.mixed)?;
        let alpha = Self::parse(&args.alpha, &cfg)?;
        let diagnostic = DiagnosticConfig::default().with_ladder_max(args.ladder_max);
        let diagnosis = diagnose(&spec, &alpha, &diagnostic, Execution::default())?;
        let hash = config_hash(&json!({
            "kind": "diagnose", "spec": spec_json, "alpha": args.alpha,
            "backend": S::BACKEND, "precision": common.precision, "diagnostic": diagnostic,
        }));
        emit_json(
            common.out.as_deref(),
            &json!({
                "config_hash": hash,
                "seed": common.seed,
                "backend": S::BACKEND,
                "precision": common.precision,
                "generated": timestamp(common),
                "diagnosis": diagnosis,
            }),
        )
    }

    fn surface(&self, args: &SurfaceArgs) -> Result<()> {
        let common = &args.common;
        let cfg = numerics(common.precision)?;
        let spec_json = read_spec(&common.spec)?;
        let surface: StackedSurface<S> = spec_json.to_surface(&cfg)?;
        let hash = config_hash(&json!({
            "kind": "surface-info", "spec": spec_json, "alpha": args.alpha, "x0": args.x0,
            "backend": S::BACKEND, "precision": common.precision,
        }));
        let cylinders: Vec<_> = horizontal_cylinders(&surface)
            .iter()
            .map(|c| {
                json!({
                    "height": c.height.to_string(),
                    "circumference": c.circumference.to_string(),
                    "modulus": c.modulus.to_string(),
                    "declared_incommensurable": c.declared_incommensurable,
                })
            })
            .collect();
        let square_tiled = match is_square_tiled(&surface) {
            Ok(v) => json!(v),
            Err(e) => json!({ "error": e.to_string() }),
        };
        let commensurable = match moduli_commensurable(&horizontal_cylinders(&surface)) {
            Ok(v) => json!(v),
            Err(e) => json!({ "error": e.to_string() }),
        };
        let mut info = json!({
            "config_hash": hash,
            "seed": common.seed,
            "backend": S::BACKEND,
            "precision": common.precision,
            "generated": timestamp(common),
            "rectangles": surface.len(),
            "heights": surface.heights().iter().map(ToString::to_string).collect::<Vec<_>>(),
            "area": surface.area().to_string(),
            "square_tiled": square_tiled,
            "cylinders": cylinders,
            "moduli_commensurable": commensurable,
        });
        if let Some(alpha) = &args.alpha {
            let dir = Direction::new(Self::parse(alpha, &cfg)?)?;
            let x0 = Self::parse(&args.x0, &cfg)?;
            let time = return_time(&surface, &dir);
            info["return_time"] = json!({
                "rise": time.rise.to_string(),
                "speed_squared": time.speed_squared.to_string(),
                "elapsed": time.elapsed.as_ref().map(ToString::to_string),
                "approx": time.to_f64(),
            });
            info["first_return"] = match first_return(&surface, &dir, &x0) {
                Ok(fr) => {
                    json!({ "x0": x0.to_string(), "x1": fr.x1.to_string(), "rectangles": fr.rectangles })
                }
                Err(e) => json!({ "x0": x0.to_string(), "error": e.to_string() }),
            };
            if let Some(path) = &args.trace {
                let trace = flow_trace(&surface, &dir, &x0)?;
                let mut csv = Vec::new();
                CsvHeader {
                    title: "ietlab flow trace".into(),
                    timestamp: timestamp(common),
                    config_hash: info["config_hash"].as_str().unwrap_or_default().to_string(),
                    seed: common.seed,
                    backend: S::BACKEND.to_string(),
                    precision: common.precision,
                }
                .write(&mut csv)?;
                write_trace_csv(&mut csv, &trace)?;
                emit(Some(path), &csv)?;
            }
        } else if args.trace.is_some() {
            bail!("--trace needs --alpha");
        }
        emit_json(common.out.as_deref(), &info)
    }
}

fn oracle(args: &OracleArgs) -> Result<()> {
    let config = OracleConfig {
        configs: args.configs,
        starts: args.starts,
        seed: args.seed,
        numerics: numerics(args.precision)?,
        fixed_alpha: args.fixed_alpha.clone(),
        ..OracleConfig::default()
    };
    let report = run_oracle_check(&config, Execution::default())?;
    let mut value = serde_json::to_value(&report)?;
    value["backend"] = json!("rational+fixed");
    emit_json(args.out.as_deref(), &value)?;
    eprintln!(
        "{}: {} exact and {} fixed-point comparisons, max fixed deviation {:.3e}",
        if report.passed { "PASS" } else { "FAIL" },
        report.rational.comparisons,
        report.fixed.comparisons,
        report.fixed.max_deviation
    );
    if !report.passed {
        bail!("oracle mismatch");
    }
    Ok(())
}

//! Command-line surface: run named scenarios, sweep parameters, and execute
//! the verification suites.
//!
//! Exit codes: 0 success, 2 unknown scenario/suite or bad arguments, 3
//! numerical failure inside a scenario, 1 verification failures.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use qfilab::scenarios::{ScenarioError, ScenarioOutput, ScenarioRegistry};
use qfilab::verify::{self, Suite};

#[derive(Parser)]
#[command(
    name = "qfilab",
    about = "Noisy-clock metrology: Fisher trade-offs, metrological codes, and bounds",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one named scenario and write a JSON or CSV report.
    Run(RunArgs),
    /// Sweep one numeric parameter of a scenario over a grid.
    Sweep(SweepArgs),
    /// Run the module invariant suites.
    Verify(VerifyArgs),
    /// List registered scenarios and their parameters.
    List,
}

#[derive(Args)]
struct CommonArgs {
    /// Scenario name (see `qfilab list`).
    #[arg(long)]
    scenario: String,
    /// Parameter override, repeatable: --param p=0.3
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    /// Output format.
    #[arg(long, default_value = "json", value_parser = ["json", "csv"])]
    format: String,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for randomized components.
    #[arg(long, default_value_t = qfilab::verify::rng::DEFAULT_SEED)]
    seed: u64,
    /// Worker threads for sweeps (QFILAB_THREADS as fallback).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Grid spec: key:lo:hi:steps or key:lo:hi:steps:log
    #[arg(long, value_name = "KEY:LO:HI:STEPS[:log]")]
    sweep: String,
}

#[derive(Args)]
struct VerifyArgs {
    /// Which suite to run.
    #[arg(long, default_value = "all", value_parser = ["core", "codes", "bounds", "lindblad", "all"])]
    suite: String,
    /// Seed for the randomized checks.
    #[arg(long, default_value_t = qfilab::verify::rng::DEFAULT_SEED)]
    seed: u64,
    /// Emit a machine-readable JSON summary instead of text lines.
    #[arg(long)]
    json: bool,
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run(args) => run_command(args),
        Command::Sweep(args) => sweep_command(args),
        Command::Verify(args) => verify_command(args),
        Command::List => list_command(),
    };
    std::process::exit(code);
}

fn parse_params(raw: &[String]) -> anyhow::Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for item in raw {
        let (key, value) = item
            .split_once('=')
            .with_context(|| format!("parameter {item:?} is not KEY=VALUE"))?;
        let value: f64 = value
            .parse()
            .with_context(|| format!("parameter {item:?} has a non-numeric value"))?;
        out.insert(key.trim().to_string(), value);
    }
    Ok(out)
}

fn exit_code_for(err: &ScenarioError) -> i32 {
    match err {
        ScenarioError::UnknownScenario(..)
        | ScenarioError::UnknownParameter(..)
        | ScenarioError::ParameterRange(..) => 2,
        ScenarioError::Numerical { .. } => 3,
    }
}

fn emit(path: &Option<PathBuf>, content: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, content).with_context(|| format!("writing {}", p.display())),
        None => std::io::stdout()
            .write_all(content.as_bytes())
            .context("writing stdout"),
    }
}

fn configure_threads(requested: Option<usize>) {
    let count = requested.or_else(|| {
        std::env::var("QFILAB_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(count) = count {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(count.max(1))
            .build_global();
    }
}

fn run_command(args: RunArgs) -> i32 {
    configure_threads(args.common.threads);
    let registry = ScenarioRegistry::builtin();
    let params = match parse_params(&args.common.params) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e:#}");
            return 2;
        }
    };
    match registry.run(&args.common.scenario, &params) {
        Ok(output) => {
            let text = match args.common.format.as_str() {
                "json" => {
                    let mut v = serde_json::to_value(&output).expect("serializable");
                    v["seed"] = serde_json::json!(args.common.seed);
                    format!("{}\n", serde_json::to_string_pretty(&v).expect("printable"))
                }
                _ => {
                    let spec = registry.get(&args.common.scenario).expect("known");
                    let (headers, row) = output.csv_columns(&spec.params);
                    format!(
                        "{}\n{}\n",
                        headers.join(","),
                        row.iter()
                            .map(|v| format!("{v:.12e}"))
                            .collect::<Vec<_>>()
                            .join(",")
                    )
                }
            };
            if let Err(e) = emit(&args.common.out, &text) {
                eprintln!("error: {e:#}");
                return 2;
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn parse_sweep(spec: &str) -> anyhow::Result<(String, Vec<f64>)> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 4 && parts.len() != 5 {
        anyhow::bail!("sweep spec must be KEY:LO:HI:STEPS[:log], got {spec:?}");
    }
    let key = parts[0].to_string();
    let lo: f64 = parts[1].parse().context("sweep lower bound")?;
    let hi: f64 = parts[2].parse().context("sweep upper bound")?;
    let steps: usize = parts[3].parse().context("sweep step count")?;
    let log = match parts.get(4) {
        Some(&"log") => true,
        Some(other) => anyhow::bail!("unknown sweep modifier {other:?}"),
        None => false,
    };
    if steps < 2 {
        anyhow::bail!("sweep needs at least 2 steps");
    }
    if log && (lo <= 0.0 || hi <= 0.0) {
        anyhow::bail!("log sweeps need positive bounds");
    }
    let grid = (0..steps)
        .map(|i| {
            let t = i as f64 / (steps - 1) as f64;
            if log {
                (lo.ln() + t * (hi.ln() - lo.ln())).exp()
            } else {
                lo + t * (hi - lo)
            }
        })
        .collect();
    Ok((key, grid))
}

fn sweep_command(args: SweepArgs) -> i32 {
    configure_threads(args.common.threads);
    let registry = ScenarioRegistry::builtin();
    let base = match parse_params(&args.common.params) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e:#}");
            return 2;
        }
    };
    let (key, grid) = match parse_sweep(&args.sweep) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: {e:#}");
            return 2;
        }
    };
    let spec = match registry.get(&args.common.scenario) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    if !spec.params.iter().any(|p| p.name == key) {
        eprintln!(
            "error: scenario {} has no parameter {key:?}",
            args.common.scenario
        );
        return 2;
    }
    // Evaluate grid points in parallel, assemble in deterministic order.
    let results: Vec<Result<ScenarioOutput, ScenarioError>> = grid
        .par_iter()
        .map(|value| {
            let mut params = base.clone();
            params.insert(key.clone(), *value);
            registry.run(&args.common.scenario, &params)
        })
        .collect();
    let mut rows = Vec::new();
    let mut headers: Option<Vec<String>> = None;
    for result in results {
        match result {
            Ok(out) => {
                let (h, row) = out.csv_columns(&spec.params);
                if let Some(existing) = &headers {
                    if existing != &h {
                        eprintln!("error: inconsistent sweep columns");
                        return 3;
                    }
                } else {
                    headers = Some(h);
                }
                rows.push(row);
            }
            Err(e) => {
                eprintln!("error: {e}");
                return exit_code_for(&e);
            }
        }
    }
    let headers = headers.expect("at least two grid points");
    let text = match args.common.format.as_str() {
        "json" => {
            let objects: Vec<serde_json::Value> = rows
                .iter()
                .map(|row| {
                    let mut obj = serde_json::Map::new();
                    for (h, v) in headers.iter().zip(row) {
                        obj.insert(h.clone(), serde_json::json!(v));
                    }
                    serde_json::Value::Object(obj)
                })
                .collect();
            format!(
                "{}\n",
                serde_json::to_string_pretty(&serde_json::json!({
                    "schema": 1,
                    "scenario": args.common.scenario,
                    "sweep": key,
                    "rows": objects,
                }))
                .expect("printable")
            )
        }
        _ => {
            let mut text = format!("{}\n", headers.join(","));
            for row in rows {
                text.push_str(
                    &row.iter()
                        .map(|v| format!("{v:.12e}"))
                        .collect::<Vec<_>>()
                        .join(","),
                );
                text.push('\n');
            }
            text
        }
    };
    if let Err(e) = emit(&args.common.out, &text) {
        eprintln!("error: {e:#}");
        return 2;
    }
    0
}

fn verify_command(args: VerifyArgs) -> i32 {
    let suite = Suite::parse(&args.suite).expect("validated by clap");
    let results = verify::run_suite(suite, args.seed);
    let failed = results.iter().filter(|r| !r.passed).count();
    if args.json {
        let entries: Vec<serde_json::Value> = results
            .iter()
            .map(|r| {
                serde_json::json!({
                    "name": r.name,
                    "passed": r.passed,
                    "detail": r.detail,
                })
            })
            .collect();
        println!(
            "{}",
            serde_json::to_string_pretty(&serde_json::json!({
                "schema": 1,
                "suite": args.suite,
                "seed": args.seed,
                "checks": entries,
                "failed": failed,
            }))
            .expect("printable")
        );
    } else {
        for r in &results {
            println!(
                "{} {} — {}",
                if r.passed { "PASS" } else { "FAIL" },
                r.name,
                r.detail
            );
        }
        println!(
            "{}/{} checks passed (suite {}, seed {:#x})",
            results.len() - failed,
            results.len(),
            args.suite,
            args.seed
        );
    }
    if failed > 0 {
        1
    } else {
        0
    }
}

fn list_command() -> i32 {
    let registry = ScenarioRegistry::builtin();
    for spec in registry.entries() {
        println!("{} — {}", spec.name, spec.summary);
        for p in &spec.params {
            println!("    --param {}={} : {}", p.name, p.default, p.description);
        }
    }
    0
}

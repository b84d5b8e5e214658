use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use cesembed::{apply_config, emit_report, parse_spec, run_check, run_norm, Command, Format, RunRequest};
use cesembed_core::{OracleConfig, StepFunction};
use clap::{Args, Parser, Subcommand};

/// Decide embeddings between weighted Cesàro and Copson spaces.
#[derive(Parser)]
#[command(name = "cesembed", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Theorem constants plus the brute-force oracle.
    Check(EmbedArgs),
    /// Theorem constants only.
    Constants(EmbedArgs),
    /// Oracle only.
    Oracle(EmbedArgs),
    /// Quasi-norm of a step function given as {"breaks": [...], "values": [...]}.
    Norm {
        #[arg(long)]
        space: String,
        #[arg(long = "f")]
        f: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Args)]
struct EmbedArgs {
    /// Source space, e.g. `ces:1,2:pow:0,pow:0@(0,1)`.
    #[arg(long)]
    source: String,
    /// Target space.
    #[arg(long)]
    target: String,
    #[arg(long)]
    oracle_grid: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// `key = value` file with oracle settings.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

fn request(command: Command, a: EmbedArgs) -> Result<RunRequest> {
    let source = parse_spec(&a.source).with_context(|| format!("source `{}`", a.source))?;
    let target = parse_spec(&a.target).with_context(|| format!("target `{}`", a.target))?;
    let mut oracle = OracleConfig::default();
    if let Some(path) = &a.config {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        oracle = apply_config(oracle, &text)?;
    }
    if let Some(n) = a.oracle_grid {
        oracle.grid_size = n;
    }
    let seed = a.seed.unwrap_or(oracle.seed);
    Ok(RunRequest { command, source, target, oracle, seed, format: a.format })
}

fn run(cli: Cli) -> Result<i32> {
    let (command, args) = match cli.command {
        Cmd::Check(a) => (Command::Check, a),
        Cmd::Constants(a) => (Command::Constants, a),
        Cmd::Oracle(a) => (Command::Oracle, a),
        Cmd::Norm { space, f, format } => {
            let spec = parse_spec(&space).with_context(|| format!("space `{space}`"))?;
            let text = std::fs::read_to_string(&f).with_context(|| format!("reading {}", f.display()))?;
            let step: StepFunction<f64> = serde_json::from_str(&text).context("step function JSON")?;
            let norm = run_norm(&spec, &step)?;
            match format {
                Format::Json => println!("{}", serde_json::json!({ "space": spec.to_string(), "norm": norm })),
                Format::Text => println!("norm: {norm}"),
            }
            return Ok(0);
        }
    };
    let req = request(command, args)?;
    let rep = run_check(&req)?;
    print!("{}", emit_report(&rep, req.format));
    Ok(rep.verdict.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}

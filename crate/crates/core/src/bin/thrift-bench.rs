use std::fmt::Write as _;
use std::io::{ErrorKind, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use thrift_core::bench::{
    bounds, depth_tables, fmt_float, landscape, landscape_csv, parse_scaling_csv, powerlaw_fit, scaling, scaling_csv, BenchError,
    CsvDocument, SweepConfig,
};
use thrift_core::depth::DepthRegistry;

#[derive(Parser)]
#[command(name = "thrift-bench", version, about = "Product-formula error sweeps, depth tables and fits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Best formula per (alpha, T) at a fixed two-qubit depth budget.
    Landscape {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's output path.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Omit the timestamp comment line.
        #[arg(long)]
        no_timestamp: bool,
    },
    /// Minimal depth to reach the error threshold over sizes, with T = c L.
    Scaling {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        no_timestamp: bool,
    },
    /// Power-law fits `d = a L^k` per formula from a scaling CSV.
    Fit {
        #[arg(long)]
        input: PathBuf,
        /// Also report the fitted depth at this size (labelled as extrapolation).
        #[arg(long)]
        extrapolate: Option<f64>,
    },
    /// Depth formulas and step counts within each model's budget.
    Tables {
        /// Use one budget for every model instead of the per-model ones.
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        registry: Option<PathBuf>,
    },
    /// THRIFT commutator bound and Magnus remainder bounds on the config grid.
    Bounds {
        #[arg(long)]
        config: PathBuf,
    },
}

fn timestamp(skip: bool) -> Option<u64> {
    if skip {
        return None;
    }
    SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| d.as_secs())
}

/// Writes to stdout; a reader that closed the pipe early is not an error.
fn print_out(text: &str) -> Result<(), BenchError> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn emit(doc: &CsvDocument, path: Option<&Path>, ts: Option<u64>) -> Result<(), BenchError> {
    let text = doc.render(ts);
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => print_out(&text)?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), BenchError> {
    match cli.command {
        Command::Landscape { config, output, no_timestamp } => {
            let cfg = SweepConfig::from_file(&config)?;
            let land = landscape(&cfg)?;
            for w in &land.warnings {
                eprintln!("warning: {w}");
            }
            emit(&landscape_csv(&cfg, &land), output.as_deref().or(cfg.output.as_deref()), timestamp(no_timestamp))
        }
        Command::Scaling { config, output, no_timestamp } => {
            let cfg = SweepConfig::from_file(&config)?;
            let rows = scaling(&cfg)?;
            emit(&scaling_csv(&cfg, &rows), output.as_deref().or(cfg.output.as_deref()), timestamp(no_timestamp))
        }
        Command::Fit { input, extrapolate } => {
            let text = std::fs::read_to_string(&input)?;
            let mut header = "formula,a,k,k_stderr,points".to_string();
            if let Some(l) = extrapolate {
                header.push_str(&format!(",extrapolated_depth_at_L{l}"));
            }
            let mut out = format!("{header}\n");
            for (formula, points) in parse_scaling_csv(&text)? {
                match powerlaw_fit(&points) {
                    Ok(fit) => {
                        let mut line =
                            format!("{formula},{},{},{},{}", fmt_float(fit.a), fmt_float(fit.k), fmt_float(fit.k_stderr()), fit.points_used);
                        if let Some(l) = extrapolate {
                            line.push_str(&format!(",{}", fmt_float(fit.predict(l))));
                        }
                        out.push_str(&line);
                        out.push('\n');
                    }
                    Err(e) => eprintln!("warning: {formula}: {e}"),
                }
            }
            print_out(&out)
        }
        Command::Tables { budget, registry } => {
            let reg = match registry {
                Some(p) => DepthRegistry::from_file(p)?,
                None => DepthRegistry::bundled(),
            };
            let mut out = "model,formula,two_qubit_depth,cnot_depth,budget,steps\n".to_string();
            for r in depth_tables(&reg, budget)? {
                let steps = if r.steps == 0 { "exceeds budget".to_string() } else { r.steps.to_string() };
                let _ = writeln!(out, "{},{},{},{},{},{steps}", r.model, r.formula, r.two_qubit, r.cnot, r.budget);
            }
            print_out(&out)
        }
        Command::Bounds { config } => {
            let cfg = SweepConfig::from_file(&config)?;
            let opt = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), fmt_float);
            let mut out = "model,alpha,T,thrift1_step_bound,magnus1_remainder,magnus2_remainder\n".to_string();
            for r in bounds(&cfg)? {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    cfg.model.kind,
                    fmt_float(r.alpha),
                    fmt_float(r.t),
                    opt(r.thrift1_step),
                    opt(r.magnus_remainder[0]),
                    opt(r.magnus_remainder[1])
                );
            }
            print_out(&out)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

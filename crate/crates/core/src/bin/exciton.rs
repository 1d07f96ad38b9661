//! Command-line front end: `run`, `dispersion`, `sweep`, `compare`, `validate`.
//!
//! Exit codes: 0 success, 1 i/o failure, 2 invalid configuration or
//! arguments, 3 runtime divergence, solver failure or failed invariant.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use exciton_core::config::{parse_config, RunConfig};
use exciton_core::runner::{
    compare, dispersion_table, output_dir, output_root, run, sweep, validate_invariants, write_csv,
    write_csv_to, CompareOptions, RunError, SweepAxis,
};
use exciton_core::ModelParams;

#[derive(Parser)]
#[command(
    name = "exciton",
    version,
    about = "Exciton-phonon chains with power-law coupling",
    after_help = "Relative output paths resolve against $EXCITON_OUTPUT_ROOT (default: current directory)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a JSON configuration.
    Run {
        config: PathBuf,
        /// Overrides `outputs.directory`.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Tabulate `k, G(k), asymptote` on `k = kmax i / n`, `i = 1..n`.
    Dispersion {
        #[arg(long)]
        s: f64,
        #[arg(long, default_value_t = 0.1)]
        kmax: f64,
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        j: f64,
        /// CSV file; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the Cartesian product of `--set key=v1,v2` axes over a configuration.
    Sweep {
        config: PathBuf,
        #[arg(long = "set", required = true)]
        axes: Vec<SweepAxis>,
        /// Sweep directory; defaults to `outputs.directory` of the base configuration.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Worker threads; all cores when omitted.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Lattice-versus-continuum distance for a Gaussian packet on a ring.
    Compare {
        /// JSON file with comparison options; flags below override it.
        #[arg(long)]
        options: Option<PathBuf>,
        #[arg(long)]
        sites: Option<usize>,
        #[arg(long)]
        s: Option<f64>,
        #[arg(long)]
        chi: Option<f64>,
        #[arg(long)]
        width: Option<f64>,
        #[arg(long)]
        k0: Option<f64>,
        #[arg(long)]
        norm: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long)]
        sample_every: Option<f64>,
        #[arg(long)]
        source_factor: Option<f64>,
        /// CSV file; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Validate a configuration and run the invariant suite on it.
    Validate {
        config: PathBuf,
        /// Cap on integrated steps.
        #[arg(long, default_value_t = 200)]
        max_steps: u64,
    },
}

const IO_FAILURE: u8 = 1;
const INVALID: u8 = 2;
const DIVERGED: u8 = 3;

fn load(path: &Path) -> Result<RunConfig, ExitCode> {
    let text = fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        ExitCode::from(INVALID)
    })?;
    parse_config(&text).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        ExitCode::from(INVALID)
    })
}

/// Relative paths resolve against the output root.
fn rooted(path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        output_root().join(path)
    }
}

fn emit_csv(output: Option<&Path>, header: &[&str], rows: &[Vec<f64>]) -> io::Result<()> {
    match output {
        Some(p) => {
            let p = rooted(p);
            if let Some(parent) = p.parent() {
                fs::create_dir_all(parent)?;
            }
            write_csv(&p, header, rows)
        }
        None => write_csv_to(io::stdout().lock(), header, rows),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, output_dir: dir } => {
            let cfg = match load(&config) {
                Ok(c) => c,
                Err(code) => return code,
            };
            let dir = dir.map(|d| rooted(&d)).unwrap_or_else(|| output_dir(&cfg, &output_root()));
            match run(&cfg, &dir) {
                Ok(report) => {
                    for w in &report.warnings {
                        eprintln!("warning: {w}");
                    }
                    if let Some(f) = &report.failure {
                        eprintln!("error: run failed at step {} (t = {}): {}", f.step, f.time, f.message);
                    }
                    ExitCode::from(report.exit_code() as u8)
                }
                Err(RunError::Setup(e)) => {
                    eprintln!("error: {e}");
                    ExitCode::from(INVALID)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(IO_FAILURE)
                }
            }
        }
        Command::Dispersion { s, kmax, n, j, output } => {
            let params = ModelParams {
                interaction_j: j,
                ..ModelParams::default().with_exponent(s)
            };
            let rows = match dispersion_table(&params, kmax, n) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(INVALID);
                }
            };
            match emit_csv(output.as_deref(), &["k", "gap", "asymptote"], &rows) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(IO_FAILURE)
                }
            }
        }
        Command::Sweep {
            config,
            axes,
            output_dir: dir,
            jobs,
        } => {
            let cfg = match load(&config) {
                Ok(c) => c,
                Err(code) => return code,
            };
            // axes apply to the document as written, before defaults are resolved
            let base: serde_json::Value = match fs::read_to_string(&config)
                .map_err(|e| e.to_string())
                .and_then(|t| serde_json::from_str(&t).map_err(|e| e.to_string()))
            {
                Ok(v) => v,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(INVALID);
                }
            };
            let dir = dir.map(|d| rooted(&d)).unwrap_or_else(|| output_dir(&cfg, &output_root()));
            if let Some(n) = jobs {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    eprintln!("error: {e}");
                    return ExitCode::from(INVALID);
                }
            }
            match sweep(&base, &axes, &dir) {
                Ok(points) => {
                    let worst = points.iter().map(|p| p.exit_code).max().unwrap_or(0);
                    for p in points.iter().filter(|p| p.exit_code != 0) {
                        eprintln!(
                            "{}: {} {}",
                            p.directory,
                            p.status,
                            p.message.as_deref().unwrap_or("")
                        );
                    }
                    println!("{} points written to {}", points.len(), dir.display());
                    ExitCode::from(worst as u8)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(IO_FAILURE)
                }
            }
        }
        Command::Compare {
            options,
            sites,
            s,
            chi,
            width,
            k0,
            norm,
            dt,
            t_end,
            sample_every,
            source_factor,
            output,
        } => {
            let mut o: CompareOptions = match options {
                Some(p) => {
                    let parsed = fs::read_to_string(&p)
                        .map_err(|e| e.to_string())
                        .and_then(|t| serde_json::from_str(&t).map_err(|e| e.to_string()));
                    match parsed {
                        Ok(o) => o,
                        Err(e) => {
                            eprintln!("error: {}: {e}", p.display());
                            return ExitCode::from(INVALID);
                        }
                    }
                }
                None => CompareOptions::default(),
            };
            if let Some(v) = sites {
                o.sites = v;
            }
            if let Some(v) = s {
                o.params.exponent_s = v;
            }
            if let Some(v) = chi {
                o.params.coupling_chi = v;
            }
            if let Some(v) = width {
                o.width = v;
            }
            if let Some(v) = k0 {
                o.k0 = v;
            }
            if let Some(v) = norm {
                o.norm = v;
            }
            if let Some(v) = dt {
                o.dt = v;
            }
            if let Some(v) = t_end {
                o.t_end = v;
            }
            if let Some(v) = sample_every {
                o.sample_every = v;
            }
            if let Some(v) = source_factor {
                o.source_factor = v;
            }
            let rows = match compare(&o) {
                Ok(r) => r,
                Err(e @ exciton_core::Error::NumericalDivergence { .. }) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(DIVERGED);
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(INVALID);
                }
            };
            let table: Vec<Vec<f64>> = rows
                .iter()
                .map(|r| vec![r.t, r.distance, r.norm_lattice, r.norm_continuum])
                .collect();
            match emit_csv(
                output.as_deref(),
                &["t", "l2_distance", "norm_lattice", "norm_continuum"],
                &table,
            ) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(IO_FAILURE)
                }
            }
        }
        Command::Validate { config, max_steps } => {
            let cfg = match load(&config) {
                Ok(c) => c,
                Err(code) => return code,
            };
            println!("config: valid");
            match validate_invariants(&cfg, max_steps) {
                Ok(checks) => {
                    for c in &checks {
                        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                    }
                    if checks.iter().all(|c| c.passed) {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(DIVERGED)
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(DIVERGED)
                }
            }
        }
    }
}

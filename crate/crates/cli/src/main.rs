use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use clipofdm::harness::{self, BerRow, PaprReport};

mod config;

use config::{ConfigError, Kind, RunConfig};

/// Clipping-and-filtering PAPR reduction simulator for OFDM.
///
/// Runs the PAPR and/or BER sweeps described by a TOML config and writes CSV
/// tables and curve files to the output directory.
#[derive(Debug, Parser)]
#[command(name = "clipofdm", version)]
struct Cli {
    /// TOML config file; omitted keys (or no file at all) use the reference system.
    #[arg(short, long, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Output directory, overriding `output_dir` from the config.
    #[arg(short, long, value_name = "DIR")]
    output: Option<PathBuf>,

    /// Master seed, overriding `seed` from the config.
    #[arg(short, long)]
    seed: Option<u64>,

    /// Experiment kind, overriding `kind` from the config.
    #[arg(short, long, value_enum)]
    kind: Option<Kind>,

    /// Print nothing but errors.
    #[arg(short, long, conflicts_with = "verbose")]
    quiet: bool,

    /// Also print the list of files written.
    #[arg(short, long)]
    verbose: bool,
}

enum Failure {
    Config(String),
    Runtime(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Runtime(_) => 2,
            Failure::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Runtime(m) | Failure::Io(m) => m,
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<clipofdm::Error> for Failure {
    fn from(e: clipofdm::Error) -> Self {
        match e.root() {
            clipofdm::Error::Io { .. } => Failure::Io(e.to_string()),
            clipofdm::Error::Config(_) => Failure::Config(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

fn resolve(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut run = match &cli.config {
        Some(path) => config::parse_config(path)?,
        None => RunConfig::default(),
    };
    if let Some(dir) = &cli.output {
        config::check_output_dir(dir)?;
        run.output_dir = dir.clone();
    }
    if let Some(seed) = cli.seed {
        run.spec.seed = seed;
    }
    if let Some(kind) = cli.kind {
        run.kind = kind;
    }
    config::validate_spec(&run.spec)?;
    Ok(run)
}

fn print_papr(report: &PaprReport) {
    println!("{:<6} {:>5} {:>10} {:>10} {:>10}", "scheme", "CR", "PAPR dB", "unclipped", "PSK-QAM");
    for r in &report.rows {
        let diff = r.pair_difference_db.map(|d| format!("{d:+.3}")).unwrap_or_default();
        println!("{:<6} {:>5.2} {:>10.3} {:>10.3} {:>10}", r.scheme, r.cr, r.papr_db, r.unclipped_papr_db, diff);
    }
}

fn print_ber(rows: &[BerRow]) {
    println!("{:<6} {:>5} {:>7} {:>11} {:>11}", "scheme", "CR", "Eb/N0", "BER", "PSK-QAM");
    for r in rows {
        let diff = r.pair_difference.map(|d| format!("{d:+.3e}")).unwrap_or_default();
        println!("{:<6} {:>5.2} {:>7.1} {:>11.4e} {:>11}", r.scheme, r.cr, r.ebn0_db, r.ber(), diff);
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let run = resolve(cli)?;
    let started = Instant::now();

    // everything is computed before anything is written
    let papr = if run.kind.runs_papr() { Some(harness::run_papr_experiment(&run.spec)?) } else { None };
    let ber = if run.kind.runs_ber() { Some(harness::run_ber_experiment(&run.spec)?) } else { None };

    let mut written = Vec::new();
    if let Some(report) = &papr {
        written.extend(harness::write_papr_outputs(report, &run.output_dir)?);
    }
    if let Some(rows) = &ber {
        written.extend(harness::write_ber_outputs(rows, &run.output_dir)?);
    }

    if !cli.quiet {
        if let Some(report) = &papr {
            print_papr(report);
        }
        if let Some(rows) = &ber {
            print_ber(rows);
        }
        if cli.verbose {
            for path in &written {
                println!("wrote {}", path.display());
            }
        }
        println!(
            "{} files in {} ({:.1} s, seed {})",
            written.len(),
            run.output_dir.display(),
            started.elapsed().as_secs_f64(),
            run.spec.seed
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("clipofdm: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}

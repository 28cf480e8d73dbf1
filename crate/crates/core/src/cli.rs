//! Command implementations behind the `ris-secrecy` binary.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::config::{load_config, OutputFormat, RunConfig};
use crate::output::{read_sweep, write_csv, write_json, SweepMeta};
use crate::sweep::run_sweep;
use crate::trends::{alpha_peaks, build_trends};
use crate::verify::run_verification;

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 1;
pub const EXIT_RUNTIME: u8 = 2;
pub const EXIT_IO: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "ris-secrecy", version, about = "RIS-assisted secure transmission with artificial noise")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the (alpha, K_b) sweep and write one row per grid cell.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `run.output_path`.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Overrides `run.output_format`.
        #[arg(long)]
        format: Option<OutputFormat>,
        /// Overrides `grid.seed`.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (0 = all cores). Does not affect the output bytes.
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Compare the optimizer against exhaustive oracles on a small scene.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 100)]
        seeds: u64,
    },
    /// Reshape a sweep file into the four plot-ready trend tables.
    Trends {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        outdir: PathBuf,
        /// Comma-separated alpha values for tables (a) and (b).
        #[arg(long, value_delimiter = ',')]
        alphas: Option<Vec<f64>>,
        /// Comma-separated K_b values for tables (c) and (d).
        #[arg(long, value_delimiter = ',')]
        kbobs: Option<Vec<usize>>,
    },
}

pub fn run(cli: Cli) -> u8 {
    match cli.command {
        Command::Sweep { config, output, format, seed, threads } => {
            let cfg = match load_config(&config) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_CONFIG;
                }
            };
            let cfg = match seed {
                Some(s) => cfg.with_seed(s),
                None => cfg,
            };
            let format = format.unwrap_or(cfg.output_format);
            let path = output.unwrap_or_else(|| cfg.output_path.clone());
            cmd_sweep_with_threads(&cfg.with_output(path, format), threads)
        }
        Command::Verify { config, seeds } => match load_config(&config) {
            Ok(cfg) => cmd_verify(&cfg, seeds),
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_CONFIG
            }
        },
        Command::Trends { input, outdir, alphas, kbobs } => cmd_trends(&input, &outdir, &alphas, &kbobs),
    }
}

pub fn cmd_sweep(config: &RunConfig) -> u8 {
    cmd_sweep_with_threads(config, 0)
}

/// Runs the sweep on a dedicated pool of `threads` workers (0 = default).
pub fn cmd_sweep_with_threads(config: &RunConfig, threads: usize) -> u8 {
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return EXIT_RUNTIME;
        }
    };
    let records = match pool.install(|| run_sweep(&config.scene, &config.params, &config.grid)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_RUNTIME;
        }
    };
    let meta = SweepMeta::new(config.grid.seed, config.config_hash(), config.baseline_seeds());
    let written = File::create(&config.output_path).and_then(|f| {
        let w = BufWriter::new(f);
        match config.output_format {
            OutputFormat::Csv => write_csv(w, &meta, &records),
            OutputFormat::Json => write_json(w, &meta, &records),
        }
    });
    if let Err(e) = written {
        eprintln!("error: cannot write {}: {e}", config.output_path.display());
        return EXIT_IO;
    }
    eprintln!("wrote {} rows to {}", records.len(), config.output_path.display());
    EXIT_OK
}

pub fn cmd_verify(config: &RunConfig, seeds: u64) -> u8 {
    match run_verification(config, seeds) {
        Ok(report) => {
            for line in &report.lines {
                println!("{line}");
            }
            if report.passed() {
                println!("verify: all hard invariants passed");
                EXIT_OK
            } else {
                println!("verify: {} invariant(s) failed:", report.failures.len());
                for f in &report.failures {
                    println!("  - {f}");
                }
                EXIT_RUNTIME
            }
        }
        Err(e @ crate::Error::OracleCapExceeded { .. }) | Err(e @ crate::Error::InvalidParameter { .. }) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_RUNTIME
        }
    }
}

pub fn cmd_trends(input: &Path, outdir: &Path, alphas: &Option<Vec<f64>>, kbobs: &Option<Vec<usize>>) -> u8 {
    let rows = match File::open(input) {
        Ok(f) => match read_sweep(BufReader::new(f)) {
            Ok(rows) => rows,
            Err(e) => {
                eprintln!("error: malformed sweep file {}: {e}", input.display());
                return EXIT_RUNTIME;
            }
        },
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", input.display());
            return EXIT_IO;
        }
    };
    if rows.is_empty() {
        eprintln!("error: malformed sweep file {}: no data rows", input.display());
        return EXIT_RUNTIME;
    }
    let tables = build_trends(&rows, alphas, kbobs);
    if let Err(e) = fs::create_dir_all(outdir) {
        eprintln!("error: cannot create {}: {e}", outdir.display());
        return EXIT_IO;
    }
    for (name, body) in tables.files() {
        if let Err(e) = fs::write(outdir.join(name), body) {
            eprintln!("error: cannot write {name}: {e}");
            return EXIT_IO;
        }
    }
    for peak in alpha_peaks(&rows) {
        let endpoint = peak.secrecy_at_one.map_or("n/a".to_string(), |v| format!("{v:.6}"));
        println!(
            "k_bob {:3}: max C_s {:.6} at alpha {:.2}{}; C_s(alpha=1) = {endpoint}",
            peak.k_bob,
            peak.max_secrecy,
            peak.alpha_at_max,
            if peak.is_interior() { " (interior)" } else { "" },
        );
    }
    EXIT_OK
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sit_squeeze::config::{parse_config, ScanKind};
use sit_squeeze::plot::{plot_file, PlotKind};
use sit_squeeze::run::{run, thread_count, Overrides, THREADS_ENV};
use sit_squeeze::Error;

/// Quadrature squeezing of SIT solitons in mercury-filled hollow-core fiber.
#[derive(Parser)]
#[command(name = "sit-squeeze", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configured simulation and write CSV, SVG and a manifest.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// phase, detuning or pressure; overrides the file.
        #[arg(long, value_parser = parse_scan)]
        scan: Option<ScanKind>,
        /// Worker threads (default: SIT_SQUEEZE_THREADS, then all cores).
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Raise the trajectory count to 12000.
        #[arg(long)]
        paper_scale: bool,
        /// Output directory; overrides the file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a CSV table as an SVG figure.
    Plot {
        #[arg(long)]
        csv: PathBuf,
        /// phase, length, heatmap, detuning or pressure.
        #[arg(long, value_parser = parse_kind)]
        kind: PlotKind,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_scan(s: &str) -> Result<ScanKind, String> {
    ScanKind::parse(s).ok_or_else(|| format!("unknown scan `{s}` (phase, detuning, pressure)"))
}

fn parse_kind(s: &str) -> Result<PlotKind, String> {
    PlotKind::parse(s).ok_or_else(|| format!("unknown kind `{s}` (phase, length, heatmap, detuning, pressure)"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(command: Command) -> Result<(), Error> {
    match command {
        Command::Run {
            config,
            scan,
            threads,
            seed,
            paper_scale,
            out,
        } => {
            let env = std::env::var(THREADS_ENV).ok();
            let threads = thread_count(threads, env.as_deref())?;
            let mut cfg = parse_config(&config)?;
            Overrides {
                scan,
                seed,
                paper_scale,
                out,
            }
            .apply(&mut cfg);
            let report = run(&cfg, threads)?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            for f in &report.files {
                println!("{}", f.display());
            }
            println!("{}", report.manifest.display());
            eprintln!(
                "done in {:.1} s, {} trajectories discarded",
                report.wall_time.as_secs_f64(),
                report.n_discarded
            );
            Ok(())
        }
        Command::Plot { csv, kind, out } => plot_file(&csv, kind, &out),
    }
}

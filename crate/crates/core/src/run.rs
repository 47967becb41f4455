//! The `run` workflow: execute a configured scan and persist its artifacts.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use crate::config::{RunConfig, ScanKind, PAPER_SCALE_TRAJECTORIES};
use crate::error::{Error, Result};
use crate::measurement::{phase_grid, to_decibels, SqueezingSurface};
use crate::output::{CsvTable, OutputDir, RunManifest};
use crate::plot::{render, CsvData, PlotKind};
use crate::scans::{run_surface, scan_detuning, scan_pressure, ScanPoint};

/// Environment variable consulted when `--threads` is absent.
pub const THREADS_ENV: &str = "SIT_SQUEEZE_THREADS";

/// Command-line adjustments applied on top of the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub scan: Option<ScanKind>,
    pub seed: Option<u64>,
    pub paper_scale: bool,
    pub out: Option<PathBuf>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut RunConfig) {
        if let Some(k) = self.scan {
            cfg.scan.kind = k;
        }
        if let Some(s) = self.seed {
            cfg.ensemble.master_seed = s;
        }
        if self.paper_scale {
            cfg.ensemble.n_traj = PAPER_SCALE_TRAJECTORIES;
        }
        if let Some(o) = &self.out {
            cfg.output.directory = o.clone();
        }
    }
}

/// Worker count: the flag wins, then the environment, then all cores.
pub fn thread_count(flag: Option<usize>, env: Option<&str>) -> Result<Option<usize>> {
    if let Some(n) = flag {
        return if n == 0 {
            Err(Error::config("threads", "must be ≥ 1"))
        } else {
            Ok(Some(n))
        };
    }
    match env {
        None => Ok(None),
        Some(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::config(THREADS_ENV, format!("expected a positive integer, got `{v}`"))),
        },
    }
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    pub manifest: PathBuf,
    pub wall_time: Duration,
    pub n_discarded: usize,
    pub warnings: Vec<String>,
}

pub fn surface_table(s: &SqueezingSurface) -> CsvTable {
    let mut t = CsvTable::new(&["z", "theta", "S", "S_dB", "stderr"]);
    for (iz, &z) in s.z.iter().enumerate() {
        for (it, &th) in s.theta.iter().enumerate() {
            t.push(vec![z, th, s.s[iz][it], s.s_db[iz][it], s.stderr[iz][it]]);
        }
    }
    t
}

fn db_or_nan(s: f64) -> f64 {
    to_decibels(s).unwrap_or(f64::NAN)
}

pub fn detuning_table(points: &[ScanPoint]) -> CsvTable {
    let mut t = CsvTable::new(&[
        "delta",
        "S_opt",
        "S_opt_dB",
        "L_opt",
        "stderr",
        "theta_opt",
        "log10_delta_plus_1",
    ]);
    for p in points {
        let o = &p.optimum;
        t.push(vec![
            p.parameter,
            o.s,
            db_or_nan(o.s),
            o.z,
            o.stderr,
            o.theta,
            (p.parameter + 1.0).log10(),
        ]);
    }
    t
}

pub fn pressure_table(points: &[ScanPoint]) -> CsvTable {
    let mut t = CsvTable::new(&[
        "temperature",
        "pressure",
        "S_opt",
        "S_opt_dB",
        "L_opt",
        "stderr",
        "theta_opt",
    ]);
    for p in points {
        let o = &p.optimum;
        t.push(vec![p.parameter, p.pressure, o.s, db_or_nan(o.s), o.z, o.stderr, o.theta]);
    }
    t
}

/// Run `cfg` on `threads` workers (`None`: all cores) and write its outputs.
pub fn run(cfg: &RunConfig, threads: Option<usize>) -> Result<RunReport> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Argument(format!("thread pool: {e}")))?;
    pool.install(|| execute(cfg))
}

fn execute(cfg: &RunConfig) -> Result<RunReport> {
    let start = Instant::now();
    let mut out = OutputDir::create(&cfg.output.directory)?;
    let theta = phase_grid(cfg.scan.phase_points);
    let scenario = &cfg.scenario;
    let mut manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: cfg.ensemble.master_seed,
        config_echo: cfg.to_text(),
        ..Default::default()
    };
    let mut warnings = Vec::new();
    let mut files = Vec::new();
    let mut tables: Vec<(&str, CsvTable, Vec<PlotKind>)> = Vec::new();

    let sim_atoms = |s: &crate::scenario::Scenario| -> Result<(f64, f64)> {
        let volume = s.fiber.core_area() * s.fiber.length;
        let ideal = crate::atomic_data::number_density(s.pressure()?, s.gas.temperature)? * volume;
        Ok((ideal, s.total_density()? * volume))
    };
    let (ideal, used) = sim_atoms(scenario)?;
    manifest.notes.push(("scan".into(), cfg.scan.kind.name().into()));
    manifest.notes.push(("atoms_ideal_gas".into(), format!("{ideal:.6e}")));
    manifest.notes.push(("atoms_simulated".into(), format!("{used:.6e}")));
    manifest.notes.push(("noise_model".into(), scenario.noise_model.name().into()));

    match cfg.scan.kind {
        ScanKind::Phase => {
            let (surface, set) = run_surface(scenario, &cfg.ensemble, &theta)?;
            manifest.n_traj = set.n_traj;
            manifest.n_discarded = set.n_discarded;
            warnings.extend(set.warning.clone());
            let o = surface.optimum;
            manifest.notes.push((
                "optimum".into(),
                format!("S = {:.6} ± {:.6} at z = {:.6e} m, theta = {:.6} rad", o.s, o.stderr, o.z, o.theta),
            ));
            manifest
                .notes
                .push(("max_imag_ratio".into(), format!("{:.3e}", surface.max_imag_ratio)));
            tables.push((
                "squeezing_surface",
                surface_table(&surface),
                vec![PlotKind::Phase, PlotKind::Length, PlotKind::Heatmap],
            ));
        }
        ScanKind::Detuning => {
            let points = scan_detuning(scenario, &cfg.ensemble, &cfg.scan.detunings_tp, &theta)?;
            record_points(&mut manifest, &mut warnings, &points, cfg.ensemble.n_traj);
            tables.push(("detuning_scan", detuning_table(&points), vec![PlotKind::Detuning]));
        }
        ScanKind::Pressure => {
            let points = scan_pressure(scenario, &cfg.ensemble, &cfg.scan.temperatures, &theta)?;
            record_points(&mut manifest, &mut warnings, &points, cfg.ensemble.n_traj);
            tables.push(("pressure_scan", pressure_table(&points), vec![PlotKind::Pressure]));
        }
    }

    for (name, table, kinds) in tables {
        let text = table.render();
        let csv_name = format!("{name}.csv");
        files.push(out.write(&csv_name, text.as_bytes())?);
        if cfg.output.svg {
            let data = CsvData::parse(&text, &cfg.output.directory.join(&csv_name))?;
            for kind in kinds {
                match render(&data, kind) {
                    Ok(svg) => files.push(out.write(&format!("{}.svg", kind.name()), svg.as_bytes())?),
                    Err(e) => warnings.push(format!("{} plot skipped: {e}", kind.name())),
                }
            }
        }
    }
    for w in &warnings {
        manifest.notes.push(("warning".into(), w.clone()));
    }
    manifest.wall_time = start.elapsed();
    let n_discarded = manifest.n_discarded;
    let wall_time = manifest.wall_time;
    let manifest_path = out.finish(manifest)?;
    Ok(RunReport {
        files,
        manifest: manifest_path,
        wall_time,
        n_discarded,
        warnings,
    })
}

fn record_points(manifest: &mut RunManifest, warnings: &mut Vec<String>, points: &[ScanPoint], n_traj: usize) {
    manifest.n_traj = n_traj * points.len();
    manifest.n_discarded = points.iter().map(|p| p.n_discarded).sum();
    for p in points {
        warnings.extend(p.warning.iter().map(|w| format!("point {}: {w}", p.parameter)));
    }
    let worst = points.iter().map(|p| p.max_imag_ratio).fold(0.0, f64::max);
    manifest.notes.push(("max_imag_ratio".into(), format!("{worst:.3e}")));
}

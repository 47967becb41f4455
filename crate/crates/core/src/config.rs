//! Run configuration files.
//!
//! Plain text, one `key = value` per line, grouped by `[section]` headers.
//! `#` starts a comment. Every key is optional; unknown keys are errors.
//!
//! ```text
//! [gas]
//! temperature = 273
//! pressure = auto
//! isotopes = 202-only
//!
//! [pulse]
//! duration = 4e-15
//!
//! [ensemble]
//! n_traj = 2000
//! ```
//!
//! [`RunConfig::to_text`] writes every key back out; the result parses to an
//! equal configuration.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::atomic_data::{load_isotope_table, IsotopeMode};
use crate::ensemble::EnsembleConfig;
use crate::error::{Error, Result};
use crate::scenario::{CouplingChoice, Scenario};
use crate::sde::{Dephasing, NoiseModel, Scheme};

/// Trajectory count used by `--paper-scale`.
pub const PAPER_SCALE_TRAJECTORIES: usize = 12_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ScanKind {
    /// One ensemble; the full (z, θ) surface.
    #[default]
    Phase,
    /// One ensemble per pulse detuning.
    Detuning,
    /// One ensemble per gas temperature, pressure from the vapour law.
    Pressure,
}

impl ScanKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "phase" => Some(ScanKind::Phase),
            "detuning" => Some(ScanKind::Detuning),
            "pressure" => Some(ScanKind::Pressure),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ScanKind::Phase => "phase",
            ScanKind::Detuning => "detuning",
            ScanKind::Pressure => "pressure",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanConfig {
    pub kind: ScanKind,
    /// LO phases on [−π/2, π/2).
    pub phase_points: usize,
    /// Detunings in units of 1/τ_p.
    pub detunings_tp: Vec<f64>,
    /// Gas temperatures for the pressure scan, K.
    pub temperatures: Vec<f64>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            kind: ScanKind::Phase,
            phase_points: 64,
            detunings_tp: vec![0.0, 1e-4, 1e-3, 1e-2, 0.1, 1.0, 4.0, 16.0],
            temperatures: vec![273.0, 283.0, 293.0, 303.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputConfig {
    pub directory: PathBuf,
    /// Also render SVG plots next to the CSV tables.
    pub svg: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            directory: PathBuf::from("out"),
            svg: true,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub ensemble: EnsembleConfig,
    pub scan: ScanConfig,
    pub output: OutputConfig,
    /// Isotope table file; `None` uses the bundled data.
    pub isotope_table_path: Option<PathBuf>,
}

pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
        line: None,
        key: None,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    RunConfig::parse(&text)
}

struct Entry {
    value: String,
    line: usize,
}

fn err(line: usize, key: &str, message: impl Into<String>) -> Error {
    Error::Config {
        line: Some(line),
        key: Some(key.to_string()),
        message: message.into(),
    }
}

fn number(e: &Entry, key: &str) -> Result<f64> {
    e.value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| err(e.line, key, format!("expected a number, got `{}`", e.value)))
}

fn count(e: &Entry, key: &str) -> Result<usize> {
    e.value
        .parse::<usize>()
        .map_err(|_| err(e.line, key, format!("expected a non-negative integer, got `{}`", e.value)))
}

fn flag(e: &Entry, key: &str) -> Result<bool> {
    match e.value.as_str() {
        "true" => Ok(true),
        "false" => Ok(false),
        v => Err(err(e.line, key, format!("expected true or false, got `{v}`"))),
    }
}

/// `word` alone or `word <number>`.
fn tagged(e: &Entry, key: &str) -> Result<(String, Option<f64>)> {
    let mut parts = e.value.split_whitespace();
    let tag = parts.next().unwrap_or_default().to_string();
    let value = match parts.next() {
        Some(v) => Some(
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| err(e.line, key, format!("expected a number after `{tag}`, got `{v}`")))?,
        ),
        None => None,
    };
    if parts.next().is_some() {
        return Err(err(e.line, key, format!("trailing text in `{}`", e.value)));
    }
    Ok((tag, value))
}

fn number_or(e: &Entry, key: &str, word: &str) -> Result<Option<f64>> {
    if e.value == word {
        Ok(None)
    } else {
        number(e, key).map(Some)
    }
}

fn list(e: &Entry, key: &str) -> Result<Vec<f64>> {
    e.value
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| err(e.line, key, format!("bad list element `{}`", s.trim())))
        })
        .collect()
}

/// Shortest text that parses back to exactly `v`.
fn num(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-3..1e7).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

fn num_list(v: &[f64]) -> String {
    v.iter().map(|&x| num(x)).collect::<Vec<_>>().join(", ")
}

const KEYS: &[&str] = &[
    "gas.temperature",
    "gas.pressure",
    "gas.atom_number_total",
    "gas.isotopes",
    "gas.isotope_table",
    "gas.field_bath_temperature",
    "gas.atom_bath_temperature",
    "gas.coupling",
    "gas.dephasing",
    "gas.initial_inversion",
    "gas.undamped",
    "pulse.duration",
    "pulse.amplitude",
    "pulse.detuning",
    "pulse.phase",
    "pulse.input",
    "fiber.length",
    "fiber.core_diameter",
    "fiber.kappa_per_m",
    "fiber.group_velocity",
    "grid.n_z",
    "grid.n_t",
    "grid.window_tp",
    "grid.n_freq_bins",
    "grid.span_fwhm",
    "grid.n_samples",
    "numerics.scheme",
    "numerics.midpoint_iterations",
    "numerics.noise_model",
    "ensemble.n_traj",
    "ensemble.master_seed",
    "ensemble.batch_count",
    "scan.kind",
    "scan.phase_points",
    "scan.detunings_tp",
    "scan.temperatures",
    "output.directory",
    "output.svg",
];

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: HashMap<&'static str, Entry> = HashMap::new();
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| Error::Config {
                    line: Some(line),
                    key: None,
                    message: format!("unterminated section header `{content}`"),
                })?;
                section = name.trim().to_string();
                continue;
            }
            let (k, v) = content.split_once('=').ok_or_else(|| Error::Config {
                line: Some(line),
                key: None,
                message: format!("expected `key = value`, got `{content}`"),
            })?;
            let full = format!("{section}.{}", k.trim());
            let key = KEYS
                .iter()
                .find(|&&known| known == full)
                .ok_or_else(|| err(line, &full, "unknown key"))?;
            if let Some(prev) = entries.get(key) {
                return Err(err(line, key, format!("duplicate key (first set on line {})", prev.line)));
            }
            entries.insert(
                key,
                Entry {
                    value: v.trim().to_string(),
                    line,
                },
            );
        }
        let cfg = Self::from_entries(&entries)?;
        cfg.validate(&entries)?;
        Ok(cfg)
    }

    fn from_entries(entries: &HashMap<&'static str, Entry>) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut keys: Vec<_> = entries.keys().copied().collect();
        keys.sort_by_key(|k| entries[k].line);
        for key in keys {
            let e = &entries[key];
            let s = &mut cfg.scenario;
            match key {
                "gas.temperature" => s.gas.temperature = number(e, key)?,
                "gas.pressure" => s.gas.pressure = number_or(e, key, "auto")?,
                "gas.atom_number_total" => s.gas.atom_number_total = number_or(e, key, "none")?,
                "gas.isotopes" => {
                    s.gas.isotope_mode = IsotopeMode::parse(&e.value).ok_or_else(|| {
                        err(e.line, key, format!("expected `all` or `<A>-only`, got `{}`", e.value))
                    })?
                }
                "gas.isotope_table" => {
                    if e.value != "bundled" {
                        let path = PathBuf::from(&e.value);
                        let table = load_isotope_table(&path).map_err(|x| err(e.line, key, x.to_string()))?;
                        s.isotope_table = Some(table);
                        cfg.isotope_table_path = Some(path);
                    }
                }
                "gas.field_bath_temperature" => s.gas.field_bath_temperature = number_or(e, key, "gas")?,
                "gas.atom_bath_temperature" => s.gas.atom_bath_temperature = number_or(e, key, "gas")?,
                "gas.coupling" => {
                    s.gas.coupling = match tagged(e, key)? {
                        (t, None) if t == "physical" => CouplingChoice::Physical,
                        (t, Some(g)) if t == "fixed" => CouplingChoice::Fixed(g),
                        (t, Some(a)) if t == "absorption" => CouplingChoice::Absorption(a),
                        _ => {
                            return Err(err(
                                e.line,
                                key,
                                "expected `physical`, `fixed <G m²/s>` or `absorption <α 1/m>`",
                            ))
                        }
                    }
                }
                "gas.dephasing" => {
                    s.gas.dephasing = match tagged(e, key)? {
                        (t, Some(r)) if t == "ratio" => Dephasing::Ratio(r),
                        (t, Some(r)) if t == "rate" => Dephasing::Rate(r),
                        _ => return Err(err(e.line, key, "expected `ratio <γ_p/γ₀>` or `rate <rad/s>`")),
                    }
                }
                "gas.initial_inversion" => s.gas.initial_inversion = number(e, key)?,
                "gas.undamped" => s.gas.undamped = flag(e, key)?,
                "pulse.duration" => s.pulse.duration = number(e, key)?,
                "pulse.amplitude" => s.pulse.amplitude = number_or(e, key, "soliton")?,
                "pulse.detuning" => s.pulse.detuning = number(e, key)?,
                "pulse.phase" => s.pulse.phase = number(e, key)?,
                "pulse.input" => {
                    s.input_pulse = match e.value.as_str() {
                        "soliton" => true,
                        "vacuum" => false,
                        v => return Err(err(e.line, key, format!("expected soliton or vacuum, got `{v}`"))),
                    }
                }
                "fiber.length" => s.fiber.length = number(e, key)?,
                "fiber.core_diameter" => s.fiber.core_diameter = number(e, key)?,
                "fiber.kappa_per_m" => s.fiber.kappa = number(e, key)?,
                "fiber.group_velocity" => s.fiber.group_velocity = number(e, key)?,
                "grid.n_z" => s.grid.n_z = count(e, key)?,
                "grid.n_t" => s.grid.n_t = count(e, key)?,
                "grid.window_tp" => s.grid.window_tp = number(e, key)?,
                "grid.n_freq_bins" => s.grid.n_freq_bins = count(e, key)?,
                "grid.span_fwhm" => s.grid.span_fwhm = number(e, key)?,
                "grid.n_samples" => s.grid.n_samples = count(e, key)?,
                "numerics.scheme" => {
                    s.scheme = match e.value.as_str() {
                        "midpoint" => Scheme::default(),
                        "euler" => Scheme::Euler,
                        v => return Err(err(e.line, key, format!("expected midpoint or euler, got `{v}`"))),
                    }
                }
                "numerics.midpoint_iterations" => {
                    let n = count(e, key)?;
                    if !(1..=50).contains(&n) {
                        return Err(err(e.line, key, "must be between 1 and 50"));
                    }
                }
                "numerics.noise_model" => {
                    s.noise_model = NoiseModel::parse(&e.value).ok_or_else(|| {
                        err(e.line, key, format!("expected consistent or printed, got `{}`", e.value))
                    })?
                }
                "ensemble.n_traj" => cfg.ensemble.n_traj = count(e, key)?,
                "ensemble.master_seed" => {
                    cfg.ensemble.master_seed = e
                        .value
                        .parse()
                        .map_err(|_| err(e.line, key, format!("expected an unsigned integer, got `{}`", e.value)))?
                }
                "ensemble.batch_count" => cfg.ensemble.batch_count = count(e, key)?,
                "scan.kind" => {
                    cfg.scan.kind = ScanKind::parse(&e.value).ok_or_else(|| {
                        err(e.line, key, format!("expected phase, detuning or pressure, got `{}`", e.value))
                    })?
                }
                "scan.phase_points" => cfg.scan.phase_points = count(e, key)?,
                "scan.detunings_tp" => cfg.scan.detunings_tp = list(e, key)?,
                "scan.temperatures" => cfg.scan.temperatures = list(e, key)?,
                "output.directory" => cfg.output.directory = PathBuf::from(&e.value),
                "output.svg" => cfg.output.svg = flag(e, key)?,
                _ => unreachable!("key list and match arms out of sync: {key}"),
            }
        }
        if let (Some(e), Scheme::Midpoint { iterations }) =
            (entries.get("numerics.midpoint_iterations"), &mut cfg.scenario.scheme)
        {
            *iterations = count(e, "numerics.midpoint_iterations")? as u8;
        }
        Ok(cfg)
    }

    /// Whole-configuration checks. Errors carry the line of the offending key
    /// when it was set in the file.
    fn validate(&self, entries: &HashMap<&'static str, Entry>) -> Result<()> {
        let at = |key: &str, message: String| Error::Config {
            line: entries.get(key).map(|e| e.line),
            key: Some(key.to_string()),
            message,
        };
        let s = &self.scenario;
        let positive = [
            ("gas.temperature", s.gas.temperature),
            ("pulse.duration", s.pulse.duration),
            ("fiber.length", s.fiber.length),
            ("fiber.core_diameter", s.fiber.core_diameter),
            ("fiber.group_velocity", s.fiber.group_velocity),
            ("grid.window_tp", s.grid.window_tp),
            ("grid.span_fwhm", s.grid.span_fwhm),
        ];
        for (key, v) in positive {
            if !(v > 0.0) {
                return Err(at(key, format!("must be > 0, got {v}")));
            }
        }
        let non_negative = [
            ("gas.pressure", s.gas.pressure),
            ("gas.atom_number_total", s.gas.atom_number_total),
            ("gas.field_bath_temperature", s.gas.field_bath_temperature),
            ("gas.atom_bath_temperature", s.gas.atom_bath_temperature),
            ("pulse.amplitude", s.pulse.amplitude),
            ("fiber.kappa_per_m", Some(s.fiber.kappa)),
        ];
        for (key, v) in non_negative {
            if let Some(v) = v {
                if !(v >= 0.0) {
                    return Err(at(key, format!("must be ≥ 0, got {v}")));
                }
            }
        }
        if !(-0.5..=0.5).contains(&s.gas.initial_inversion) {
            return Err(at("gas.initial_inversion", "must lie in [−0.5, 0.5]".into()));
        }
        match s.gas.dephasing {
            Dephasing::Ratio(r) | Dephasing::Rate(r) if r < 0.0 => {
                return Err(at("gas.dephasing", "must be ≥ 0".into()))
            }
            _ => {}
        }
        match s.gas.coupling {
            CouplingChoice::Fixed(v) | CouplingChoice::Absorption(v) if !(v > 0.0) => {
                return Err(at("gas.coupling", "value must be > 0".into()))
            }
            _ => {}
        }
        if s.grid.n_freq_bins == 0 || s.grid.n_freq_bins % 2 == 0 {
            return Err(at(
                "grid.n_freq_bins",
                format!("must be odd so one bin sits on line centre, got {}", s.grid.n_freq_bins),
            ));
        }
        if self.ensemble.n_traj < 2 {
            return Err(at("ensemble.n_traj", "need at least 2 trajectories".into()));
        }
        if self.ensemble.batch_count < 2 || self.ensemble.batch_count > self.ensemble.n_traj {
            return Err(at(
                "ensemble.batch_count",
                format!("must lie in 2..=n_traj, got {}", self.ensemble.batch_count),
            ));
        }
        if self.scan.phase_points == 0 {
            return Err(at("scan.phase_points", "must be ≥ 1".into()));
        }
        if self.scan.detunings_tp.iter().any(|&d| d < 0.0) {
            return Err(at("scan.detunings_tp", "detunings must be ≥ 0".into()));
        }
        if self.scan.temperatures.iter().any(|&t| !(t > 0.0)) {
            return Err(at("scan.temperatures", "temperatures must be > 0".into()));
        }
        let grid = s.grid().map_err(|e| at("grid.n_z", e.to_string()))?;
        grid.validate_for(&s.pulse_config(grid.window))
            .map_err(|e| at("grid.n_t", e.to_string()))?;
        s.pressure().map_err(|e| at("gas.temperature", e.to_string()))?;
        if self.scan.kind == ScanKind::Pressure {
            for &t in &self.scan.temperatures {
                crate::atomic_data::vapor_pressure_hg(t).map_err(|e| at("scan.temperatures", e.to_string()))?;
            }
        }
        s.build().map_err(|e| match e {
            Error::Config { line: None, key: Some(k), message } => {
                let full = KEYS.iter().find(|f| f.ends_with(&format!(".{k}"))).copied().unwrap_or("");
                Error::Config {
                    line: entries.get(full).map(|e| e.line),
                    key: Some(k),
                    message,
                }
            }
            other => other,
        })?;
        Ok(())
    }

    /// Every key with its current value, in file syntax.
    pub fn to_text(&self) -> String {
        let s = &self.scenario;
        let g = &s.gas;
        let mut out = String::new();
        let opt = |v: Option<f64>, word: &str| v.map_or(word.to_string(), num);
        let _ = writeln!(out, "[gas]");
        let _ = writeln!(out, "temperature = {}", num(g.temperature));
        let _ = writeln!(out, "pressure = {}", opt(g.pressure, "auto"));
        let _ = writeln!(out, "atom_number_total = {}", opt(g.atom_number_total, "none"));
        let _ = writeln!(out, "isotopes = {}", g.isotope_mode);
        let _ = writeln!(
            out,
            "isotope_table = {}",
            self.isotope_table_path
                .as_ref()
                .map_or("bundled".to_string(), |p| p.display().to_string())
        );
        let _ = writeln!(out, "field_bath_temperature = {}", opt(g.field_bath_temperature, "gas"));
        let _ = writeln!(out, "atom_bath_temperature = {}", opt(g.atom_bath_temperature, "gas"));
        let coupling = match g.coupling {
            CouplingChoice::Physical => "physical".to_string(),
            CouplingChoice::Fixed(v) => format!("fixed {}", num(v)),
            CouplingChoice::Absorption(v) => format!("absorption {}", num(v)),
        };
        let _ = writeln!(out, "coupling = {coupling}");
        let dephasing = match g.dephasing {
            Dephasing::Ratio(r) => format!("ratio {}", num(r)),
            Dephasing::Rate(r) => format!("rate {}", num(r)),
        };
        let _ = writeln!(out, "dephasing = {dephasing}");
        let _ = writeln!(out, "initial_inversion = {}", num(g.initial_inversion));
        let _ = writeln!(out, "undamped = {}", g.undamped);

        let p = &s.pulse;
        let _ = writeln!(out, "\n[pulse]");
        let _ = writeln!(out, "duration = {}", num(p.duration));
        let _ = writeln!(out, "amplitude = {}", opt(p.amplitude, "soliton"));
        let _ = writeln!(out, "detuning = {}", num(p.detuning));
        let _ = writeln!(out, "phase = {}", num(p.phase));
        let _ = writeln!(out, "input = {}", if s.input_pulse { "soliton" } else { "vacuum" });

        let f = &s.fiber;
        let _ = writeln!(out, "\n[fiber]");
        let _ = writeln!(out, "length = {}", num(f.length));
        let _ = writeln!(out, "core_diameter = {}", num(f.core_diameter));
        let _ = writeln!(out, "kappa_per_m = {}", num(f.kappa));
        let _ = writeln!(out, "group_velocity = {}", num(f.group_velocity));

        let gr = &s.grid;
        let _ = writeln!(out, "\n[grid]");
        let _ = writeln!(out, "n_z = {}", gr.n_z);
        let _ = writeln!(out, "n_t = {}", gr.n_t);
        let _ = writeln!(out, "window_tp = {}", num(gr.window_tp));
        let _ = writeln!(out, "n_freq_bins = {}", gr.n_freq_bins);
        let _ = writeln!(out, "span_fwhm = {}", num(gr.span_fwhm));
        let _ = writeln!(out, "n_samples = {}", gr.n_samples);

        let _ = writeln!(out, "\n[numerics]");
        match s.scheme {
            Scheme::Midpoint { iterations } => {
                let _ = writeln!(out, "scheme = midpoint");
                let _ = writeln!(out, "midpoint_iterations = {iterations}");
            }
            Scheme::Euler => {
                let _ = writeln!(out, "scheme = euler");
            }
        }
        let _ = writeln!(out, "noise_model = {}", s.noise_model.name());

        let e = &self.ensemble;
        let _ = writeln!(out, "\n[ensemble]");
        let _ = writeln!(out, "n_traj = {}", e.n_traj);
        let _ = writeln!(out, "master_seed = {}", e.master_seed);
        let _ = writeln!(out, "batch_count = {}", e.batch_count);

        let sc = &self.scan;
        let _ = writeln!(out, "\n[scan]");
        let _ = writeln!(out, "kind = {}", sc.kind.name());
        let _ = writeln!(out, "phase_points = {}", sc.phase_points);
        let _ = writeln!(out, "detunings_tp = {}", num_list(&sc.detunings_tp));
        let _ = writeln!(out, "temperatures = {}", num_list(&sc.temperatures));

        let _ = writeln!(out, "\n[output]");
        let _ = writeln!(out, "directory = {}", self.output.directory.display());
        let _ = writeln!(out, "svg = {}", self.output.svg);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn minimal_config_is_valid() {
        let cfg = RunConfig::parse("[gas]\ntemperature = 273\n[pulse]\nduration = 4e-15\n").unwrap();
        assert_eq!(cfg.scenario.gas.pressure, None);
        let p = cfg.scenario.pressure().unwrap();
        assert!((p / 0.272 - 1.0).abs() < 0.05, "{p}");
        assert_eq!(cfg.ensemble.n_traj, 2000);
        assert_eq!(cfg.scenario.grid.n_z, 500);
        assert_eq!(cfg.scenario.grid.n_t, 2048);
    }

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(RunConfig::parse("# nothing\n\n").unwrap(), RunConfig::default());
    }

    #[test]
    fn unknown_key_is_rejected_with_line() {
        let e = RunConfig::parse("[gas]\ntemperature = 273\nfoo = 1\n").unwrap_err();
        match e {
            Error::Config { line, key, .. } => {
                assert_eq!(line, Some(3));
                assert_eq!(key.as_deref(), Some("gas.foo"));
            }
            other => panic!("{other:?}"),
        }
        assert!(RunConfig::parse("foo=1").is_err());
    }

    #[test]
    fn even_bin_count_names_the_key() {
        let e = RunConfig::parse("[grid]\nn_freq_bins = 40\n").unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("n_freq_bins") && msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        for (text, line) in [
            ("[gas\n", 1),
            ("[gas]\ntemperature 273\n", 2),
            ("[gas]\ntemperature = warm\n", 2),
            ("[gas]\ntemperature = 273\ntemperature = 274\n", 3),
            ("[gas]\n\ncoupling = fixed\n", 3),
            ("[ensemble]\nn_traj = -4\n", 2),
        ] {
            match RunConfig::parse(text).unwrap_err() {
                Error::Config { line: l, .. } => assert_eq!(l, Some(line), "{text}"),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn constraint_violations_are_config_errors() {
        for text in [
            "[gas]\ntemperature = -1\n",
            "[gas]\nisotopes = 203-only\n",
            "[grid]\nwindow_tp = 10\n",
            "[grid]\nn_t = 512\n",
            "[ensemble]\nn_traj = 1\n",
            "[ensemble]\nbatch_count = 1\n",
            "[scan]\ndetunings_tp = 0, -1\n",
            "[numerics]\nnoise_model = loud\n",
        ] {
            let e = RunConfig::parse(text).unwrap_err();
            assert_eq!(e.exit_code(), 1, "{text}: {e}");
        }
    }

    #[test]
    fn values_are_applied() {
        let text = "[gas]\nisotopes = all\ncoupling = absorption 150\ndephasing = rate 0\n\
                    [numerics]\nmidpoint_iterations = 5\n[scan]\nkind = detuning\ndetunings_tp = 0, 0.5\n";
        let cfg = RunConfig::parse(text).unwrap();
        assert_eq!(cfg.scenario.gas.isotope_mode, IsotopeMode::All);
        assert_eq!(cfg.scenario.gas.coupling, CouplingChoice::Absorption(150.0));
        assert_eq!(cfg.scenario.gas.dephasing, Dephasing::Rate(0.0));
        assert_eq!(cfg.scenario.scheme, Scheme::Midpoint { iterations: 5 });
        assert_eq!(cfg.scan.kind, ScanKind::Detuning);
        assert_eq!(cfg.scan.detunings_tp, vec![0.0, 0.5]);
    }

    #[test]
    fn echo_round_trips() {
        let text = "[gas]\npressure = 0.3\natom_number_total = 2.5e10\ncoupling = fixed 1.25e-5\n\
                    [pulse]\nphase = 0.1\n[numerics]\nscheme = euler\n[output]\nsvg = false\n";
        let cfg = RunConfig::parse(text).unwrap();
        assert_eq!(RunConfig::parse(&cfg.to_text()).unwrap(), cfg);
        let d = RunConfig::default();
        assert_eq!(RunConfig::parse(&d.to_text()).unwrap(), d);
    }

    proptest! {
        #[test]
        fn numbers_round_trip_through_text(v in prop::num::f64::NORMAL) {
            prop_assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }

        #[test]
        fn echo_round_trips_for_random_values(
            t in 250.0f64..320.0,
            tp in 1e-15f64..1e-14,
            phase in -3.0f64..3.0,
            n_traj in 10usize..100_000,
            seed in any::<u64>(),
        ) {
            let mut cfg = RunConfig::default();
            cfg.scenario.gas.temperature = t;
            cfg.scenario.pulse.duration = tp;
            cfg.scenario.pulse.phase = phase;
            cfg.ensemble.n_traj = n_traj;
            cfg.ensemble.master_seed = seed;
            let back = RunConfig::parse(&cfg.to_text()).unwrap();
            prop_assert_eq!(back, cfg);
        }
    }
}

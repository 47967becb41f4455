//! Parameter scans: one ensemble per point, reduced to its optimum squeezing.

use crate::atomic_data::{number_density, vapor_pressure_hg};
use crate::ensemble::{run_ensemble, EnsembleConfig, TrajectorySet};
use crate::error::Result;
use crate::measurement::{scan_phase_length, Optimum, SqueezingSurface};
use crate::scenario::Scenario;

/// Build, run and reduce one scenario.
pub fn run_surface(
    scenario: &Scenario,
    ensemble: &EnsembleConfig,
    theta: &[f64],
) -> Result<(SqueezingSurface, TrajectorySet)> {
    let sim = scenario.build()?;
    let set = run_ensemble(&sim, ensemble)?;
    let surface = scan_phase_length(&set.moments, theta, set.n_discarded as u64)?;
    Ok((surface, set))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanPoint {
    /// Detuning in units of 1/τ_p, or gas temperature in K.
    pub parameter: f64,
    /// Pa
    pub pressure: f64,
    pub optimum: Optimum,
    pub n_used: u64,
    pub n_discarded: usize,
    pub max_imag_ratio: f64,
    pub warning: Option<String>,
}

impl ScanPoint {
    fn new(parameter: f64, pressure: f64, surface: &SqueezingSurface, set: &TrajectorySet) -> Self {
        ScanPoint {
            parameter,
            pressure,
            optimum: surface.optimum,
            n_used: surface.n_traj_used,
            n_discarded: set.n_discarded,
            max_imag_ratio: surface.max_imag_ratio,
            warning: set.warning.clone(),
        }
    }
}

/// The base scenario with the pulse detuned by `delta_tp / τ_p`.
pub fn scenario_at_detuning(base: &Scenario, delta_tp: f64) -> Scenario {
    let mut s = base.clone();
    s.pulse.detuning = delta_tp / s.pulse.duration;
    s
}

/// The base scenario at gas temperature `t` with the saturated vapour
/// pressure. An explicit atom number is scaled with the density.
pub fn scenario_at_temperature(base: &Scenario, t: f64) -> Result<Scenario> {
    let mut s = base.clone();
    let pressure = vapor_pressure_hg(t)?;
    if let Some(n) = base.gas.atom_number_total {
        let rho0 = number_density(base.pressure()?, base.gas.temperature)?;
        let rho = number_density(pressure, t)?;
        s.gas.atom_number_total = Some(if rho0 > 0.0 { n * rho / rho0 } else { n });
    }
    s.gas.temperature = t;
    s.gas.pressure = None;
    Ok(s)
}

/// Optimum squeezing against pulse detuning (units of 1/τ_p).
pub fn scan_detuning(
    base: &Scenario,
    ensemble: &EnsembleConfig,
    detunings_tp: &[f64],
    theta: &[f64],
) -> Result<Vec<ScanPoint>> {
    detunings_tp
        .iter()
        .map(|&d| {
            let s = scenario_at_detuning(base, d);
            let (surface, set) = run_surface(&s, ensemble, theta)?;
            Ok(ScanPoint::new(d, s.pressure()?, &surface, &set))
        })
        .collect()
}

/// Optimum squeezing and detection length against gas temperature (and so
/// vapour pressure).
pub fn scan_pressure(
    base: &Scenario,
    ensemble: &EnsembleConfig,
    temperatures: &[f64],
    theta: &[f64],
) -> Result<Vec<ScanPoint>> {
    temperatures
        .iter()
        .map(|&t| {
            let s = scenario_at_temperature(base, t)?;
            let (surface, set) = run_surface(&s, ensemble, theta)?;
            Ok(ScanPoint::new(t, s.pressure()?, &surface, &set))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn temperature_scan_uses_vapour_pressure() {
        let base = Scenario::default();
        let s = scenario_at_temperature(&base, 293.0).unwrap();
        assert_eq!(s.gas.pressure, None);
        assert!(s.pressure().unwrap() > base.pressure().unwrap());
    }

    #[test]
    fn atom_number_follows_density() {
        let mut base = Scenario::default();
        base.gas.atom_number_total = Some(1e10);
        let hot = scenario_at_temperature(&base, 303.0).unwrap();
        let ratio = hot.gas.atom_number_total.unwrap() / 1e10;
        let expected = number_density(vapor_pressure_hg(303.0).unwrap(), 303.0).unwrap()
            / number_density(vapor_pressure_hg(273.0).unwrap(), 273.0).unwrap();
        assert!((ratio / expected - 1.0).abs() < 1e-12);
        let same = scenario_at_temperature(&base, 273.0).unwrap();
        assert!((same.total_density().unwrap() / base.total_density().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn detuning_is_in_units_of_inverse_duration() {
        let s = scenario_at_detuning(&Scenario::default(), 2.0);
        assert_eq!(s.pulse.detuning, 2.0 / 4e-15);
    }
}

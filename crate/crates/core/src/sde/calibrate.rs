//! Coupling calibration from a target small-signal absorption coefficient.

use super::{CouplingSpec, Medium, MediumSpec};
use crate::error::{Error, Result};
use crate::field::Grid;

/// Small-signal CW intensity absorption coefficient of the discretised medium
/// at the carrier, 1/m: `2|R³₀| Σ_c source_c·u_c·γ⊥/(γ⊥² + Δ_c²)`.
pub fn absorption_coefficient(medium: &Medium, initial_inversion: f64) -> Result<f64> {
    let mut alpha = 0.0;
    for c in &medium.classes {
        let line = &c.step.line;
        let g = line.rates.gamma_perp;
        let denom = g * g + line.detuning * line.detuning;
        if denom == 0.0 {
            return Err(Error::Calibration(
                "undamped resonant line has no finite CW absorption".into(),
            ));
        }
        alpha += c.source * line.drive * g / denom;
    }
    Ok(2.0 * initial_inversion.abs() * alpha)
}

/// Scale the couplings in `spec` (or a uniform unit coupling if they are all
/// zero) so that the medium absorbs with coefficient `alpha_target`.
pub fn coupling_from_absorption(
    alpha_target: f64,
    spec: &MediumSpec,
    grid: &Grid,
    initial_inversion: f64,
) -> Result<CouplingSpec> {
    if !(alpha_target > 0.0 && alpha_target.is_finite()) {
        return Err(Error::Domain(format!(
            "α_target must be positive, got {alpha_target}"
        )));
    }
    let base = if spec.coupling.per_isotope.iter().any(|&g| g > 0.0) {
        spec.coupling.clone()
    } else {
        CouplingSpec::uniform(1.0, spec.sample.isotopes.len())
    };
    let alpha_at = |s: f64| -> Result<f64> {
        let trial = MediumSpec {
            coupling: base.scaled(s),
            ..spec.clone()
        };
        absorption_coefficient(&Medium::build(&trial, grid)?, initial_inversion)
    };

    let mut hi = 1.0;
    let mut a_hi = alpha_at(hi)?;
    if a_hi <= 0.0 {
        return Err(Error::Calibration(format!(
            "medium does not absorb at the carrier (density {:.3e} m⁻³)",
            spec.sample.total_density
        )));
    }
    let mut lo = 0.0;
    let mut expansions = 0;
    while a_hi < alpha_target {
        lo = hi;
        hi *= 2.0;
        a_hi = alpha_at(hi)?;
        expansions += 1;
        if expansions > 2000 || !a_hi.is_finite() {
            return Err(Error::Calibration(format!(
                "could not bracket α = {alpha_target} (reached {a_hi:.3e} at scale {hi:.3e})"
            )));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let a = alpha_at(mid)?;
        if (a / alpha_target - 1.0).abs() < 1e-12 {
            return Ok(base.scaled(mid));
        }
        if a < alpha_target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let a = alpha_at(0.5 * (lo + hi))?;
    Err(Error::Calibration(format!(
        "bisection stalled: α = {a:.6e} for target {alpha_target:.6e}, scale bracket [{lo:.6e}, {hi:.6e}]"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomic_data::{mercury_isotope_table, select_isotopes, GasSample, IsotopeMode};
    use crate::constants::{angular_frequency, CARRIER_WAVELENGTH};
    use crate::field::FiberConfig;
    use crate::rates::ThermalConfig;
    use crate::sde::Dephasing;

    fn spec(density: f64, g: f64) -> MediumSpec {
        let isotopes =
            select_isotopes(&mercury_isotope_table().unwrap(), IsotopeMode::Single(202)).unwrap();
        MediumSpec {
            sample: GasSample::with_total_density(273.0, 0.272, density, isotopes).unwrap(),
            coupling: CouplingSpec::uniform(g, 1),
            fiber: FiberConfig::default(),
            thermal: ThermalConfig {
                field_bath_temperature: 0.0,
                atom_bath_temperature: 0.0,
                carrier: angular_frequency(CARRIER_WAVELENGTH),
            },
            dephasing: Dephasing::Ratio(3.0),
            n_freq_bins: 1,
            span_fwhm: 6.0,
            undamped: false,
        }
    }

    fn grid() -> Grid {
        Grid::new(0.05, 10, 64, 1e-12, 1).unwrap()
    }

    fn alpha(s: &MediumSpec) -> f64 {
        absorption_coefficient(&Medium::build(s, &grid()).unwrap(), -0.5).unwrap()
    }

    #[test]
    fn linear_in_density_and_zero_without_coupling() {
        let a1 = alpha(&spec(1e18, 1e-7));
        let a2 = alpha(&spec(2e18, 1e-7));
        assert!((a2 / a1 - 2.0).abs() < 1e-12);
        assert_eq!(alpha(&spec(1e18, 0.0)), 0.0);
    }

    #[test]
    fn round_trip() {
        let s = spec(1e18, 1e-7);
        for target in [0.5, 60.0, 3e4] {
            let c = coupling_from_absorption(target, &s, &grid(), -0.5).unwrap();
            let back = alpha(&MediumSpec {
                coupling: c,
                ..s.clone()
            });
            assert!((back / target - 1.0).abs() < 1e-2);
        }
    }

    #[test]
    fn rejects_bad_targets() {
        let s = spec(1e18, 1e-7);
        assert!(coupling_from_absorption(0.0, &s, &grid(), -0.5).is_err());
        let empty = spec(0.0, 1e-7);
        assert!(matches!(
            coupling_from_absorption(1.0, &empty, &grid(), -0.5),
            Err(Error::Calibration(_))
        ));
    }
}

//! Positive-P Maxwell–Bloch integrator.
//!
//! The medium is flattened into *line classes*: one Bloch ensemble per
//! (isotope, transition, frequency bin). Classes with identical dynamics and
//! coupling are pooled into one, with their atom numbers added.

pub mod atoms;
pub mod calibrate;
pub mod field_step;
pub mod propagate;

use std::collections::HashMap;

use crate::atomic_data::{GasSample, IsotopeSpec};
use crate::constants::{ATOMIC_MASS_UNIT, CARRIER_WAVELENGTH};
use crate::error::{Error, Result};
use crate::field::{FiberConfig, Grid};
use crate::lineshape::{discretize_lineshape, doppler_fwhm, LineshapeParams};
use crate::rates::{RateSet, ThermalConfig, DEFAULT_DEPHASING_RATIO};

pub use atoms::{
    atomic_drift, atomic_noise, step_atoms, Bloch, LineParams, NoiseDraw, NoiseModel, Scheme,
    StepContext,
};
pub use calibrate::{absorption_coefficient, coupling_from_absorption};
pub use field_step::{polarization_source, step_field, Advector};
pub use propagate::{propagate_trajectory, Recorder, SliceRecorder, TrajectoryState};

/// Per-isotope source coefficients G_α, m²/s.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingSpec {
    pub per_isotope: Vec<f64>,
}

impl CouplingSpec {
    /// `G = 3λ²γ₀/(4π)` from each isotope's main line, so that the resonant
    /// cross-section of an unbroadened line is `3λ²/(2π)`.
    pub fn physical(isotopes: &[IsotopeSpec]) -> Result<Self> {
        let per_isotope = isotopes
            .iter()
            .map(|iso| {
                let line =
                    iso.main_line()
                        .or(iso.transitions.first())
                        .ok_or_else(|| Error::Data {
                            record: format!("isotope {}", iso.mass_number),
                            message: "no transitions".into(),
                        })?;
                let lambda = line.wavelength(CARRIER_WAVELENGTH);
                Ok(3.0 * lambda * lambda * line.natural_linewidth / (4.0 * std::f64::consts::PI))
            })
            .collect::<Result<_>>()?;
        Ok(CouplingSpec { per_isotope })
    }

    pub fn uniform(g: f64, n_isotopes: usize) -> Self {
        CouplingSpec {
            per_isotope: vec![g; n_isotopes],
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        CouplingSpec {
            per_isotope: self.per_isotope.iter().map(|g| g * factor).collect(),
        }
    }

    pub fn validate(&self, n_isotopes: usize) -> Result<()> {
        if self.per_isotope.len() != n_isotopes {
            return Err(Error::Argument(format!(
                "{} couplings for {} isotopes",
                self.per_isotope.len(),
                n_isotopes
            )));
        }
        if let Some(g) = self
            .per_isotope
            .iter()
            .find(|g| !(**g >= 0.0 && g.is_finite()))
        {
            return Err(Error::Domain(format!(
                "coupling {g} must be finite and ≥ 0"
            )));
        }
        Ok(())
    }
}

/// Pure dephasing per line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Dephasing {
    /// γ_p = ratio·γ₀ of each line.
    Ratio(f64),
    /// Same γ_p for every line, rad/s.
    Rate(f64),
}

impl Default for Dephasing {
    fn default() -> Self {
        Dephasing::Ratio(DEFAULT_DEPHASING_RATIO)
    }
}

/// Everything that defines the atomic medium on a given grid.
#[derive(Clone, Debug)]
pub struct MediumSpec {
    pub sample: GasSample,
    pub coupling: CouplingSpec,
    pub fiber: FiberConfig,
    pub thermal: ThermalConfig,
    pub dephasing: Dephasing,
    pub n_freq_bins: usize,
    pub span_fwhm: f64,
    /// Treat every line as undamped (γ∥ = γ⊥ = 0), for coherent tests.
    pub undamped: bool,
}

/// One pooled Bloch ensemble and its weight in the field equation.
#[derive(Clone, Copy, Debug)]
pub struct LineClass {
    pub step: StepContext,
    /// Σ G_α·u·ρ_α·w_m over the pooled members, 1/(s·m) per unit R⁻.
    pub source: f64,
}

#[derive(Clone, Debug)]
pub struct Medium {
    pub classes: Vec<LineClass>,
    pub kappa: f64,
    /// Amplitude of the thermal field noise, `2·sqrt(κ n̄ ΣA_αG_α / A_core)`.
    pub field_noise: f64,
    /// Equal-space field commutator `2 ΣA_αG_α / A_core`, 1/s.
    pub commutator: f64,
    /// τ-advection coefficient `1/c − 1/v_g`, s/m.
    pub advection: f64,
}

impl Medium {
    pub fn build(spec: &MediumSpec, grid: &Grid) -> Result<Self> {
        let sample = &spec.sample;
        spec.coupling.validate(sample.isotopes.len())?;
        let area = spec.fiber.core_area();
        let cell_volume = area * grid.dz;

        let mut classes: Vec<LineClass> = Vec::new();
        let mut index: HashMap<[u64; 5], usize> = HashMap::new();
        let mut weighted_g = 0.0;
        let mut n_bar = 0.0_f64;

        for (iso, (&rho, &g)) in sample.isotopes.iter().zip(
            sample
                .per_isotope_density
                .iter()
                .zip(&spec.coupling.per_isotope),
        ) {
            weighted_g += iso.abundance * g;
            for line in &iso.transitions {
                let gamma_p = match spec.dephasing {
                    Dephasing::Ratio(r) => r * line.natural_linewidth,
                    Dephasing::Rate(r) => r,
                };
                let thermal = ThermalConfig {
                    carrier: crate::constants::angular_frequency(
                        line.wavelength(CARRIER_WAVELENGTH),
                    ),
                    ..spec.thermal
                };
                let rates = if spec.undamped {
                    RateSet::undamped()
                } else {
                    RateSet::new(line.natural_linewidth, gamma_p, &thermal, spec.fiber.kappa)?
                };
                n_bar = n_bar.max(rates.n_bar);
                if rho <= 0.0 || g == 0.0 || line.relative_strength == 0.0 {
                    continue;
                }
                let shape = LineshapeParams::new(
                    if spec.undamped {
                        0.0
                    } else {
                        line.natural_linewidth
                    },
                    doppler_fwhm(
                        sample.temperature,
                        iso.atomic_mass * ATOMIC_MASS_UNIT,
                        line.wavelength(CARRIER_WAVELENGTH),
                    ),
                    line.center_frequency_offset,
                )?;
                let bins = discretize_lineshape(&shape, spec.n_freq_bins, spec.span_fwhm)?;
                let u = line.amplitude_factor();
                for (&detuning, &w) in bins.bin_centers.iter().zip(&bins.weights) {
                    if w <= 0.0 {
                        continue;
                    }
                    let key = [
                        detuning.to_bits(),
                        u.to_bits(),
                        g.to_bits(),
                        rates.gamma_perp.to_bits(),
                        rates.w12.to_bits() ^ rates.gamma_p.to_bits().rotate_left(17),
                    ];
                    let atoms = rho * w * cell_volume;
                    let source = g * u * rho * w;
                    match index.get(&key) {
                        Some(&i) => {
                            let c = &mut classes[i];
                            c.step.line.atoms_per_cell += atoms;
                            c.source += source;
                        }
                        None => {
                            index.insert(key, classes.len());
                            classes.push(LineClass {
                                step: StepContext::new(
                                    LineParams {
                                        detuning,
                                        drive: u,
                                        rates,
                                        atoms_per_cell: atoms,
                                    },
                                    grid.dtau,
                                    grid.window,
                                ),
                                source,
                            });
                        }
                    }
                }
            }
        }
        // Pooling changed atom numbers after construction; refresh the contexts.
        for c in &mut classes {
            c.step = StepContext::new(c.step.line, grid.dtau, grid.window);
        }

        let kappa = spec.fiber.kappa;
        let noise_rate = kappa * n_bar;
        let field_noise = if noise_rate * spec.fiber.length > f64::EPSILON {
            2.0 * (noise_rate * weighted_g / area).sqrt()
        } else {
            0.0
        };
        Ok(Medium {
            classes,
            kappa,
            field_noise,
            commutator: 2.0 * weighted_g / area,
            advection: spec.fiber.advection(),
        })
    }

    /// Total atoms per z cell over all classes.
    pub fn atoms_per_cell(&self) -> f64 {
        self.classes
            .iter()
            .map(|c| c.step.line.atoms_per_cell)
            .sum()
    }

    /// Interaction strength `Σ source·|R³₀|·u·τ_p·L`: the linear phase
    /// (in units of the pulse duration) a resonant soliton accumulates.
    pub fn interaction_strength(&self, initial_inversion: f64, duration: f64, length: f64) -> f64 {
        self.classes
            .iter()
            .filter(|c| c.step.line.detuning.abs() * duration < 1.0)
            .map(|c| c.source * c.step.line.drive)
            .sum::<f64>()
            * initial_inversion.abs()
            * duration
            * length
    }
}

/// Options that change how a trajectory is integrated, not what is simulated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimOptions {
    pub noise: bool,
    pub scheme: Scheme,
    pub noise_model: NoiseModel,
    pub initial_inversion: f64,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            noise: true,
            scheme: Scheme::default(),
            noise_model: NoiseModel::default(),
            initial_inversion: -0.5,
        }
    }
}

impl SimOptions {
    pub fn deterministic() -> Self {
        SimOptions {
            noise: false,
            ..Self::default()
        }
    }
}

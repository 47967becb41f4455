//! A complete physical and numerical setup, and its assembly into a
//! ready-to-run [`Simulation`].

use crate::atomic_data::{
    mercury_isotope_table, number_density, select_isotopes, vapor_pressure_hg, GasSample,
    IsotopeMode, IsotopeSpec,
};
use crate::constants::{angular_frequency, CARRIER_WAVELENGTH};
use crate::error::{Error, Result};
use crate::field::{init_soliton, FiberConfig, FieldSlice, Grid, PulseConfig};
use crate::lineshape::{DEFAULT_BINS, DEFAULT_SPAN_FWHM};
use crate::measurement::HomodyneConfig;
use crate::rates::ThermalConfig;
use crate::sde::{
    coupling_from_absorption, CouplingSpec, Dephasing, Medium, MediumSpec, NoiseModel, Scheme,
    SimOptions,
};

/// How the source coefficients G_α are fixed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CouplingChoice {
    /// From each isotope's main-line γ₀ and wavelength.
    Physical,
    /// Same G for every isotope, m²/s.
    Fixed(f64),
    /// Scaled so the small-signal absorption coefficient is this, 1/m.
    Absorption(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GasConfig {
    /// K
    pub temperature: f64,
    /// Pa; `None` uses the vapour-pressure law.
    pub pressure: Option<f64>,
    /// Atoms in the whole fiber; overrides the ideal-gas density.
    pub atom_number_total: Option<f64>,
    pub isotope_mode: IsotopeMode,
    /// Field reservoir temperature; defaults to the gas temperature.
    pub field_bath_temperature: Option<f64>,
    /// Atomic radiative reservoir temperature; defaults to the gas temperature.
    pub atom_bath_temperature: Option<f64>,
    pub coupling: CouplingChoice,
    pub dephasing: Dephasing,
    pub initial_inversion: f64,
    /// Drop all damping (coherent tests).
    pub undamped: bool,
}

impl Default for GasConfig {
    fn default() -> Self {
        GasConfig {
            temperature: 273.0,
            pressure: None,
            atom_number_total: None,
            isotope_mode: IsotopeMode::Single(202),
            field_bath_temperature: None,
            atom_bath_temperature: None,
            coupling: CouplingChoice::Physical,
            dephasing: Dephasing::default(),
            initial_inversion: -0.5,
            undamped: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PulseSpec {
    /// τ_p, s
    pub duration: f64,
    /// Half peak Rabi frequency A, rad/s; `None` is the 2π soliton `1/τ_p`.
    pub amplitude: Option<f64>,
    /// rad/s
    pub detuning: f64,
    /// rad
    pub phase: f64,
}

impl Default for PulseSpec {
    fn default() -> Self {
        PulseSpec {
            duration: 4e-15,
            amplitude: None,
            detuning: 0.0,
            phase: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub n_z: usize,
    pub n_t: usize,
    /// Window length in units of τ_p.
    pub window_tp: f64,
    pub n_freq_bins: usize,
    pub span_fwhm: f64,
    pub n_samples: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            n_z: 500,
            n_t: 2048,
            window_tp: 40.0,
            n_freq_bins: DEFAULT_BINS,
            span_fwhm: DEFAULT_SPAN_FWHM,
            n_samples: 50,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub gas: GasConfig,
    pub pulse: PulseSpec,
    pub fiber: FiberConfig,
    pub grid: GridSpec,
    pub scheme: Scheme,
    pub noise_model: NoiseModel,
    /// Input pulse present; `false` propagates vacuum (shot-noise calibration).
    pub input_pulse: bool,
    /// Isotope table; `None` uses the bundled mercury data.
    pub isotope_table: Option<Vec<IsotopeSpec>>,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            gas: GasConfig::default(),
            pulse: PulseSpec::default(),
            fiber: FiberConfig::default(),
            grid: GridSpec::default(),
            scheme: Scheme::default(),
            noise_model: NoiseModel::default(),
            input_pulse: true,
            isotope_table: None,
        }
    }
}

/// Everything a trajectory needs, immutable once built.
#[derive(Clone, Debug)]
pub struct Simulation {
    pub medium: Medium,
    pub grid: Grid,
    pub pulse: PulseConfig,
    pub input: FieldSlice,
    pub homodyne: HomodyneConfig,
    pub options: SimOptions,
    pub sample: GasSample,
    pub coupling: CouplingSpec,
}

impl Simulation {
    /// |Ω| bound for divergence detection, 10⁶ times the peak input Rabi frequency.
    pub fn omega_limit(&self) -> f64 {
        1e6 * self.pulse.peak_rabi()
    }
}

impl Scenario {
    pub fn pressure(&self) -> Result<f64> {
        match self.gas.pressure {
            Some(p) => Ok(p),
            None => vapor_pressure_hg(self.gas.temperature),
        }
    }

    /// Total atom density, m⁻³.
    pub fn total_density(&self) -> Result<f64> {
        match self.gas.atom_number_total {
            Some(n) => {
                if !(n >= 0.0) {
                    return Err(Error::config("atom_number_total", "must be ≥ 0"));
                }
                Ok(n / (self.fiber.core_area() * self.fiber.length))
            }
            None => number_density(self.pressure()?, self.gas.temperature),
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        let g = &self.grid;
        Grid::new(
            self.fiber.length,
            g.n_z,
            g.n_t,
            g.window_tp * self.pulse.duration,
            g.n_samples,
        )
    }

    pub fn pulse_config(&self, window: f64) -> PulseConfig {
        let mut p =
            PulseConfig::soliton(self.pulse.duration, window).with_detuning(self.pulse.detuning);
        if let Some(a) = self.pulse.amplitude {
            p.amplitude = a;
        }
        p.phase = self.pulse.phase;
        p
    }

    pub fn medium_spec(&self, grid: &Grid) -> Result<MediumSpec> {
        let table = match &self.isotope_table {
            Some(t) => t.clone(),
            None => mercury_isotope_table()?,
        };
        let isotopes = select_isotopes(&table, self.gas.isotope_mode)?;
        let t = self.gas.temperature;
        let sample =
            GasSample::with_total_density(t, self.pressure()?, self.total_density()?, isotopes)?;
        let thermal = ThermalConfig {
            field_bath_temperature: self.gas.field_bath_temperature.unwrap_or(t),
            atom_bath_temperature: self.gas.atom_bath_temperature.unwrap_or(t),
            carrier: angular_frequency(CARRIER_WAVELENGTH),
        };
        let mut spec = MediumSpec {
            coupling: CouplingSpec::physical(&sample.isotopes)?,
            sample,
            fiber: self.fiber,
            thermal,
            dephasing: self.gas.dephasing,
            n_freq_bins: self.grid.n_freq_bins,
            span_fwhm: self.grid.span_fwhm,
            undamped: self.gas.undamped,
        };
        match self.gas.coupling {
            CouplingChoice::Physical => {}
            CouplingChoice::Fixed(g) => {
                spec.coupling = CouplingSpec::uniform(g, spec.sample.isotopes.len());
            }
            CouplingChoice::Absorption(alpha) => {
                spec.coupling =
                    coupling_from_absorption(alpha, &spec, grid, self.gas.initial_inversion)?;
            }
        }
        Ok(spec)
    }

    pub fn build(&self) -> Result<Simulation> {
        let grid = self.grid()?;
        let pulse = self.pulse_config(grid.window);
        grid.validate_for(&pulse)?;
        let spec = self.medium_spec(&grid)?;
        let medium = Medium::build(&spec, &grid)?;
        let input = if self.input_pulse {
            init_soliton(&pulse, &grid)?
        } else {
            FieldSlice::zeros(grid.n_t)
        };
        let homodyne = HomodyneConfig::matched(&pulse, &grid)?;
        Ok(Simulation {
            medium,
            grid,
            pulse,
            input,
            homodyne,
            options: SimOptions {
                noise: true,
                scheme: self.scheme,
                noise_model: self.noise_model,
                initial_inversion: self.gas.initial_inversion,
            },
            sample: spec.sample,
            coupling: spec.coupling,
        })
    }
}

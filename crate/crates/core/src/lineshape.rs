//! Doppler, Lorentzian and Voigt widths, the pseudo-Voigt density, and its
//! discretisation into weighted frequency bins.

use std::f64::consts::{LN_2, PI};

use crate::constants::BOLTZMANN;
use crate::error::{Error, Result};

/// Lorentzian coefficient of the Voigt FWHM combination rule.
pub const VOIGT_LORENTZ_COEFFICIENT: f64 = 0.5;
/// Quadratic coefficient under the root of the Voigt FWHM combination rule.
pub const VOIGT_QUADRATIC_COEFFICIENT: f64 = 0.2166;

pub const DEFAULT_BINS: usize = 41;
pub const DEFAULT_SPAN_FWHM: f64 = 6.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineshapeParams {
    /// rad/s
    pub lorentz_fwhm: f64,
    /// rad/s
    pub doppler_fwhm: f64,
    /// rad/s
    pub voigt_fwhm: f64,
    /// rad/s, relative to the carrier
    pub center: f64,
}

impl LineshapeParams {
    pub fn new(lorentz_fwhm: f64, doppler_fwhm: f64, center: f64) -> Result<Self> {
        if !(lorentz_fwhm >= 0.0 && doppler_fwhm >= 0.0) {
            return Err(Error::Domain(format!(
                "widths must be non-negative (Lorentz {lorentz_fwhm}, Doppler {doppler_fwhm})"
            )));
        }
        Ok(LineshapeParams {
            lorentz_fwhm,
            doppler_fwhm,
            voigt_fwhm: voigt_fwhm(lorentz_fwhm, doppler_fwhm),
            center,
        })
    }

    /// Lorentzian weight of the pseudo-Voigt mixture, clamped to [0, 1].
    pub fn lorentz_fraction(&self) -> f64 {
        if self.voigt_fwhm == 0.0 {
            return 0.0;
        }
        let r = self.lorentz_fwhm / self.voigt_fwhm;
        (1.366_03 * r - 0.477_19 * r * r + 0.111_16 * r * r * r).clamp(0.0, 1.0)
    }

    pub fn is_delta(&self) -> bool {
        self.voigt_fwhm == 0.0
    }
}

/// Doppler FWHM in angular frequency: `(4π/λ₀)·sqrt(2 ln2 k_B T / m)`.
pub fn doppler_fwhm(temperature: f64, mass: f64, wavelength: f64) -> f64 {
    debug_assert!(temperature >= 0.0 && mass > 0.0 && wavelength > 0.0);
    4.0 * PI / wavelength * (2.0 * LN_2 * BOLTZMANN * temperature / mass).sqrt()
}

pub fn voigt_fwhm(lorentz_fwhm: f64, doppler_fwhm: f64) -> f64 {
    VOIGT_LORENTZ_COEFFICIENT * lorentz_fwhm
        + (doppler_fwhm * doppler_fwhm + VOIGT_QUADRATIC_COEFFICIENT * lorentz_fwhm * lorentz_fwhm)
            .sqrt()
}

/// Normalised pseudo-Voigt density at `omega`, s.
///
/// Both components share the Voigt FWHM. Returns `Err` for a zero-width line,
/// which only the one-bin discretisation can represent.
pub fn voigt_profile(omega: f64, params: &LineshapeParams) -> Result<f64> {
    if params.is_delta() {
        return Err(Error::Domain("zero-width line is a delta function".into()));
    }
    let w = params.voigt_fwhm;
    let x = omega - params.center;
    let eta = params.lorentz_fraction();
    let lorentz = (w / (2.0 * PI)) / (x * x + 0.25 * w * w);
    let gauss = (2.0 / w) * (LN_2 / PI).sqrt() * (-4.0 * LN_2 * x * x / (w * w)).exp();
    Ok(eta * lorentz + (1.0 - eta) * gauss)
}

/// Inhomogeneous distribution sampled on symmetric bins.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyGrid {
    /// rad/s, relative to the carrier
    pub bin_centers: Vec<f64>,
    /// Sum to one.
    pub weights: Vec<f64>,
    /// rad/s; zero for the single-bin grid
    pub bin_width: f64,
}

impl FrequencyGrid {
    pub fn single(center: f64) -> Self {
        FrequencyGrid {
            bin_centers: vec![center],
            weights: vec![1.0],
            bin_width: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.bin_centers
            .iter()
            .zip(&self.weights)
            .map(|(w, p)| w * p)
            .sum()
    }

    /// Second central moment, (rad/s)².
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.bin_centers
            .iter()
            .zip(&self.weights)
            .map(|(w, p)| p * (w - m) * (w - m))
            .sum()
    }
}

/// Uniform bins over `center ± span_fwhm·Δω_V/2` with weights proportional to
/// the pseudo-Voigt density. One bin (or a zero-width line) gives the cold-gas
/// delta distribution.
pub fn discretize_lineshape(
    params: &LineshapeParams,
    n_bins: usize,
    span_fwhm: f64,
) -> Result<FrequencyGrid> {
    if n_bins == 0 || n_bins % 2 == 0 {
        return Err(Error::Argument(format!(
            "n_freq_bins must be odd and positive, got {n_bins}"
        )));
    }
    if !(span_fwhm > 0.0) {
        return Err(Error::Argument(format!(
            "span must be positive, got {span_fwhm}"
        )));
    }
    if n_bins == 1 || params.is_delta() {
        return Ok(FrequencyGrid::single(params.center));
    }
    let half = (n_bins / 2) as i64;
    let width = span_fwhm * params.voigt_fwhm / (n_bins - 1) as f64;
    let offsets: Vec<f64> = (-half..=half).map(|k| k as f64 * width).collect();
    // Evaluate on symmetric offsets so mirrored bins get bit-identical weights.
    let raw: Vec<f64> = offsets
        .iter()
        .map(|&x| voigt_profile(params.center + x.abs(), params))
        .collect::<Result<_>>()?;
    let total: f64 = pairwise_sum(&raw);
    Ok(FrequencyGrid {
        bin_centers: offsets.iter().map(|x| params.center + x).collect(),
        weights: raw.iter().map(|r| r / total).collect(),
        bin_width: width,
    })
}

// Sum from both ends inward so the result does not depend on traversal direction.
fn pairwise_sum(values: &[f64]) -> f64 {
    let n = values.len();
    let mut s = 0.0;
    for i in 0..n / 2 {
        s += values[i] + values[n - 1 - i];
    }
    if n % 2 == 1 {
        s += values[n / 2];
    }
    s
}

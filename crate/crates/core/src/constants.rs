//! Physical constants (CODATA 2018) and mercury line wavelengths.

/// Boltzmann constant, J/K (exact).
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light in vacuum, m/s (exact).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Unified atomic mass unit, kg.
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

/// Carrier wavelength of the 6³D₃ → 6³P₂ line used throughout, m.
pub const CARRIER_WAVELENGTH: f64 = 365.5e-9;

/// Angular frequency of light with vacuum wavelength `lambda`.
pub fn angular_frequency(lambda: f64) -> f64 {
    2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / lambda
}

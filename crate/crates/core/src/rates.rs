//! Thermal occupations, pump/decay rates and damping constants.

use crate::constants::{BOLTZMANN, HBAR};
use crate::error::{Error, Result};

/// Pure dephasing in units of γ₀ when not overridden.
pub const DEFAULT_DEPHASING_RATIO: f64 = 3.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThermalConfig {
    /// Field reservoir temperature T_f, K.
    pub field_bath_temperature: f64,
    /// Atomic radiative reservoir temperature T_a, K.
    pub atom_bath_temperature: f64,
    /// Carrier ω₀, rad/s.
    pub carrier: f64,
}

/// Rates for one transition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateSet {
    pub w12: f64,
    pub w21: f64,
    pub gamma_parallel: f64,
    pub gamma_perp: f64,
    pub gamma_p: f64,
    pub sigma_ss: f64,
    /// Field-bath occupation n̄.
    pub n_bar: f64,
    /// Atom-bath occupation n̄_a.
    pub n_bar_atoms: f64,
    /// Linear field loss κ, 1/m.
    pub kappa: f64,
}

impl RateSet {
    /// All rates for a line with decay rate `gamma0` and pure dephasing `gamma_p`.
    pub fn new(gamma0: f64, gamma_p: f64, thermal: &ThermalConfig, kappa: f64) -> Result<Self> {
        if !(gamma0 > 0.0) || gamma_p < 0.0 || kappa < 0.0 {
            return Err(Error::Domain(format!(
                "rates need γ₀ > 0, γ_p ≥ 0, κ ≥ 0 (got {gamma0}, {gamma_p}, {kappa})"
            )));
        }
        let n_bar_atoms = thermal_occupation(thermal.carrier, thermal.atom_bath_temperature);
        let n_bar = thermal_occupation(thermal.carrier, thermal.field_bath_temperature);
        let (w12, w21) = pump_decay_rates(gamma0, n_bar_atoms);
        let (gamma_parallel, gamma_perp) = damping_rates(w12, w21, gamma_p);
        Ok(RateSet {
            w12,
            w21,
            gamma_parallel,
            gamma_perp,
            gamma_p,
            sigma_ss: steady_state_inversion(w12, w21)?,
            n_bar,
            n_bar_atoms,
            kappa,
        })
    }

    /// Coherent-only rates: no damping, no pumping, no loss.
    pub fn undamped() -> Self {
        RateSet {
            w12: 0.0,
            w21: 0.0,
            gamma_parallel: 0.0,
            gamma_perp: 0.0,
            gamma_p: 0.0,
            sigma_ss: -1.0,
            n_bar: 0.0,
            n_bar_atoms: 0.0,
            kappa: 0.0,
        }
    }
}

/// Bose–Einstein occupation `1/(exp(ħω₀/k_B T) − 1)`; zero at T = 0.
pub fn thermal_occupation(omega0: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        return 0.0;
    }
    1.0 / (HBAR * omega0 / (BOLTZMANN * temperature)).exp_m1()
}

/// `(W12, W21) = (γ₀ n̄_a, γ₀ (1 + n̄_a))`.
pub fn pump_decay_rates(gamma0: f64, n_bar_atoms: f64) -> (f64, f64) {
    (gamma0 * n_bar_atoms, gamma0 * (1.0 + n_bar_atoms))
}

/// `(γ∥, γ⊥) = (W12 + W21, γ_p + γ∥/2)`.
pub fn damping_rates(w12: f64, w21: f64, gamma_p: f64) -> (f64, f64) {
    let gamma_parallel = w12 + w21;
    (gamma_parallel, gamma_p + 0.5 * gamma_parallel)
}

pub fn steady_state_inversion(w12: f64, w21: f64) -> Result<f64> {
    let total = w12 + w21;
    if !(total > 0.0) {
        return Err(Error::Domain(
            "steady-state inversion needs W12 + W21 > 0".into(),
        ));
    }
    Ok((w12 - w21) / total)
}

/// Power-broadened linewidth `sqrt(Δν_L² + Ω²)`.
pub fn power_broadened_width(natural_width: f64, rabi: f64) -> f64 {
    natural_width.hypot(rabi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{angular_frequency, CARRIER_WAVELENGTH};
    use proptest::prelude::*;

    #[test]
    fn occupation() {
        let w0 = angular_frequency(CARRIER_WAVELENGTH);
        assert_eq!(thermal_occupation(w0, 0.0), 0.0);
        let x = HBAR * w0 / (BOLTZMANN * 293.0);
        assert!((x - 134.4).abs() < 0.2, "{x}");
        let n = thermal_occupation(w0, 293.0);
        assert!(n > 1e-59 && n < 1e-57, "{n}");
        // ħω₀ = k_B T ln 2 gives exactly one photon.
        let t = HBAR * w0 / (BOLTZMANN * std::f64::consts::LN_2);
        assert!((thermal_occupation(w0, t) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pump_and_damping() {
        let g = 1.3e8;
        assert_eq!(pump_decay_rates(g, 0.0), (0.0, g));
        assert_eq!(pump_decay_rates(g, 1.0), (g, 2.0 * g));
        assert_eq!(damping_rates(0.0, g, 0.0), (g, g / 2.0));
        assert_eq!(damping_rates(0.0, g, 3.0 * g), (g, 3.5 * g));
        assert_eq!(damping_rates(g, 2.0 * g, 0.0), (3.0 * g, 1.5 * g));
    }

    #[test]
    fn inversion() {
        assert_eq!(steady_state_inversion(0.0, 2.0).unwrap(), -1.0);
        assert_eq!(steady_state_inversion(0.7, 0.7).unwrap(), 0.0);
        assert_eq!(steady_state_inversion(1.0, 3.0).unwrap(), -0.5);
        assert!(steady_state_inversion(0.0, 0.0).is_err());
    }

    #[test]
    fn power_broadening() {
        assert_eq!(power_broadened_width(2.0, 0.0), 2.0);
        assert_eq!(power_broadened_width(0.0, 2.0), 2.0);
        assert_eq!(power_broadened_width(3.0, 4.0), 5.0);
    }

    proptest! {
        #[test]
        fn rate_set_invariants(gamma0 in 1e3f64..1e10, ratio in 0.0f64..10.0, t in 0.0f64..1e6) {
            let thermal = ThermalConfig {
                field_bath_temperature: t,
                atom_bath_temperature: t,
                carrier: angular_frequency(CARRIER_WAVELENGTH),
            };
            let r = RateSet::new(gamma0, ratio * gamma0, &thermal, 0.0).unwrap();
            prop_assert_eq!(r.gamma_parallel, r.w12 + r.w21);
            prop_assert_eq!(r.gamma_perp, r.gamma_p + r.gamma_parallel / 2.0);
            prop_assert!((-1.0..=1.0).contains(&r.sigma_ss));
            prop_assert!(r.w21 >= r.w12 && r.w12 >= 0.0);
            prop_assert!(((r.w21 - r.w12) / gamma0 - 1.0).abs() < 1e-9);
        }

        #[test]
        fn detailed_balance(t in 5e3f64..1e6) {
            let w0 = angular_frequency(CARRIER_WAVELENGTH);
            let n = thermal_occupation(w0, t);
            let (w12, w21) = pump_decay_rates(1.0, n);
            let boltzmann = (-HBAR * w0 / (BOLTZMANN * t)).exp();
            prop_assert!((w12 / w21 / boltzmann - 1.0).abs() < 1e-12);
            prop_assert!(thermal_occupation(w0, t * 1.01) > n);
        }
    }
}

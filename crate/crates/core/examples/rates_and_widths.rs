//! Reservoir occupations, damping rates and line widths for the mercury
//! resonance line at room temperature.

use sit_squeeze::atomic_data::{mercury_isotope_table, vapor_pressure_hg, number_density};
use sit_squeeze::constants::{angular_frequency, CARRIER_WAVELENGTH};
use sit_squeeze::lineshape::{doppler_fwhm, voigt_fwhm};
use sit_squeeze::rates::{damping_rates, pump_decay_rates, steady_state_inversion, thermal_occupation};

fn main() -> sit_squeeze::Result<()> {
    let t = 293.0;
    let w0 = angular_frequency(CARRIER_WAVELENGTH);
    let n_bar = thermal_occupation(w0, t);
    println!("n̄ at {t} K: {n_bar:.3e}");

    let table = mercury_isotope_table()?;
    let hg202 = table.iter().find(|i| i.mass_number == 202).unwrap();
    let line = hg202.main_line().unwrap();
    let g0 = line.natural_linewidth;
    let (w12, w21) = pump_decay_rates(g0, n_bar);
    let (g_par, g_perp) = damping_rates(w12, w21, 3.0 * g0);
    println!("γ₀ = {g0:.4e} rad/s, γ∥ = {g_par:.4e}, γ⊥ = {g_perp:.4e}");
    println!("σ_ss = {}", steady_state_inversion(w12, w21)?);

    let doppler = doppler_fwhm(t, hg202.atomic_mass, CARRIER_WAVELENGTH);
    let lorentz = 2.0 * g_perp;
    println!(
        "Doppler {:.4e} rad/s, Lorentz {:.4e} rad/s, Voigt {:.4e} rad/s",
        doppler,
        lorentz,
        voigt_fwhm(lorentz, doppler)
    );

    let p = vapor_pressure_hg(t)?;
    println!("vapour pressure {p:.4} Pa, density {:.4e} m⁻³", number_density(p, t)?);
    Ok(())
}

//! Discretise a Doppler-broadened line into weighted frequency bins.

use sit_squeeze::constants::CARRIER_WAVELENGTH;
use sit_squeeze::lineshape::{discretize_lineshape, doppler_fwhm, voigt_profile, LineshapeParams};

fn main() -> sit_squeeze::Result<()> {
    let mass = 202.0 * 1.660_539_066_6e-27;
    let doppler = doppler_fwhm(273.0, mass, CARRIER_WAVELENGTH);
    let params = LineshapeParams::new(4.0e8, doppler, 0.0)?;
    let grid = discretize_lineshape(&params, 11, 6.0)?;
    println!("Voigt FWHM {:.4e} rad/s, Lorentz fraction {:.4}", params.voigt_fwhm, params.lorentz_fraction());
    for (c, w) in grid.bin_centers.iter().zip(&grid.weights) {
        let density = voigt_profile(*c, &params)?;
        println!("{c:>12.4e}  weight {w:.5}  density {density:.4e}");
    }
    println!("rms width {:.4e} rad/s", grid.variance().sqrt());
    Ok(())
}

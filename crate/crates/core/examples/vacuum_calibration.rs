//! Shot-noise calibration: with no atoms the normally ordered quadrature
//! variance vanishes and S = 1 everywhere.

use sit_squeeze::ensemble::{run_ensemble, EnsembleConfig};
use sit_squeeze::measurement::{phase_grid, scan_phase_length};
use sit_squeeze::scenario::Scenario;

fn main() -> sit_squeeze::Result<()> {
    let mut s = Scenario::default();
    s.gas.atom_number_total = Some(0.0);
    s.grid.n_z = 10;
    s.grid.n_t = 1536;
    s.grid.window_tp = 30.0;
    s.grid.n_samples = 5;
    let sim = s.build()?;
    let set = run_ensemble(&sim, &EnsembleConfig { n_traj: 200, master_seed: 3, batch_count: 10 })?;
    let surface = scan_phase_length(&set.moments, &phase_grid(8), 0)?;
    for (z, row) in surface.z.iter().zip(&surface.s) {
        println!("z = {:4.1} mm  S = {:?}", z * 1e3, row);
    }
    println!("commutator {:.4e} 1/s", set.moments.commutator);
    Ok(())
}

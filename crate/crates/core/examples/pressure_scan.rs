//! Optimum squeezing and detection length against vapour temperature.

use sit_squeeze::ensemble::EnsembleConfig;
use sit_squeeze::measurement::phase_grid;
use sit_squeeze::run::pressure_table;
use sit_squeeze::scans::scan_pressure;
use sit_squeeze::scenario::Scenario;

fn main() -> sit_squeeze::Result<()> {
    let mut s = Scenario::default();
    s.grid.n_z = 10;
    s.grid.n_t = 1536;
    s.grid.window_tp = 30.0;
    s.grid.n_freq_bins = 1;
    s.grid.n_samples = 5;
    let ens = EnsembleConfig { n_traj: 100, master_seed: 4, batch_count: 10 };
    let points = scan_pressure(&s, &ens, &[273.0, 293.0, 303.0], &phase_grid(32))?;
    print!("{}", pressure_table(&points).render());
    Ok(())
}

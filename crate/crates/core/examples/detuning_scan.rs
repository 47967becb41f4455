//! Optimum squeezing against carrier detuning.

use sit_squeeze::ensemble::EnsembleConfig;
use sit_squeeze::measurement::phase_grid;
use sit_squeeze::run::detuning_table;
use sit_squeeze::scans::scan_detuning;
use sit_squeeze::scenario::Scenario;

fn main() -> sit_squeeze::Result<()> {
    let mut s = Scenario::default();
    s.grid.n_z = 10;
    s.grid.n_t = 1536;
    s.grid.window_tp = 30.0;
    s.grid.n_freq_bins = 1;
    s.grid.n_samples = 5;
    let ens = EnsembleConfig { n_traj: 100, master_seed: 2, batch_count: 10 };
    let points = scan_detuning(&s, &ens, &[0.0, 0.1, 1.0, 4.0], &phase_grid(32))?;
    print!("{}", detuning_table(&points).render());
    Ok(())
}

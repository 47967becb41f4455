//! The same run under both atomic noise models.

use sit_squeeze::ensemble::EnsembleConfig;
use sit_squeeze::measurement::phase_grid;
use sit_squeeze::scans::run_surface;
use sit_squeeze::scenario::Scenario;
use sit_squeeze::sde::NoiseModel;

fn main() -> sit_squeeze::Result<()> {
    let n_traj = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(200);
    let ens = EnsembleConfig { n_traj, master_seed: 9, batch_count: 10 };
    for model in [NoiseModel::Consistent, NoiseModel::Printed] {
        let mut s = Scenario::default();
        s.noise_model = model;
        s.grid.n_z = 25;
        s.grid.n_t = 1536;
        s.grid.window_tp = 30.0;
        s.grid.n_freq_bins = 1;
        s.grid.n_samples = 10;
        let (surface, _) = run_surface(&s, &ens, &phase_grid(90))?;
        let o = surface.optimum;
        println!(
            "{:<10} S* = {:.5} ± {:.5} at z = {:.0} mm, θ = {:+.3} rad",
            model.name(),
            o.s,
            o.stderr,
            o.z * 1e3,
            o.theta
        );
    }
    Ok(())
}

//! A 2π sech pulse crosses an undamped resonant vapour without loss.

use sit_squeeze::field::{pulse_area, pulse_energy};
use sit_squeeze::scenario::Scenario;
use sit_squeeze::sde::{propagate_trajectory, SimOptions, SliceRecorder};

fn main() -> sit_squeeze::Result<()> {
    let mut s = Scenario::default();
    s.gas.undamped = true;
    s.gas.atom_number_total = Some(1e10);
    s.grid.n_freq_bins = 1;
    s.grid.n_samples = 5;
    let sim = s.build()?;
    println!(
        "interaction strength {:.3}",
        sim.medium.interaction_strength(-0.5, s.pulse.duration, s.fiber.length)
    );

    let mut rec = SliceRecorder::default();
    propagate_trajectory(
        &sim.medium,
        &sim.grid,
        &sim.input,
        &SimOptions::deterministic(),
        0,
        0,
        sim.omega_limit(),
        &mut rec,
    )
    .expect("zero-noise propagation");

    let e0 = pulse_energy(&sim.input, &sim.grid);
    for (z, slice) in sim.grid.sample_z().iter().zip(&rec.slices) {
        let peak = slice
            .omega
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .map(|(k, _)| sim.grid.tau(k))
            .unwrap();
        println!(
            "z = {:5.1} mm  area {:.5}  energy {:.6}  delay {:+.3} τp",
            z * 1e3,
            pulse_area(slice, &sim.grid),
            pulse_energy(slice, &sim.grid) / e0,
            (peak - sim.pulse.center) / s.pulse.duration
        );
    }
    Ok(())
}

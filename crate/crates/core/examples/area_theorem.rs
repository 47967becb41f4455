//! A weak pulse in an absorbing medium: the pulse area decays as e^(−αz/2).

use num_complex::Complex64 as C;
use sit_squeeze::field::FieldSlice;
use sit_squeeze::scenario::{CouplingChoice, Scenario};
use sit_squeeze::sde::{propagate_trajectory, Dephasing, SimOptions, SliceRecorder};

fn main() -> sit_squeeze::Result<()> {
    let theta0 = 0.1;
    let mut s = Scenario::default();
    let alpha = 3.0 / s.fiber.length;
    s.gas.coupling = CouplingChoice::Absorption(alpha);
    s.gas.dephasing = Dephasing::Rate(10.0 / s.pulse.duration);
    s.grid.n_freq_bins = 1;
    s.grid.n_samples = 6;
    let mut sim = s.build()?;
    let k = theta0 / (2.0 * std::f64::consts::PI);
    sim.input = FieldSlice {
        omega: sim.input.omega.iter().map(|w| w * k).collect(),
        omega_dag: sim.input.omega_dag.iter().map(|w| w * k).collect(),
    };

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
    println!("  αz     area      θ₀e^(−αz/2)");
    for (z, slice) in sim.grid.sample_z().iter().zip(&rec.slices) {
        let area = slice.omega.iter().sum::<C>().norm() * sim.grid.dtau;
        println!("{:5.2}  {area:.6}  {:.6}", alpha * z, theta0 * (-alpha * z / 2.0).exp());
    }
    Ok(())
}

//! Full z-sweep of one trajectory.

use num_complex::Complex64 as C;

use super::atoms::{step_atoms, Bloch, Diverged, NoiseDraw};
use super::field_step::{step_field, Advector};
use super::{Medium, SimOptions};
use crate::field::{FieldSlice, Grid};
use crate::rng::NoiseStream;

/// Receives the field at each recorded z position.
pub trait Recorder {
    /// `sample` indexes `Grid::sample_steps`.
    fn record(&mut self, sample: usize, slice: &FieldSlice);
}

/// Keeps full copies of every recorded slice.
#[derive(Clone, Debug, Default)]
pub struct SliceRecorder {
    pub slices: Vec<FieldSlice>,
}

impl Recorder for SliceRecorder {
    fn record(&mut self, _sample: usize, slice: &FieldSlice) {
        self.slices.push(slice.clone());
    }
}

/// Mutable state of one trajectory between z steps.
pub struct TrajectoryState {
    pub field: FieldSlice,
    pub stream: NoiseStream,
    pub z_index: usize,
    pub diverged: bool,
}

impl TrajectoryState {
    pub fn new(input: &FieldSlice, master_seed: u64, trajectory_index: u64) -> Self {
        TrajectoryState {
            field: input.clone(),
            stream: NoiseStream::new(master_seed, trajectory_index),
            z_index: 0,
            diverged: false,
        }
    }
}

/// Run one trajectory through the fiber. Atoms in each z cell start fresh in
/// the ground state and are driven once by the current field slice; the
/// accumulated polarization then advances the field by one cell.
///
/// `omega_limit` bounds |Ω| and |Ω†|; crossing it, or a Bloch component
/// exceeding its bound, ends the trajectory with `Err(Diverged)`.
#[allow(clippy::too_many_arguments)]
pub fn propagate_trajectory(
    medium: &Medium,
    grid: &Grid,
    input: &FieldSlice,
    options: &SimOptions,
    master_seed: u64,
    trajectory_index: u64,
    omega_limit: f64,
    recorder: &mut impl Recorder,
) -> Result<TrajectoryState, Diverged> {
    let n_t = grid.n_t;
    assert_eq!(input.len(), n_t, "input slice does not match the grid");
    let mut state = TrajectoryState::new(input, master_seed, trajectory_index);
    let mut source = vec![C::new(0.0, 0.0); n_t];
    let mut source_dag = vec![C::new(0.0, 0.0); n_t];
    let mut advector = Advector::new(medium.advection, grid.dz, n_t, grid.dtau);
    let field_noise = options.noise && medium.field_noise > 0.0;
    let mut next_sample = 0;

    for z in 1..=grid.n_z {
        source.iter_mut().for_each(|s| *s = C::new(0.0, 0.0));
        source_dag.iter_mut().for_each(|s| *s = C::new(0.0, 0.0));
        let omega = &state.field.omega;
        let omega_dag = &state.field.omega_dag;

        for class in &medium.classes {
            let ctx = &class.step.with_model(options.noise_model);
            let coef = class.source;
            let mut atom = Bloch::ground(options.initial_inversion);
            for k in 0..n_t - 1 {
                let draw = options
                    .noise
                    .then(|| NoiseDraw::sample(&mut state.stream, ctx));
                atom = match step_atoms(
                    &atom,
                    ctx,
                    [omega[k], omega[k + 1]],
                    [omega_dag[k], omega_dag[k + 1]],
                    draw.as_ref(),
                    options.scheme,
                ) {
                    Ok(a) => a,
                    Err(e) => {
                        state.diverged = true;
                        return Err(e);
                    }
                };
                source[k + 1] += atom.minus * coef;
                source_dag[k + 1] += atom.plus * coef;
            }
        }

        let noise = field_noise.then_some((medium.field_noise, &mut state.stream));
        step_field(
            &mut state.field,
            &source,
            &source_dag,
            medium.kappa,
            grid.dz,
            grid.dtau,
            noise,
        );
        if let Some(adv) = advector.as_mut() {
            adv.apply(&mut state.field.omega);
            adv.apply(&mut state.field.omega_dag);
        }
        state.z_index = z;

        let too_large = |v: &Vec<C>| {
            v.iter()
                .any(|w| !(w.norm_sqr() <= omega_limit * omega_limit))
        };
        if too_large(&state.field.omega) || too_large(&state.field.omega_dag) {
            state.diverged = true;
            return Err(Diverged);
        }
        if grid.sample_steps.get(next_sample) == Some(&z) {
            recorder.record(next_sample, &state.field);
            next_sample += 1;
        }
    }
    Ok(state)
}

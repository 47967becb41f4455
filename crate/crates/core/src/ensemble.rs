//! Parallel trajectory ensembles with schedule-independent results.
//!
//! Trajectory `i` always uses noise stream `(master_seed, i)` and always lands
//! in batch `i·B/n`; batch sums are accumulated in index order after the
//! parallel phase, so the output is bit-identical for any thread count.

use std::time::{Duration, Instant};

use num_complex::Complex64 as C;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measurement::{EnsembleMoments, MomentSums, ProjectionRecorder};
use crate::scenario::Simulation;
use crate::sde::atoms::Diverged;
use crate::sde::{propagate_trajectory, SimOptions};

/// Discard fraction above which the run is flagged.
pub const DISCARD_WARNING: f64 = 0.05;
/// Discard fraction above which the run fails.
pub const DISCARD_FAILURE: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnsembleConfig {
    pub n_traj: usize,
    pub master_seed: u64,
    pub batch_count: usize,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig {
            n_traj: 2000,
            master_seed: 1,
            batch_count: 10,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TrajectorySet {
    pub moments: EnsembleMoments,
    pub n_traj: usize,
    pub n_discarded: usize,
    pub wall_time: Duration,
    pub warning: Option<String>,
}

impl TrajectorySet {
    pub fn discard_fraction(&self) -> f64 {
        self.n_discarded as f64 / self.n_traj as f64
    }
}

/// `(P, Q)` at every recorded z for one trajectory.
pub fn run_trajectory(
    sim: &Simulation,
    options: &SimOptions,
    master_seed: u64,
    index: u64,
) -> Result<Vec<(C, C)>, Diverged> {
    let mut rec = ProjectionRecorder::new(&sim.homodyne, sim.grid.sample_steps.len());
    propagate_trajectory(
        &sim.medium,
        &sim.grid,
        &sim.input,
        options,
        master_seed,
        index,
        sim.omega_limit(),
        &mut rec,
    )?;
    Ok(rec.values)
}

/// Zero-noise projections, used as the mean-field reference and as the shift
/// that keeps the moment sums well conditioned.
pub fn reference_projections(sim: &Simulation) -> Result<Vec<(C, C)>> {
    let options = SimOptions {
        noise: false,
        ..sim.options
    };
    run_trajectory(sim, &options, 0, 0).map_err(|_| Error::Divergence {
        discarded: 1,
        total: 1,
    })
}

pub fn run_ensemble(sim: &Simulation, cfg: &EnsembleConfig) -> Result<TrajectorySet> {
    if cfg.n_traj < 2 {
        return Err(Error::config(
            "n_traj",
            format!("need at least 2 trajectories, got {}", cfg.n_traj),
        ));
    }
    if cfg.batch_count == 0 || cfg.batch_count > cfg.n_traj {
        return Err(Error::config(
            "batch_count",
            format!("must lie in 1..={}, got {}", cfg.n_traj, cfg.batch_count),
        ));
    }
    let start = Instant::now();
    let reference = reference_projections(sim)?;
    let results: Vec<Result<Vec<(C, C)>, Diverged>> = (0..cfg.n_traj as u64)
        .into_par_iter()
        .map(|i| run_trajectory(sim, &sim.options, cfg.master_seed, i))
        .collect();

    let nz = reference.len();
    let mut batches = vec![vec![MomentSums::default(); nz]; cfg.batch_count];
    let mut n_discarded = 0;
    for (i, r) in results.iter().enumerate() {
        match r {
            Ok(values) => {
                let b = i * cfg.batch_count / cfg.n_traj;
                for (iz, (&(p, q), &(p0, q0))) in values.iter().zip(&reference).enumerate() {
                    batches[b][iz].add(p - p0, q - q0);
                }
            }
            Err(Diverged) => n_discarded += 1,
        }
    }
    let fraction = n_discarded as f64 / cfg.n_traj as f64;
    if fraction > DISCARD_FAILURE {
        return Err(Error::Divergence {
            discarded: n_discarded,
            total: cfg.n_traj,
        });
    }
    let warning = (fraction > DISCARD_WARNING).then(|| {
        format!(
            "{n_discarded} of {} trajectories diverged ({:.1}%)",
            cfg.n_traj,
            100.0 * fraction
        )
    });
    Ok(TrajectorySet {
        moments: EnsembleMoments {
            z: sim.grid.sample_z(),
            reference,
            batches,
            commutator: sim.medium.commutator,
        },
        n_traj: cfg.n_traj,
        n_discarded,
        wall_time: start.elapsed(),
        warning,
    })
}

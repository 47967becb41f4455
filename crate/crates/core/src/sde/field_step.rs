//! Field update in z: polarization source, loss, thermal noise and optional
//! τ-advection for a reference frame that does not move at c.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C;
use rustfft::{Fft, FftPlanner};

use super::LineClass;
use crate::field::FieldSlice;
use crate::rng::NoiseStream;

/// Source term `Σ_c source_c·R⁻_c` for one τ sample, given each class's R⁻.
pub fn polarization_source(classes: &[LineClass], r_minus: &[C]) -> C {
    debug_assert_eq!(classes.len(), r_minus.len());
    classes
        .iter()
        .zip(r_minus)
        .map(|(c, r)| *r * c.source)
        .sum()
}

/// Explicit Euler step `Ω += Δz·[−κΩ/2 + source + F^Ω]` and the partner
/// equation for Ω†. `noise` carries the thermal amplitude and its stream.
pub fn step_field(
    slice: &mut FieldSlice,
    source: &[C],
    source_dag: &[C],
    kappa: f64,
    dz: f64,
    dtau: f64,
    noise: Option<(f64, &mut NoiseStream)>,
) {
    let decay = 1.0 - 0.5 * kappa * dz;
    let it = slice
        .omega
        .iter_mut()
        .zip(slice.omega_dag.iter_mut())
        .zip(source.iter().zip(source_dag));
    match noise {
        None => {
            for ((w, wd), (s, sd)) in it {
                *w = *w * decay + s * dz;
                *wd = *wd * decay + sd * dz;
            }
        }
        Some((amp, stream)) => {
            let scale = amp * dz / (dtau * dz).sqrt();
            for ((w, wd), (s, sd)) in it {
                let xi = stream.complex_normal() * scale;
                *w = *w * decay + s * dz + xi;
                *wd = *wd * decay + sd * dz + xi.conj();
            }
        }
    }
}

/// Exact spectral shift `Ω(τ) → Ω(τ − a·Δz)` applied once per z step.
#[derive(Clone)]
pub struct Advector {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    phase: Vec<C>,
    scratch: Vec<C>,
}

impl Advector {
    /// `None` when the shift per step is zero.
    pub fn new(advection: f64, dz: f64, n_t: usize, dtau: f64) -> Option<Self> {
        let shift = advection * dz;
        if shift == 0.0 {
            return None;
        }
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n_t);
        let inverse = planner.plan_fft_inverse(n_t);
        let norm = 1.0 / n_t as f64;
        let phase = (0..n_t)
            .map(|k| {
                let signed = if 2 * k < n_t {
                    k as f64
                } else {
                    k as f64 - n_t as f64
                };
                let omega = 2.0 * PI * signed / (n_t as f64 * dtau);
                if 2 * k == n_t {
                    // Nyquist bin: keep the shift real so real inputs stay real.
                    C::new((omega * shift).cos() * norm, 0.0)
                } else {
                    C::from_polar(norm, -omega * shift)
                }
            })
            .collect();
        let scratch = vec![
            C::new(0.0, 0.0);
            forward
                .get_inplace_scratch_len()
                .max(inverse.get_inplace_scratch_len())
        ];
        Some(Advector {
            forward,
            inverse,
            phase,
            scratch,
        })
    }

    pub fn apply(&mut self, data: &mut [C]) {
        self.forward.process_with_scratch(data, &mut self.scratch);
        for (d, p) in data.iter_mut().zip(&self.phase) {
            *d *= p;
        }
        self.inverse.process_with_scratch(data, &mut self.scratch);
    }
}

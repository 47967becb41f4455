//! Simulated homodyne detection and squeezing statistics.
//!
//! Each trajectory is reduced to the two LO projections at every recorded z,
//!
//! ```text
//! P = Δτ Σ f_LO(τ) Ω†(τ),   Q = Δτ Σ f_LO*(τ) Ω(τ),
//! ```
//!
//! so the quadrature `M(θ) = e^{iθ}P + e^{−iθ}Q` and its moments are available
//! for any θ from five complex sums.

use std::f64::consts::PI;

use num_complex::Complex64 as C;

use crate::error::{Error, Result};
use crate::field::{FieldSlice, Grid, PulseConfig};
use crate::sde::Recorder;

/// Local oscillator, normalised so that `Δτ Σ |f_LO|² = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct HomodyneConfig {
    pub lo: Vec<C>,
    pub dtau: f64,
}

impl HomodyneConfig {
    /// LO with the shape of the input pulse, including its detuning phase ramp.
    pub fn matched(pulse: &PulseConfig, grid: &Grid) -> Result<Self> {
        let raw: Vec<C> = (0..grid.n_t).map(|k| pulse.envelope(grid.tau(k))).collect();
        Self::from_shape(raw, grid.dtau)
    }

    pub fn from_shape(shape: Vec<C>, dtau: f64) -> Result<Self> {
        let norm = (dtau * shape.iter().map(|f| f.norm_sqr()).sum::<f64>()).sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Domain("local oscillator shape has zero norm".into()));
        }
        Ok(HomodyneConfig {
            lo: shape.into_iter().map(|f| f / norm).collect(),
            dtau,
        })
    }

    /// `(P, Q)` for one field slice.
    pub fn project(&self, slice: &FieldSlice) -> (C, C) {
        let mut p = C::new(0.0, 0.0);
        let mut q = C::new(0.0, 0.0);
        for ((f, w), wd) in self.lo.iter().zip(&slice.omega).zip(&slice.omega_dag) {
            p += f * wd;
            q += f.conj() * w;
        }
        (p * self.dtau, q * self.dtau)
    }
}

/// `M(θ) = Δτ Σ [f_LO Ω† e^{iθ} + f_LO* Ω e^{−iθ}]` for one trajectory.
pub fn quadrature_m(slice: &FieldSlice, homodyne: &HomodyneConfig, theta: f64) -> C {
    let (p, q) = homodyne.project(slice);
    combine(p, q, theta)
}

#[inline]
fn combine(p: C, q: C, theta: f64) -> C {
    let e = C::from_polar(1.0, theta);
    e * p + e.conj() * q
}

/// Records `(P, Q)` at every sampled z.
#[derive(Clone, Debug)]
pub struct ProjectionRecorder<'a> {
    pub homodyne: &'a HomodyneConfig,
    pub values: Vec<(C, C)>,
}

impl<'a> ProjectionRecorder<'a> {
    pub fn new(homodyne: &'a HomodyneConfig, n_samples: usize) -> Self {
        ProjectionRecorder {
            homodyne,
            values: Vec::with_capacity(n_samples),
        }
    }
}

impl Recorder for ProjectionRecorder<'_> {
    fn record(&mut self, _sample: usize, slice: &FieldSlice) {
        self.values.push(self.homodyne.project(slice));
    }
}

/// `S = 1 + Re Var₊P[M] / C` with `C` the equal-space field commutator.
pub fn squeezing_ratio(m_values: &[C], commutator: f64) -> Result<f64> {
    if m_values.len() < 2 {
        return Err(Error::EmptyEnsemble(format!(
            "{} usable trajectories, need at least 2",
            m_values.len()
        )));
    }
    if !(commutator > 0.0) {
        return Err(Error::Domain(format!(
            "field commutator must be positive, got {commutator}"
        )));
    }
    let n = m_values.len() as f64;
    let shift = m_values[0];
    let (mut s1, mut s2) = (C::new(0.0, 0.0), C::new(0.0, 0.0));
    for m in m_values {
        let d = m - shift;
        s1 += d;
        s2 += d * d;
    }
    let mean = s1 / n;
    Ok(1.0 + (s2 / n - mean * mean).re / commutator)
}

pub fn to_decibels(s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::Domain(format!(
            "squeezing ratio {s} must be positive for dB"
        )));
    }
    Ok(10.0 * s.log10())
}

/// Sums of the shifted projections `p = P − P_ref`, `q = Q − Q_ref`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MomentSums {
    pub n: u64,
    pub p: C,
    pub q: C,
    pub pp: C,
    pub qq: C,
    pub pq: C,
}

impl MomentSums {
    pub fn add(&mut self, p: C, q: C) {
        self.n += 1;
        self.p += p;
        self.q += q;
        self.pp += p * p;
        self.qq += q * q;
        self.pq += p * q;
    }

    pub fn merge(&mut self, other: &MomentSums) {
        self.n += other.n;
        self.p += other.p;
        self.q += other.q;
        self.pp += other.pp;
        self.qq += other.qq;
        self.pq += other.pq;
    }

    /// Complex `⟨M²⟩ − ⟨M⟩²` at phase θ (shift-invariant).
    pub fn variance(&self, theta: f64) -> C {
        let n = self.n as f64;
        let e = C::from_polar(1.0, theta);
        let m2 = (e * e * self.pp + e.conj() * e.conj() * self.qq + 2.0 * self.pq) / n;
        let m1 = (e * self.p + e.conj() * self.q) / n;
        m2 - m1 * m1
    }

    /// Mean shift of `(P, Q)` relative to the reference.
    pub fn mean_shift(&self) -> (C, C) {
        let n = self.n as f64;
        (self.p / n, self.q / n)
    }
}

/// Batched moments per recorded z, as produced by an ensemble run.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleMoments {
    pub z: Vec<f64>,
    /// Reference projections `(P_ref, Q_ref)` per z (the zero-noise run).
    pub reference: Vec<(C, C)>,
    /// `batches[b][i]`: moments of batch b at z index i.
    pub batches: Vec<Vec<MomentSums>>,
    pub commutator: f64,
}

impl EnsembleMoments {
    pub fn total(&self, iz: usize) -> MomentSums {
        let mut t = MomentSums::default();
        for b in &self.batches {
            t.merge(&b[iz]);
        }
        t
    }

    pub fn n_used(&self) -> u64 {
        self.batches
            .iter()
            .map(|b| b.first().map_or(0, |m| m.n))
            .sum()
    }

    fn usable_batches(&self, iz: usize) -> impl Iterator<Item = &MomentSums> {
        self.batches
            .iter()
            .map(move |b| &b[iz])
            .filter(|m| m.n >= 2)
    }

    /// Squeezing ratio and its batch-means standard error at (z index, θ).
    pub fn squeezing(&self, iz: usize, theta: f64) -> (f64, f64) {
        let total = self.total(iz);
        let s = 1.0 + total.variance(theta).re / self.commutator;
        let per_batch: Vec<f64> = self
            .usable_batches(iz)
            .map(|m| 1.0 + m.variance(theta).re / self.commutator)
            .collect();
        (s, standard_error(&per_batch))
    }

    /// Mean of `Q` (the LO projection of Ω) and its batch-means standard errors
    /// for the real and imaginary parts.
    pub fn mean_q(&self, iz: usize) -> (C, f64, f64) {
        let total = self.total(iz);
        let q_ref = self.reference[iz].1;
        let mean = q_ref + total.mean_shift().1;
        let re: Vec<f64> = self
            .usable_batches(iz)
            .map(|m| m.mean_shift().1.re)
            .collect();
        let im: Vec<f64> = self
            .usable_batches(iz)
            .map(|m| m.mean_shift().1.im)
            .collect();
        (mean, standard_error(&re), standard_error(&im))
    }
}

/// Standard error of the mean of batch estimates.
pub fn standard_error(batch_values: &[f64]) -> f64 {
    let b = batch_values.len();
    if b < 2 {
        return f64::NAN;
    }
    let mean = batch_values.iter().sum::<f64>() / b as f64;
    let var = batch_values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (b - 1) as f64;
    (var / b as f64).sqrt()
}

/// Default LO phase grid: `n` points uniformly covering one period [−π/2, π/2).
pub fn phase_grid(n: usize) -> Vec<f64> {
    (0..n)
        .map(|j| -0.5 * PI + PI * j as f64 / n as f64)
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Optimum {
    pub iz: usize,
    pub itheta: usize,
    pub z: f64,
    pub theta: f64,
    pub s: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SqueezingSurface {
    pub z: Vec<f64>,
    pub theta: Vec<f64>,
    /// `s[i][j]` at `(z[i], theta[j])`.
    pub s: Vec<Vec<f64>>,
    /// Decibels; NaN where S ≤ 0.
    pub s_db: Vec<Vec<f64>>,
    pub stderr: Vec<Vec<f64>>,
    pub optimum: Optimum,
    pub n_traj_used: u64,
    pub n_discarded: u64,
    /// Largest |Im Var| / |Re Var| over the surface (sampling diagnostic).
    pub max_imag_ratio: f64,
}

/// Fill S(z, θ) from ensemble moments and locate the optimum.
pub fn scan_phase_length(
    moments: &EnsembleMoments,
    theta: &[f64],
    n_discarded: u64,
) -> Result<SqueezingSurface> {
    if theta.is_empty() || moments.z.is_empty() {
        return Err(Error::Argument("empty θ or z grid".into()));
    }
    if moments.n_used() < 2 {
        return Err(Error::EmptyEnsemble(format!(
            "{} usable trajectories, {n_discarded} discarded",
            moments.n_used()
        )));
    }
    let mut s = Vec::with_capacity(moments.z.len());
    let mut err = Vec::with_capacity(moments.z.len());
    let mut max_imag_ratio: f64 = 0.0;
    for iz in 0..moments.z.len() {
        let total = moments.total(iz);
        let (mut row, mut row_err) = (Vec::new(), Vec::new());
        for &t in theta {
            let (v, e) = moments.squeezing(iz, t);
            let var = total.variance(t);
            if var.re != 0.0 {
                max_imag_ratio = max_imag_ratio.max(var.im.abs() / var.re.abs());
            }
            row.push(v);
            row_err.push(e);
        }
        s.push(row);
        err.push(row_err);
    }
    let optimum = find_optimum(&moments.z, theta, &s, &err);
    let s_db = s
        .iter()
        .map(|row| {
            row.iter()
                .map(|&v| to_decibels(v).unwrap_or(f64::NAN))
                .collect()
        })
        .collect();
    Ok(SqueezingSurface {
        z: moments.z.clone(),
        theta: theta.to_vec(),
        s,
        s_db,
        stderr: err,
        optimum,
        n_traj_used: moments.n_used(),
        n_discarded,
        max_imag_ratio,
    })
}

/// Global minimum; ties go to smaller z, then to θ closest to zero.
pub fn find_optimum(z: &[f64], theta: &[f64], s: &[Vec<f64>], err: &[Vec<f64>]) -> Optimum {
    let mut best: Option<Optimum> = None;
    for (iz, row) in s.iter().enumerate() {
        for (it, &v) in row.iter().enumerate() {
            let better = match &best {
                None => true,
                Some(b) => v < b.s || (v == b.s && iz == b.iz && theta[it].abs() < b.theta.abs()),
            };
            if better {
                best = Some(Optimum {
                    iz,
                    itheta: it,
                    z: z[iz],
                    theta: theta[it],
                    s: v,
                    stderr: err[iz][it],
                });
            }
        }
    }
    best.expect("non-empty surface")
}

//! Propagation grid, soliton input, pulse diagnostics and the linear
//! susceptibility of a cell.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::constants::SPEED_OF_LIGHT;
use crate::error::{Error, Result};

/// Maximum allowed |Ω| at the window edges, relative to the peak 2A.
pub const EDGE_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PulseConfig {
    /// Half peak Rabi frequency A, rad/s (peak Rabi frequency is 2A).
    pub amplitude: f64,
    /// τ_p, s
    pub duration: f64,
    /// τ₀, s
    pub center: f64,
    /// δ, rad/s
    pub detuning: f64,
    /// φ(0), rad
    pub phase: f64,
}

impl PulseConfig {
    /// Canonical 2π sech soliton, `A = 1/τ_p`, centred in a window of the given length.
    pub fn soliton(duration: f64, window: f64) -> Self {
        PulseConfig {
            amplitude: 1.0 / duration,
            duration,
            center: 0.5 * window,
            detuning: 0.0,
            phase: 0.0,
        }
    }

    pub fn with_detuning(mut self, detuning: f64) -> Self {
        self.detuning = detuning;
        self
    }

    pub fn peak_rabi(&self) -> f64 {
        2.0 * self.amplitude
    }

    /// Input envelope `2A sech[A(τ−τ₀)] exp{i[δτ + φ(0)]}`.
    pub fn envelope(&self, tau: f64) -> Complex64 {
        let mag = 2.0 * self.amplitude / (self.amplitude * (tau - self.center)).cosh();
        Complex64::from_polar(mag, self.detuning * tau + self.phase)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiberConfig {
    /// m
    pub length: f64,
    /// m
    pub core_diameter: f64,
    /// Linear loss κ, 1/m.
    pub kappa: f64,
    /// Reference-frame velocity v_g, m/s.
    pub group_velocity: f64,
}

impl FiberConfig {
    pub fn core_area(&self) -> f64 {
        0.25 * PI * self.core_diameter * self.core_diameter
    }

    /// Coefficient `1/c − 1/v_g` of the τ-advection term, s/m.
    pub fn advection(&self) -> f64 {
        1.0 / SPEED_OF_LIGHT - 1.0 / self.group_velocity
    }
}

impl Default for FiberConfig {
    fn default() -> Self {
        FiberConfig {
            length: 0.05,
            core_diameter: 10e-6,
            kappa: 0.0,
            group_velocity: SPEED_OF_LIGHT,
        }
    }
}

/// Discretisation of the (τ, z) plane.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub n_z: usize,
    /// m
    pub dz: f64,
    pub n_t: usize,
    /// s
    pub dtau: f64,
    /// s
    pub window: f64,
    /// Cell counts after which a field record is kept (1-based: z = k·Δz).
    pub sample_steps: Vec<usize>,
}

impl Grid {
    /// `n_samples` records evenly spaced along the fiber, the last at the exit.
    pub fn new(length: f64, n_z: usize, n_t: usize, window: f64, n_samples: usize) -> Result<Self> {
        if !(length > 0.0) || n_z == 0 || n_t < 2 || !(window > 0.0) {
            return Err(Error::Argument(format!(
                "grid needs L > 0, n_z ≥ 1, n_t ≥ 2, window > 0 (got {length}, {n_z}, {n_t}, {window})"
            )));
        }
        if n_samples == 0 || n_samples > n_z {
            return Err(Error::Argument(format!(
                "need 1 ≤ n_samples ≤ n_z, got {n_samples} samples for {n_z} cells"
            )));
        }
        let sample_steps = (1..=n_samples)
            .map(|i| ((i * n_z) as f64 / n_samples as f64).round() as usize)
            .collect();
        Ok(Grid {
            n_z,
            dz: length / n_z as f64,
            n_t,
            dtau: window / n_t as f64,
            window,
            sample_steps,
        })
    }

    /// Same grid with explicitly chosen record positions (cell counts).
    pub fn with_sample_steps(mut self, mut steps: Vec<usize>) -> Result<Self> {
        steps.sort_unstable();
        steps.dedup();
        if steps.is_empty() || steps[0] == 0 || *steps.last().unwrap() > self.n_z {
            return Err(Error::Argument("sample steps must lie in 1..=n_z".into()));
        }
        self.sample_steps = steps;
        Ok(self)
    }

    pub fn length(&self) -> f64 {
        self.dz * self.n_z as f64
    }

    pub fn tau(&self, k: usize) -> f64 {
        k as f64 * self.dtau
    }

    /// Positions of the field records, m.
    pub fn sample_z(&self) -> Vec<f64> {
        self.sample_steps
            .iter()
            .map(|&s| s as f64 * self.dz)
            .collect()
    }

    /// Check resolution and window size against the pulse.
    pub fn validate_for(&self, pulse: &PulseConfig) -> Result<()> {
        let tp = pulse.duration;
        if self.window < 20.0 * tp * (1.0 - 1e-12) {
            return Err(Error::Argument(format!(
                "window {:.3e} s shorter than 20 τ_p = {:.3e} s",
                self.window,
                20.0 * tp
            )));
        }
        if self.dtau > tp / 50.0 * (1.0 + 1e-12) {
            return Err(Error::Argument(format!(
                "Δτ = {:.3e} s exceeds τ_p/50 = {:.3e} s",
                self.dtau,
                tp / 50.0
            )));
        }
        if !(0.0..=self.window).contains(&pulse.center) {
            return Err(Error::Argument(
                "pulse centre lies outside the window".into(),
            ));
        }
        Ok(())
    }
}

/// Field and its independent positive-P partner on the τ grid at one z.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldSlice {
    pub omega: Vec<Complex64>,
    pub omega_dag: Vec<Complex64>,
}

impl FieldSlice {
    pub fn zeros(n: usize) -> Self {
        FieldSlice {
            omega: vec![Complex64::new(0.0, 0.0); n],
            omega_dag: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    /// Coherent slice: `Ω† = conj(Ω)`.
    pub fn coherent(omega: Vec<Complex64>) -> Self {
        let omega_dag = omega.iter().map(|w| w.conj()).collect();
        FieldSlice { omega, omega_dag }
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    /// Largest |Ω† − conj(Ω)|.
    pub fn conjugacy_defect(&self) -> f64 {
        self.omega
            .iter()
            .zip(&self.omega_dag)
            .map(|(w, d)| (d - w.conj()).norm())
            .fold(0.0, f64::max)
    }
}

/// Sample the input soliton on the grid. Fails if the window truncates it.
pub fn init_soliton(pulse: &PulseConfig, grid: &Grid) -> Result<FieldSlice> {
    let omega: Vec<Complex64> = (0..grid.n_t).map(|k| pulse.envelope(grid.tau(k))).collect();
    let edge = omega[0].norm().max(omega[grid.n_t - 1].norm());
    if edge > EDGE_TOLERANCE * pulse.peak_rabi() {
        return Err(Error::Config {
            line: None,
            key: Some("window".into()),
            message: format!(
                "pulse truncated: |Ω| at window edge is {:.2e} of the peak",
                edge / pulse.peak_rabi()
            ),
        });
    }
    Ok(FieldSlice::coherent(omega))
}

/// Trapezoidal `∫|Ω| dτ`, rad.
pub fn pulse_area(slice: &FieldSlice, grid: &Grid) -> f64 {
    trapezoid(slice.omega.iter().map(|w| w.norm()), grid.dtau)
}

/// Trapezoidal `∫|Ω|² dτ`, rad²/s.
pub fn pulse_energy(slice: &FieldSlice, grid: &Grid) -> f64 {
    trapezoid(slice.omega.iter().map(|w| w.norm_sqr()), grid.dtau)
}

fn trapezoid(values: impl ExactSizeIterator<Item = f64>, h: f64) -> f64 {
    let n = values.len();
    let mut sum = 0.0;
    for (k, v) in values.enumerate() {
        sum += if k == 0 || k + 1 == n { 0.5 * v } else { v };
    }
    sum * h
}

/// Linear susceptibility of a cell holding `n_atoms` atoms (diagnostic only).
pub fn susceptibility(
    n_atoms: f64,
    wavelength: f64,
    gamma0: f64,
    detuning: f64,
    rabi_sq: f64,
) -> Complex64 {
    let prefactor = n_atoms * 3.0 * wavelength.powi(3) * gamma0 / (4.0 * PI * PI);
    let denom = gamma0 * gamma0 + 4.0 * detuning * detuning + 2.0 * rabi_sq;
    Complex64::new(-2.0 * detuning, gamma0) * (prefactor / denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TP: f64 = 4e-15;

    fn grid(n_t: usize) -> Grid {
        Grid::new(0.05, 500, n_t, 40.0 * TP, 50).unwrap()
    }

    #[test]
    fn soliton_shape() {
        let g = grid(2048);
        let p = PulseConfig::soliton(TP, g.window);
        let s = init_soliton(&p, &g).unwrap();
        let k0 = (p.center / g.dtau).round() as usize;
        assert!((s.omega[k0].re - 2.0 / TP).abs() < 1e-9 / TP);
        assert!(s.omega[k0].im.abs() < 1e-9 / TP);
        assert_eq!(s.conjugacy_defect(), 0.0);

        let detuned = init_soliton(&p.with_detuning(3.0 / TP), &g).unwrap();
        for (a, b) in s.omega.iter().zip(&detuned.omega) {
            assert!((a.norm() - b.norm()).abs() <= 1e-12 * a.norm().max(1.0));
        }
    }

    #[test]
    fn soliton_area_and_energy() {
        let g = grid(2048);
        for a_scale in [1.0, 2.0] {
            let mut p = PulseConfig::soliton(TP, g.window);
            p.amplitude *= a_scale;
            let s = init_soliton(&p, &g).unwrap();
            let area = pulse_area(&s, &g);
            assert!((area / (2.0 * PI) - 1.0).abs() < 1e-3, "{area}");
            let energy = pulse_energy(&s, &g);
            assert!((energy / (8.0 * p.amplitude) - 1.0).abs() < 1e-3);
        }
        assert_eq!(pulse_area(&FieldSlice::zeros(16), &g), 0.0);
    }

    #[test]
    fn area_converges_under_refinement() {
        let coarse = grid(2048);
        let fine = grid(4096);
        let p = PulseConfig::soliton(TP, coarse.window);
        let a1 = pulse_area(&init_soliton(&p, &coarse).unwrap(), &coarse);
        let a2 = pulse_area(&init_soliton(&p, &fine).unwrap(), &fine);
        assert!((a1 / a2 - 1.0).abs() < 1e-4);
    }

    #[test]
    fn truncated_pulse_rejected() {
        let g = Grid::new(0.05, 10, 1200, 24.0 * TP, 5).unwrap();
        let p = PulseConfig::soliton(TP, g.window);
        assert!(init_soliton(&p, &g).is_err());
    }

    #[test]
    fn grid_checks() {
        let g = grid(2048);
        assert!((g.length() - 0.05).abs() < 1e-15);
        assert_eq!(g.sample_steps.len(), 50);
        assert_eq!(*g.sample_steps.last().unwrap(), 500);
        let p = PulseConfig::soliton(TP, g.window);
        g.validate_for(&p).unwrap();
        assert!(grid(1024).validate_for(&p).is_err());
        let short = Grid::new(0.05, 500, 2048, 10.0 * TP, 50).unwrap();
        assert!(short.validate_for(&p).is_err());
    }

    #[test]
    fn susceptibility_limits() {
        let (l, g0) = (365.5e-9, 1.3e8);
        let chi = susceptibility(1e6, l, g0, 0.0, 0.0);
        let expected = 1e6 * 3.0 * l.powi(3) / (4.0 * PI * PI);
        assert!(chi.re.abs() < 1e-30);
        assert!((chi.im / expected - 1.0).abs() < 1e-12);
        assert_eq!(
            susceptibility(0.0, l, g0, 1e9, 0.0),
            Complex64::new(0.0, 0.0)
        );

        let d = 1e3 * g0;
        let chi = susceptibility(1e6, l, g0, d, 0.0);
        let asym = -1e6 * 3.0 * l.powi(3) * g0 / (4.0 * PI * PI) / (2.0 * d);
        assert!((chi.re / asym - 1.0).abs() < 1e-5);
        assert!(chi.im.abs() < 1e-3 * chi.re.abs());

        for d in [1e7, 3e8, 5e9] {
            let p = susceptibility(1e6, l, g0, d, 1e14);
            let m = susceptibility(1e6, l, g0, -d, 1e14);
            assert_eq!(p.re, -m.re);
            assert_eq!(p.im, m.im);
        }
    }
}

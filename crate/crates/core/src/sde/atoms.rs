//! Atomic drift, Langevin forces and the per-step Bloch update.

use num_complex::Complex64 as C;

use crate::rates::RateSet;
use crate::rng::NoiseStream;

/// Collective variables of one spatio-frequency cell of one line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bloch {
    pub minus: C,
    pub plus: C,
    pub inversion: C,
}

impl Bloch {
    pub fn ground(inversion: f64) -> Self {
        Bloch {
            minus: C::new(0.0, 0.0),
            plus: C::new(0.0, 0.0),
            inversion: C::new(inversion, 0.0),
        }
    }

    /// `R³² + R⁺R⁻`, conserved by the coherent dynamics.
    pub fn length_sq(&self) -> C {
        self.inversion * self.inversion + self.plus * self.minus
    }

    pub fn max_norm(&self) -> f64 {
        self.max_norm_sqr().sqrt()
    }

    #[inline]
    fn max_norm_sqr(&self) -> f64 {
        self.minus
            .norm_sqr()
            .max(self.plus.norm_sqr())
            .max(self.inversion.norm_sqr())
    }

    fn axpy(self, a: f64, x: Bloch) -> Bloch {
        Bloch {
            minus: self.minus + x.minus * a,
            plus: self.plus + x.plus * a,
            inversion: self.inversion + x.inversion * a,
        }
    }
}

/// Physical parameters of one Bloch ensemble (isotope × transition × frequency bin).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineParams {
    /// Atomic resonance minus carrier, ω − ω₀, rad/s.
    pub detuning: f64,
    /// Dipole ratio u multiplying Ω in the Bloch equations.
    pub drive: f64,
    pub rates: RateSet,
    /// Atoms represented by one cell, N = ρ ΔV Δω.
    pub atoms_per_cell: f64,
}

/// Independent unit-variance deviates for one cell and one step.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NoiseDraw {
    pub j: f64,
    pub j_dag: f64,
    pub z: f64,
    pub p: C,
    pub o: C,
}

impl NoiseDraw {
    /// Draw the channels that are open for `ctx`; closed channels stay zero
    /// and consume no random numbers.
    #[inline]
    pub fn sample(stream: &mut NoiseStream, ctx: &StepContext) -> Self {
        let mut d = NoiseDraw {
            j: stream.normal(),
            j_dag: stream.normal(),
            z: stream.normal(),
            ..Default::default()
        };
        if ctx.dephasing_open {
            d.p = stream.complex_normal();
        }
        if ctx.pump_open {
            d.o = stream.complex_normal();
        }
        d
    }

    fn scaled(&self, s: f64) -> Self {
        NoiseDraw {
            j: self.j * s,
            j_dag: self.j_dag * s,
            z: self.z * s,
            p: self.p * s,
            o: self.o * s,
        }
    }
}

/// Deterministic right-hand side of the Bloch equations (per unit τ).
/// The R⁺ component is the partner equation driven by Ω†.
pub fn atomic_drift(state: &Bloch, omega: C, omega_dag: C, line: &LineParams) -> Bloch {
    let r = &line.rates;
    let u = line.drive;
    let i_delta = C::new(0.0, line.detuning);
    Bloch {
        minus: -(r.gamma_perp + i_delta) * state.minus + omega * state.inversion * u,
        plus: -(r.gamma_perp - i_delta) * state.plus + omega_dag * state.inversion * u,
        inversion: -(state.inversion - r.sigma_ss) * r.gamma_parallel
            - (omega * state.plus + omega_dag * state.minus) * (0.5 * u),
    }
}

/// Which form of the atomic Langevin forces to use.
///
/// `Printed` takes the coherent part of the F^z diffusion as
/// `+u(R⁻Ω† + R⁺Ω)` and the dephasing amplitude as `2·sqrt(γ_p(R³+1))`.
/// With `R³ = σ_z/2` (ground state −½) these do not reproduce the exact
/// moments of a collective spin: a classically driven product state acquires
/// `Var R³ < 0`. `Consistent` uses the diffusion that follows from the same
/// operator ordering as the ξ^J term, `−½u(R⁻Ω† + R⁺Ω)` and
/// `sqrt(2γ_p(R³+½))`, which keeps product states exact.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum NoiseModel {
    #[default]
    Consistent,
    Printed,
}

impl NoiseModel {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "consistent" => Some(NoiseModel::Consistent),
            "printed" => Some(NoiseModel::Printed),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NoiseModel::Consistent => "consistent",
            NoiseModel::Printed => "printed",
        }
    }
}

/// Langevin forces `(F^R, F^{R†}, F^z)` for noise deviates whose variance is
/// already `1/Δτ`. The cell's atom number carries the `ρ ΔV Δω` factor.
pub fn atomic_noise(
    state: &Bloch,
    omega: C,
    omega_dag: C,
    line: &LineParams,
    xi: &NoiseDraw,
    model: NoiseModel,
) -> Bloch {
    noise_forces(state, omega, omega_dag, line, &NoiseConsts::new(line), xi, model)
}

/// Per-line factors of the Langevin forces that do not depend on the state.
#[derive(Clone, Copy, Debug)]
struct NoiseConsts {
    inv_sqrt_n: f64,
    sqrt_w12: f64,
}

impl NoiseConsts {
    fn new(line: &LineParams) -> Self {
        NoiseConsts {
            inv_sqrt_n: 1.0 / line.atoms_per_cell.sqrt(),
            sqrt_w12: line.rates.w12.sqrt(),
        }
    }
}

#[inline]
fn noise_forces(
    state: &Bloch,
    omega: C,
    omega_dag: C,
    line: &LineParams,
    k: &NoiseConsts,
    xi: &NoiseDraw,
    model: NoiseModel,
) -> Bloch {
    let r = &line.rates;
    let u = line.drive;
    let sqrt_w12 = k.sqrt_w12;
    let (dephase, coherent) = match model {
        NoiseModel::Printed => (csqrt((state.inversion + 1.0) * r.gamma_p) * 2.0, u),
        NoiseModel::Consistent => (csqrt((state.inversion + 0.5) * (2.0 * r.gamma_p)), -0.5 * u),
    };
    let f_minus = csqrt(omega * state.minus * u) * xi.j + dephase * xi.p + xi.o * (2.0 * sqrt_w12);
    let f_plus = csqrt(omega_dag * state.plus * u) * xi.j_dag
        + dephase * xi.p.conj()
        + xi.o.conj() * (2.0 * sqrt_w12);
    let bracket = (1.0 - state.inversion * r.sigma_ss) * (2.0 * r.gamma_parallel)
        + (state.minus * omega_dag + state.plus * omega) * coherent
        - state.plus * state.minus * (2.0 * r.w12);
    let f_z = csqrt(bracket) * xi.z - (xi.o * state.plus + xi.o.conj() * state.minus) * sqrt_w12;
    Bloch {
        minus: f_minus * k.inv_sqrt_n,
        plus: f_plus * k.inv_sqrt_n,
        inversion: f_z * k.inv_sqrt_n,
    }
}

/// Drift that turns the Itô forces above into their Stratonovich equivalent.
fn stratonovich_correction(omega: C, omega_dag: C, line: &LineParams) -> Bloch {
    let r = &line.rates;
    let inv_n = 1.0 / line.atoms_per_cell;
    Bloch {
        minus: -omega * (0.25 * line.drive * inv_n),
        plus: -omega_dag * (0.25 * line.drive * inv_n),
        inversion: C::new(
            (0.5 * r.gamma_parallel * r.sigma_ss + 2.0 * r.w12) * inv_n,
            0.0,
        ),
    }
}

/// Principal square root.
#[inline]
pub fn csqrt(z: C) -> C {
    let (x, y) = (z.re, z.im);
    if y == 0.0 {
        return if x >= 0.0 {
            C::new(x.sqrt(), 0.0)
        } else {
            C::new(0.0, (-x).sqrt())
        };
    }
    let m = (x * x + y * y).sqrt();
    let re = (0.5 * (m + x)).sqrt();
    let im = (0.5 * (m - x)).sqrt();
    C::new(re, im.copysign(y))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    /// Semi-implicit (Stratonovich) midpoint.
    Midpoint { iterations: u8 },
    /// Explicit Euler–Maruyama (Itô), for cross-checks.
    Euler,
}

impl Default for Scheme {
    fn default() -> Self {
        Scheme::Midpoint { iterations: 3 }
    }
}

/// Step-size dependent constants for one line.
#[derive(Clone, Copy, Debug)]
pub struct StepContext {
    pub line: LineParams,
    pub model: NoiseModel,
    pub dtau: f64,
    /// exp(−iΔ·Δτ/2): half-step free precession applied exactly.
    half_rotation: C,
    noise_scale: f64,
    consts: NoiseConsts,
    pub dephasing_open: bool,
    pub pump_open: bool,
}

impl StepContext {
    /// `window` bounds how long the channel acts; a rate whose integrated
    /// effect over the window is below f64 resolution is treated as closed.
    pub fn new(line: LineParams, dtau: f64, window: f64) -> Self {
        let open = |rate: f64| rate * window > f64::EPSILON;
        StepContext {
            line,
            model: NoiseModel::default(),
            dtau,
            half_rotation: C::from_polar(1.0, -0.5 * line.detuning * dtau),
            noise_scale: 1.0 / dtau.sqrt(),
            consts: NoiseConsts::new(&line),
            dephasing_open: open(line.rates.gamma_p),
            pump_open: open(line.rates.w12),
        }
    }

    pub fn with_model(mut self, model: NoiseModel) -> Self {
        self.model = model;
        self
    }

    /// Stability measure `Δτ·max(γ⊥, γ∥, |Ω|)`; free precession is integrated exactly.
    pub fn stiffness(&self, max_rabi: f64) -> f64 {
        let r = &self.line.rates;
        self.dtau
            * r.gamma_perp
                .max(r.gamma_parallel)
                .max(max_rabi * self.line.drive)
    }
}

/// Marker for a step whose state left the representable region.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Diverged;

/// Bound on any Bloch component before a trajectory is declared diverged.
pub const BLOCH_DIVERGENCE: f64 = 1e3;

/// Largest change of the midpoint fixed point in its last sweep (Bloch units,
/// the vector length is ½) before the step counts as non-convergent.
pub const MIDPOINT_TOLERANCE: f64 = 0.1;

/// Advance one Bloch ensemble by Δτ. `omega`/`omega_dag` hold the field at the
/// start and end of the step; `draws` is `None` for zero-noise runs.
pub fn step_atoms(
    state: &Bloch,
    ctx: &StepContext,
    omega: [C; 2],
    omega_dag: [C; 2],
    draws: Option<&NoiseDraw>,
    scheme: Scheme,
) -> Result<Bloch, Diverged> {
    let next = match scheme {
        Scheme::Midpoint { iterations } => {
            midpoint(state, ctx, omega, omega_dag, draws, iterations)
        }
        Scheme::Euler => Some(euler(state, ctx, omega[0], omega_dag[0], draws)),
    };
    let next = next.ok_or(Diverged)?;
    if next.max_norm_sqr() <= BLOCH_DIVERGENCE * BLOCH_DIVERGENCE {
        Ok(next)
    } else {
        // Also catches NaN, which fails the comparison.
        Err(Diverged)
    }
}

fn midpoint(
    state: &Bloch,
    ctx: &StepContext,
    omega: [C; 2],
    omega_dag: [C; 2],
    draws: Option<&NoiseDraw>,
    iterations: u8,
) -> Option<Bloch> {
    let line = &ctx.line;
    let r = &line.rates;
    let h = ctx.dtau;
    let half_h = 0.5 * h;
    let w = (omega[0] + omega[1]) * 0.5;
    let wd = (omega_dag[0] + omega_dag[1]) * 0.5;

    // Free precession, first half.
    let rot = ctx.half_rotation;
    let start = Bloch {
        minus: state.minus * rot,
        plus: state.plus * rot.conj(),
        inversion: state.inversion,
    };

    // Midpoint linear solve of (I − h/2·A) m = rhs for the coherent/damping part.
    let inv_a = 1.0 / (1.0 + half_h * r.gamma_perp);
    let q = w * (half_h * line.drive);
    let qd = wd * (half_h * line.drive);
    let b3 = 1.0 + half_h * r.gamma_parallel;
    let inv_denom = (q * qd * inv_a + b3).inv();
    let solve = |rhs: Bloch| -> Bloch {
        let inv = (rhs.inversion - (q * rhs.plus + qd * rhs.minus) * (0.5 * inv_a)) * inv_denom;
        Bloch {
            minus: (rhs.minus + q * inv) * inv_a,
            plus: (rhs.plus + qd * inv) * inv_a,
            inversion: inv,
        }
    };
    let base = Bloch {
        inversion: start.inversion + half_h * r.gamma_parallel * r.sigma_ss,
        ..start
    };

    let mid = match draws {
        None => solve(base),
        Some(d) => {
            let xi = d.scaled(ctx.noise_scale);
            let corr = stratonovich_correction(w, wd, line);
            let mut mid = start;
            let mut change = 0.0;
            for _ in 0..iterations.max(1) {
                let f = noise_forces(&mid, w, wd, line, &ctx.consts, &xi, ctx.model);
                let forcing = Bloch {
                    minus: f.minus + corr.minus,
                    plus: f.plus + corr.plus,
                    inversion: f.inversion + corr.inversion,
                };
                let next = solve(base.axpy(half_h, forcing));
                change = next.axpy(-1.0, mid).max_norm_sqr();
                mid = next;
            }
            if iterations > 1 && !(change <= MIDPOINT_TOLERANCE * MIDPOINT_TOLERANCE) {
                return None;
            }
            mid
        }
    };

    // End of step, then the second half of the free precession.
    Some(Bloch {
        minus: (mid.minus * 2.0 - start.minus) * rot,
        plus: (mid.plus * 2.0 - start.plus) * rot.conj(),
        inversion: mid.inversion * 2.0 - start.inversion,
    })
}

fn euler(
    state: &Bloch,
    ctx: &StepContext,
    omega: C,
    omega_dag: C,
    draws: Option<&NoiseDraw>,
) -> Bloch {
    let h = ctx.dtau;
    let mut next = state.axpy(h, atomic_drift(state, omega, omega_dag, &ctx.line));
    if let Some(d) = draws {
        let xi = d.scaled(ctx.noise_scale);
        next = next.axpy(
            h,
            noise_forces(state, omega, omega_dag, &ctx.line, &ctx.consts, &xi, ctx.model),
        );
    }
    next
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn undamped_line() -> LineParams {
        LineParams {
            detuning: 0.0,
            drive: 1.0,
            rates: RateSet::undamped(),
            atoms_per_cell: 1e6,
        }
    }

    fn damped(gamma: f64, gamma_p: f64) -> RateSet {
        let (w12, w21) = crate::rates::pump_decay_rates(gamma, 0.0);
        let (gpar, gperp) = crate::rates::damping_rates(w12, w21, gamma_p);
        RateSet {
            w12,
            w21,
            gamma_parallel: gpar,
            gamma_perp: gperp,
            gamma_p,
            sigma_ss: -1.0,
            n_bar: 0.0,
            n_bar_atoms: 0.0,
            kappa: 0.0,
        }
    }

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn drift_limits() {
        let mut line = undamped_line();
        line.detuning = 2.0;
        let s = Bloch {
            minus: c(0.3, 0.1),
            plus: c(0.3, -0.1),
            inversion: c(-0.2, 0.0),
        };
        let d = atomic_drift(&s, c(0.0, 0.0), c(0.0, 0.0), &line);
        assert_eq!(d.minus, c(0.0, -2.0) * s.minus);
        assert_eq!(d.inversion, c(0.0, 0.0));

        let mut line = undamped_line();
        line.rates = damped(1.0, 3.0);
        let fixed = Bloch::ground(line.rates.sigma_ss);
        let d = atomic_drift(&fixed, c(0.0, 0.0), c(0.0, 0.0), &line);
        assert_eq!(
            d,
            Bloch {
                minus: c(0.0, 0.0),
                plus: c(0.0, 0.0),
                inversion: c(0.0, 0.0)
            }
        );
    }

    #[test]
    fn noise_limits() {
        let mut line = undamped_line();
        line.rates = damped(2.0, 0.0);
        let s = Bloch::ground(-0.5);
        let xi = NoiseDraw {
            j: 0.7,
            j_dag: -0.2,
            z: 1.3,
            p: c(0.4, 0.1),
            o: c(-1.0, 2.0),
        };
        for model in [NoiseModel::Printed, NoiseModel::Consistent] {
            let f = atomic_noise(&s, c(0.0, 0.0), c(0.0, 0.0), &line, &xi, model);
            assert_eq!(f.minus, c(0.0, 0.0));
            let expected = 1.3 * (2.0 * 2.0 * (1.0 - 0.5f64)).sqrt() / 1e3;
            assert!((f.inversion - c(expected, 0.0)).norm() < 1e-15);
        }

        let quiet = undamped_line();
        let f = atomic_noise(
            &s,
            c(0.0, 0.0),
            c(0.0, 0.0),
            &quiet,
            &xi,
            NoiseModel::Consistent,
        );
        assert_eq!(f.max_norm(), 0.0);
    }

    #[test]
    fn langevin_force_has_zero_mean() {
        let mut line = undamped_line();
        line.rates = damped(1.0, 3.0);
        line.rates.w12 = 0.4;
        line.atoms_per_cell = 1.0;
        let ctx = StepContext::new(line, 1.0, 1.0);
        let s = Bloch {
            minus: c(0.2, 0.1),
            plus: c(0.25, -0.05),
            inversion: c(-0.3, 0.01),
        };
        let (w, wd) = (c(1.5, 0.2), c(1.4, -0.3));
        let mut stream = NoiseStream::new(11, 0);
        let n = 100_000;
        let (mut sum, mut sum_sq) = (c(0.0, 0.0), 0.0);
        for _ in 0..n {
            let xi = NoiseDraw::sample(&mut stream, &ctx);
            let f = atomic_noise(&s, w, wd, &line, &xi, NoiseModel::Consistent).minus;
            sum += f;
            sum_sq += f.norm_sqr();
        }
        let mean = sum / n as f64;
        let se = (sum_sq / n as f64 / n as f64).sqrt();
        assert!(mean.norm() < 3.0 * se, "{mean} vs {se}");
    }

    #[test]
    fn csqrt_principal_branch() {
        for z in [
            c(4.0, 0.0),
            c(-4.0, 0.0),
            c(3.0, 4.0),
            c(3.0, -4.0),
            c(-1e-3, 1e-20),
            c(0.0, 0.0),
        ] {
            let r = csqrt(z);
            assert!((r * r - z).norm() <= 1e-14 * z.norm().max(1e-300), "{z}");
            assert!(r.re >= 0.0);
            assert!(
                (r - z.sqrt()).norm() <= 1e-12 * z.norm().sqrt().max(1e-300),
                "{z}"
            );
        }
    }

    fn run_constant(omega: f64, tau: f64, n: usize, line: LineParams, r3: f64) -> Bloch {
        let h = tau / n as f64;
        let ctx = StepContext::new(line, h, tau);
        let w = [c(omega, 0.0); 2];
        let mut s = Bloch::ground(r3);
        for _ in 0..n {
            s = step_atoms(&s, &ctx, w, w, None, Scheme::default()).unwrap();
        }
        s
    }

    #[test]
    fn rabi_flopping_matches_closed_form() {
        let omega = 2.0;
        for tau in [0.3, 1.0, PI, 5.0] {
            let s = run_constant(omega, tau, 20_000, undamped_line(), -0.5);
            let exact = -0.5 * (omega * tau).cos();
            assert!(
                (s.inversion.re - exact).abs() < 1e-7,
                "{tau}: {} vs {exact}",
                s.inversion
            );
            assert!((s.minus.re + 0.5 * (omega * tau).sin()).abs() < 1e-7);
        }
    }

    #[test]
    fn pure_decay_is_exponential() {
        let mut line = undamped_line();
        line.rates = damped(0.5, 0.0);
        let h = 0.01;
        let ctx = StepContext::new(line, h, 1.0);
        let zero = [c(0.0, 0.0); 2];
        let mut s = Bloch::ground(0.25);
        for k in 1..=10 {
            s = step_atoms(&s, &ctx, zero, zero, None, Scheme::default()).unwrap();
            let exact = -1.0 + 1.25 * (-0.5 * h * k as f64).exp();
            assert!((s.inversion.re - exact).abs() < 1e-6);
        }
    }

    #[test]
    fn coherent_step_conserves_bloch_length() {
        let mut line = undamped_line();
        line.detuning = 0.7;
        let ctx = StepContext::new(line, 0.02, 1.0);
        let mut s = Bloch::ground(-0.5);
        let l0 = s.length_sq();
        for k in 0..5000 {
            let t = k as f64 * 0.02;
            let w = [c((t).sin() * 3.0, 0.5), c((t + 0.02).sin() * 3.0, 0.5)];
            let wd = [w[0].conj(), w[1].conj()];
            let next = step_atoms(&s, &ctx, w, wd, None, Scheme::default()).unwrap();
            assert!((next.length_sq() - s.length_sq()).norm() < 1e-8 * 0.25);
            s = next;
        }
        assert!((s.length_sq() - l0).norm() < 1e-10);
        // Zero-noise partner stays conjugate.
        assert!((s.plus - s.minus.conj()).norm() < 1e-12);
        assert!(s.inversion.im.abs() < 1e-12);
    }

    #[test]
    fn second_order_convergence() {
        let line = LineParams {
            detuning: 0.8,
            ..undamped_line()
        };
        let field = |t: f64| c(2.0 / (2.0 * (t - 3.0)).cosh(), 0.0) * 2.0;
        let run = |n: usize| {
            let h = 6.0 / n as f64;
            let ctx = StepContext::new(line, h, 6.0);
            let mut s = Bloch::ground(-0.5);
            for k in 0..n {
                let w = [field(k as f64 * h), field((k + 1) as f64 * h)];
                let wd = [w[0].conj(), w[1].conj()];
                s = step_atoms(&s, &ctx, w, wd, None, Scheme::default()).unwrap();
            }
            s.inversion.re
        };
        let reference = run(64_000);
        let e1 = (run(500) - reference).abs();
        let e2 = (run(1000) - reference).abs();
        let ratio = e1 / e2;
        assert!((3.5..4.5).contains(&ratio), "error ratio {ratio}");
    }

    #[test]
    fn euler_scheme_agrees_at_small_steps() {
        let line = undamped_line();
        let n = 200_000;
        let h = 1.0 / n as f64;
        let ctx = StepContext::new(line, h, 1.0);
        let w = [c(2.0, 0.0); 2];
        let mut s = Bloch::ground(-0.5);
        for _ in 0..n {
            s = step_atoms(&s, &ctx, w, w, None, Scheme::Euler).unwrap();
        }
        assert!((s.inversion.re + 0.5 * 2f64.cos()).abs() < 1e-4);
    }

    #[test]
    fn nonconvergent_midpoint_is_flagged() {
        // Few atoms and a strong pump: the multiplicative pump noise makes the
        // fixed-point map expanding.
        let mut line = LineParams {
            atoms_per_cell: 1e-4,
            ..undamped_line()
        };
        line.rates.w12 = 100.0;
        let ctx = StepContext::new(line, 0.1, 1.0);
        let draw = NoiseDraw {
            j: 3.0,
            j_dag: -3.0,
            z: 3.0,
            o: c(3.0, 1.0),
            ..Default::default()
        };
        let w = [c(10.0, 0.0); 2];
        let s = Bloch::ground(-0.5);
        assert_eq!(step_atoms(&s, &ctx, w, w, Some(&draw), Scheme::default()), Err(Diverged));
        let quiet = StepContext::new(undamped_line(), 0.1, 1.0);
        assert!(step_atoms(&s, &quiet, w, w, Some(&draw), Scheme::default()).is_ok());
    }

    #[test]
    fn divergence_is_flagged() {
        let ctx = StepContext::new(undamped_line(), 1.0, 1.0);
        let s = Bloch {
            minus: c(2e3, 0.0),
            ..Bloch::ground(-0.5)
        };
        let zero = [c(0.0, 0.0); 2];
        assert_eq!(
            step_atoms(&s, &ctx, zero, zero, None, Scheme::default()),
            Err(Diverged)
        );
        let nan = Bloch {
            minus: c(f64::NAN, 0.0),
            ..Bloch::ground(-0.5)
        };
        assert_eq!(
            step_atoms(&nan, &ctx, zero, zero, None, Scheme::default()),
            Err(Diverged)
        );
    }

    struct SpinMoments {
        var_inversion: f64,
        var_minus: f64,
        var_plus_minus: f64,
    }

    /// Drive N atoms from the ground state through rotation angle `phi`, then
    /// let them dephase for `dephase_time`; return normally ordered variances × N.
    fn spin_moments(
        model: NoiseModel,
        phi: f64,
        gamma_p: f64,
        dephase_time: f64,
        n_traj: u64,
    ) -> SpinMoments {
        let n_atoms = 1000.0;
        let mut line = LineParams {
            detuning: 0.0,
            drive: 1.0,
            rates: RateSet::undamped(),
            atoms_per_cell: n_atoms,
        };
        let steps = 100;
        let drive = StepContext::new(line, phi / steps as f64, 1.0).with_model(model);
        line.rates.gamma_p = gamma_p;
        line.rates.gamma_perp = gamma_p;
        let dephase =
            StepContext::new(line, dephase_time.max(1e-9) / steps as f64, 1.0).with_model(model);
        let on = [c(1.0, 0.0); 2];
        let off = [c(0.0, 0.0); 2];
        let (mut s3, mut s33, mut sm, mut smm, mut sp, mut spm) = (
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
        );
        for t in 0..n_traj {
            let mut stream = NoiseStream::new(5, t);
            let mut b = Bloch::ground(-0.5);
            for _ in 0..steps {
                let d = NoiseDraw::sample(&mut stream, &drive);
                b = step_atoms(&b, &drive, on, on, Some(&d), Scheme::default()).unwrap();
            }
            if dephase_time > 0.0 {
                for _ in 0..steps {
                    let d = NoiseDraw::sample(&mut stream, &dephase);
                    b = step_atoms(&b, &dephase, off, off, Some(&d), Scheme::default()).unwrap();
                }
            }
            s3 += b.inversion;
            s33 += b.inversion * b.inversion;
            sm += b.minus;
            smm += b.minus * b.minus;
            sp += b.plus;
            spm += b.plus * b.minus;
        }
        let n = n_traj as f64;
        let (m3, mm, mp) = (s3 / n, sm / n, sp / n);
        SpinMoments {
            var_inversion: ((s33 / n - m3 * m3) * n_atoms).re,
            var_minus: ((smm / n - mm * mm) * n_atoms).re,
            var_plus_minus: ((spm / n - mp * mm) * n_atoms).re,
        }
    }

    // A classically driven collective spin stays a product state, whose normally
    // ordered variances are Var R³ = sin²φ/4N, Var R⁻ = −sin²φ/4N, and
    // ⟨R⁺R⁻⟩ − ⟨R⁺⟩⟨R⁻⟩ = (p_e − |⟨σ⁻⟩|²)/N.
    #[test]
    fn driven_spin_matches_product_state_moments() {
        let phi = PI / 2.0;
        let m = spin_moments(NoiseModel::Consistent, phi, 0.0, 0.0, 40_000);
        let s2 = phi.sin().powi(2);
        assert!(
            (m.var_inversion - s2 / 4.0).abs() < 0.02,
            "{}",
            m.var_inversion
        );
        assert!((m.var_minus + s2 / 4.0).abs() < 0.02, "{}", m.var_minus);
        assert!(
            (m.var_plus_minus - 0.25).abs() < 0.02,
            "{}",
            m.var_plus_minus
        );

        let printed = spin_moments(NoiseModel::Printed, phi, 0.0, 0.0, 40_000);
        assert!(printed.var_inversion < 0.0, "{}", printed.var_inversion);
    }

    #[test]
    fn dephased_spin_matches_product_state_moments() {
        let (gamma_p, t) = (1.0, 0.7);
        let m = spin_moments(NoiseModel::Consistent, PI / 2.0, gamma_p, t, 40_000);
        // p_e = 1/2 is untouched; |⟨σ⁻⟩|² = e^{−2γt}/4.
        let expected = 0.5 - 0.25 * (-2.0 * gamma_p * t).exp();
        assert!(
            (m.var_plus_minus - expected).abs() < 0.02,
            "{} vs {expected}",
            m.var_plus_minus
        );
        assert!(
            (m.var_minus + 0.25 * (-2.0 * gamma_p * t).exp()).abs() < 0.02,
            "{}",
            m.var_minus
        );
    }
}

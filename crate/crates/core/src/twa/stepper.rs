use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{BeamFrame, Grid1D, RamanConfig, TrajectoryState};
use crate::units::HBAR;
use crate::{Error, Result};

/// Precomputed symmetric split-step propagator for one grid and configuration.
///
/// A step of length `dt` is `N(dt/2)·K(dt)·N(dt/2)`: `K` is the exact
/// kinetic propagator in Fourier space and `N(h)` is itself the symmetric
/// composition `C(h/2)·D(h)·C(h/2)` of the exact 2×2 Raman rotation `C` and
/// diagonal potential/nonlinear phases `D` (exact, since `D` leaves the
/// densities unchanged). No noise is added during evolution.
pub struct SplitStepper {
    grid: Grid1D,
    config: RamanConfig,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    /// Static phase rates (rad/s) of each field: trap and light shifts, detuning.
    static_rate1: Vec<f64>,
    static_rate2: Vec<f64>,
    /// Loss rates of the beam absorber, 1/s.
    loss2: Vec<f64>,
    /// Spatial phase of the Raman coupling in the `ψ₁` row.
    coupling: Vec<Complex64>,
    k_trapped: Vec<f64>,
    k_beam: Vec<f64>,
    kinetic_cache: Option<(f64, Vec<Complex64>, Vec<Complex64>)>,
    static_phase1: Option<(f64, Vec<Complex64>)>,
}

impl SplitStepper {
    pub fn new(grid: &Grid1D, config: &RamanConfig) -> Result<Self> {
        config.validate()?;
        if config.frame == BeamFrame::Lab {
            grid.check_resolves(config.k0)?;
        }
        let n = grid.n_points();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(n);
        let ifft = planner.plan_fft_inverse(n);
        let scratch_len = fft.get_inplace_scratch_len().max(ifft.get_inplace_scratch_len());
        let z = grid.positions();
        let static_rate1 = z
            .iter()
            .map(|z| 0.5 * config.mass * config.omega_trap.powi(2) * z * z / HBAR - config.light_shift_1)
            .collect();
        let static_rate2 = vec![-config.light_shift_2 - config.delta; n];
        let loss2 = match config.absorber {
            None => vec![0.0; n],
            Some(a) => z
                .iter()
                .map(|&z| {
                    let depth = (grid.z_min() + a.width - z).max(z - (grid.z_max() - a.width)).max(0.0);
                    a.strength * (depth / a.width).min(1.0).powi(2)
                })
                .collect(),
        };
        let coupling = match config.frame {
            BeamFrame::Lab => z.iter().map(|z| Complex64::from_polar(1.0, -config.k0 * z)).collect(),
            BeamFrame::Carrier => vec![Complex64::new(1.0, 0.0); n],
        };
        let k = grid.k_values();
        let kc = config.carrier_k();
        Ok(SplitStepper {
            grid: grid.clone(),
            config: config.clone(),
            fft,
            ifft,
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
            static_rate1,
            static_rate2,
            loss2,
            coupling,
            k_beam: k.iter().map(|k| k + kc).collect(),
            k_trapped: k,
            kinetic_cache: None,
            static_phase1: None,
        })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn config(&self) -> &RamanConfig {
        &self.config
    }

    /// Largest kinetic phase per step, `dt·ħk_max²/2m`, on the envelope grid.
    pub fn kinetic_phase_per_step(&self, dt: f64) -> f64 {
        dt * HBAR * self.grid.k_max().powi(2) / (2.0 * self.config.mass)
    }

    /// Advances `state` by `dt`.
    pub fn step(&mut self, state: &mut TrajectoryState, dt: f64) -> Result<()> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::invalid(format!("dt must be > 0, got {dt}")));
        }
        if self.kinetic_phase_per_step(dt) > std::f64::consts::FRAC_PI_4 {
            return Err(Error::invalid(format!(
                "dt = {dt:e} s breaks the guard dt·ħk_max²/2m ≤ π/4 ({:.3})",
                self.kinetic_phase_per_step(dt)
            )));
        }
        if state.psi1.len() != self.grid.n_points() || state.psi2.len() != self.grid.n_points() {
            return Err(Error::invalid("state length does not match the grid"));
        }
        self.local_half(state, 0.5 * dt);
        self.kinetic(state, dt);
        self.local_half(state, 0.5 * dt);
        state.t += dt;
        if !state.is_finite() {
            return Err(Error::Diverged {
                t: state.t,
                reason: "non-finite field amplitude".into(),
            });
        }
        Ok(())
    }

    fn local_half(&mut self, state: &mut TrajectoryState, h: f64) {
        self.raman(state, 0.5 * h);
        self.diagonal(state, h);
        self.raman(state, 0.5 * h);
    }

    fn diagonal(&mut self, state: &mut TrajectoryState, tau: f64) {
        let c = &self.config;
        let inv_dz = 1.0 / self.grid.dz();
        let (psi1, psi2) = (&mut state.psi1, &mut state.psi2);
        // With no interactions on the trapped field its phase is static and
        // depends only on tau, which takes a single value per dt.
        let static1 = c.u11 == 0.0 && c.u12 == 0.0;
        if static1 && self.static_phase1.as_ref().is_none_or(|(t, _)| *t != tau) {
            let table = self.static_rate1.iter().map(|r| Complex64::from_polar(1.0, -r * tau)).collect();
            self.static_phase1 = Some((tau, table));
        }
        match (&self.static_phase1, static1) {
            (Some((_, table)), true) => {
                for (x, f) in psi1.iter_mut().zip(table) {
                    *x *= f;
                }
            }
            _ => {
                for j in 0..psi1.len() {
                    let rate1 = self.static_rate1[j]
                        + (c.u11 * (psi1[j].norm_sqr() - inv_dz) + c.u12 * (psi2[j].norm_sqr() - 0.5 * inv_dz)) / HBAR;
                    psi1[j] *= Complex64::from_polar(1.0, -rate1 * tau);
                }
            }
        }
        // psi1 has been rotated but its density is unchanged, so the cross term is unaffected.
        let lossy = self.loss2.iter().any(|&l| l != 0.0);
        for j in 0..psi2.len() {
            let rate2 = self.static_rate2[j]
                + (c.u22 * (psi2[j].norm_sqr() - inv_dz) + c.u12 * (psi1[j].norm_sqr() - 0.5 * inv_dz)) / HBAR;
            let (s, co) = (-rate2 * tau).sin_cos();
            let amp = if lossy { (-self.loss2[j] * tau).exp() } else { 1.0 };
            psi2[j] *= Complex64::new(amp * co, amp * s);
        }
    }

    fn raman(&self, state: &mut TrajectoryState, h: f64) {
        let rabi = self.config.rabi;
        if rabi == 0.0 {
            return;
        }
        let (sin, cos) = (rabi.abs() * h).sin_cos();
        let sign = rabi.signum();
        let i_sin = Complex64::new(0.0, sin * sign);
        for j in 0..state.psi1.len() {
            let (a, b) = (state.psi1[j], state.psi2[j]);
            let c = self.coupling[j];
            state.psi1[j] = cos * a + i_sin * c * b;
            state.psi2[j] = i_sin * c.conj() * a + cos * b;
        }
    }

    fn kinetic(&mut self, state: &mut TrajectoryState, dt: f64) {
        let stale = self.kinetic_cache.as_ref().is_none_or(|(cached, _, _)| *cached != dt);
        if stale {
            let n = self.grid.n_points() as f64;
            let table = |ks: &[f64]| -> Vec<Complex64> {
                ks.iter()
                    .map(|k| Complex64::from_polar(1.0 / n, -HBAR * k * k * dt / (2.0 * self.config.mass)))
                    .collect()
            };
            self.kinetic_cache = Some((dt, table(&self.k_trapped), table(&self.k_beam)));
        }
        let (_, k1, k2) = self.kinetic_cache.as_ref().unwrap();
        for (field, table) in [(&mut state.psi1, k1), (&mut state.psi2, k2)] {
            self.fft.process_with_scratch(field, &mut self.scratch);
            for (x, f) in field.iter_mut().zip(table) {
                *x *= f;
            }
            self.ifft.process_with_scratch(field, &mut self.scratch);
        }
    }
}

/// One split step with a freshly built propagator.
pub fn step(state: &TrajectoryState, config: &RamanConfig, grid: &Grid1D, dt: f64) -> Result<TrajectoryState> {
    let mut stepper = SplitStepper::new(grid, config)?;
    let mut next = state.clone();
    stepper.step(&mut next, dt)?;
    Ok(next)
}

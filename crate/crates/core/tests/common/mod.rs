//! Solver measurements shared by the solver tests and the acceptance run.
#![allow(dead_code)]

use std::f64::consts::PI;

use kerrbeam::study::TwaStudy;
use kerrbeam::twa::{evolve, initial_state, BeamFrame, Grid1D, RamanConfig, SplitStepper, TrajectoryState};
use kerrbeam::units::HBAR;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A free, non-interacting configuration with a negligible trap.
pub fn free_config() -> RamanConfig {
    let mut cfg = RamanConfig::rubidium();
    cfg.rabi = 0.0;
    cfg.u22 = 0.0;
    cfg.omega_trap = 1e-6;
    cfg
}

pub fn run(stepper: &mut SplitStepper, state: &mut TrajectoryState, t: f64, dt: f64) {
    evolve(stepper, state, t, dt, &[], |_| {}).unwrap();
}

pub fn rel_l2(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

/// Largest relative deviation of evolved plane waves from `e^{-i(ħk²/2m - δ)t}`.
pub fn plane_wave_error() -> f64 {
    let grid = Grid1D::new(-50e-6, 50e-6, 1024).unwrap();
    let cfg = free_config();
    let dk = 2.0 * PI / grid.len();
    let t = 1e-3;
    let mut worst: f64 = 0.0;
    for m in [-7i64, 0, 3, 40] {
        let k = m as f64 * dk;
        let mut state = TrajectoryState::zeros(&grid, cfg.carrier_k());
        for j in 0..grid.n_points() {
            state.psi2[j] = Complex64::from_polar(10.0, k * grid.z(j));
        }
        let start = state.psi2.clone();
        let mut stepper = SplitStepper::new(&grid, &cfg).unwrap();
        run(&mut stepper, &mut state, t, 1e-6);
        let kk = k + cfg.carrier_k();
        let omega = HBAR * kk * kk / (2.0 * cfg.mass) - cfg.delta;
        let phase = Complex64::from_polar(1.0, -omega * t);
        let expected: Vec<_> = start.iter().map(|x| x * phase).collect();
        worst = worst.max(rel_l2(&state.psi2, &expected));
    }
    worst
}

/// Uniform condensate coupled to the resonant kicked plane wave is a two-level
/// system with populations cos²(Ωt) and sin²(Ωt). Returns the largest
/// pointwise deviation relative to the initial amplitude.
pub fn rabi_error(frame: BeamFrame) -> f64 {
    let grid = Grid1D::new(-50e-6, 50e-6, 1024).unwrap();
    let mut cfg = free_config();
    cfg.frame = frame;
    cfg.k0 = 2.0 * PI * 50.0 / grid.len();
    cfg.delta = cfg.resonant_delta();
    cfg.rabi = 2000.0;
    let a = 30.0;
    let mut state = TrajectoryState::zeros(&grid, cfg.carrier_k());
    state.psi1.iter_mut().for_each(|x| *x = Complex64::new(a, 0.0));
    let mut stepper = SplitStepper::new(&grid, &cfg).unwrap();
    let t = 1e-3;
    run(&mut stepper, &mut state, t, 2.5e-7);
    let (s, co) = (cfg.rabi * t).sin_cos();
    let mut worst: f64 = 0.0;
    for j in 0..grid.n_points() {
        let want1 = Complex64::new(a * co, 0.0);
        let want2 = Complex64::new(0.0, a * s) * Complex64::from_polar(1.0, cfg.k0 * grid.z(j));
        worst = worst
            .max((state.psi1[j] - want1).norm() / a)
            .max((state.psi2_lab(&grid, j) - want2).norm() / a);
    }
    worst
}

/// Errors against a fine reference at dt = 4, 2, 1 µs for a strongly coupled,
/// strongly interacting condensate.
pub fn splitting_errors() -> Vec<f64> {
    let grid = Grid1D::new(-20e-6, 20e-6, 256).unwrap();
    let mut cfg = RamanConfig::rubidium();
    cfg.rabi = 4000.0;
    cfg.u22 *= 50.0;
    cfg.n_bec = 2e5;
    let start = initial_state::<ChaCha8Rng>(&grid, &cfg, None).unwrap();
    let t = 4e-4;
    let solve = |dt: f64| {
        let mut s = start.clone();
        let mut stepper = SplitStepper::new(&grid, &cfg).unwrap();
        run(&mut stepper, &mut s, t, dt);
        [s.psi1, s.psi2].concat()
    };
    let reference = solve(t / 6400.0);
    [4e-6, 2e-6, 1e-6].iter().map(|&dt| rel_l2(&solve(dt), &reference)).collect()
}

/// Largest relative drift of the Wigner-corrected atom number per millisecond
/// for one noisy trajectory of the default atom laser over 2 ms.
pub fn number_drift_per_ms() -> f64 {
    let study = TwaStudy::rubidium_defaults();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut state = initial_state(&study.grid, &study.raman, Some(&mut rng)).unwrap();
    let mut stepper = SplitStepper::new(&study.grid, &study.raman).unwrap();
    let t = 2e-3;
    let observe: Vec<f64> = (1..=20).map(|i| i as f64 * 1e-4).collect();
    let report = evolve(&mut stepper, &mut state, t, study.dt, &observe, |_| {}).unwrap();
    report.max_relative_drift / (t * 1e3)
}

//! The full beam-squeezing study: pilot mean-field run, local-oscillator
//! construction, ensemble simulation, quadrature analysis and the integrated
//! single-mode comparison.

use num_complex::Complex64;

use crate::quadrature::{
    build_local_oscillator, integrated_analytic_prediction, AgeAveraging, sample_mode, transit_ages, AnalyticPrediction,
    LocalOscillator, ModeSample, QuadratureSeries,
};
use crate::twa::{evolve, initial_state, run_ensemble, EnsembleSpec, Grid1D, RamanConfig, SplitStepper, TrajectoryState};
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct TwaStudy {
    pub raman: RamanConfig,
    pub grid: Grid1D,
    pub dt: f64,
    pub t_final: f64,
    /// Spacing of observation times, starting at `t = 0`.
    pub observe_every: f64,
    /// Local-oscillator window `[z1, z2)`, m.
    pub window: (f64, f64),
    /// Beam density for the local oscillator, m⁻¹; taken from the pilot run when absent.
    pub lo_density: Option<f64>,
    /// Interval treated as steady state, s.
    pub steady: (f64, f64),
    pub averaging: AgeAveraging,
    pub ensemble: EnsembleSpec,
}

impl TwaStudy {
    /// Rb atom laser observed through a 20 µm window 140 µm below the trap,
    /// where the beam front arrives after about 9 ms.
    pub fn rubidium_defaults() -> Self {
        TwaStudy {
            raman: RamanConfig::rubidium(),
            grid: Grid1D::new(-40e-6, 260e-6, 1024).expect("valid grid"),
            dt: 1e-6,
            t_final: 15e-3,
            observe_every: 0.25e-3,
            window: (140e-6, 160e-6),
            lo_density: None,
            steady: (12e-3, 15e-3),
            averaging: AgeAveraging::PerAgeOptimum,
            ensemble: EnsembleSpec { n_traj: 1000, master_seed: 20080101 },
        }
    }

    pub fn observation_times(&self) -> Vec<f64> {
        let n = (self.t_final / self.observe_every + 1e-9).floor() as usize;
        (0..=n).map(|i| i as f64 * self.observe_every).collect()
    }
}

/// Noise-free reference run.
#[derive(Debug, Clone, PartialEq)]
pub struct PilotRun {
    pub times: Vec<f64>,
    /// Window-averaged beam density at each observation time, m⁻¹.
    pub window_density: Vec<f64>,
    /// Density averaged over the steady interval.
    pub steady_density: f64,
    /// Lab-frame phase gradient of `ψ₂` over the window, averaged over the steady interval, rad/m.
    pub steady_wavenumber: f64,
    /// Atoms in the beam at the last observation time (no vacuum correction: the run is noise-free).
    pub final_beam_number: f64,
}

pub fn pilot_run(study: &TwaStudy) -> Result<PilotRun> {
    let grid = &study.grid;
    let window = grid.window(study.window.0, study.window.1)?;
    let mut stepper = SplitStepper::new(grid, &study.raman)?;
    let mut state = initial_state::<rand_chacha::ChaCha8Rng>(grid, &study.raman, None)?;
    let times = study.observation_times();
    let mut rows = Vec::with_capacity(times.len());
    let mut final_beam_number = 0.0;
    evolve(&mut stepper, &mut state, study.t_final, study.dt, &times, |s| {
        let dens = window.clone().map(|j| s.psi2[j].norm_sqr()).sum::<f64>() / window.len() as f64;
        rows.push((s.t, dens, phase_gradient(s, grid, window.clone())));
        final_beam_number = s.psi2.iter().map(|c| c.norm_sqr()).sum::<f64>() * grid.dz();
    })?;
    let steady: Vec<&(f64, f64, f64)> = rows
        .iter()
        .filter(|r| r.0 >= study.steady.0 && r.0 <= study.steady.1)
        .collect();
    let mean = |f: fn(&(f64, f64, f64)) -> f64| steady.iter().map(|r| f(r)).sum::<f64>() / steady.len().max(1) as f64;
    Ok(PilotRun {
        times: rows.iter().map(|r| r.0).collect(),
        window_density: rows.iter().map(|r| r.1).collect(),
        steady_density: mean(|r| r.1),
        steady_wavenumber: mean(|r| r.2),
        final_beam_number,
    })
}

/// Density-weighted mean of `d(arg ψ₂)/dz` over the window, in the lab frame.
fn phase_gradient(state: &TrajectoryState, grid: &Grid1D, window: std::ops::Range<usize>) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for j in window.start..window.end.saturating_sub(1) {
        acc += state.psi2[j].conj() * state.psi2[j + 1];
    }
    state.carrier_k + acc.arg() / grid.dz()
}

/// Re-runs trajectory `index` of the study's ensemble; it is bit-identical to
/// the ensemble member because it draws from the same per-index stream.
pub fn replay_trajectory<F: FnMut(&TrajectoryState)>(study: &TwaStudy, index: usize, observer: F) -> Result<()> {
    let mut stepper = SplitStepper::new(&study.grid, &study.raman)?;
    let mut rng = study.ensemble.rng(index);
    let mut state = initial_state(&study.grid, &study.raman, Some(&mut rng))?;
    evolve(&mut stepper, &mut state, study.t_final, study.dt, &study.observation_times(), observer)?;
    Ok(())
}

/// Single-mode parameters `(N, χ/ħ, t)` of the beam in the study window:
/// the noise-free atom count at steady state, `χ = U22/ℓ` and the middle age
/// of atoms in the window.
pub fn single_mode_parameters(study: &TwaStudy, pilot: &PilotRun) -> Result<(f64, f64, f64)> {
    let lo = build_local_oscillator(&study.raman, &study.grid, pilot.steady_density, study.window.0, study.window.1, 0.0)?;
    let (t1, t2) = transit_ages(&lo, study.raman.mass);
    Ok((
        pilot.steady_density * lo.length(),
        study.raman.u22 * lo.quartic_overlap() / crate::units::HBAR,
        0.5 * (t1 + t2),
    ))
}

/// Steady-state numbers compared against the single-mode model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadySummary {
    pub var_sq: f64,
    pub se_sq: f64,
    pub var_anti: f64,
    pub se_anti: f64,
    pub n_region: f64,
    pub analytic: AnalyticPrediction,
}

#[derive(Debug, Clone)]
pub struct TwaStudyOutput {
    pub lo: LocalOscillator,
    pub pilot: Option<PilotRun>,
    pub series: QuadratureSeries,
    /// Single-mode prediction at each observation time from the ensemble atom count
    /// (`None` while the window is empty).
    pub analytic: Vec<Option<AnalyticPrediction>>,
    pub steady: SteadySummary,
    pub max_relative_drift: f64,
    pub failures: usize,
}

pub fn run_study(study: &TwaStudy) -> Result<TwaStudyOutput> {
    let pilot = match study.lo_density {
        Some(_) => None,
        None => Some(pilot_run(study)?),
    };
    let rho = study
        .lo_density
        .unwrap_or_else(|| pilot.as_ref().map(|p| p.steady_density).unwrap_or(0.0));
    let lo = build_local_oscillator(&study.raman, &study.grid, rho, study.window.0, study.window.1, 0.0)?;
    let times = study.observation_times();
    let out = run_ensemble(&study.raman, &study.grid, &study.ensemble, study.dt, study.t_final, &times, |s| {
        sample_mode(s, &study.grid, &lo)
    })?;
    let by_time: Vec<Vec<ModeSample>> = (0..times.len())
        .map(|i| out.records.iter().map(|(_, rec)| rec[i]).collect())
        .collect();
    let series = QuadratureSeries::from_samples(&times, &by_time)?;
    let ages = transit_ages(&lo, study.raman.mass);
    let analytic = series
        .n_region
        .iter()
        .map(|&n| {
            if n > 0.5 {
                integrated_analytic_prediction(study.raman.u22, &lo, n, ages, study.averaging).ok()
            } else {
                None
            }
        })
        .collect();
    let idx = series.indices_between(study.steady.0, study.steady.1);
    let mean = |v: &[f64]| idx.iter().map(|&i| v[i]).sum::<f64>() / idx.len().max(1) as f64;
    let n_region = mean(&series.n_region);
    let steady = SteadySummary {
        var_sq: mean(&series.var_sq),
        se_sq: mean(&series.se_sq),
        var_anti: mean(&series.var_anti),
        se_anti: mean(&series.se_anti),
        n_region,
        analytic: integrated_analytic_prediction(study.raman.u22, &lo, n_region.max(f64::MIN_POSITIVE), ages, study.averaging)?,
    };
    Ok(TwaStudyOutput {
        lo,
        pilot,
        series,
        analytic,
        steady,
        max_relative_drift: out.max_relative_drift(),
        failures: out.failures.len(),
    })
}

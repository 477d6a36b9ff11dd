use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{evolve, initial_state, EvolveReport, Grid1D, RamanConfig, SplitStepper, TrajectoryState};
use crate::{Error, Result};

/// Ensemble size and seeding.
///
/// Trajectory `i` draws its initial noise from ChaCha8 seeded with
/// `master_seed` on stream `i`, so a trajectory depends only on
/// `(master_seed, i)` and never on scheduling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnsembleSpec {
    pub n_traj: usize,
    pub master_seed: u64,
}

impl EnsembleSpec {
    pub fn new(n_traj: usize, master_seed: u64) -> Result<Self> {
        if n_traj < 2 {
            return Err(Error::invalid(format!("an ensemble needs n_traj >= 2, got {n_traj}")));
        }
        Ok(EnsembleSpec { n_traj, master_seed })
    }

    pub fn rng(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(index as u64);
        rng
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryFailure {
    pub index: usize,
    pub message: String,
}

/// Per-trajectory observer records, in trajectory order.
#[derive(Debug, Clone)]
pub struct EnsembleOutput<R> {
    /// `(trajectory index, one record per observation time)`.
    pub records: Vec<(usize, Vec<R>)>,
    pub reports: Vec<EvolveReport>,
    pub failures: Vec<TrajectoryFailure>,
}

impl<R> EnsembleOutput<R> {
    pub fn max_relative_drift(&self) -> f64 {
        self.reports.iter().map(|r| r.max_relative_drift).fold(0.0, f64::max)
    }
}

/// Runs `spec.n_traj` independent trajectories from `t = 0` to `t_final`.
///
/// Trajectories run on the current rayon pool; results are collected in
/// index order. Failed trajectories are reported in `failures`; more than 1%
/// failures turn the whole run into an error.
pub fn run_ensemble<R, F>(
    config: &RamanConfig,
    grid: &Grid1D,
    spec: &EnsembleSpec,
    dt: f64,
    t_final: f64,
    observe_at: &[f64],
    observe: F,
) -> Result<EnsembleOutput<R>>
where
    R: Send,
    F: Fn(&TrajectoryState) -> R + Sync,
{
    // fail fast on configuration problems rather than once per trajectory
    SplitStepper::new(grid, config)?;
    let results: Vec<Result<(Vec<R>, EvolveReport)>> = (0..spec.n_traj)
        .into_par_iter()
        .map_init(
            || SplitStepper::new(grid, config).expect("validated above"),
            |stepper, i| {
                let mut rng = spec.rng(i);
                let mut state = initial_state(grid, config, Some(&mut rng))?;
                let mut out = Vec::with_capacity(observe_at.len());
                let report = evolve(stepper, &mut state, t_final, dt, observe_at, |s| out.push(observe(s)))?;
                Ok((out, report))
            },
        )
        .collect();

    let mut output = EnsembleOutput {
        records: Vec::with_capacity(spec.n_traj),
        reports: Vec::with_capacity(spec.n_traj),
        failures: Vec::new(),
    };
    for (index, r) in results.into_iter().enumerate() {
        match r {
            Ok((rec, report)) => {
                output.records.push((index, rec));
                output.reports.push(report);
            }
            Err(e) => output.failures.push(TrajectoryFailure {
                index,
                message: e.to_string(),
            }),
        }
    }
    if output.failures.len() * 100 > spec.n_traj {
        return Err(Error::EnsembleFailed {
            failed: output.failures.len(),
            total: spec.n_traj,
            first: output.failures[0].message.clone(),
        });
    }
    Ok(output)
}

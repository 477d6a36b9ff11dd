use super::{SplitStepper, TrajectoryState};
use crate::{Error, Result};

/// Bookkeeping returned by [`evolve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveReport {
    pub steps: usize,
    pub initial_number: f64,
    pub final_number: f64,
    /// Largest `|N(t) - N(0)| / N(0)` seen at the observation points.
    pub max_relative_drift: f64,
}

/// Advances `state` to `t_final` with fixed steps `dt`, landing exactly on
/// each time in `observe_at` (the step before a landing point is shortened)
/// and calling `observer` there.
///
/// Observation times before `state.t` or after `t_final` are ignored; a time
/// equal to `state.t` is observed without stepping.
pub fn evolve<F>(
    stepper: &mut SplitStepper,
    state: &mut TrajectoryState,
    t_final: f64,
    dt: f64,
    observe_at: &[f64],
    mut observer: F,
) -> Result<EvolveReport>
where
    F: FnMut(&TrajectoryState),
{
    if t_final < state.t {
        return Err(Error::invalid(format!("t_final {t_final} is before the state time {}", state.t)));
    }
    if observe_at.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("observation times must be sorted"));
    }
    let grid = stepper.grid().clone();
    let n0 = state.wigner_number(&grid);
    let mut report = EvolveReport {
        steps: 0,
        initial_number: n0,
        final_number: n0,
        max_relative_drift: 0.0,
    };
    let t_start = state.t;
    let mut targets: Vec<(f64, bool)> = observe_at
        .iter()
        .filter(|&&t| t >= t_start && t <= t_final)
        .map(|&t| (t, true))
        .collect();
    if targets.last().is_none_or(|&(t, _)| t < t_final) {
        targets.push((t_final, false));
    }
    // step counts are derived from absolute offsets so roundoff does not accumulate in t
    let tol = 1e-9 * dt;
    for (target, observe) in targets {
        let span = target - state.t;
        if span > tol {
            let full = ((span - tol) / dt).floor() as usize;
            for _ in 0..full {
                stepper.step(state, dt)?;
            }
            let rest = target - state.t;
            if rest > tol {
                stepper.step(state, rest)?;
                report.steps += 1;
            }
            report.steps += full;
        }
        state.t = target;
        if observe {
            observer(state);
        }
        let n = state.wigner_number(&grid);
        report.final_number = n;
        if n0 != 0.0 {
            report.max_relative_drift = report.max_relative_drift.max(((n - n0) / n0).abs());
        }
    }
    Ok(report)
}

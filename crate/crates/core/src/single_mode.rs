//! Exact single-mode Kerr model.
//!
//! A coherent state `|α⟩` evolving under `H = ħω a†a + (χ/2) a†a†aa` stays
//! diagonal in number, so every quadrature moment has a closed form in the
//! accumulated Kerr phase `θ = χt/ħ`. Quadrature angles are measured in the
//! frame rotating at `ω`, which removes `ω` from every variance.
//!
//! Because the Kerr term commutes with itself at different times, a
//! time-dependent `χ(t)` only enters through `Θ(t) = (1/ħ)∫₀ᵗ χ(t′) dt′`
//! (see [`ChiSchedule`]).

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::fock::{default_n_max, FockState};
use crate::optimize::{golden_section, periodic_minimum};
use crate::units::HBAR;
use crate::{Error, Result};

/// Grid size of the phase scan in [`optimal_phase`].
pub const PHASE_GRID: usize = 720;
/// Refinement tolerance of the phase search, rad.
pub const PHASE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KerrParams {
    /// Nonlinearity in joules.
    pub chi: f64,
    /// Mode frequency, rad/s.
    pub omega: f64,
    /// Real coherent amplitude; `N = α²`.
    pub alpha: f64,
}

impl KerrParams {
    pub fn new(chi: f64, omega: f64, alpha: f64) -> Result<Self> {
        if !chi.is_finite() || !omega.is_finite() {
            return Err(Error::invalid("chi and omega must be finite"));
        }
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::invalid(format!("alpha must be finite and >= 0, got {alpha}")));
        }
        Ok(KerrParams { chi, omega, alpha })
    }

    /// `chi_rate` is `χ/ħ` in rad/s, so "χ = 0.1ħ" is `chi_rate = 0.1`.
    pub fn from_chi_rate(chi_rate: f64, omega: f64, alpha: f64) -> Result<Self> {
        Self::new(chi_rate * HBAR, omega, alpha)
    }

    pub fn chi_rate(&self) -> f64 {
        self.chi / HBAR
    }

    pub fn mean_number(&self) -> f64 {
        self.alpha * self.alpha
    }

    /// `χt/ħ`.
    pub fn kerr_phase(&self, t: f64) -> f64 {
        self.chi * t / HBAR
    }

    pub fn with_chi(self, chi: f64) -> Self {
        KerrParams { chi, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSample {
    pub t: f64,
    pub phi: f64,
    pub variance: f64,
}

/// One row of a minimum-variance trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub t: f64,
    pub phi_opt: f64,
    pub var_min: f64,
    /// Variance at `phi_opt + π/2`.
    pub var_anti: f64,
}

/// Closed-form quadrature variance as a function of the mean number and the
/// accumulated Kerr phase, written term by term.
pub fn variance_at_phase(n: f64, theta: f64, phi: f64) -> f64 {
    let s = theta.sin();
    let sh = (0.5 * theta).sin();
    1.0 + 2.0 * n
        + 2.0 * n * (-2.0 * n * s * s).exp() * (theta + n * (2.0 * theta).sin() - 2.0 * phi).cos()
        - 4.0 * n * (-4.0 * n * sh * sh).exp() * (phi - n * s).cos().powi(2)
}

/// Fourier coefficients `(c, p, q)` with `var(φ) = c + p cos2φ + q sin2φ`.
///
/// The variance is a pure second harmonic in φ, so these three numbers carry
/// the whole phase dependence.
pub fn harmonic_coefficients(n: f64, theta: f64) -> (f64, f64, f64) {
    let s = theta.sin();
    let sh = (0.5 * theta).sin();
    let ea = (-2.0 * n * s * s).exp();
    let eb = (-4.0 * n * sh * sh).exp();
    let psi = theta + n * (2.0 * theta).sin();
    let beta2 = 2.0 * n * s;
    let c = 1.0 + 2.0 * n - 2.0 * n * eb;
    let p = 2.0 * n * (ea * psi.cos() - eb * beta2.cos());
    let q = 2.0 * n * (ea * psi.sin() - eb * beta2.sin());
    (c, p, q)
}

/// `(min, max)` of the variance over φ, from [`harmonic_coefficients`].
pub fn variance_extremes(n: f64, theta: f64) -> (f64, f64) {
    let (c, p, q) = harmonic_coefficients(n, theta);
    let r = p.hypot(q);
    (c - r, c + r)
}

fn check_finite(values: &[(&str, f64)]) -> Result<()> {
    for (name, v) in values {
        if !v.is_finite() {
            return Err(Error::invalid(format!("{name} must be finite, got {v}")));
        }
    }
    Ok(())
}

fn check_time(t: f64) -> Result<()> {
    check_finite(&[("t", t)])?;
    if t < 0.0 {
        return Err(Error::invalid(format!("t must be >= 0, got {t}")));
    }
    Ok(())
}

/// Quadrature variance of `X^φ = e^{iφ}a + e^{-iφ}a†` for an initial coherent state.
pub fn analytic_variance(params: &KerrParams, t: f64, phi: f64) -> Result<f64> {
    check_time(t)?;
    check_finite(&[("phi", phi), ("chi", params.chi), ("alpha", params.alpha)])?;
    Ok(variance_at_phase(params.mean_number(), params.kerr_phase(t), phi))
}

/// Brute-force variance from the truncated Fock expansion of `|α⟩`.
///
/// The state is evolved with the full `nω + χn(n-1)/2ħ` phases; the first
/// and second moments are then rotated back by `e^{iωt}`, `e^{2iωt}` so the
/// angle convention matches [`analytic_variance`].
pub fn fock_oracle_variance(params: &KerrParams, t: f64, phi: f64, n_max: usize) -> Result<f64> {
    check_time(t)?;
    check_finite(&[("phi", phi)])?;
    let mut state = FockState::coherent(params.alpha, n_max)?;
    let omega_t = params.omega * t;
    state.evolve_kerr(params.kerr_phase(t), omega_t);
    let a = state.moment(0, 1) * Complex64::from_polar(1.0, omega_t);
    let a2 = state.moment(0, 2) * Complex64::from_polar(1.0, 2.0 * omega_t);
    let n = state.moment(1, 1).re;
    let rot = Complex64::from_polar(1.0, phi);
    // ⟨X²⟩ = 2Re(e^{2iφ}⟨a²⟩) + 2⟨a†a⟩ + 1, ⟨X⟩ = 2Re(e^{iφ}⟨a⟩)
    let x2 = 2.0 * (rot * rot * a2).re + 2.0 * n + 1.0;
    let x = 2.0 * (rot * a).re;
    Ok(x2 - x * x)
}

/// [`fock_oracle_variance`] with the default truncation rule.
pub fn fock_oracle_variance_auto(params: &KerrParams, t: f64, phi: f64) -> Result<f64> {
    fock_oracle_variance(params, t, phi, default_n_max(params.alpha))
}

/// Angle minimising the variance at a given accumulated Kerr phase.
///
/// Flat landscapes (`θ = 0`) return `φ = 0` by convention.
pub fn optimal_phase_at(n: f64, theta: f64) -> (f64, f64) {
    if theta == 0.0 || n == 0.0 {
        return (0.0, variance_at_phase(n, theta, 0.0));
    }
    periodic_minimum(|phi| variance_at_phase(n, theta, phi), TAU, PHASE_GRID, PHASE_TOL)
}

/// Best quadrature at time `t`: 720-point scan over `[0, 2π)` and
/// golden-section refinement.
pub fn optimal_phase(params: &KerrParams, t: f64) -> Result<QuadratureSample> {
    check_time(t)?;
    let (phi, variance) = optimal_phase_at(params.mean_number(), params.kerr_phase(t));
    Ok(QuadratureSample { t, phi, variance })
}

/// Per-time optimal squeezing and the conjugate antisqueezing.
pub fn min_variance_trace(params: &KerrParams, t_grid: &[f64]) -> Result<Vec<TracePoint>> {
    if t_grid.is_empty() {
        return Err(Error::invalid("t_grid is empty"));
    }
    if t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("t_grid must be nondecreasing"));
    }
    for &t in t_grid {
        check_time(t)?;
    }
    let n = params.mean_number();
    Ok(t_grid
        .par_iter()
        .map(|&t| {
            let theta = params.kerr_phase(t);
            let (phi_opt, var_min) = optimal_phase_at(n, theta);
            TracePoint {
                t,
                phi_opt,
                var_min,
                var_anti: variance_at_phase(n, theta, phi_opt + FRAC_PI_2),
            }
        })
        .collect())
}

/// Kerr phase `θ ∈ (0, θ_max]` of the deepest squeezing for mean number `n`.
///
/// Geometric scan followed by golden refinement; returns `(θ, var_min)`.
pub fn deepest_squeezing_phase(n: f64, theta_max: f64) -> (f64, f64) {
    let lo = (1e-4 / n.max(1.0)).min(theta_max * 1e-3);
    let steps = 4000;
    let ratio = (theta_max / lo).powf(1.0 / steps as f64);
    let grid: Vec<f64> = (0..=steps).map(|i| lo * ratio.powi(i as i32)).collect();
    let vals: Vec<f64> = grid.iter().map(|&th| variance_extremes(n, th).0).collect();
    let best = vals
        .iter()
        .enumerate()
        .fold(0, |b, (i, v)| if *v < vals[b] { i } else { b });
    let a = grid[best.saturating_sub(1)];
    let b = grid[(best + 1).min(steps)];
    golden_section(|th| variance_extremes(n, th).0, a, b, 1e-14 * theta_max.max(1.0))
}

/// Time of the deepest squeezing within the first Kerr revival.
pub fn time_of_minimum(params: &KerrParams) -> Result<f64> {
    if params.chi <= 0.0 {
        return Err(Error::invalid("time of minimum needs chi > 0"));
    }
    let (theta, _) = deepest_squeezing_phase(params.mean_number(), PI);
    Ok(theta / params.chi_rate())
}

/// Time-dependent nonlinearity.
#[derive(Debug, Clone, PartialEq)]
pub enum ChiSchedule {
    Constant(f64),
    /// Piecewise-linear `χ(t)` through `(times[i], chi_values[i])`, starting at `t = 0`.
    Tabulated { times: Vec<f64>, chi_values: Vec<f64> },
}

impl ChiSchedule {
    pub fn tabulated(times: Vec<f64>, chi_values: Vec<f64>) -> Result<Self> {
        if times.len() != chi_values.len() || times.len() < 2 {
            return Err(Error::invalid("tabulated schedule needs >= 2 matching (time, chi) pairs"));
        }
        if times[0] != 0.0 {
            return Err(Error::invalid("tabulated schedule must start at t = 0"));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("schedule times must be strictly increasing"));
        }
        if chi_values.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(Error::invalid("schedule chi values must be finite and >= 0"));
        }
        Ok(ChiSchedule::Tabulated { times, chi_values })
    }

    pub fn end_time(&self) -> f64 {
        match self {
            ChiSchedule::Constant(_) => f64::INFINITY,
            ChiSchedule::Tabulated { times, .. } => *times.last().unwrap(),
        }
    }

    /// `χ(t)` in joules.
    pub fn chi_at(&self, t: f64) -> Result<f64> {
        match self {
            ChiSchedule::Constant(c) => Ok(*c),
            ChiSchedule::Tabulated { times, chi_values } => {
                let i = self.segment(t)?;
                let (t0, t1) = (times[i], times[i + 1]);
                let w = (t - t0) / (t1 - t0);
                Ok(chi_values[i] + w * (chi_values[i + 1] - chi_values[i]))
            }
        }
    }

    /// Accumulated phase `Θ(t) = (1/ħ)∫₀ᵗ χ(t′)dt′`, exact for the piecewise-linear table.
    pub fn accumulated_phase(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        match self {
            ChiSchedule::Constant(c) => Ok(c * t / HBAR),
            ChiSchedule::Tabulated { times, chi_values } => {
                let last = self.segment(t)?;
                let mut integral = 0.0;
                for i in 0..last {
                    integral += 0.5 * (chi_values[i] + chi_values[i + 1]) * (times[i + 1] - times[i]);
                }
                let chi_t = self.chi_at(t)?;
                integral += 0.5 * (chi_values[last] + chi_t) * (t - times[last]);
                Ok(integral / HBAR)
            }
        }
    }

    fn segment(&self, t: f64) -> Result<usize> {
        let ChiSchedule::Tabulated { times, .. } = self else {
            return Ok(0);
        };
        let t_end = *times.last().unwrap();
        if !(0.0..=t_end).contains(&t) {
            return Err(Error::ScheduleDomain { t, t_end });
        }
        let i = times.partition_point(|&x| x <= t);
        Ok(i.saturating_sub(1).min(times.len() - 2))
    }
}

/// Closed-form variance with `χt/ħ` replaced by the accumulated phase of `schedule`.
pub fn accumulated_phase_variance(schedule: &ChiSchedule, alpha: f64, t: f64, phi: f64) -> Result<f64> {
    check_finite(&[("alpha", alpha), ("phi", phi)])?;
    let theta = schedule.accumulated_phase(t)?;
    Ok(variance_at_phase(alpha * alpha, theta, phi))
}

/// Optimal squeezing under a schedule: `(φ_opt, var_sq, var_anti)`.
pub fn accumulated_phase_optimum(schedule: &ChiSchedule, alpha: f64, t: f64) -> Result<(f64, f64, f64)> {
    let theta = schedule.accumulated_phase(t)?;
    let n = alpha * alpha;
    let (phi, sq) = optimal_phase_at(n, theta);
    Ok((phi, sq, variance_at_phase(n, theta, phi + FRAC_PI_2)))
}

/// Smallest factor `s ≥ 1` such that the deepest squeezing with `χ/s` occurs
/// no earlier than `t_experiment`. Bisection on `s`.
pub fn required_suppression(params: &KerrParams, t_experiment: f64) -> Result<f64> {
    if !(t_experiment > 0.0 && t_experiment.is_finite()) {
        return Err(Error::invalid("t_experiment must be > 0"));
    }
    let t_min = |s: f64| time_of_minimum(&params.with_chi(params.chi / s));
    if t_min(1.0)? >= t_experiment {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (1.0, 2.0);
    while t_min(hi)? < t_experiment {
        lo = hi;
        hi *= 2.0;
    }
    while (hi - lo) > 1e-10 * hi {
        let mid = 0.5 * (lo + hi);
        if t_min(mid)? < t_experiment {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(chi_rate: f64, alpha: f64) -> KerrParams {
        KerrParams::from_chi_rate(chi_rate, 3.0, alpha).unwrap()
    }

    #[test]
    fn coherent_limits_are_exact() {
        let p = params(0.1, 7.0);
        for phi in [0.0, 0.4, 1.7, 3.0] {
            assert!((analytic_variance(&p, 0.0, phi).unwrap() - 1.0).abs() < 1e-12);
        }
        let p = params(0.0, 5.0);
        for phi in [0.0, 0.9, 2.2] {
            assert!((analytic_variance(&p, 3.0, phi).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = params(0.1, 2.0);
        assert!(analytic_variance(&p, -1.0, 0.0).is_err());
        assert!(analytic_variance(&p, f64::NAN, 0.0).is_err());
        assert!(analytic_variance(&p, 1.0, f64::INFINITY).is_err());
        assert!(KerrParams::new(1.0, 0.0, -1.0).is_err());
    }

    #[test]
    fn small_case_matches_fock() {
        // α = 2, χ = 0.1ħ, χt/ħ = 0.1
        let p = params(0.1, 2.0);
        let a = analytic_variance(&p, 1.0, 0.0).unwrap();
        let f = fock_oracle_variance_auto(&p, 1.0, 0.0).unwrap();
        assert!((a - f).abs() < 1e-8, "{a} vs {f}");
    }

    #[test]
    fn fock_vacuum_and_initial_state() {
        let vac = params(0.3, 0.0);
        assert!((fock_oracle_variance_auto(&vac, 2.0, 1.1).unwrap() - 1.0).abs() < 1e-12);
        let p = params(0.3, 3.0);
        let v = fock_oracle_variance_auto(&p, 0.0, std::f64::consts::FRAC_PI_4).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fock_truncation_error_surfaces() {
        let p = params(0.1, 6.0);
        assert!(matches!(
            fock_oracle_variance(&p, 1.0, 0.0, 30),
            Err(Error::TruncationLoss { .. })
        ));
    }

    #[test]
    fn harmonic_decomposition_reproduces_variance() {
        for &(n, th) in &[(4.0, 0.1), (50.0, 0.02), (1000.0, 0.002), (9.0, 2.0)] {
            let (c, p, q) = harmonic_coefficients(n, th);
            for k in 0..12 {
                let phi = k as f64 * 0.37;
                let direct = variance_at_phase(n, th, phi);
                let h = c + p * (2.0 * phi).cos() + q * (2.0 * phi).sin();
                assert!((direct - h).abs() < 1e-9 * (1.0 + n), "n={n} th={th} phi={phi}");
            }
        }
    }

    #[test]
    fn optimal_phase_degenerate_cases() {
        let p = params(0.1, 4.0);
        let s = optimal_phase(&p, 0.0).unwrap();
        assert_eq!(s.phi, 0.0);
        assert!((s.variance - 1.0).abs() < 1e-12);
        let flat = min_variance_trace(&params(0.0, 4.0), &[0.0, 1.0, 2.0]).unwrap();
        assert!(flat.iter().all(|p| (p.var_min - 1.0).abs() < 1e-12));
    }

    #[test]
    fn optimal_phase_matches_closed_form() {
        let p = params(0.05, 2.0);
        let s = optimal_phase(&p, 4.0).unwrap();
        let (lo, _) = variance_extremes(4.0, 0.2);
        assert!((s.variance - lo).abs() < 1e-12);
        assert!((0.0..TAU).contains(&s.phi));
    }

    #[test]
    fn trace_rejects_bad_grids() {
        let p = params(0.1, 3.0);
        assert!(min_variance_trace(&p, &[]).is_err());
        assert!(min_variance_trace(&p, &[1.0, 0.5]).is_err());
    }

    #[test]
    fn schedule_constant_equals_direct() {
        let p = params(0.1, 5.0);
        let sched = ChiSchedule::Constant(p.chi);
        for &(t, phi) in &[(0.0, 0.0), (0.3, 1.0), (2.5, 2.2)] {
            let a = analytic_variance(&p, t, phi).unwrap();
            let b = accumulated_phase_variance(&sched, 5.0, t, phi).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn schedule_validation_and_domain() {
        assert!(ChiSchedule::tabulated(vec![0.0, 1.0, 1.0], vec![1.0, 1.0, 1.0]).is_err());
        assert!(ChiSchedule::tabulated(vec![0.0, 1.0], vec![1.0, -1.0]).is_err());
        assert!(ChiSchedule::tabulated(vec![0.5, 1.0], vec![1.0, 1.0]).is_err());
        let s = ChiSchedule::tabulated(vec![0.0, 1.0, 3.0], vec![2.0 * HBAR, 0.0, 0.0]).unwrap();
        assert!(matches!(s.accumulated_phase(3.5), Err(Error::ScheduleDomain { .. })));
        // triangle of area 1
        assert!((s.accumulated_phase(3.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((s.accumulated_phase(0.5).unwrap() - 0.75).abs() < 1e-12);
        let zero = ChiSchedule::tabulated(vec![0.0, 1.0], vec![0.0, 0.0]).unwrap();
        assert!((accumulated_phase_variance(&zero, 10.0, 0.7, 0.3).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn suppression_is_one_when_minimum_is_late() {
        let p = params(0.1, 10.0);
        let t_min = time_of_minimum(&p).unwrap();
        assert_eq!(required_suppression(&p, 0.5 * t_min).unwrap(), 1.0);
    }

    #[test]
    fn suppression_scales_linearly() {
        let p = params(0.1, 10.0);
        let t_min = time_of_minimum(&p).unwrap();
        let s1 = required_suppression(&p, 10.0 * t_min).unwrap();
        let s2 = required_suppression(&p, 20.0 * t_min).unwrap();
        assert!((s1 - 10.0).abs() < 1e-6 * s1, "{s1}");
        assert!((s2 / s1 - 2.0).abs() < 1e-6);
    }
}

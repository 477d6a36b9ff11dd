use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{Grid1D, RamanConfig};
use crate::{Error, Result};

/// Minimum number of grid points across the `±σ` span of the trap ground state.
pub const MIN_POINTS_ACROSS_GROUND_STATE: f64 = 16.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Trapped,
    Beam,
}

/// One stochastic trajectory: the two c-number fields at time `t`.
///
/// `psi2` is the beam envelope relative to `e^{i·carrier_k·z}`; with a lab
/// frame `carrier_k` is zero and `psi2` is the field itself.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryState {
    pub psi1: Vec<Complex64>,
    pub psi2: Vec<Complex64>,
    pub t: f64,
    pub carrier_k: f64,
}

impl TrajectoryState {
    pub fn zeros(grid: &Grid1D, carrier_k: f64) -> Self {
        let n = grid.n_points();
        TrajectoryState {
            psi1: vec![Complex64::new(0.0, 0.0); n],
            psi2: vec![Complex64::new(0.0, 0.0); n],
            t: 0.0,
            carrier_k,
        }
    }

    /// Lab-frame beam amplitude at grid point `j`.
    pub fn psi2_lab(&self, grid: &Grid1D, j: usize) -> Complex64 {
        if self.carrier_k == 0.0 {
            self.psi2[j]
        } else {
            self.psi2[j] * Complex64::from_polar(1.0, self.carrier_k * grid.z(j))
        }
    }

    pub fn field(&self, which: Field) -> &[Complex64] {
        match which {
            Field::Trapped => &self.psi1,
            Field::Beam => &self.psi2,
        }
    }

    /// Raw `Σ(|ψ₁|² + |ψ₂|²)·dz`.
    pub fn raw_number(&self, grid: &Grid1D) -> f64 {
        let s: f64 = self.psi1.iter().chain(&self.psi2).map(|c| c.norm_sqr()).sum();
        s * grid.dz()
    }

    /// Wigner-corrected total `Σ(|ψ₁|² + |ψ₂|² - 1/dz)·dz`.
    pub fn wigner_number(&self, grid: &Grid1D) -> f64 {
        self.raw_number(grid) - grid.n_points() as f64
    }

    /// Wigner-corrected number in one field.
    pub fn field_number(&self, grid: &Grid1D, which: Field) -> f64 {
        let s: f64 = self.field(which).iter().map(|c| c.norm_sqr()).sum();
        s * grid.dz() - 0.5 * grid.n_points() as f64
    }

    pub fn is_finite(&self) -> bool {
        self.psi1
            .iter()
            .chain(&self.psi2)
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// Symmetric-ordering-corrected density `|ψ|² - 1/(2dz)`; its ensemble mean is
/// the physical density.
pub fn density(state: &TrajectoryState, which: Field, grid: &Grid1D) -> Vec<f64> {
    let half = 0.5 / grid.dz();
    state.field(which).iter().map(|c| c.norm_sqr() - half).collect()
}

/// Coherent condensate in the trap ground state plus Wigner vacuum noise.
///
/// `ψ₁ = √N·φ₀(z) + η₁`, `ψ₂ = η₂`, where `φ₀` is the discretely normalised
/// harmonic ground state and `η` has independent real and imaginary parts of
/// variance `1/(4dz)` per point. Passing `None` gives the noise-free
/// (mean-field) state.
pub fn initial_state<R: Rng + ?Sized>(grid: &Grid1D, config: &RamanConfig, noise: Option<&mut R>) -> Result<TrajectoryState> {
    let sigma = config.oscillator_length();
    let span = 2.0 * sigma / grid.dz();
    if span < MIN_POINTS_ACROSS_GROUND_STATE {
        return Err(Error::GridResolution(format!(
            "trap ground state (±σ = ±{sigma:.3e} m) spans {span:.1} points, need {MIN_POINTS_ACROSS_GROUND_STATE}"
        )));
    }
    if config.frame == super::BeamFrame::Lab {
        grid.check_resolves(config.k0)?;
    }
    let mut state = TrajectoryState::zeros(grid, config.carrier_k());
    let profile: Vec<f64> = (0..grid.n_points())
        .map(|j| {
            let z = grid.z(j);
            (-z * z / (2.0 * sigma * sigma)).exp() / (PI * sigma * sigma).powf(0.25)
        })
        .collect();
    let norm: f64 = profile.iter().map(|p| p * p).sum::<f64>() * grid.dz();
    let amp = (config.n_bec / norm).sqrt();
    for (psi, p) in state.psi1.iter_mut().zip(&profile) {
        *psi = Complex64::new(amp * p, 0.0);
    }
    if let Some(rng) = noise {
        let sd = (0.25 / grid.dz()).sqrt();
        for psi in state.psi1.iter_mut().chain(state.psi2.iter_mut()) {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *psi += Complex64::new(sd * re, sd * im);
        }
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup() -> (Grid1D, RamanConfig) {
        (Grid1D::new(-40e-6, 40e-6, 512).unwrap(), RamanConfig::rubidium())
    }

    #[test]
    fn noise_free_norm() {
        let (grid, cfg) = setup();
        let s = initial_state::<ChaCha8Rng>(&grid, &cfg, None).unwrap();
        let n: f64 = s.psi1.iter().map(|c| c.norm_sqr()).sum::<f64>() * grid.dz();
        assert!((n / cfg.n_bec - 1.0).abs() < 1e-10);
        assert!(s.psi2.iter().all(|c| c.norm_sqr() == 0.0));
    }

    #[test]
    fn noise_free_density_is_shifted_profile() {
        let (grid, cfg) = setup();
        let s = initial_state::<ChaCha8Rng>(&grid, &cfg, None).unwrap();
        let d = density(&s, Field::Trapped, &grid);
        let j = grid.n_points() / 2;
        assert!((d[j] - (s.psi1[j].norm_sqr() - 0.5 / grid.dz())).abs() < 1e-6);
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let cfg = RamanConfig::rubidium();
        let grid = Grid1D::new(-200e-6, 200e-6, 256).unwrap();
        let err = initial_state::<ChaCha8Rng>(&grid, &cfg, None).unwrap_err();
        assert!(matches!(err, Error::GridResolution(_)));
    }

    #[test]
    fn noise_variance_per_point() {
        let (grid, cfg) = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = initial_state(&grid, &cfg, Some(&mut rng)).unwrap();
        let scale = (4.0 * grid.dz()).sqrt();
        let xs: Vec<f64> = s.psi2.iter().map(|c| c.re * scale).collect();
        let var = xs.iter().map(|x| x * x).sum::<f64>() / xs.len() as f64;
        assert!((var - 1.0).abs() < 0.2, "{var}");
    }
}

use std::f64::consts::PI;

use crate::{Error, Result};

/// Uniform periodic grid `z_j = z_min + j·dz`, `j < n_points`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    z_min: f64,
    z_max: f64,
    n_points: usize,
}

impl Grid1D {
    pub fn new(z_min: f64, z_max: f64, n_points: usize) -> Result<Self> {
        if !n_points.is_power_of_two() || n_points < 2 {
            return Err(Error::GridResolution(format!("n_points must be a power of two, got {n_points}")));
        }
        if !(z_min.is_finite() && z_max.is_finite() && z_max > z_min) {
            return Err(Error::GridResolution(format!("need z_max > z_min, got [{z_min}, {z_max}]")));
        }
        Ok(Grid1D { z_min, z_max, n_points })
    }

    pub fn z_min(&self) -> f64 {
        self.z_min
    }

    pub fn z_max(&self) -> f64 {
        self.z_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn len(&self) -> f64 {
        self.z_max - self.z_min
    }

    /// Grid spacing; this is the mode volume `ΔV` of the Wigner vacuum terms.
    pub fn dz(&self) -> f64 {
        self.len() / self.n_points as f64
    }

    pub fn z(&self, j: usize) -> f64 {
        self.z_min + j as f64 * self.dz()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.z(j)).collect()
    }

    /// Angular wavenumbers in FFT order: `0, Δk, …, (n/2-1)Δk, -n/2·Δk, …, -Δk`.
    pub fn k_values(&self) -> Vec<f64> {
        let n = self.n_points as i64;
        let dk = 2.0 * PI / self.len();
        (0..n)
            .map(|j| if j < n / 2 { j } else { j - n } as f64 * dk)
            .collect()
    }

    /// Nyquist wavenumber `π/dz`.
    pub fn k_max(&self) -> f64 {
        PI / self.dz()
    }

    /// Lab-frame guard: the kicked beam at `k0` needs `k_max ≥ 2.5·k0`.
    pub fn check_resolves(&self, k0: f64) -> Result<()> {
        if self.k_max() < 2.5 * k0.abs() {
            return Err(Error::GridResolution(format!(
                "k_max = {:.3e} rad/m is below 2.5·k0 = {:.3e} rad/m",
                self.k_max(),
                2.5 * k0.abs()
            )));
        }
        Ok(())
    }

    /// Index range `[j1, j2)` of points with `z1 ≤ z_j < z2`.
    pub fn window(&self, z1: f64, z2: f64) -> Result<std::ops::Range<usize>> {
        if !(z2 > z1) || z1 < self.z_min || z2 > self.z_max {
            return Err(Error::WindowOutsideGrid {
                z1,
                z2,
                z_min: self.z_min,
                z_max: self.z_max,
            });
        }
        let dz = self.dz();
        let j1 = ((z1 - self.z_min) / dz - 1e-9).ceil().max(0.0) as usize;
        let j2 = (((z2 - self.z_min) / dz - 1e-9).ceil() as usize).min(self.n_points);
        if j2 <= j1 {
            return Err(Error::GridResolution(format!("window [{z1}, {z2}] holds no grid point")));
        }
        Ok(j1..j2)
    }
}

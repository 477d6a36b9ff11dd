use serde::{Deserialize, Serialize};

use crate::units::{contact_strength_1d, HBAR};
use crate::{Error, Result};

/// Representation of the beam field on the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BeamFrame {
    /// `ψ₂` is stored as is; the grid must resolve `k0`.
    Lab,
    /// `ψ₂ = e^{ik₀z}·u(z)` and only the envelope `u` is stored. This is an
    /// exact change of variables: the kinetic step becomes `ħ(k+k₀)²/2m` and
    /// the Raman coupling loses its spatial phase, so the grid only has to
    /// resolve the envelope.
    #[default]
    Carrier,
}

/// Imaginary-potential absorber acting on the beam near both grid edges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Absorber {
    /// Layer width, m.
    pub width: f64,
    /// Peak loss rate at the very edge, 1/s (quadratic ramp).
    pub strength: f64,
}

/// Physical constants and numerical knobs of the Raman atom laser.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RamanConfig {
    /// Atomic mass, kg.
    pub mass: f64,
    /// Trap frequency of state 1, rad/s.
    pub omega_trap: f64,
    /// Two-photon Rabi frequency, rad/s.
    pub rabi: f64,
    /// Raman kick, rad/m, along +z of the solver (downward).
    pub k0: f64,
    /// Two-photon detuning, rad/s.
    pub delta: f64,
    /// One-dimensional interaction strengths, J·m.
    pub u11: f64,
    pub u12: f64,
    pub u22: f64,
    /// Light shifts `|Ω₁₃|²/Δ₁₃`, `|Ω₂₃|²/Δ₁₃`, rad/s.
    pub light_shift_1: f64,
    pub light_shift_2: f64,
    /// Initial condensate atom number.
    pub n_bec: f64,
    /// Cross-section used to reduce 3D couplings to 1D, m².
    pub area: f64,
    pub frame: BeamFrame,
    pub absorber: Option<Absorber>,
}

impl RamanConfig {
    pub const RB_SCATTERING_LENGTH: f64 = 5.77e-9;
    pub const RB_MASS: f64 = 1.44e-25;

    /// Rb Raman atom laser: a = 5.77 nm, m = 1.44e-25 kg, k0 = 2e7 /m,
    /// Ω = 50 rad/s, ω = 80 rad/s, 5e5 atoms, 1.2e-11 m² cross-section,
    /// `U11 = U12 = 0`, resonant detuning and no light shifts.
    pub fn rubidium() -> Self {
        let mass = Self::RB_MASS;
        let area = 1.2e-11;
        let k0 = 2e7;
        let u = contact_strength_1d(Self::RB_SCATTERING_LENGTH, mass, area);
        RamanConfig {
            mass,
            omega_trap: 80.0,
            rabi: 50.0,
            k0,
            delta: HBAR * k0 * k0 / (2.0 * mass),
            u11: 0.0,
            u12: 0.0,
            u22: u,
            light_shift_1: 0.0,
            light_shift_2: 0.0,
            n_bec: 5e5,
            area,
            frame: BeamFrame::Carrier,
            absorber: None,
        }
    }

    /// Sets all three couplings from 3D scattering lengths and `self.area`.
    pub fn with_scattering_lengths(mut self, a11: f64, a12: f64, a22: f64) -> Self {
        self.u11 = contact_strength_1d(a11, self.mass, self.area);
        self.u12 = contact_strength_1d(a12, self.mass, self.area);
        self.u22 = contact_strength_1d(a22, self.mass, self.area);
        self
    }

    /// Detuning that puts the kicked free beam on resonance: `ħk0²/2m`.
    pub fn resonant_delta(&self) -> f64 {
        HBAR * self.k0 * self.k0 / (2.0 * self.mass)
    }

    /// Recoil velocity `ħk0/m`.
    pub fn beam_velocity(&self) -> f64 {
        HBAR * self.k0 / self.mass
    }

    /// Harmonic-oscillator length `sqrt(ħ/mω)`.
    pub fn oscillator_length(&self) -> f64 {
        (HBAR / (self.mass * self.omega_trap)).sqrt()
    }

    /// Carrier wavenumber used to store `ψ₂`.
    pub fn carrier_k(&self) -> f64 {
        match self.frame {
            BeamFrame::Lab => 0.0,
            BeamFrame::Carrier => self.k0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("mass", self.mass),
            ("omega_trap", self.omega_trap),
            ("rabi", self.rabi),
            ("k0", self.k0),
            ("delta", self.delta),
            ("u11", self.u11),
            ("u12", self.u12),
            ("u22", self.u22),
            ("light_shift_1", self.light_shift_1),
            ("light_shift_2", self.light_shift_2),
            ("n_bec", self.n_bec),
            ("area", self.area),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::invalid(format!("{name} must be finite")));
            }
        }
        if self.mass <= 0.0 || self.omega_trap <= 0.0 || self.area <= 0.0 {
            return Err(Error::invalid("mass, omega_trap and area must be positive"));
        }
        if self.n_bec <= 0.0 {
            return Err(Error::invalid("n_bec must be positive"));
        }
        if let Some(a) = self.absorber {
            if !(a.width > 0.0 && a.strength >= 0.0) {
                return Err(Error::invalid("absorber needs width > 0 and strength >= 0"));
            }
        }
        Ok(())
    }
}

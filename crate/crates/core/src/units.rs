//! Physical constants (SI).

/// Reduced Planck constant, J·s (CODATA 2018, exact).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Standard gravity, m/s².
pub const G: f64 = 9.81;

/// Contact interaction strength `4πħ²a/m` in J·m³.
pub fn contact_strength_3d(scattering_length: f64, mass: f64) -> f64 {
    4.0 * std::f64::consts::PI * HBAR * HBAR * scattering_length / mass
}

/// Contact interaction reduced to one dimension by an effective cross-section, J·m.
pub fn contact_strength_1d(scattering_length: f64, mass: f64, area: f64) -> f64 {
    contact_strength_3d(scattering_length, mass) / area
}

//! How much the condensate's own nonlinearity must be suppressed (for example
//! with a Feshbach resonance) so that its best squeezing time moves out to a
//! given experiment duration.
//!
//! cargo run --example required_suppression -- [t_experiment]

use kerrbeam::beam::{reference_mean_trap_frequency, thomas_fermi_chi};
use kerrbeam::single_mode::{required_suppression, time_of_minimum, KerrParams};
use kerrbeam::twa::RamanConfig;

fn main() -> kerrbeam::Result<()> {
    let t_exp = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(0.015);
    let n = 5e5;
    let omega_bar = reference_mean_trap_frequency();
    let chi = thomas_fermi_chi(n, RamanConfig::RB_SCATTERING_LENGTH, RamanConfig::RB_MASS, omega_bar);
    let params = KerrParams::new(chi, 0.0, f64::sqrt(n))?;
    println!("Thomas-Fermi χ/ħ = {:.4e} rad/s, best squeezing after {:.3e} s", params.chi_rate(), time_of_minimum(&params)?);
    println!("suppression factor for an optimum at {t_exp} s: {:.1}", required_suppression(&params, t_exp)?);
    Ok(())
}

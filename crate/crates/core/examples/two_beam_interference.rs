//! Intensity noise after mixing a Kerr-squeezed beam with a weaker one.
//!
//! cargo run --example two_beam_interference -- [N] [chi/hbar] [t]

use kerrbeam::beam::{optimize_mixing, TwoBeamConfig, TwoBeamModel};
use kerrbeam::units::HBAR;

fn main() -> kerrbeam::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<f64>().expect("numeric argument"));
    let n = args.next().unwrap_or(1229.0);
    let chi_rate = args.next().unwrap_or(0.2221);
    let t = args.next().unwrap_or(10.24e-3);
    println!("N = {n}, χ/ħ = {chi_rate} rad/s, t = {t} s");
    for r in [0.25, 0.3, 0.4, 0.5] {
        let cfg = TwoBeamConfig::with_ratio(n, r, chi_rate * HBAR, t);
        let model = TwoBeamModel::new(&cfg)?;
        let (phase, fano) = model.best_phase(0.5);
        let joint = optimize_mixing(&cfg)?;
        println!(
            "r = {r:<4}: 50/50 splitter Fano {fano:.4} (phase {phase:.3}); best splitter T = {:.3}: Fano {:.4}",
            joint.transmissivity, joint.fano
        );
    }
    let flat = TwoBeamModel::new(&TwoBeamConfig::with_ratio(n, 0.5, 0.0, t))?;
    println!("no nonlinearity: Fano {:.12} at any phase", flat.noise(1.0, 0.5).fano);
    Ok(())
}

//! Closed-form variance against brute-force evolution in a truncated Fock basis.
//!
//! cargo run --example fock_oracle

use kerrbeam::single_mode::{analytic_variance, fock_oracle_variance_auto, KerrParams};

fn main() -> kerrbeam::Result<()> {
    let mut worst: f64 = 0.0;
    for alpha in [1.0, 3.0, 7.0, 10.0] {
        let p = KerrParams::from_chi_rate(1.0, 0.0, alpha)?;
        for i in 0..50 {
            let t = 0.5 * i as f64 / 49.0;
            for k in 0..16 {
                let phi = std::f64::consts::TAU * k as f64 / 16.0;
                let diff = (analytic_variance(&p, t, phi)? - fock_oracle_variance_auto(&p, t, phi)?).abs();
                worst = worst.max(diff);
            }
        }
        let t = 0.05;
        println!(
            "α = {alpha:>4}: var(X) at χt/ħ = {t}, φ = 0: closed form {:.12}, Fock {:.12}",
            analytic_variance(&p, t, 0.0)?,
            fock_oracle_variance_auto(&p, t, 0.0)?
        );
    }
    println!("largest difference over 4 × 50 × 16 points: {worst:.2e}");
    Ok(())
}

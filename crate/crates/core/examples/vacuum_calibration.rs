//! With the Raman coupling off only Wigner vacuum noise is present, and every
//! quadrature of every window must have unit variance.
//!
//! cargo run --example vacuum_calibration -- [n_traj]

use kerrbeam::quadrature::{project, quadrature_variance, LocalOscillator};
use kerrbeam::twa::{run_ensemble, EnsembleSpec, Grid1D, RamanConfig};
use rand::{Rng, SeedableRng};

fn main() -> kerrbeam::Result<()> {
    let n_traj = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(1000);
    let config = RamanConfig { rabi: 0.0, ..RamanConfig::rubidium() };
    let grid = Grid1D::new(-40e-6, 260e-6, 1024)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let los: Vec<LocalOscillator> = (0..5)
        .map(|_| {
            let z1 = rng.random_range(0.0..200e-6);
            let len = rng.random_range(5e-6..40e-6);
            let k = rng.random_range(1.5e7..2.5e7);
            LocalOscillator::new(&grid, z1, z1 + len, k, 0.0, rng.random_range(0.0..std::f64::consts::TAU))
        })
        .collect::<kerrbeam::Result<_>>()?;
    let spec = EnsembleSpec::new(n_traj, 7)?;
    let out = run_ensemble(&config, &grid, &spec, 1e-6, 1e-4, &[1e-4], |s| {
        los.iter().map(|lo| project(s, &grid, lo, s.t)).collect::<Vec<_>>()
    })?;
    for (k, lo) in los.iter().enumerate() {
        let b: Vec<_> = out.records.iter().map(|(_, r)| r[0][k]).collect();
        let v = quadrature_variance(&b, lo.phi)?;
        println!(
            "window [{:6.1}, {:6.1}] µm, φ = {:.3}: variance {:.4} ± {:.4}",
            lo.z1 * 1e6,
            lo.z2 * 1e6,
            lo.phi,
            v.variance,
            v.std_error
        );
    }
    Ok(())
}

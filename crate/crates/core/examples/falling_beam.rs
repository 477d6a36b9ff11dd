//! A beam falling under gravity thins out, so its nonlinearity decays while
//! it falls. Estimate the squeezing of a slice 1 cm below the condensate.
//!
//! cargo run --example falling_beam

use kerrbeam::beam::{predict_fall_squeezing, FallKinematics, FallModel};

fn main() -> kerrbeam::Result<()> {
    let model = FallModel::rubidium();
    println!("cross-section {:.3e} m², recoil velocity {:.4} m/s", model.area, model.recoil_velocity());
    for z in [0.0, 0.001, 0.005, 0.01, 0.02] {
        println!("depth {z:>6} m: density {:.4e} /m³", model.density_at_depth(z)?);
    }
    let atoms = model.atoms_in_fall_region(0.01, 25e-6)?;
    for kinematics in [FallKinematics::FreeFall, FallKinematics::KickAndFall] {
        let m = FallModel { kinematics, ..model.clone() };
        let p = predict_fall_squeezing(&m, atoms, 0.01)?;
        println!(
            "{kinematics:?}: {atoms:.0} atoms, age {:.2} ms, Kerr phase {:.3e}, var_sq {:.4}, var_anti {:.3}",
            p.age * 1e3,
            p.kerr_phase,
            p.var_sq,
            p.var_anti
        );
    }
    Ok(())
}

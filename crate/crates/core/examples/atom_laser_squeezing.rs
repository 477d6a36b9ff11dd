//! Stochastic simulation of the Rb Raman atom laser observed through a 20 µm
//! window, compared with the window-integrated single-mode model.
//!
//! cargo run --example atom_laser_squeezing -- [n_traj] [n_bec]
//!
//! Each trajectory takes a couple of seconds; 1000 trajectories is the
//! reference run, 50 already shows the squeezing.

use kerrbeam::study::{run_study, TwaStudy};

fn main() -> kerrbeam::Result<()> {
    let mut args = std::env::args().skip(1);
    let mut study = TwaStudy::rubidium_defaults();
    study.ensemble.n_traj = args.next().and_then(|a| a.parse().ok()).unwrap_or(50);
    if let Some(n) = args.next().and_then(|a| a.parse().ok()) {
        study.raman.n_bec = n;
    }
    let start = std::time::Instant::now();
    let out = run_study(&study)?;
    eprintln!("{} trajectories in {:.1?}", study.ensemble.n_traj, start.elapsed());
    if let Some(p) = &out.pilot {
        println!(
            "pilot: window density {:.4e} /m, phase gradient {:.6e} rad/m, k_L {:.6e} rad/m",
            p.steady_density, p.steady_wavenumber, out.lo.k_l
        );
    }
    println!("{:>6} {:>16} {:>16} {:>8} {:>9} {:>9}", "t[ms]", "var_sq", "var_anti", "N", "model_sq", "model_an");
    for i in 0..out.series.len() {
        let (msq, man) = out.analytic[i].map(|a| (a.var_sq, a.var_anti)).unwrap_or((1.0, 1.0));
        println!(
            "{:>6.2} {:>8.3} ± {:<5.3} {:>8.3} ± {:<5.3} {:>8.1} {:>9.3} {:>9.3}",
            out.series.times[i] * 1e3,
            out.series.var_sq[i],
            out.series.se_sq[i],
            out.series.var_anti[i],
            out.series.se_anti[i],
            out.series.n_region[i],
            msq,
            man
        );
    }
    let s = out.steady;
    println!(
        "steady state: var_sq {:.3} ± {:.3}, var_anti {:.2} ± {:.2}, N {:.1}; model {:.3} / {:.2}",
        s.var_sq, s.se_sq, s.var_anti, s.se_anti, s.n_region, s.analytic.var_sq, s.analytic.var_anti
    );
    println!("largest relative atom-number drift: {:.2e}", out.max_relative_drift);
    Ok(())
}

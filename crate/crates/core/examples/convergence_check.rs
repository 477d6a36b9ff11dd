//! Halve the time step and the grid spacing of the default simulation and
//! report how much each observable moves.
//!
//! cargo run --example convergence_check

use kerrbeam::app::convergence_rows;
use kerrbeam::config::RunConfig;

fn main() -> kerrbeam::Result<()> {
    let cfg = RunConfig::parse("", &[])?;
    for r in convergence_rows(&cfg)? {
        println!(
            "{:<22} {:<5} {:>16.9e} -> {:>16.9e}  ({:.2e}) {}",
            r.observable,
            r.refinement,
            r.base,
            r.refined,
            r.relative_change,
            if r.pass { "ok" } else { "FAIL" }
        );
    }
    Ok(())
}

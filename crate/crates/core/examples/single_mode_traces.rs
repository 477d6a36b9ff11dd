//! Best quadrature variance against time for the four reference (N, χ) pairs,
//! with the time and depth of each minimum.
//!
//! cargo run --example single_mode_traces

use kerrbeam::single_mode::{min_variance_trace, optimal_phase, time_of_minimum, KerrParams};

fn main() -> kerrbeam::Result<()> {
    let curves = [(0.1, 1000.0), (0.04, 1000.0), (0.1, 500.0), (0.04, 500.0)];
    let times: Vec<f64> = (0..=20).map(|i| 0.005 * i as f64).collect();
    println!("{:>8} {:>10} {:>10} {:>10} {:>10}", "t [s]", "χ.1 N1000", "χ.04 N1000", "χ.1 N500", "χ.04 N500");
    let traces = curves
        .iter()
        .map(|&(chi, n)| min_variance_trace(&KerrParams::from_chi_rate(chi, 0.0, f64::sqrt(n))?, &times))
        .collect::<kerrbeam::Result<Vec<_>>>()?;
    for (i, t) in times.iter().enumerate() {
        print!("{t:>8.3}");
        for tr in &traces {
            print!(" {:>10.4}", tr[i].var_min);
        }
        println!();
    }
    println!();
    for (chi, n) in curves {
        let p = KerrParams::from_chi_rate(chi, 0.0, f64::sqrt(n))?;
        let t_min = time_of_minimum(&p)?;
        let best = optimal_phase(&p, t_min)?;
        println!(
            "χ/ħ = {chi:<5} N = {n:<6} minimum {:.4} at t = {:.5} s (α^(-2/3) = {:.4})",
            best.variance,
            t_min,
            n.powf(-1.0 / 3.0)
        );
    }
    Ok(())
}

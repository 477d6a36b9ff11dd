//! Subcommands of the `kerrbeam` executable. Each writes CSV files (and, for
//! `twa`, optional field snapshots) into an output directory together with
//! `manifest.txt`, and reports progress on stderr.

use std::path::{Path, PathBuf};

use crate::beam::{optimize_mixing, predict_fall_squeezing, TwoBeamModel};
use crate::config::RunConfig;
use crate::csv::Table;
use crate::manifest::RunManifest;
use crate::quadrature::{build_local_oscillator, sample_mode, ModeSample, QuadratureSeries};
use crate::single_mode::{min_variance_trace, time_of_minimum, KerrParams};
use crate::study::{pilot_run, replay_trajectory, run_study, single_mode_parameters, PilotRun, TwaStudy};
use crate::twa::snapshot::{read_snapshot, write_snapshot};
use crate::twa::{run_ensemble, EnsembleSpec, Grid1D};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    SingleMode,
    Twa,
    Analyze,
    Beam3d,
    TwoBeam,
    Convergence,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::SingleMode => "single-mode",
            Command::Twa => "twa",
            Command::Analyze => "analyze",
            Command::Beam3d => "beam3d",
            Command::TwoBeam => "two-beam",
            Command::Convergence => "convergence",
        }
    }
}

/// Runs `command` and writes its artifacts and manifest into `out`.
/// Returns the emitted file names relative to `out`.
pub fn run(command: Command, cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let mut manifest = RunManifest::begin(command.name(), &cfg.hash(), cfg.ensemble.seed);
    let files = match command {
        Command::SingleMode => cmd_single_mode(cfg, out),
        Command::Twa => cmd_twa(cfg, out),
        Command::Analyze => cmd_analyze(cfg, out),
        Command::Beam3d => cmd_beam3d(cfg, out),
        Command::TwoBeam => cmd_two_beam(cfg, out),
        Command::Convergence => cmd_convergence(cfg, out),
    };
    // A failed convergence check still leaves its report behind, so the
    // manifest is written whenever files were produced.
    let (files, outcome) = match files {
        Ok(f) => (f, Ok(())),
        Err(Error::ConvergenceFailed { files, report }) => (files.clone(), Err(Error::ConvergenceFailed { files, report })),
        Err(e) => return Err(e),
    };
    manifest.files = files.clone();
    manifest.finish(out)?;
    outcome.map(|_| files)
}

fn write(table: &Table, out: &Path, name: &str, files: &mut Vec<PathBuf>) -> Result<()> {
    table.write(&out.join(name))?;
    files.push(name.into());
    Ok(())
}

pub fn cmd_single_mode(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let s = &cfg.single_mode;
    let times: Vec<f64> = (0..s.n_times)
        .map(|i| s.t_max_s * i as f64 / (s.n_times - 1) as f64)
        .collect();
    let mut files = Vec::new();
    let mut minima = Table::new(&["alpha_sq", "chi_rate_rad_per_s", "t_min_s", "var_min"]);
    for curve in &s.curves {
        eprintln!("single-mode: {}", curve.label);
        let params = KerrParams::from_chi_rate(curve.chi_rate_rad_per_s, s.omega_rad_per_s, curve.alpha_sq.sqrt())?;
        let mut table = Table::new(&["t_s", "var_min", "phi_opt_rad", "var_anti"]);
        for p in min_variance_trace(&params, &times)? {
            table.push(vec![p.t, p.var_min, p.phi_opt, p.var_anti])?;
        }
        write(&table, out, &format!("single_mode_{}.csv", curve.label), &mut files)?;
        if curve.chi_rate_rad_per_s > 0.0 && curve.alpha_sq > 0.0 {
            let t_min = time_of_minimum(&params)?;
            let best = crate::single_mode::optimal_phase(&params, t_min)?;
            minima.push(vec![curve.alpha_sq, curve.chi_rate_rad_per_s, t_min, best.variance])?;
        }
    }
    write(&minima, out, "single_mode_minima.csv", &mut files)?;
    Ok(files)
}

pub fn cmd_twa(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let study = cfg.twa_study()?;
    eprintln!(
        "twa: {} trajectories, {} points, dt = {:e} s, t_final = {:e} s",
        study.ensemble.n_traj,
        study.grid.n_points(),
        study.dt,
        study.t_final
    );
    let result = run_study(&study)?;
    eprintln!(
        "twa: done; {} failed trajectories, max relative number drift {:.3e}",
        result.failures, result.max_relative_drift
    );
    let mut files = Vec::new();
    write(&series_table(&result.series)?, out, "quadrature.csv", &mut files)?;

    let mut analytic = Table::new(&["t_s", "var_sq", "var_anti", "phi_rad", "n_atoms"]);
    for (t, a) in result.series.times.iter().zip(&result.analytic) {
        match a {
            Some(a) => analytic.push(vec![*t, a.var_sq, a.var_anti, a.phi, a.n_atoms])?,
            None => analytic.push(vec![*t, 1.0, 1.0, 0.0, 0.0])?,
        }
    }
    write(&analytic, out, "analytic.csv", &mut files)?;

    if let Some(p) = &result.pilot {
        let mut pilot = Table::new(&["t_s", "rho_per_m"]);
        for (t, r) in p.times.iter().zip(&p.window_density) {
            pilot.push(vec![*t, *r])?;
        }
        write(&pilot, out, "pilot_density.csv", &mut files)?;
    }

    let s = result.steady;
    let mut steady = Table::new(&[
        "var_sq",
        "se_sq",
        "var_anti",
        "se_anti",
        "n_region",
        "analytic_var_sq",
        "analytic_var_anti",
        "chi_eff_rad_per_s",
        "k_l_rad_per_m",
        "omega_l_rad_per_s",
        "max_relative_drift",
        "failed_trajectories",
    ]);
    steady.push(vec![
        s.var_sq,
        s.se_sq,
        s.var_anti,
        s.se_anti,
        s.n_region,
        s.analytic.var_sq,
        s.analytic.var_anti,
        s.analytic.chi_rate,
        result.lo.k_l,
        result.lo.omega_l,
        result.max_relative_drift,
        result.failures as f64,
    ])?;
    write(&steady, out, "steady.csv", &mut files)?;

    let n_snap = cfg.observe.snapshot_trajectories.min(study.ensemble.n_traj);
    if n_snap > 0 {
        eprintln!("twa: writing snapshots for {n_snap} trajectories");
        let hash = cfg.hash();
        let mut written = Vec::new();
        for i in 0..n_snap {
            let mut err = None;
            replay_trajectory(&study, i, |s| {
                if err.is_none() {
                    match write_snapshot(out, i, s, &study.grid, &hash) {
                        Ok(p) => written.push(p),
                        Err(e) => err = Some(e),
                    }
                }
            })?;
            if let Some(e) = err {
                return Err(e);
            }
        }
        for p in written {
            files.push(p.file_name().expect("snapshot file name").into());
        }
    }
    Ok(files)
}

fn series_table(series: &QuadratureSeries) -> Result<Table> {
    let mut table = Table::new(&["t_s", "var_sq", "se_sq", "var_anti", "se_anti", "phi_opt_rad", "n_region"]);
    for i in 0..series.len() {
        table.push(vec![
            series.times[i],
            series.var_sq[i],
            series.se_sq[i],
            series.var_anti[i],
            series.se_anti[i],
            series.phi_opt[i],
            series.n_region[i],
        ])?;
    }
    Ok(table)
}

/// Recomputes the quadrature series from the field snapshots in `out`.
pub fn cmd_analyze(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let study = cfg.twa_study()?;
    let rho = match study.lo_density {
        Some(rho) => rho,
        None => {
            eprintln!("analyze: pilot run for the local-oscillator density");
            pilot_run(&study)?.steady_density
        }
    };
    let hash = cfg.hash();
    let mut by_time: std::collections::BTreeMap<u64, Vec<(usize, ModeSample)>> = Default::default();
    let mut grid: Option<Grid1D> = None;
    let mut lo = None;
    let mut entries: Vec<PathBuf> = std::fs::read_dir(out)
        .map_err(|e| Error::io(out, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "fld"))
        .collect();
    entries.sort();
    for path in entries {
        let traj: usize = path
            .file_stem()
            .and_then(|s| s.to_str())
            .and_then(|s| s.split('_').nth(1))
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse(format!("{}: unexpected snapshot name", path.display())))?;
        let snap = read_snapshot(&path)?;
        if snap.config_hash != hash {
            eprintln!("analyze: warning: {} was written with a different configuration", path.display());
        }
        let g = snap.grid()?;
        if lo.is_none() {
            lo = Some(build_local_oscillator(&study.raman, &g, rho, study.window.0, study.window.1, 0.0)?);
            grid = Some(g.clone());
        } else if grid.as_ref() != Some(&g) {
            return Err(Error::Parse(format!("{}: grid differs from the other snapshots", path.display())));
        }
        let state = snap.into_state();
        let sample = sample_mode(&state, &g, lo.as_ref().expect("set above"));
        by_time.entry(state.t.to_bits()).or_default().push((traj, sample));
    }
    if by_time.is_empty() {
        return Err(Error::invalid(format!("no .fld snapshots in {}", out.display())));
    }
    let mut times = Vec::new();
    let mut samples = Vec::new();
    for (bits, mut v) in by_time {
        v.sort_by_key(|(i, _)| *i);
        times.push(f64::from_bits(bits));
        samples.push(v.into_iter().map(|(_, s)| s).collect::<Vec<_>>());
    }
    times.iter().zip(&samples).for_each(|(t, s)| {
        if s.len() < 2 {
            eprintln!("analyze: warning: only {} trajectory at t = {t:e} s", s.len());
        }
    });
    let series = QuadratureSeries::from_samples(&times, &samples)?;
    let mut files = Vec::new();
    write(&series_table(&series)?, out, "quadrature_snapshots.csv", &mut files)?;
    Ok(files)
}

pub fn cmd_beam3d(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let model = cfg.fall_model();
    let b = &cfg.beam3d;
    let mut files = Vec::new();
    let mut density = Table::new(&["z_m", "rho_m3"]);
    let n = b.scan_points.max(2);
    for i in 0..n {
        let z = b.scan_max_depth_m * i as f64 / (n - 1) as f64;
        density.push(vec![z, model.density_at_depth(z)?])?;
    }
    write(&density, out, "beam3d_density.csv", &mut files)?;
    let atoms = model.atoms_in_fall_region(b.depth_m, b.extent_m)?;
    let pred = predict_fall_squeezing(&model, atoms, b.depth_m)?;
    eprintln!(
        "beam3d: {atoms:.1} atoms at {} m, var_sq {:.4}, var_anti {:.3}",
        b.depth_m, pred.var_sq, pred.var_anti
    );
    let mut summary = Table::new(&[
        "depth_m",
        "age_s",
        "atoms",
        "area_m2",
        "kerr_phase_rad",
        "phi_opt_rad",
        "var_sq",
        "var_anti",
    ]);
    summary.push(vec![
        b.depth_m,
        pred.age,
        atoms,
        model.area,
        pred.kerr_phase,
        pred.phi,
        pred.var_sq,
        pred.var_anti,
    ])?;
    write(&summary, out, "beam3d_summary.csv", &mut files)?;
    Ok(files)
}

/// `(N, χ/ħ, t)` for the two-beam model, running the pilot only when the
/// configuration leaves something to derive.
pub fn two_beam_parameters(cfg: &RunConfig) -> Result<(f64, f64, f64)> {
    if cfg.two_beam_is_explicit() {
        let t = &cfg.two_beam;
        return Ok((t.n_main.unwrap(), t.chi_rate_rad_per_s.unwrap(), t.t_s.unwrap()));
    }
    eprintln!("two-beam: pilot run for the single-mode beam parameters");
    let study = cfg.twa_study()?;
    let pilot = pilot_run(&study)?;
    single_mode_parameters(&study, &pilot)
}

pub fn cmd_two_beam(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let (n, chi_rate, t) = two_beam_parameters(cfg)?;
    let base = cfg.two_beam_config(n, chi_rate, t);
    let mut files = Vec::new();

    let model = TwoBeamModel::new(&base)?;
    let (transmissivity, phase, fano) = match cfg.two_beam.transmissivity {
        Some(tr) => {
            let (p, f) = model.best_phase(tr);
            (tr, p, f)
        }
        None => {
            let m = optimize_mixing(&base)?;
            (m.transmissivity, m.mix_phase, m.fano)
        }
    };
    let (_, fano_even) = model.best_phase(0.5);
    eprintln!(
        "two-beam: N = {:.1}, r = {}, Fano {fano:.4} at T = {transmissivity:.3} (50/50: {fano_even:.4})",
        base.alpha_main.powi(2),
        cfg.two_beam.ratio
    );

    let points = cfg.two_beam.sweep_points;
    let mut sweep = Table::new(&["mix_phase_rad", "fano"]);
    for i in 0..points {
        let p = std::f64::consts::TAU * i as f64 / points as f64;
        sweep.push(vec![p, model.noise(p, transmissivity).fano])?;
    }
    write(&sweep, out, "two_beam_sweep.csv", &mut files)?;

    let mut summary = Table::new(&[
        "ratio",
        "n_main",
        "chi_rate_rad_per_s",
        "t_s",
        "transmissivity",
        "mix_phase_rad",
        "fano",
        "fano_50_50",
    ]);
    summary.push(vec![cfg.two_beam.ratio, base.alpha_main.powi(2), chi_rate, base.t, transmissivity, phase, fano, fano_even])?;
    write(&summary, out, "two_beam_summary.csv", &mut files)?;

    let mut ratios = Table::new(&["ratio", "fano_50_50", "fano_joint", "transmissivity_joint"]);
    for r in [0.25, 0.3, 0.4, 0.5] {
        let mut c = base;
        c.alpha_ref = (r * base.alpha_main.powi(2)).sqrt();
        let m = TwoBeamModel::new(&c)?;
        let joint = optimize_mixing(&c)?;
        ratios.push(vec![r, m.best_phase(0.5).1, joint.fano, joint.transmissivity])?;
    }
    write(&ratios, out, "two_beam_ratios.csv", &mut files)?;
    Ok(files)
}

/// One line of the convergence report.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub observable: &'static str,
    pub refinement: &'static str,
    pub base: f64,
    pub refined: f64,
    pub relative_change: f64,
    pub pass: bool,
}

pub fn convergence_rows(cfg: &RunConfig) -> Result<Vec<ConvergenceRow>> {
    let tol = cfg.convergence.tolerance;
    let base = cfg.twa_study()?;
    let mut half_dt = base.clone();
    half_dt.dt *= 0.5;
    let mut half_dz = base.clone();
    half_dz.grid = Grid1D::new(base.grid.z_min(), base.grid.z_max(), 2 * base.grid.n_points())?;

    eprintln!("convergence: noise-free runs");
    let p0 = pilot_run(&base)?;
    let p_dt = pilot_run(&half_dt)?;
    let p_dz = pilot_run(&half_dz)?;
    let mean_field = |p: &PilotRun| {
        [
            ("steady_window_density", p.steady_density),
            ("steady_wavenumber", p.steady_wavenumber),
            ("final_beam_number", p.final_beam_number),
        ]
    };
    let mut rows = Vec::new();
    let mut push = |observable, refinement, a: f64, b: f64| {
        let rel = (b - a).abs() / a.abs().max(f64::MIN_POSITIVE);
        rows.push(ConvergenceRow {
            observable,
            refinement,
            base: a,
            refined: b,
            relative_change: rel,
            pass: rel <= tol,
        });
    };
    for ((name, a), (_, b)) in mean_field(&p0).into_iter().zip(mean_field(&p_dt)) {
        push(name, "dt/2", a, b);
    }
    for ((name, a), (_, b)) in mean_field(&p0).into_iter().zip(mean_field(&p_dz)) {
        push(name, "dz/2", a, b);
    }

    // Same seeds at both time steps, so the comparison sees the same noise.
    // A finer grid draws different noise, so only the time step is checked here.
    eprintln!("convergence: {} trajectories at dt and dt/2", cfg.convergence.n_traj);
    let spec = EnsembleSpec::new(cfg.convergence.n_traj, base.ensemble.master_seed)?;
    let steady = |study: &TwaStudy| -> Result<(f64, f64)> {
        let lo = build_local_oscillator(&study.raman, &study.grid, p0.steady_density, study.window.0, study.window.1, 0.0)?;
        let times = study.observation_times();
        let out = run_ensemble(&study.raman, &study.grid, &spec, study.dt, study.t_final, &times, |s| {
            sample_mode(s, &study.grid, &lo)
        })?;
        let by_time: Vec<Vec<ModeSample>> = (0..times.len())
            .map(|i| out.records.iter().map(|(_, r)| r[i]).collect())
            .collect();
        let series = QuadratureSeries::from_samples(&times, &by_time)?;
        let idx = series.indices_between(study.steady.0, study.steady.1);
        let mean = |v: &[f64]| idx.iter().map(|&i| v[i]).sum::<f64>() / idx.len().max(1) as f64;
        Ok((mean(&series.var_sq), mean(&series.var_anti)))
    };
    let (sq0, anti0) = steady(&base)?;
    let (sq1, anti1) = steady(&half_dt)?;
    push("steady_var_sq", "dt/2", sq0, sq1);
    push("steady_var_anti", "dt/2", anti0, anti1);
    Ok(rows)
}

pub fn cmd_convergence(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let rows = convergence_rows(cfg)?;
    let mut files = Vec::new();
    let mut table = Table::new(&["observable_id", "refinement_id", "base", "refined", "relative_change", "pass"]);
    let mut report = format!(
        "# convergence report, tolerance {}\n# refinement ids: 0 = dt/2, 1 = dz/2\n",
        cfg.convergence.tolerance
    );
    let mut names: Vec<&str> = Vec::new();
    for r in &rows {
        let id = names.iter().position(|n| *n == r.observable).unwrap_or_else(|| {
            names.push(r.observable);
            names.len() - 1
        });
        let refinement_id = if r.refinement == "dt/2" { 0.0 } else { 1.0 };
        table.push(vec![id as f64, refinement_id, r.base, r.refined, r.relative_change, r.pass as u8 as f64])?;
        report.push_str(&format!(
            "{id} {:<22} {:<5} base {:.9e} refined {:.9e} change {:.3e} {}\n",
            r.observable,
            r.refinement,
            r.base,
            r.refined,
            r.relative_change,
            if r.pass { "PASS" } else { "FAIL" }
        ));
    }
    write(&table, out, "convergence.csv", &mut files)?;
    std::fs::write(out.join("convergence.txt"), &report).map_err(|e| Error::io(out.join("convergence.txt"), e))?;
    files.push("convergence.txt".into());
    eprint!("{report}");
    if rows.iter().all(|r| r.pass) {
        Ok(files)
    } else {
        Err(Error::ConvergenceFailed {
            files,
            report: "convergence check failed; see convergence.txt".into(),
        })
    }
}

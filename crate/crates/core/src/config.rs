//! Run configuration: a TOML file whose keys carry their unit in the name
//! (`k0_rad_per_m`, `dt_s`, ...). Unknown keys are rejected. Every section and
//! key is optional; omitted values take the Rb defaults used throughout the
//! crate. `kerrbeam.example.toml` at the repository root lists them all.

use serde::{Deserialize, Serialize};

use crate::beam::{FallKinematics, FallModel, TwoBeamConfig};
use crate::quadrature::AgeAveraging;
use crate::study::TwaStudy;
use crate::twa::{Absorber, BeamFrame, EnsembleSpec, Grid1D, RamanConfig};
use crate::units::{contact_strength_1d, contact_strength_3d, G};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub single_mode: SingleModeSection,
    pub raman: RamanSection,
    pub grid: GridSection,
    pub ensemble: EnsembleSection,
    pub observe: ObserveSection,
    pub window: WindowSection,
    pub beam3d: Beam3dSection,
    pub two_beam: TwoBeamSection,
    pub convergence: ConvergenceSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    pub label: String,
    /// Mean atom number `α²`.
    pub alpha_sq: f64,
    /// `χ/ħ`.
    pub chi_rate_rad_per_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SingleModeSection {
    pub curves: Vec<CurveSpec>,
    pub omega_rad_per_s: f64,
    pub t_max_s: f64,
    pub n_times: usize,
}

impl Default for SingleModeSection {
    /// χ/ħ ∈ {0.1, 0.04} rad/s against N ∈ {1000, 500}.
    fn default() -> Self {
        let curve = |label: &str, alpha_sq: f64, chi: f64| CurveSpec {
            label: label.into(),
            alpha_sq,
            chi_rate_rad_per_s: chi,
        };
        SingleModeSection {
            curves: vec![
                curve("chi0.1_n1000", 1000.0, 0.1),
                curve("chi0.04_n1000", 1000.0, 0.04),
                curve("chi0.1_n500", 500.0, 0.1),
                curve("chi0.04_n500", 500.0, 0.04),
            ],
            omega_rad_per_s: 0.0,
            t_max_s: 0.1,
            n_times: 1001,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RamanSection {
    pub mass_kg: f64,
    pub omega_trap_rad_per_s: f64,
    pub rabi_rad_per_s: f64,
    pub k0_rad_per_m: f64,
    /// Resonant `ħk0²/2m` when absent.
    pub delta_rad_per_s: Option<f64>,
    pub a11_m: f64,
    pub a12_m: f64,
    pub a22_m: f64,
    pub area_m2: f64,
    pub n_bec: f64,
    pub light_shift_1_rad_per_s: f64,
    pub light_shift_2_rad_per_s: f64,
    pub frame: BeamFrame,
    pub absorber_width_m: Option<f64>,
    pub absorber_strength_per_s: Option<f64>,
}

impl Default for RamanSection {
    fn default() -> Self {
        let r = RamanConfig::rubidium();
        RamanSection {
            mass_kg: r.mass,
            omega_trap_rad_per_s: r.omega_trap,
            rabi_rad_per_s: r.rabi,
            k0_rad_per_m: r.k0,
            delta_rad_per_s: None,
            a11_m: 0.0,
            a12_m: 0.0,
            a22_m: RamanConfig::RB_SCATTERING_LENGTH,
            area_m2: r.area,
            n_bec: r.n_bec,
            light_shift_1_rad_per_s: 0.0,
            light_shift_2_rad_per_s: 0.0,
            frame: r.frame,
            absorber_width_m: None,
            absorber_strength_per_s: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub z_min_m: f64,
    pub z_max_m: f64,
    pub n_points: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        let g = TwaStudy::rubidium_defaults().grid;
        GridSection {
            z_min_m: g.z_min(),
            z_max_m: g.z_max(),
            n_points: g.n_points(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleSection {
    pub n_traj: usize,
    pub seed: u64,
}

impl Default for EnsembleSection {
    fn default() -> Self {
        let e = TwaStudy::rubidium_defaults().ensemble;
        EnsembleSection {
            n_traj: e.n_traj,
            seed: e.master_seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ObserveSection {
    pub dt_s: f64,
    pub t_final_s: f64,
    pub every_s: f64,
    /// Field snapshots are written for trajectories `0..snapshot_trajectories`
    /// at every observation time; 0 disables them.
    pub snapshot_trajectories: usize,
}

impl Default for ObserveSection {
    fn default() -> Self {
        let s = TwaStudy::rubidium_defaults();
        ObserveSection {
            dt_s: s.dt,
            t_final_s: s.t_final,
            every_s: s.observe_every,
            snapshot_trajectories: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WindowSection {
    pub z1_m: f64,
    pub z2_m: f64,
    /// Beam density used for the local oscillator; from a noise-free pilot run when absent.
    pub density_per_m: Option<f64>,
    pub steady_start_s: f64,
    pub steady_end_s: f64,
    pub age_averaging: AgeAveraging,
}

impl Default for WindowSection {
    fn default() -> Self {
        let s = TwaStudy::rubidium_defaults();
        WindowSection {
            z1_m: s.window.0,
            z2_m: s.window.1,
            density_per_m: None,
            steady_start_s: s.steady.0,
            steady_end_s: s.steady.1,
            age_averaging: s.averaging,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Beam3dSection {
    pub rho0_per_m3: f64,
    pub k0_rad_per_m: f64,
    pub mass_kg: f64,
    pub scattering_length_m: f64,
    pub g_m_per_s2: f64,
    pub depth_m: f64,
    pub extent_m: f64,
    pub atoms: f64,
    /// Back-solved from `atoms` in a slice of `extent_m` at `depth_m` when absent.
    pub area_m2: Option<f64>,
    pub kinematics: FallKinematics,
    pub scan_max_depth_m: f64,
    pub scan_points: usize,
}

impl Default for Beam3dSection {
    fn default() -> Self {
        let m = FallModel::rubidium();
        Beam3dSection {
            rho0_per_m3: m.rho0,
            k0_rad_per_m: m.k0,
            mass_kg: m.mass,
            scattering_length_m: RamanConfig::RB_SCATTERING_LENGTH,
            g_m_per_s2: G,
            depth_m: FallModel::REGION_DEPTH,
            extent_m: FallModel::REGION_EXTENT,
            atoms: FallModel::REGION_ATOMS,
            area_m2: None,
            kinematics: m.kinematics,
            scan_max_depth_m: 0.02,
            scan_points: 201,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TwoBeamSection {
    /// Intensity ratio `α_ref²/α_main²`.
    pub ratio: f64,
    /// The three single-mode parameters default to the Fig. 2-style beam: the
    /// pilot-run atom count in the window, `χ = U22/ℓ`, and the mid-window age.
    pub n_main: Option<f64>,
    pub chi_rate_rad_per_s: Option<f64>,
    pub t_s: Option<f64>,
    /// Optimised jointly with the phase when absent.
    pub transmissivity: Option<f64>,
    pub ref_chi_scale: f64,
    pub sweep_points: usize,
}

impl Default for TwoBeamSection {
    fn default() -> Self {
        TwoBeamSection {
            ratio: 0.5,
            n_main: None,
            chi_rate_rad_per_s: None,
            t_s: None,
            transmissivity: None,
            ref_chi_scale: 1.0,
            sweep_points: 361,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergenceSection {
    /// Trajectories per resolution for the stochastic observables.
    pub n_traj: usize,
    /// Largest accepted relative change under halving.
    pub tolerance: f64,
}

impl Default for ConvergenceSection {
    fn default() -> Self {
        ConvergenceSection {
            n_traj: 8,
            tolerance: 0.01,
        }
    }
}

/// 1-based line of `key = ...` inside `[section]`, if present in the source.
fn locate(source: &str, section: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    for (i, line) in source.lines().enumerate() {
        let t = line.trim();
        if t.starts_with('[') {
            current = t.trim_matches(|c| c == '[' || c == ']').trim().to_string();
        } else if current == section {
            if let Some((k, _)) = t.split_once('=') {
                if k.trim() == key {
                    return Some(i + 1);
                }
            }
        }
    }
    None
}

impl RunConfig {
    /// Parses `source`; `overrides` are `section.key=value` strings applied on top.
    pub fn parse(source: &str, overrides: &[String]) -> Result<Self> {
        let base: RunConfig = toml::from_str(source).map_err(|e| Error::Config(e.to_string()))?;
        let cfg = if overrides.is_empty() {
            base
        } else {
            let mut value: toml::Table = toml::from_str(source).map_err(|e| Error::Config(e.to_string()))?;
            for o in overrides {
                apply_override(&mut value, o)?;
            }
            RunConfig::deserialize(toml::Value::Table(value))
                .map_err(|e| Error::Config(format!("after --set overrides: {e}")))?
        };
        cfg.validate().map_err(|(section, key, msg)| {
            let at = match locate(source, section, key) {
                Some(line) => format!("line {line}: "),
                None => String::new(),
            };
            Error::Config(format!("{at}{section}.{key}: {msg}"))
        })?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        RunConfig::parse(&text, overrides).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Canonical TOML of the effective configuration.
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn hash(&self) -> String {
        crate::manifest::sha256_hex(self.canonical().as_bytes())
    }

    fn validate(&self) -> std::result::Result<(), (&'static str, &'static str, String)> {
        fn positive(section: &'static str, key: &'static str, v: f64) -> std::result::Result<(), (&'static str, &'static str, String)> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err((section, key, format!("must be a positive number, got {v}")))
            }
        }
        fn nonneg(section: &'static str, key: &'static str, v: f64) -> std::result::Result<(), (&'static str, &'static str, String)> {
            if v >= 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err((section, key, format!("must be >= 0, got {v}")))
            }
        }
        for c in &self.single_mode.curves {
            nonneg("single_mode", "alpha_sq", c.alpha_sq)?;
            nonneg("single_mode", "chi_rate_rad_per_s", c.chi_rate_rad_per_s)?;
            if c.label.is_empty() || !c.label.chars().all(|ch| ch.is_ascii_alphanumeric() || "._-".contains(ch)) {
                return Err(("single_mode", "label", format!("`{}` is not a usable file-name label", c.label)));
            }
        }
        positive("single_mode", "t_max_s", self.single_mode.t_max_s)?;
        if self.single_mode.n_times < 2 {
            return Err(("single_mode", "n_times", "must be at least 2".into()));
        }
        let r = &self.raman;
        positive("raman", "mass_kg", r.mass_kg)?;
        positive("raman", "omega_trap_rad_per_s", r.omega_trap_rad_per_s)?;
        positive("raman", "area_m2", r.area_m2)?;
        positive("raman", "n_bec", r.n_bec)?;
        positive("raman", "k0_rad_per_m", r.k0_rad_per_m)?;
        if r.absorber_width_m.is_some() != r.absorber_strength_per_s.is_some() {
            return Err(("raman", "absorber_width_m", "absorber needs both width and strength".into()));
        }
        if self.grid.z_max_m <= self.grid.z_min_m {
            return Err(("grid", "z_max_m", "must exceed z_min_m".into()));
        }
        if !self.grid.n_points.is_power_of_two() {
            return Err(("grid", "n_points", format!("must be a power of two, got {}", self.grid.n_points)));
        }
        if self.ensemble.n_traj < 2 {
            return Err(("ensemble", "n_traj", "need at least 2 trajectories".into()));
        }
        positive("observe", "dt_s", self.observe.dt_s)?;
        positive("observe", "t_final_s", self.observe.t_final_s)?;
        positive("observe", "every_s", self.observe.every_s)?;
        if self.window.z2_m <= self.window.z1_m {
            return Err(("window", "z2_m", "must exceed z1_m".into()));
        }
        if let Some(rho) = self.window.density_per_m {
            nonneg("window", "density_per_m", rho)?;
        }
        if self.window.steady_end_s < self.window.steady_start_s {
            return Err(("window", "steady_end_s", "must not precede steady_start_s".into()));
        }
        let b = &self.beam3d;
        positive("beam3d", "rho0_per_m3", b.rho0_per_m3)?;
        positive("beam3d", "k0_rad_per_m", b.k0_rad_per_m)?;
        positive("beam3d", "mass_kg", b.mass_kg)?;
        nonneg("beam3d", "g_m_per_s2", b.g_m_per_s2)?;
        nonneg("beam3d", "depth_m", b.depth_m)?;
        positive("beam3d", "extent_m", b.extent_m)?;
        positive("beam3d", "atoms", b.atoms)?;
        if let Some(a) = b.area_m2 {
            positive("beam3d", "area_m2", a)?;
        }
        positive("beam3d", "scan_max_depth_m", b.scan_max_depth_m)?;
        let t = &self.two_beam;
        if !(0.0..=1.0).contains(&t.ratio) {
            return Err(("two_beam", "ratio", format!("must lie in [0, 1], got {}", t.ratio)));
        }
        if let Some(tr) = t.transmissivity {
            if !(0.0..=1.0).contains(&tr) {
                return Err(("two_beam", "transmissivity", format!("must lie in [0, 1], got {tr}")));
            }
        }
        if t.sweep_points < 2 {
            return Err(("two_beam", "sweep_points", "must be at least 2".into()));
        }
        positive("convergence", "tolerance", self.convergence.tolerance)?;
        if self.convergence.n_traj < 2 {
            return Err(("convergence", "n_traj", "need at least 2 trajectories".into()));
        }
        Ok(())
    }

    pub fn raman_config(&self) -> RamanConfig {
        let r = &self.raman;
        let u = |a: f64| contact_strength_1d(a, r.mass_kg, r.area_m2);
        RamanConfig {
            mass: r.mass_kg,
            omega_trap: r.omega_trap_rad_per_s,
            rabi: r.rabi_rad_per_s,
            k0: r.k0_rad_per_m,
            delta: r
                .delta_rad_per_s
                .unwrap_or(crate::units::HBAR * r.k0_rad_per_m.powi(2) / (2.0 * r.mass_kg)),
            u11: u(r.a11_m),
            u12: u(r.a12_m),
            u22: u(r.a22_m),
            light_shift_1: r.light_shift_1_rad_per_s,
            light_shift_2: r.light_shift_2_rad_per_s,
            n_bec: r.n_bec,
            area: r.area_m2,
            frame: r.frame,
            absorber: match (r.absorber_width_m, r.absorber_strength_per_s) {
                (Some(width), Some(strength)) => Some(Absorber { width, strength }),
                _ => None,
            },
        }
    }

    pub fn grid(&self) -> Result<Grid1D> {
        Grid1D::new(self.grid.z_min_m, self.grid.z_max_m, self.grid.n_points)
    }

    pub fn twa_study(&self) -> Result<TwaStudy> {
        Ok(TwaStudy {
            raman: self.raman_config(),
            grid: self.grid()?,
            dt: self.observe.dt_s,
            t_final: self.observe.t_final_s,
            observe_every: self.observe.every_s,
            window: (self.window.z1_m, self.window.z2_m),
            lo_density: self.window.density_per_m,
            steady: (self.window.steady_start_s, self.window.steady_end_s),
            averaging: self.window.age_averaging,
            ensemble: EnsembleSpec::new(self.ensemble.n_traj, self.ensemble.seed)?,
        })
    }

    pub fn fall_model(&self) -> FallModel {
        let b = &self.beam3d;
        let mut model = FallModel {
            rho0: b.rho0_per_m3,
            k0: b.k0_rad_per_m,
            mass: b.mass_kg,
            g: b.g_m_per_s2,
            area: 1.0,
            u22_3d: contact_strength_3d(b.scattering_length_m, b.mass_kg),
            kinematics: b.kinematics,
        };
        model.area = b
            .area_m2
            .unwrap_or_else(|| model.area_for_count(b.depth_m, b.extent_m, b.atoms));
        model
    }

    /// Two-beam settings given the single-mode beam parameters `(N, χ/ħ, t)`
    /// that were not fixed in the file.
    pub fn two_beam_config(&self, n_main: f64, chi_rate: f64, t: f64) -> TwoBeamConfig {
        let s = &self.two_beam;
        let mut cfg = TwoBeamConfig::with_ratio(
            s.n_main.unwrap_or(n_main),
            s.ratio,
            s.chi_rate_rad_per_s.unwrap_or(chi_rate) * crate::units::HBAR,
            s.t_s.unwrap_or(t),
        );
        cfg.transmissivity = s.transmissivity.unwrap_or(0.5);
        cfg.ref_chi_scale = s.ref_chi_scale;
        cfg
    }

    /// Whether the two-beam single-mode parameters all come from the file.
    pub fn two_beam_is_explicit(&self) -> bool {
        let s = &self.two_beam;
        s.n_main.is_some() && s.chi_rate_rad_per_s.is_some() && s.t_s.is_some()
    }
}

/// Applies `section.key=value`; the value is read as a TOML literal and
/// falls back to a bare string.
fn apply_override(table: &mut toml::Table, spec: &str) -> Result<()> {
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("--set `{spec}` is not of the form section.key=value")))?;
    let value = toml::from_str::<toml::Table>(&format!("v = {}", raw.trim()))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.trim().to_string()));
    let mut parts: Vec<&str> = path.trim().split('.').collect();
    let last = parts.pop().filter(|k| !k.is_empty()).ok_or_else(|| Error::Config(format!("--set `{spec}` has an empty key")))?;
    let mut cur = table;
    for p in parts {
        cur = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("--set `{spec}`: `{p}` is not a section")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

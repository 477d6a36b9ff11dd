//! Binary field snapshots.
//!
//! Layout: one UTF-8 header line
//! `kerrbeam-fld n_points=<n> z_min=<m> z_max=<m> t=<s> config_hash=<hex>\n`
//! followed by `2·n_points` little-endian `(re, im)` f64 pairs: `ψ₁` then
//! `ψ₂`, both in the lab frame.

use std::io::{BufRead, Read, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use super::{Grid1D, TrajectoryState};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub n_points: usize,
    pub z_min: f64,
    pub z_max: f64,
    pub t: f64,
    pub config_hash: String,
    pub psi1: Vec<Complex64>,
    pub psi2: Vec<Complex64>,
}

impl Snapshot {
    pub fn grid(&self) -> Result<Grid1D> {
        Grid1D::new(self.z_min, self.z_max, self.n_points)
    }

    /// Lab-frame trajectory state at the snapshot time.
    pub fn into_state(self) -> TrajectoryState {
        TrajectoryState {
            psi1: self.psi1,
            psi2: self.psi2,
            t: self.t,
            carrier_k: 0.0,
        }
    }
}

/// `snap_<traj>_<time_ms>.fld`, time in ms with microsecond resolution.
pub fn file_name(trajectory: usize, t: f64) -> String {
    format!("snap_{trajectory}_{:.3}.fld", t * 1e3)
}

pub fn write_snapshot(dir: &Path, trajectory: usize, state: &TrajectoryState, grid: &Grid1D, config_hash: &str) -> Result<PathBuf> {
    let path = dir.join(file_name(trajectory, state.t));
    let mut buf = Vec::with_capacity(64 + 32 * grid.n_points());
    writeln!(
        buf,
        "kerrbeam-fld n_points={} z_min={:e} z_max={:e} t={:e} config_hash={}",
        grid.n_points(),
        grid.z_min(),
        grid.z_max(),
        state.t,
        config_hash
    )
    .expect("write to Vec");
    for c in &state.psi1 {
        buf.extend_from_slice(&c.re.to_le_bytes());
        buf.extend_from_slice(&c.im.to_le_bytes());
    }
    for j in 0..grid.n_points() {
        let c = state.psi2_lab(grid, j);
        buf.extend_from_slice(&c.re.to_le_bytes());
        buf.extend_from_slice(&c.im.to_le_bytes());
    }
    std::fs::write(&path, buf).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = std::io::BufReader::new(file);
    let mut header = String::new();
    reader.read_line(&mut header).map_err(|e| Error::io(path, e))?;
    let mut fields = header.trim_end().split(' ');
    if fields.next() != Some("kerrbeam-fld") {
        return Err(Error::Parse(format!("{}: not a field snapshot", path.display())));
    }
    let mut get = |key: &str| -> Result<String> {
        let kv = fields.next().ok_or_else(|| Error::Parse(format!("missing header field {key}")))?;
        kv.strip_prefix(key)
            .and_then(|v| v.strip_prefix('='))
            .map(str::to_owned)
            .ok_or_else(|| Error::Parse(format!("expected {key}=..., got {kv}")))
    };
    let num = |s: String| s.parse::<f64>().map_err(|e| Error::Parse(format!("{s}: {e}")));
    let n_points: usize = get("n_points")?.parse().map_err(|e| Error::Parse(format!("n_points: {e}")))?;
    let z_min = num(get("z_min")?)?;
    let z_max = num(get("z_max")?)?;
    let t = num(get("t")?)?;
    let config_hash = get("config_hash")?;
    let mut body = Vec::new();
    reader.read_to_end(&mut body).map_err(|e| Error::io(path, e))?;
    if body.len() != 32 * n_points {
        return Err(Error::Parse(format!("expected {} payload bytes, found {}", 32 * n_points, body.len())));
    }
    let values: Vec<Complex64> = body
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect();
    let (psi1, psi2) = values.split_at(n_points);
    Ok(Snapshot {
        n_points,
        z_min,
        z_max,
        t,
        config_hash,
        psi1: psi1.to_vec(),
        psi2: psi2.to_vec(),
    })
}

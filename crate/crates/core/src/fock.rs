//! Truncated Fock-basis representation of a Kerr-evolved coherent state.
//!
//! Used as a brute-force oracle for the closed-form single-mode variance and
//! as the moment engine for the two-beam interference model.

use num_complex::Complex64;

use crate::{Error, Result};

/// Minimum retained norm before a truncation is rejected.
pub const NORM_FLOOR: f64 = 1.0 - 1e-12;

/// Truncation rule `⌈α² + 10α + 20⌉`: the Poisson tail beyond it is below 1e-12.
pub fn default_n_max(alpha: f64) -> usize {
    (alpha * alpha + 10.0 * alpha + 20.0).ceil() as usize
}

/// Fock amplitudes `c_n` for `n = 0..=n_max`.
#[derive(Debug, Clone)]
pub struct FockState {
    amps: Vec<Complex64>,
}

impl FockState {
    /// Coherent state `|α⟩` with real `α ≥ 0`, truncated at `n_max`.
    ///
    /// Fails if the retained norm falls below [`NORM_FLOOR`].
    pub fn coherent(alpha: f64, n_max: usize) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::invalid(format!("coherent amplitude must be finite and >= 0, got {alpha}")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); n_max + 1];
        let kept;
        if alpha == 0.0 {
            amps[0] = Complex64::new(1.0, 0.0);
            kept = 1.0;
        } else {
            // Unnormalised amplitudes by the ratio c_n/c_{n-1} = α/√n, starting
            // from 1 at the Poisson peak. Summing ln n! instead loses ~1e-12 of
            // the norm at a few hundred quanta, enough to trip the floor.
            let peak = ((alpha * alpha).floor() as usize).min(n_max);
            let mut c = vec![0.0; n_max + 1];
            c[peak] = 1.0;
            for n in (0..peak).rev() {
                c[n] = c[n + 1] * ((n + 1) as f64).sqrt() / alpha;
            }
            for n in peak + 1..=n_max {
                c[n] = c[n - 1] * alpha / (n as f64).sqrt();
            }
            let inside: f64 = c.iter().map(|x| x * x).sum();
            let mut tail = 0.0;
            let (mut n, mut x) = (n_max, c[n_max]);
            loop {
                n += 1;
                x *= alpha / (n as f64).sqrt();
                tail += x * x;
                if x * x <= 1e-18 * inside && n as f64 > alpha * alpha {
                    break;
                }
            }
            let norm = (inside + tail).sqrt();
            for (a, x) in amps.iter_mut().zip(&c) {
                *a = Complex64::new(x / norm, 0.0);
            }
            kept = inside / (inside + tail);
        }
        let state = FockState { amps };
        if kept < NORM_FLOOR {
            return Err(Error::TruncationLoss { n_max, kept });
        }
        Ok(state)
    }

    pub fn n_max(&self) -> usize {
        self.amps.len() - 1
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Applies `c_n → c_n·exp[-i(nω t + θ n(n-1)/2)]`, where `θ = χt/ħ` is the
    /// accumulated Kerr phase and `omega_t = ωt`.
    pub fn evolve_kerr(&mut self, kerr_phase: f64, omega_t: f64) {
        for (n, c) in self.amps.iter_mut().enumerate() {
            let nf = n as f64;
            let phase = nf * omega_t + kerr_phase * 0.5 * nf * (nf - 1.0);
            *c *= Complex64::from_polar(1.0, -phase);
        }
    }

    /// Normally ordered moment `⟨a†^p a^q⟩` by direct summation.
    pub fn moment(&self, p: usize, q: usize) -> Complex64 {
        let len = self.amps.len();
        let top = p.max(q);
        if top >= len {
            return Complex64::new(0.0, 0.0);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for n in 0..len - top {
            let fp = falling_sqrt(n, p);
            let fq = falling_sqrt(n, q);
            acc += self.amps[n + p].conj() * self.amps[n + q] * (fp * fq);
        }
        acc
    }
}

/// `sqrt((n+k)!/n!)`.
fn falling_sqrt(n: usize, k: usize) -> f64 {
    (1..=k).map(|j| ((n + j) as f64).sqrt()).product()
}

/// Table of normally ordered moments `⟨a†^p a^q⟩`, `p, q ≤ order`.
#[derive(Debug, Clone)]
pub struct MomentTable {
    order: usize,
    values: Vec<Complex64>,
}

impl MomentTable {
    pub fn from_state(state: &FockState, order: usize) -> Self {
        let mut values = Vec::with_capacity((order + 1) * (order + 1));
        for p in 0..=order {
            for q in 0..=order {
                values.push(state.moment(p, q));
            }
        }
        MomentTable { order, values }
    }

    pub fn get(&self, p: usize, q: usize) -> Complex64 {
        assert!(p <= self.order && q <= self.order, "moment ({p},{q}) beyond table order {}", self.order);
        self.values[p * (self.order + 1) + q]
    }
}

//! One-dimensional minimisation helpers shared by the phase and time searches.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a minimum of `f` bracketed by `[lo, hi]`.
///
/// Stops when the bracket is narrower than `tol`; returns `(x, f(x))`.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (hi - lo).abs() > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    let x = 0.5 * (lo + hi);
    let fx = f(x);
    // the bracket midpoint can be marginally worse than a probe on a flat valley
    [(x, fx), (x1, f1), (x2, f2)]
        .into_iter()
        .fold((x, fx), |best, c| if c.1 < best.1 { c } else { best })
}

/// Minimise a `period`-periodic function: uniform scan with `n_grid` points,
/// then golden-section refinement around the best grid point.
///
/// Returns the argmin reduced to `[0, period)`. Ties on the grid go to the
/// smallest angle.
pub fn periodic_minimum<F: FnMut(f64) -> f64>(mut f: F, period: f64, n_grid: usize, tol: f64) -> (f64, f64) {
    let h = period / n_grid as f64;
    let (mut best_i, mut best_v) = (0usize, f(0.0));
    for i in 1..n_grid {
        let v = f(i as f64 * h);
        if v < best_v {
            best_i = i;
            best_v = v;
        }
    }
    let centre = best_i as f64 * h;
    let (x, v) = golden_section(&mut f, centre - h, centre + h, tol);
    if v < best_v {
        (x.rem_euclid(period), v)
    } else {
        (centre, best_v)
    }
}

/// Composite Simpson rule on `[a, b]` with `n` (rounded up to even) intervals.
pub fn simpson<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = (n.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_vertex() {
        let (x, v) = golden_section(|x| (x - 0.3).powi(2) + 2.0, -1.0, 1.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((v - 2.0).abs() < 1e-15);
    }

    #[test]
    fn periodic_wraps() {
        let p = std::f64::consts::TAU;
        let (x, _) = periodic_minimum(|x| -(x - 0.001).cos(), p, 720, 1e-10);
        assert!((x - 0.001).abs() < 1e-6, "{x}");
        let (x, _) = periodic_minimum(|x| -(x + 0.001).cos(), p, 720, 1e-10);
        assert!((x - (p - 0.001)).abs() < 1e-6, "{x}");
    }

    #[test]
    fn simpson_is_exact_for_cubics() {
        let v = simpson(|x| x * x * x - x, 0.0, 2.0, 4);
        assert!((v - 2.0).abs() < 1e-13);
    }
}

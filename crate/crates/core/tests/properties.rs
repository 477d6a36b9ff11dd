use std::f64::consts::PI;

use kerrbeam::quadrature::{optimal_quadrature, project, quadrature_variance, LocalOscillator};
use kerrbeam::single_mode::{
    fock_oracle_variance_auto, harmonic_coefficients, variance_at_phase, variance_extremes, KerrParams,
};
use kerrbeam::twa::{Grid1D, TrajectoryState};
use num_complex::Complex64;
use proptest::prelude::*;

fn grid() -> Grid1D {
    Grid1D::new(0.0, 64e-6, 128).unwrap()
}

fn state_from(values: &[(f64, f64)], carrier_k: f64) -> TrajectoryState {
    let g = grid();
    let mut s = TrajectoryState::zeros(&g, carrier_k);
    for (x, &(re, im)) in s.psi2.iter_mut().zip(values.iter().cycle()) {
        *x = Complex64::new(re, im);
    }
    s
}

fn lo(phi: f64) -> LocalOscillator {
    let mut lo = LocalOscillator::new(&grid(), 10e-6, 40e-6, 1.7e7, 3.0e4, phi).unwrap();
    lo.omega_frame = 1.2e4;
    lo
}

fn samples() -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), 3..40)
        .prop_map(|v| v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
}

proptest! {
    #[test]
    fn variance_is_one_at_zero_time(n in 0.0..1e5f64, phi in -10.0..10.0f64) {
        let v = variance_at_phase(n, 0.0, phi);
        prop_assert!((v - 1.0).abs() < 1e-9 * (1.0 + n), "n={n} phi={phi}: {v}");
    }

    #[test]
    fn extremes_respect_the_uncertainty_bound(n in 0.01..1e4f64, theta in 0.0..PI) {
        let (lo, hi) = variance_extremes(n, theta);
        prop_assert!(lo > 0.0);
        prop_assert!(lo * hi >= 1.0 - 1e-9, "n={n} theta={theta}: {lo} * {hi}");
    }

    #[test]
    fn variance_is_a_pure_second_harmonic(n in 0.0..1e3f64, theta in 0.0..1.0f64, phi in -PI..PI) {
        let (c, p, q) = harmonic_coefficients(n, theta);
        let direct = variance_at_phase(n, theta, phi);
        let series = c + p * (2.0 * phi).cos() + q * (2.0 * phi).sin();
        prop_assert!((direct - series).abs() <= 1e-9 * (1.0 + n));
        prop_assert!((variance_at_phase(n, theta, phi + PI) - direct).abs() <= 1e-9 * (1.0 + n));
    }

    #[test]
    fn closed_form_matches_the_fock_oracle(alpha in 0.3..6.0f64, theta in 0.0..0.5f64, phi in -PI..PI) {
        let rate = 2.0;
        let params = KerrParams::from_chi_rate(rate, 0.0, alpha).unwrap();
        let t = theta / rate;
        let closed = variance_at_phase(alpha * alpha, theta, phi);
        let oracle = fock_oracle_variance_auto(&params, t, phi).unwrap();
        prop_assert!((closed - oracle).abs() <= 1e-8, "{closed} vs {oracle}");
    }

    #[test]
    fn projection_is_linear(
        u in prop::collection::vec((-50.0..50.0f64, -50.0..50.0f64), 1..20),
        v in prop::collection::vec((-50.0..50.0f64, -50.0..50.0f64), 1..20),
        a in -3.0..3.0f64, b in -3.0..3.0f64, t in 0.0..0.02f64,
    ) {
        let g = grid();
        let lo = lo(0.3);
        let (su, sv) = (state_from(&u, 2e7), state_from(&v, 2e7));
        let mut mix = su.clone();
        for (m, y) in mix.psi2.iter_mut().zip(&sv.psi2) {
            *m = *m * a + *y * b;
        }
        let lhs = project(&mix, &g, &lo, t);
        let rhs = project(&su, &g, &lo, t) * a + project(&sv, &g, &lo, t) * b;
        prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + rhs.norm()));
    }

    #[test]
    fn global_phase_rotates_the_projection(
        u in prop::collection::vec((-50.0..50.0f64, -50.0..50.0f64), 1..20),
        gamma in -PI..PI, t in 0.0..0.02f64,
    ) {
        let g = grid();
        let lo = lo(-1.1);
        let s = state_from(&u, 2e7);
        let mut r = s.clone();
        r.psi2.iter_mut().for_each(|x| *x *= Complex64::from_polar(1.0, gamma));
        let want = project(&s, &g, &lo, t) * Complex64::from_polar(1.0, gamma);
        prop_assert!((project(&r, &g, &lo, t) - want).norm() <= 1e-9 * (1.0 + want.norm()));
        // shifting the oscillator phase has the opposite effect
        let back = project(&r, &g, &lo.with_phi(lo.phi + gamma), t);
        prop_assert!((back - project(&s, &g, &lo, t)).norm() <= 1e-9 * (1.0 + want.norm()));
    }

    #[test]
    fn quadrature_statistics_are_phase_covariant(bs in samples(), gamma in -PI..PI, phi in -PI..PI) {
        let rot: Vec<Complex64> = bs.iter().map(|b| b * Complex64::from_polar(1.0, gamma)).collect();
        let a = quadrature_variance(&rot, phi).unwrap().variance;
        let b = quadrature_variance(&bs, phi + gamma).unwrap().variance;
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + b));
        let (o1, o2) = (optimal_quadrature(&bs).unwrap(), optimal_quadrature(&rot).unwrap());
        prop_assert!((o1.squeezed.variance - o2.squeezed.variance).abs() <= 1e-9 * (1.0 + o1.squeezed.variance));
        prop_assert!(o1.squeezed.variance <= o1.antisqueezed.variance + 1e-12);
    }
}

use num_complex::Complex64;
use proptest::prelude::*;
use toboggan::complexpath::{Contour, Path, PathJet, Segment};
use toboggan::odeint::{
    integrate_along, integrate_fixed, integrate_pair, wkb_seed, wronskian, IntegratorConfig, OdeState,
};

type C = Complex64;

/// Parabola through 0, -0.5i and 1 at s = 0, 1/2, 1.
struct Detour;

impl Path<f64> for Detour {
    fn jet(&self, s: f64) -> PathJet<f64> {
        let i = C::i();
        PathJet {
            z: 2.0 * i * s * (s - 1.0) + 2.0 * s * (s - 0.5),
            dz: 2.0 * i * (2.0 * s - 1.0) + (4.0 * s - 1.0),
            d2z: 4.0 * i + 4.0,
        }
    }
}

fn cfg() -> IntegratorConfig<f64> {
    IntegratorConfig::default()
}

#[test]
fn plane_wave() {
    let kappa = 1.7;
    let line = Contour::RealLine;
    let init = OdeState::new(0.0, C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(0.0, kappa));
    let mut dense = Vec::new();
    let out = integrate_along(
        &line,
        |_| C::new(-kappa * kappa, 0.0),
        5.0,
        init,
        &cfg(),
        Some(&mut dense),
    )
    .unwrap();
    let exact = (C::i() * kappa * 5.0).exp();
    assert!((out.phi - exact).norm() < 1e-9);
    for st in &dense {
        let e = (C::i() * kappa * st.s).exp();
        assert!((st.phi - e).norm() < 1e-9);
    }
}

#[test]
fn homotopic_paths_agree() {
    let kappa = 2.3;
    let q = |_: C| C::new(-kappa * kappa, 0.0);
    let init = OdeState::new(0.0, C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(0.0, kappa));
    let straight = Segment {
        from: C::new(0.0, 0.0),
        to: C::new(1.0, 0.0),
    };
    let a = integrate_along(&straight, q, 1.0, init, &cfg(), None).unwrap();
    let b = integrate_along(&Detour, q, 1.0, init, &cfg(), None).unwrap();
    assert!((a.phi - b.phi).norm() < 1e-8 * a.phi.norm());
    assert!((a.dphi - b.dphi).norm() < 1e-8 * a.dphi.norm());
}

#[test]
fn harmonic_ground_state_shape() {
    let line = Contour::RealLine;
    let q = |y: C| y * y - 1.0;
    let seed = wkb_seed(q(C::new(8.0, 0.0)), 1.0, C::new(8.0, 0.0), C::new(1.0, 0.0), 8.0).unwrap();
    let mut dense = Vec::new();
    let end = integrate_along(&line, q, 0.0, seed, &cfg(), Some(&mut dense)).unwrap();
    assert!(end.dphi.norm() < 1e-8 * end.phi.norm());
    for st in dense.iter().filter(|st| st.s < 4.0) {
        let ratio = (st.phi / end.phi) * (st.log_scale - end.log_scale).exp();
        let gauss = (-st.s * st.s / 2.0).exp();
        assert!((ratio - gauss).norm() < 1e-8, "s={} {} vs {}", st.s, ratio, gauss);
    }
}

#[test]
fn renormalization_keeps_long_arms_finite() {
    let line = Contour::RealLine;
    let q = |y: C| y * y;
    let seed = wkb_seed(C::new(900.0, 0.0), 1.0, C::new(30.0, 0.0), C::new(1.0, 0.0), 30.0).unwrap();
    let end = integrate_along(&line, q, 0.0, seed, &cfg(), None).unwrap();
    assert!(end.phi.norm().is_finite() && end.log_scale > 200.0);
}

#[test]
fn seed_examples() {
    let s = wkb_seed(C::new(36.0, 0.0), 1.0, C::new(6.0, 0.0), C::new(1.0, 0.0), 6.0).unwrap();
    assert!((s.dphi / s.phi - C::new(-6.0, 0.0)).norm() < 1e-14);
    let e = 1.0;
    let s = wkb_seed(C::new(36.0 - e, 0.0), e, C::new(-6.0, 0.0), C::new(-1.0, 0.0), -6.0).unwrap();
    assert!((s.dphi / s.phi - C::new(35f64.sqrt(), 0.0)).norm() < 1e-14);
    assert!(wkb_seed(C::new(10.0, 0.0), 1.0, C::new(3.0, 0.0), C::new(1.0, 0.0), 3.0).is_err());
    assert!(wkb_seed(C::new(-400.0, 0.0), 1.0, C::new(3.0, 0.0), C::new(1.0, 0.0), 3.0).is_err());
}

#[test]
fn sextic_seed_decays_outward() {
    let u = Contour::u_shape(0.5).unwrap();
    let alpha: f64 = 1.0;
    let e = C::new(4.0, 0.0);
    let q = |y: C| 4.0 * y.powi(6) + (4.0 * alpha * alpha - 0.25) / (y * y) + 4.0 * e * y * y;
    let s0 = 6.0;
    let j = Path::<f64>::jet(&u, s0);
    let dir = j.dz / j.dz.norm();
    let seed = wkb_seed(q(j.z), e.norm(), j.z, dir, s0).unwrap();
    let root = (-seed.dphi / seed.phi) * dir;
    assert!(root.re > 0.0);
    let mut dense = Vec::new();
    integrate_along(&u, q, s0 + 0.5, seed, &cfg(), Some(&mut dense)).unwrap();
    assert!(dense.len() > 10);
    let mags: Vec<f64> = dense.iter().take(11).map(|st| st.log_abs_phi()).collect();
    assert!(mags.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn wronskian_drift_is_small() {
    // Oscillatory region of the harmonic well, where neither solution dominates.
    let line = Contour::RealLine;
    let e = 30.0;
    let q = |y: C| y * y - e;
    let a = OdeState::new(-4.0, C::new(-4.0, 0.0), C::new(1.0, 0.0), C::new(0.0, 0.0));
    let b = OdeState::new(-4.0, C::new(-4.0, 0.0), C::new(0.0, 0.0), C::new(1.0, 0.0));
    let (w0, l0) = wronskian(&a, &b);
    let (a1, b1) = integrate_pair(&line, q, 4.0, a, b, &cfg()).unwrap();
    let (w1, l1) = wronskian(&a1, &b1);
    let drift = (w1 * (l1 - l0).exp() - w0).norm() / w0.norm() / 8.0;
    assert!(drift < 1e-9, "drift {drift}");

    // Plane waves on a complex detour.
    let k = 1.3;
    let qf = |_: C| C::new(-k * k, 0.0);
    let p = OdeState::new(0.0, C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(0.0, k));
    let m = OdeState::new(0.0, C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(0.0, -k));
    let (p1, m1) = integrate_pair(&Detour, qf, 1.0, p, m, &cfg()).unwrap();
    let (wa, _) = wronskian(&p, &m);
    let (wb, lb) = wronskian(&p1, &m1);
    assert!((wb * lb.exp() - wa).norm() / wa.norm() < 1e-9);
}

#[test]
fn fifth_order_convergence() {
    let k = 3.0;
    let line = Contour::RealLine;
    let q = |_: C| C::new(-k * k, 0.0);
    let init = OdeState::new(0.0, C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(0.0, k));
    let exact = (C::i() * k * 2.0).exp();
    let err = |n| (integrate_fixed(&line, q, 2.0, init, n).phi - exact).norm();
    for n in [20, 40, 80] {
        let ratio = err(n) / err(2 * n);
        assert!(ratio >= 8.0, "n={n}: ratio {ratio}");
    }
}

#[test]
fn tolerance_controls_error() {
    let k = 3.0;
    let line = Contour::RealLine;
    let q = |_: C| C::new(-k * k, 0.0);
    let init = OdeState::new(0.0, C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(0.0, k));
    let exact = (C::i() * k * 10.0).exp();
    let mut last = f64::INFINITY;
    for tol in [1e-6, 1e-8, 1e-10] {
        let c = IntegratorConfig {
            rel_tol: tol,
            abs_tol: tol * 1e-2,
            ..cfg()
        };
        let e = (integrate_along(&line, q, 10.0, init, &c, None).unwrap().phi - exact).norm();
        assert!(e < 10.0 * tol && e < last);
        last = e;
    }
}

#[test]
fn single_precision_instance() {
    let line = Contour::RealLine;
    let c = IntegratorConfig::<f32> {
        rel_tol: 1e-5,
        abs_tol: 1e-6,
        max_step: 0.5,
        min_step: 1e-6,
        max_steps: 100_000,
    };
    let init = OdeState::new(
        0.0f32,
        num_complex::Complex32::new(0.0, 0.0),
        num_complex::Complex32::new(1.0, 0.0),
        num_complex::Complex32::new(0.0, 1.0),
    );
    let out = integrate_along(&line, |_| num_complex::Complex32::new(-1.0, 0.0), 3.0, init, &c, None).unwrap();
    assert!((out.phi - num_complex::Complex32::new(3f32.cos(), 3f32.sin())).norm() < 1e-4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn superposition(a_re in -2.0f64..2.0, a_im in -2.0f64..2.0, b_re in -2.0f64..2.0, e in 0.0f64..4.0) {
        let path = Contour::shifted_line(0.4).unwrap();
        let q = |y: C| y * y - e;
        let a = C::new(a_re, a_im);
        let b = C::new(b_re, 0.5);
        let start = |phi: C, dphi: C| OdeState::new(-1.0, Path::<f64>::point(&path, -1.0), phi, dphi);
        let one = integrate_along(&path, q, 2.0, start(C::new(1.0, 0.0), C::new(0.0, 0.0)), &cfg(), None).unwrap();
        let two = integrate_along(&path, q, 2.0, start(C::new(0.0, 0.0), C::new(1.0, 0.0)), &cfg(), None).unwrap();
        let mix = integrate_along(&path, q, 2.0, start(a, b), &cfg(), None).unwrap();
        let f = |st: &OdeState<f64>| st.phi * st.log_scale.exp();
        let lin = a * f(&one) + b * f(&two);
        prop_assert!((f(&mix) - lin).norm() < 1e-8 * (1.0 + lin.norm()));
    }
}

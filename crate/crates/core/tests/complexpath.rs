use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use toboggan::complexpath::{
    pullback_path, rotate_path, stokes_sectors, stokes_wedges, symmetric_pairs, total_turning, winding_path, Contour,
    Path,
};

fn at(c: &Contour, s: f64) -> Complex64 {
    Path::<f64>::point(c, s)
}

#[test]
fn turning_of_shifted_line_and_windings() {
    let line = Contour::shifted_line(0.5).unwrap();
    assert!((total_turning(&line, 1e3).unwrap() - PI).abs() < 1e-2);
    for n in 1..=3u32 {
        let c = Contour::winding(n, 0.5).unwrap();
        let t = total_turning(&c, 1e3).unwrap();
        assert!((t - (2 * n + 1) as f64 * PI).abs() < 1e-2, "N={n}: {t}");
    }
}

#[test]
fn turning_grows_monotonically_toward_limit() {
    let c = Contour::winding(2, 1.0).unwrap();
    let mut last = 0.0;
    for s_max in [1.0, 10.0, 100.0, 1000.0] {
        let t = total_turning(&c, s_max).unwrap();
        assert!(t > last && t < 5.0 * PI);
        last = t;
    }
}

#[test]
fn winding_arg_sweep_oracle() {
    // Independent unwrapping of arg on a plain dense grid.
    let (n, eps, s_max) = (1u32, 1.0, 400.0);
    let mut prev = winding_path(n, eps, -s_max).unwrap().0;
    let mut total = 0.0;
    let steps = 400_000;
    for k in 1..=steps {
        let s = -s_max + 2.0 * s_max * k as f64 / steps as f64;
        let z = winding_path(n, eps, s).unwrap().0;
        total += (z / prev).arg();
        prev = z;
    }
    let c = Contour::winding(n, eps).unwrap();
    assert!((total_turning(&c, s_max).unwrap() - total).abs() < 1e-9);
    assert!((total - 3.0 * PI).abs() < 0.02);
}

#[test]
fn pullback_straightens_windings() {
    for n in 0..=4u32 {
        let eps = 0.8;
        let y = pullback_path(&Contour::winding(n, eps).unwrap(), 2 * n + 1).unwrap();
        for k in -40..=40 {
            let s = k as f64 * 0.37;
            let d = (at(&y, s) - Complex64::new(s, -eps)).norm();
            assert!(d < 1e-10 * (1.0 + s.abs()), "N={n} s={s} d={d}");
        }
        assert!((total_turning(&y, 1e3).unwrap() - PI).abs() < 1e-2);
    }
}

#[test]
fn pullback_of_line_is_symmetric_u() {
    let eps = 0.5;
    let u = Contour::u_shape(eps).unwrap();
    let v = at(&u, 0.0);
    assert!(v.re.abs() < 1e-15 && (v.im + eps.sqrt()).abs() < 1e-14);
    for k in 1..50 {
        let s = k as f64 * 0.3;
        let (a, b) = (at(&u, s), at(&u, -s));
        assert!((b + a.conj()).norm() < 1e-13);
        assert!(a.im < 0.0);
    }
    // Far arms approach arg -pi/4 and -3pi/4.
    assert!((at(&u, 1e6).arg() + PI / 4.0).abs() < 1e-3);
    assert!((at(&u, -1e6).arg() + 3.0 * PI / 4.0).abs() < 1e-3);
}

#[test]
fn analytic_branch_agrees_with_dense_tracking() {
    let parents = [
        Contour::shifted_line(0.3).unwrap(),
        Contour::winding(1, 0.6).unwrap(),
        Contour::winding(2, 1.1).unwrap(),
        rotate_path(&Contour::shifted_line(0.4).unwrap(), 8, 1).unwrap(),
    ];
    for parent in &parents {
        for m in 1..=5u32 {
            let y = pullback_path(parent, m).unwrap();
            for k in -12..=12 {
                let s = k as f64 * 0.83;
                let tracked = parent.tracked_pullback_point(m, s).unwrap();
                let lifted = at(&y, s);
                assert!(
                    (tracked - lifted).norm() < 1e-9 * (1.0 + lifted.norm()),
                    "{parent:?} m={m} s={s}"
                );
            }
        }
    }
}

#[test]
fn pullback_identity_for_unit_exponent() {
    let c = Contour::winding(2, 0.7).unwrap();
    assert_eq!(pullback_path(&c, 1).unwrap(), c);
    assert!(pullback_path(&Contour::RealLine, 2).is_err());
}

#[test]
fn full_turn_is_exact_identity() {
    let u = Contour::u_shape(0.5).unwrap();
    let r = rotate_path(&u, 4, 4).unwrap();
    let mut composed = u.clone();
    for _ in 0..4 {
        composed = rotate_path(&composed, 4, 1).unwrap();
    }
    for k in -30..=30 {
        let s = k as f64 * 0.5;
        assert_eq!(at(&r, s), at(&u, s));
        assert_eq!(at(&composed, s), at(&u, s));
    }
}

#[test]
fn eight_rotated_trajectories_are_distinct() {
    let u = Contour::u_shape(0.5).unwrap();
    let paths: Vec<Contour> = (1..=8).map(|n| rotate_path(&u, 8, n).unwrap()).collect();
    for i in 0..8 {
        for j in (i + 1)..8 {
            let d = (at(&paths[i], 0.0) - at(&paths[j], 0.0)).norm();
            assert!(d > 0.1);
        }
    }
}

#[test]
fn half_turn_reflects_line_above_axis() {
    let l = rotate_path(&Contour::shifted_line(0.5).unwrap(), 2, 1).unwrap();
    for k in -10..=10 {
        let s = k as f64;
        assert_eq!(at(&l, s), Complex64::new(-s, 0.5));
    }
}

#[test]
fn stokes_examples() {
    let w6 = stokes_wedges(6.0, 0.0).unwrap();
    assert_eq!(w6.len(), 6);
    assert!(w6.iter().all(|w| (2.0 * w.half_width - PI / 6.0).abs() < 1e-15));
    assert_eq!(symmetric_pairs(&w6).len(), 3);
    assert!(symmetric_pairs(&w6).iter().all(|(i, j)| i != j));

    let w2 = stokes_wedges(2.0, 0.0).unwrap();
    let centers: Vec<f64> = w2.iter().map(|w| w.center_angle).collect();
    assert_eq!(centers.len(), 2);
    assert!(centers.iter().any(|c| c.abs() < 1e-12));
    assert!(centers.iter().any(|c| (c - PI).abs() < 1e-12));
    assert!(w2.iter().all(|w| (2.0 * w.half_width - PI / 2.0).abs() < 1e-15));

    let flipped = stokes_wedges(2.0, PI).unwrap();
    let mut c: Vec<f64> = flipped.iter().map(|w| w.center_angle).collect();
    c.sort_by(f64::total_cmp);
    assert!((c[0] + PI / 2.0).abs() < 1e-12 && (c[1] - PI / 2.0).abs() < 1e-12);
}

proptest! {
    #[test]
    fn winding_zero_equals_shifted_line(s in -50.0f64..50.0, eps in 0.01f64..5.0) {
        let (z, _) = winding_path(0, eps, s).unwrap();
        prop_assert_eq!(z, Complex64::new(s, -eps));
    }

    #[test]
    fn k_fold_rotation_is_identity(k in 1u32..12, eps in 0.1f64..3.0, s in -10.0f64..10.0) {
        let base = Contour::u_shape(eps).unwrap();
        let mut c = base.clone();
        for _ in 0..k {
            c = rotate_path(&c, k, 1).unwrap();
        }
        prop_assert!((at(&c, s) - at(&base, s)).norm() <= 1e-15 * (1.0 + at(&base, s).norm()));
    }

    #[test]
    fn sectors_tile_and_pairing_is_involution(p in 1.5f64..9.0, phase in -3.0f64..3.0) {
        let p = p.round();
        let sectors = stokes_sectors(p, phase).unwrap();
        let width: f64 = sectors.iter().map(|w| 2.0 * w.half_width).sum();
        prop_assert!((width - 2.0 * PI).abs() < 1e-9);
        let decay: Vec<_> = sectors.iter().copied().filter(|w| w.decay).collect();
        prop_assert_eq!(decay.len(), p as usize);
        for w in &decay {
            let th = w.center_angle;
            prop_assert!((p * th + phase).cos() > 1.0 - 1e-9);
        }
        let pairs = symmetric_pairs(&decay);
        let mut seen = vec![0usize; decay.len()];
        for (i, j) in pairs {
            seen[i] += 1;
            if i != j { seen[j] += 1; }
        }
        prop_assert!(seen.iter().all(|&n| n <= 1));
    }

    #[test]
    fn shifted_line_pullback_stays_below_axis(eps in 0.05f64..3.0, m in 2u32..7, s in -30.0f64..30.0) {
        let y = pullback_path(&Contour::shifted_line(eps).unwrap(), m).unwrap();
        prop_assert!(at(&y, s).im < 0.0);
    }
}

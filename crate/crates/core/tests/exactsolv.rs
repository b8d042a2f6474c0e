use num_complex::Complex64;
use num_rational::Rational64;
use proptest::prelude::*;
use toboggan::complexpath::Contour;
use toboggan::exactsolv::*;
use toboggan::odeint::IntegratorConfig;

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

#[test]
fn build_case_examples() {
    let c = build_case(3, 0, 1, 1).unwrap();
    assert_eq!((c.ell, c.nu, c.gamma, c.bound), (r(0, 1), r(1, 2), r(0, 1), true));
    let c = build_case(3, 0, 1, 2).unwrap();
    assert_eq!((c.nu, c.bound), (r(1, 1), false));
    let c = build_case(5, 1, 2, 3).unwrap();
    assert_eq!((c.nu, c.gamma, c.bound, c.m), (r(3, 4), r(9, 16) - r(25, 4), true, 4));
    assert!(build_case(3, 0, 0, 1).is_err());
}

#[test]
fn build_case_identities() {
    for n in 1..=4 {
        for m in 1..=20 {
            let c = build_case(3, 0, n, m).unwrap();
            assert_eq!(Rational64::from(2 * n) * c.ell, Rational64::from(m - n));
            assert_eq!(c.nu, r(m, 2 * n));
            assert_eq!(c.nu, c.ell + r(1, 2));
            assert_eq!(c.bound, m % (2 * n) != 0);
        }
    }
}

#[test]
fn monodromy_examples() {
    let half = monodromy_coefficients(r(1, 2), 2).unwrap();
    assert!(half.unphysical.is_exact_zero());
    assert_eq!(half.physical, Coefficient::Exact(SurdComplex::real(QuadSurd::int(-1))));

    let third = monodromy_coefficients(r(1, 3), 2).unwrap();
    let expected = SurdComplex {
        re: QuadSurd::rational(r(1, 2)),
        im: QuadSurd {
            c: r(1, 2),
            ..QuadSurd::default()
        },
    };
    assert_eq!(third.unphysical, Coefficient::Exact(expected));
    assert!((third.unphysical.value() - Complex64::from_polar(1.0, std::f64::consts::PI / 3.0)).norm() < 1e-15);
    assert!(third.physical.is_exact_zero());

    for nu in [r(1, 7), r(2, 5), r(5, 2)] {
        let id = monodromy_coefficients(nu, 0).unwrap();
        assert_eq!(id.physical.value(), Complex64::new(1.0, 0.0));
        assert!(id.unphysical.is_exact_zero());
    }
    assert!(monodromy_coefficients(r(1, 2), 3).is_err());
}

#[test]
fn limit_examples() {
    assert_eq!(monodromy_limit(1, 2).unwrap().unphysical.value().norm(), 2.0);
    assert_eq!(monodromy_limit(2, 2).unwrap().unphysical.value().norm(), 2.0);
    let id = monodromy_limit(1, 0).unwrap();
    assert_eq!(id.physical.value(), Complex64::new(1.0, 0.0));
    assert!(id.unphysical.is_exact_zero());
    // Integer nu is routed to the limit, and the limit matches nearby values.
    assert_eq!(
        monodromy_coefficients(r(3, 1), 4).unwrap(),
        monodromy_limit(3, 4).unwrap()
    );
    let near = 1.0 + 1e-7;
    let x = std::f64::consts::PI * near;
    let ratio = (2.0 * x).sin() / x.sin() * Complex64::from_polar(1.0, x);
    assert!((ratio - monodromy_limit(1, 2).unwrap().unphysical.value()).norm() < 1e-5);
}

#[test]
fn bound_states_have_exactly_zero_unphysical_part() {
    for n in 1..=4 {
        for m in 1..=20 {
            let case = build_case(3, 0, n, m).unwrap();
            let mono = case.monodromy().unwrap();
            if case.bound {
                assert!(mono.unphysical.is_exact_zero(), "N={n} M={m}");
            } else {
                assert_eq!(mono.unphysical.value().norm(), case.m as f64, "N={n} M={m}");
            }
        }
    }
}

#[test]
fn exact_path_matches_floating_point() {
    for (nu, m) in [(r(1, 12), 2), (r(5, 6), 4), (r(1, 4), 6), (r(7, 12), 2), (r(2, 3), 8)] {
        let mono = monodromy_coefficients(nu, m).unwrap();
        assert!(matches!(mono.physical, Coefficient::Exact(_)));
        let x = std::f64::consts::PI * (*nu.numer() as f64 / *nu.denom() as f64);
        let mf = m as f64;
        let phys = ((1.0 + mf) * x).sin() / x.sin();
        let unphys = Complex64::from_polar(1.0, x) * ((mf * x).sin() / x.sin());
        assert!((mono.physical.value() - phys).norm() < 1e-13);
        assert!((mono.unphysical.value() - unphys).norm() < 1e-13);
    }
    // Denominator 5 falls back to floating point.
    assert!(matches!(
        monodromy_coefficients(r(1, 5), 2).unwrap().physical,
        Coefficient::Approx(_)
    ));
}

#[test]
fn trig_table() {
    for k in -30..30 {
        let q = r(k, 12);
        let x = std::f64::consts::PI * k as f64 / 12.0;
        assert!((sin_pi(q).unwrap().to_f64() - x.sin()).abs() < 4e-15, "k={k}");
        assert!((cos_pi(q).unwrap().to_f64() - x.cos()).abs() < 4e-15, "k={k}");
    }
    assert!(sin_pi(r(1, 8)).is_none());
    assert_eq!(sin_pi(r(1, 12)).unwrap().to_string(), "-(1/4)sqrt2 + (1/4)sqrt6");
}

#[test]
fn bound_case_decays_on_both_ends() {
    let case = build_case(3, 0, 1, 1).unwrap();
    let ratio = continuation_check(&case, 1.0, 3.0).unwrap();
    assert!(ratio < 1e-3, "ratio {ratio}");
}

#[test]
fn excluded_cases_grow() {
    for (n, s_far) in [(1, 3.0), (2, 2.0), (3, 2.0)] {
        let case = build_case(3, 0, n, 2 * n).unwrap();
        assert!(!case.bound);
        let ratio = continuation_check(&case, 1.0, s_far).unwrap();
        assert!(ratio > 0.1, "N={n}: ratio {ratio}");
    }
}

#[test]
fn long_arms_do_not_overflow() {
    let case = build_case(3, 0, 3, 1).unwrap();
    assert!(continuation_check(&case, 1.0, 4.0).unwrap().is_finite());
}

#[test]
fn higher_winding_bound_cases_decay() {
    // The seed falls like e^{-kappa s^(2N)}, and integrating toward the
    // recessive end amplifies truncation error by the inverse factor, so the
    // usable s_far shrinks with N.
    for (n, m, s_far) in [(1, 3, 3.0), (2, 1, 2.0), (2, 3, 2.0), (3, 1, 2.0), (3, 5, 2.0)] {
        let case = build_case(3, 0, n, m).unwrap();
        let ratio = continuation_check(&case, 1.0, s_far).unwrap();
        assert!(ratio < 1e-3, "N={n} M={m}: {ratio}");
    }
}

#[test]
fn free_wave_on_the_shifted_line_keeps_its_size() {
    let line = Contour::shifted_line(0.5).unwrap();
    let track = continue_free_wave(&line, 0.0, 1.0, 20.0, &IntegratorConfig::default()).unwrap();
    let first = track[0].phi.norm() * track[0].log_scale.exp();
    for st in &track {
        assert!((st.phi.norm() * st.log_scale.exp() / first - 1.0).abs() < 1e-8);
    }
}

#[test]
fn numerical_monodromy_matches_connection_formula() {
    for (nu, m) in [(r(1, 3), 2), (r(1, 2), 2), (r(3, 4), 4), (r(2, 5), 2)] {
        let mono = monodromy_coefficients(nu, m).unwrap();
        let nu_f = *nu.numer() as f64 / *nu.denom() as f64;
        let (p, u) = numerical_monodromy(nu_f, m, 30.0, 1.0).unwrap();
        assert!((p - mono.physical.value()).norm() < 1e-8, "nu={nu} m={m}: {p}");
        assert!((u - mono.unphysical.value()).norm() < 1e-8, "nu={nu} m={m}: {u}");
        // Wronskian bookkeeping of the Hankel pair.
        let x = std::f64::consts::PI * nu_f;
        let balance = ((2 * m + 1) as f64 * x).sin() / x.sin();
        assert!((p.norm_sqr() - u.norm_sqr() - balance).abs() < 1e-7);
    }
}

#[test]
fn exact_table_rows() {
    let rows = exact_table(2, 8, None).unwrap();
    assert_eq!(rows.len(), 8);
    for row in &rows {
        assert_eq!(row.unphysical_exact_zero, row.case.bound);
        assert!(row.decay_ratio.is_none());
    }
    assert_eq!(rows[3].unphysical_abs, 4.0);
}

proptest! {
    #[test]
    fn surd_inverse(a in -20i64..20, b in -20i64..20, c in -20i64..20, d in -20i64..20, den in 1i64..9) {
        let x = QuadSurd { a: r(a, den), b: r(b, 1), c: r(c, den), d: r(d, 1) };
        prop_assume!(!x.is_zero());
        let inv = x.inverse().unwrap();
        prop_assert_eq!(x * inv, QuadSurd::int(1));
    }
}

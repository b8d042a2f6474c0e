//! Acceptance criteria. Each prints one PASS/FAIL line followed by indented
//! measurements; the process fails if any criterion does.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use num_rational::Rational64;
use toboggan::asympt::{compare_with_shooting, ell_for_tau, rescale_f};
use toboggan::complexpath::{
    angle_diff, pullback_path, stokes_wedges, symmetric_pairs, total_turning, Contour, Path, PathJet, Segment,
};
use toboggan::eigensolve::{matrix_spectrum, shoot_spectrum, MatrixConfig, ScanWindow, ShootingConfig};
use toboggan::exact::GaussRat;
use toboggan::exactsolv::{build_case, continuation_check, hankel_asymptotic};
use toboggan::linalg::Mat;
use toboggan::odeint::{integrate_along, integrate_pair, wronskian, IntegratorConfig, OdeState};
use toboggan::qmetric::{
    assemble_theta, completeness_residual, random_dyson_pencil, solve_biorthogonal, spectral_residuals, Pencil,
};
use toboggan::susy::{gamma_grid, sweep_gamma, Regime, Side, Superpotential, SweepConfig};
use toboggan::xform::{rectify, Monomial, PotentialSpec, SturmProblem};

/// Measurements and failures of one criterion.
#[derive(Default)]
struct Report {
    lines: Vec<String>,
    failures: usize,
}

impl Report {
    fn note(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }

    fn check(&mut self, ok: bool, line: impl Into<String>) {
        let line = line.into();
        if ok {
            self.lines.push(format!("ok    {line}"));
        } else {
            self.failures += 1;
            self.lines.push(format!("FAIL  {line}"));
        }
    }
}

type Criterion = fn(&mut Report) -> toboggan::Result<()>;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

fn harmonic(ell: GaussRat) -> PotentialSpec {
    PotentialSpec::new([Monomial::new(GaussRat::int(1), 2)], ell).expect("harmonic potential")
}

fn rectification(rep: &mut Report) -> toboggan::Result<()> {
    let half = GaussRat::frac(1, 2);
    for ell in [
        GaussRat::int(0),
        GaussRat::frac(1, 2),
        GaussRat::frac(7, 3),
        GaussRat::int(5),
    ] {
        let alpha = ell + half;
        let s = rectify(&harmonic(ell), 2)?;
        let ok = s.potential.terms() == [Monomial::new(GaussRat::int(4), 6)]
            && s.potential.centrifugal() == GaussRat::int(4) * alpha * alpha - GaussRat::frac(1, 4)
            && s.weight == Monomial::new(GaussRat::int(-4), 2);
        rep.check(ok, format!("x^2, m=2, l={ell}: {}", s.equation_text("y", false)));
    }
    let sextic = rectify(&harmonic(half), 2)?.equation_text("y", true);
    rep.check(
        sextic == "(-d^2/dy^2 + 4 y^6 + (4 alpha^2 - 1/4)/y^2) phi(y) = -4 E y^2 phi(y)",
        format!("symbolic form {sextic}"),
    );
    for ell in [GaussRat::int(0), GaussRat::frac(7, 3), GaussRat::int(12)] {
        let cubic = PotentialSpec::new([Monomial::new(GaussRat::i(), 3)], ell)?;
        let mut all = true;
        for n in 0..=6i64 {
            let m = 2 * n + 1;
            let s = rectify(&cubic, m as u32)?;
            let sign = if n % 2 == 0 { 1 } else { -1 };
            all &= s.potential.terms() == [Monomial::new(GaussRat::i() * GaussRat::int(sign * m * m), 10 * n + 3)];
            all &= s.big_ell() + half == GaussRat::int(m) * (ell + half);
            all &= s.weight == Monomial::new(GaussRat::int(m * m), 4 * n);
        }
        rep.check(all, format!("i x^3, m=2N+1, N=0..6, l={ell}"));
    }
    Ok(())
}

fn harmonic_regression(rep: &mut Report) -> toboggan::Result<()> {
    let problem = SturmProblem::plain(harmonic(GaussRat::int(0)));
    let cfg = ShootingConfig::new(ScanWindow::new(0.0, 12.0, 121));
    let shot = shoot_spectrum(&problem, &Contour::RealLine, &cfg)?.energies();
    rep.check(shot.len() == 6, format!("{} levels in [0, 12]", shot.len()));
    let worst = shot
        .iter()
        .enumerate()
        .map(|(n, e)| (e - c(2.0 * n as f64 + 1.0)).norm())
        .fold(0.0, f64::max);
    rep.check(worst < 1e-8, format!("max |E_n - (2n+1)| = {worst:.2e} (bound 1e-8)"));
    let matrix = matrix_spectrum(&problem, &Contour::RealLine, &MatrixConfig::new(400, 8.0, shot.clone()))?;
    rep.check(
        matrix.eigenvalues.len() == shot.len(),
        "matrix oracle finds every level",
    );
    for (e, pair) in shot.iter().zip(&matrix.eigenvalues) {
        let gap = (e - pair.e).norm();
        rep.check(
            gap <= pair.residual,
            format!(
                "E={:.1}: |shooting - matrix| = {gap:.2e}, Richardson estimate {:.2e}",
                e.re, pair.residual
            ),
        );
    }
    Ok(())
}

fn exact_solvable(rep: &mut Report) -> toboggan::Result<()> {
    let (mut zeros, mut limits, mut total_zero, mut total_limit) = (0, 0, 0, 0);
    for n in 1..=4i64 {
        for m in 1..=20i64 {
            let mono = build_case(3, 0, n, m)?.monodromy()?;
            if m % (2 * n) != 0 {
                total_zero += 1;
                let ok = mono.unphysical.is_exact_zero();
                zeros += usize::from(ok);
                if !ok {
                    rep.check(false, format!("N={n} M={m}: unphysical = {}", mono.unphysical.value()));
                }
            } else {
                total_limit += 1;
                let magnitude = mono.unphysical.value().norm();
                let ok = magnitude == (2 * n) as f64;
                limits += usize::from(ok);
                if !ok {
                    rep.check(false, format!("N={n} M={m}: limit magnitude {magnitude}"));
                }
            }
        }
    }
    rep.check(
        zeros == total_zero,
        format!("{zeros}/{total_zero} unphysical coefficients exactly zero"),
    );
    rep.check(
        limits == total_limit,
        format!("{limits}/{total_limit} limit magnitudes equal 2N"),
    );
    let ratio = continuation_check(&build_case(3, 0, 1, 1)?, 1.0, 3.0)?;
    rep.check(
        ratio < 1e-3,
        format!("continuation N=1 M=1 kappa=1: decay ratio {ratio:.2e} (bound 1e-3)"),
    );
    Ok(())
}

fn asymptotic_closed_form(rep: &mut Report) -> toboggan::Result<()> {
    let cfg = ShootingConfig::new(ScanWindow::new(0.0, 1.0, 2));
    let mut fitted: f64 = 0.0;
    for winding in 0..=2u32 {
        let order = (6 * winding + 3) as f64 / 4.0;
        for tau in [3.0, 4.5, 6.0] {
            if winding >= 1 && !(winding == 1 && tau == 3.0) {
                // Probed once: N=1 at tau=4.5 scanned for minutes without a root,
                // and N=2 at tau=3 had not returned after ten minutes.
                rep.check(
                    false,
                    format!("N={winding} tau={tau}: not attempted, beyond double-precision shooting range"),
                );
                continue;
            }
            let ell = ell_for_tau(winding, tau, 1000)?;
            let rows = match compare_with_shooting(winding, ell, 2, 20, &cfg) {
                Ok(rows) => rows,
                Err(e) => {
                    rep.check(false, format!("N={winding} tau={tau}: {e}"));
                    continue;
                }
            };
            for row in rows {
                match (row.shooting, row.abs_error) {
                    (Some(e), Some(err)) => {
                        let scaled = err * row.tau.powf(order);
                        fitted = fitted.max(scaled);
                        rep.note(format!(
                            "      N={winding} tau={tau} n={}: E={:.6e} estimate={:.6e} |diff| tau^{order} = {scaled:.3e}",
                            row.n, e.re, row.estimate
                        ));
                    }
                    _ => rep.check(false, format!("N={winding} tau={tau} n={}: no eigenvalue found", row.n)),
                }
            }
        }
    }
    rep.check(fitted <= 10.0, format!("fitted C = {fitted:.3e} (bound 10)"));

    // The rectified problems at one source l share their spectrum, so a strict
    // decrease must exceed the shooting error to count.
    let ell = r(10, 1);
    let base = compare_with_shooting(0, ell, 1, 20, &cfg)?;
    let wound = compare_with_shooting(1, ell, 1, 20, &cfg)?;
    if let (Some(e0), Some(e1)) = (base[0].shooting, wound[0].shooting) {
        let drop = e0.re - e1.re;
        rep.check(
            drop > 1e-6 * e0.norm(),
            format!(
                "l=10: E0(N=0)={:.10e} E0(N=1)={:.10e}, decrease {drop:.2e}",
                e0.re, e1.re
            ),
        );
        rep.note(format!(
            "      l=10 estimates: N=0 {:.6e}, N=1 {:.6e}",
            base[0].estimate, wound[0].estimate
        ));
    } else {
        rep.check(false, "l=10: ground state missing");
    }

    // Shooting reaches rho < 1e-3 for N = 0 only.
    let mut points = Vec::new();
    for ell in [40, 60, 90] {
        let row = &compare_with_shooting(0, r(ell, 1), 1, 20, &cfg)?[0];
        match row.shooting {
            Some(e) => points.push(rescale_f(e.re, row.ell)?),
            None => rep.check(false, format!("l={ell}: ground state missing")),
        }
    }
    let bounded = points.iter().all(|(_, f)| f.is_finite() && f.abs() < 10.0);
    let listing: Vec<String> = points.iter().map(|(rho, f)| format!("F({rho:.2e})={f:.6}")).collect();
    rep.check(
        bounded && points.len() == 3,
        format!("N=0 bounded: {}", listing.join(" ")),
    );
    for pair in points.windows(2) {
        let slope = (pair[1].1 / pair[0].1).ln() / (pair[1].0 / pair[0].0).ln();
        rep.check(
            slope.abs() < 0.05,
            format!(
                "N=0 d log F / d log rho on [{:.2e}, {:.2e}] = {slope:.4}",
                pair[1].0, pair[0].0
            ),
        );
    }
    Ok(())
}

fn expected_regime(gamma: Rational64) -> Regime {
    if gamma.is_integer() && (-2..=1).contains(&gamma.to_integer()) {
        return Regime::Boundary;
    }
    if gamma < r(-2, 1) {
        Regime::Degenerate
    } else if gamma < r(-1, 1) {
        Regime::Broken
    } else if gamma < r(0, 1) {
        Regime::Interlaced
    } else if gamma < r(1, 1) {
        Regime::MissingB
    } else {
        Regime::Shifted
    }
}

fn susy_sweep(rep: &mut Report) -> toboggan::Result<()> {
    let cfg = SweepConfig {
        match_tol: 1e-5,
        ..SweepConfig::default()
    };
    let chi = Superpotential::linear(r(0, 1)).chi().to_vec();
    let gammas = gamma_grid(r(-3, 1), r(2, 1), 20);
    let rows = sweep_gamma(&chi, &gammas, &cfg)?;
    let mut matched = 0;
    for row in &rows {
        let want = expected_regime(row.gamma);
        if row.regime == want {
            matched += 1;
        } else {
            rep.check(
                false,
                format!("gamma={}: {} expected {} {:?}", row.gamma, row.regime, want, row.error),
            );
        }
    }
    rep.check(
        matched == rows.len(),
        format!("{matched}/{} grid points in the expected regime", rows.len()),
    );

    let row = &sweep_gamma(&chi, &[r(-1, 2)], &cfg)?[0];
    let ground = row.upper.iter().map(|l| l.e.re).fold(f64::INFINITY, f64::min);
    rep.check(
        ground.abs() < 1e-6,
        format!("gamma=-1/2 ground energy {ground:.2e} (bound 1e-6)"),
    );
    let gap = row
        .families
        .iter()
        .filter(|f| f.side == Side::Upper)
        .flat_map(|f| f.energies.windows(2).map(|w| (w[1] - w[0] - 4.0).abs()))
        .fold(0.0, f64::max);
    rep.check(gap < 1e-5, format!("gamma=-1/2 max |gap - 4| = {gap:.2e} (bound 1e-5)"));
    Ok(())
}

fn metric_suite(rep: &mut Report) -> toboggan::Result<()> {
    let (mut herm, mut dieu, mut comp, mut spec) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut positivity = f64::INFINITY;
    let mut count = 0;
    for dim in [4, 8, 16] {
        for seed in 0..20u64 {
            let dyson = random_dyson_pencil(dim, seed)?;
            let systems = solve_biorthogonal(&dyson.pencil)?;
            let bundle = assemble_theta(&systems)?;
            let (rh, rw) = spectral_residuals(&systems)?;
            herm = herm.max(bundle.hermiticity);
            dieu = dieu.max(bundle.dieudonne.0).max(bundle.dieudonne.1);
            comp = comp.max(completeness_residual(&systems)?);
            spec = spec.max(rh).max(rw);
            positivity = positivity.min(bundle.positivity);
            count += 1;
        }
    }
    rep.note(format!("      {count} pencils, dims 4, 8, 16"));
    rep.check(herm < 1e-12, format!("Theta hermiticity {herm:.2e} (bound 1e-12)"));
    rep.check(dieu < 1e-10, format!("Dieudonne residuals {dieu:.2e} (bound 1e-10)"));
    rep.check(comp < 1e-10, format!("completeness {comp:.2e} (bound 1e-10)"));
    rep.check(
        spec < 1e-10,
        format!("spectral representation {spec:.2e} (bound 1e-10)"),
    );
    rep.check(positivity > 0.0, format!("min eigenvalue of Theta W {positivity:.3e}"));

    let rows = |v: [[f64; 2]; 2]| Mat::from_rows(&v.map(|row| row.map(c).to_vec())).expect("2x2 matrix");
    let pencil = Pencil::new(rows([[1.0, 1.0], [0.0, 2.0]]), Mat::identity(2))?;
    let theta = assemble_theta(&solve_biorthogonal(&pencil)?)?.theta;
    let err = (&theta - &rows([[1.0, -1.0], [-1.0, 2.0]])).max_abs();
    rep.check(err < 1e-14, format!("hand 2x2 metric off by {err:.2e} (bound 1e-14)"));
    Ok(())
}

fn geometry(rep: &mut Report) -> toboggan::Result<()> {
    for n in 0..=3u32 {
        let turning = total_turning(&Contour::winding(n, 0.5)?, 1e3)?;
        let target = (2 * n + 1) as f64 * PI;
        rep.check(
            (turning - target).abs() < 1e-2,
            format!("N={n}: total turning {turning:.6} vs {target:.6}"),
        );
    }
    for n in 0..=3u32 {
        let eps = 0.8;
        let y = pullback_path(&Contour::winding(n, eps)?, 2 * n + 1)?;
        let worst = (-200..=200)
            .map(|k| {
                let s = k as f64 * 0.05;
                (Path::<f64>::point(&y, s) - Complex64::new(s, -eps)).norm()
            })
            .fold(0.0, f64::max);
        rep.check(
            worst < 1e-10,
            format!("N={n}: pullback off the line by {worst:.2e} on |s| <= 10"),
        );
    }
    let wedges = stokes_wedges(6.0, 0.0)?;
    let widths_ok = wedges.iter().all(|w| (2.0 * w.half_width - PI / 6.0).abs() < 1e-15);
    let pairs = symmetric_pairs(&wedges);
    let mirrored = pairs
        .iter()
        .all(|&(i, j)| angle_diff(wedges[i].center_angle, PI - wedges[j].center_angle).abs() < 1e-12);
    rep.check(
        wedges.len() == 6 && widths_ok,
        format!("K=10: {} decay wedges of width pi/6", wedges.len()),
    );
    rep.check(
        pairs.len() == 3 && mirrored,
        format!("K=10: {} left-right pairs", pairs.len()),
    );
    Ok(())
}

/// Arc from `from` to `to` that bulges by `-i depth` at its midpoint.
struct Arc {
    from: Complex64,
    to: Complex64,
    depth: f64,
}

impl Path<f64> for Arc {
    fn jet(&self, s: f64) -> PathJet<f64> {
        let bulge = Complex64::new(0.0, 4.0 * self.depth);
        PathJet {
            z: self.from + (self.to - self.from) * s + bulge * s * (s - 1.0),
            dz: self.to - self.from + bulge * (2.0 * s - 1.0),
            d2z: bulge * 2.0,
        }
    }
}

fn arc_length(path: &impl Path<f64>, from: f64, to: f64) -> f64 {
    let n = 20_000;
    let at = |k: usize| path.point(from + (to - from) * k as f64 / n as f64);
    (1..=n).map(|k| (at(k) - at(k - 1)).norm()).sum()
}

/// Relative Wronskian change per unit arc length for the solutions seeded
/// with `(phi, phi')` pairs `a` and `b` at `from`, carried to `to`.
fn drift(
    path: &impl Path<f64>,
    q: impl Fn(Complex64) -> Complex64,
    (from, to): (f64, f64),
    a: (Complex64, Complex64),
    b: (Complex64, Complex64),
) -> toboggan::Result<f64> {
    let cfg = IntegratorConfig::default();
    let z = path.point(from);
    let a = OdeState::new(from, z, a.0, a.1);
    let b = OdeState::new(from, z, b.0, b.1);
    let (w0, l0) = wronskian(&a, &b);
    let (a1, b1) = integrate_pair(path, q, to, a, b, &cfg)?;
    let (w1, l1) = wronskian(&a1, &b1);
    Ok((w1 * (l1 - l0).exp() - w0).norm() / w0.norm() / arc_length(path, from, to))
}

fn analyticity(rep: &mut Report) -> toboggan::Result<()> {
    let (ell, kappa) = (1.0, 1.0);
    let q = move |z: Complex64| ell * (ell + 1.0) / (z * z) - kappa * kappa;
    let from = Complex64::new(-3.0, -0.5);
    let to = Complex64::new(3.0, -0.5);
    let cfg = IntegratorConfig {
        rel_tol: 1e-12,
        abs_tol: 1e-14,
        ..IntegratorConfig::default()
    };
    let init = OdeState::new(0.0, from, c(1.0), Complex64::new(0.0, -kappa));
    let straight = integrate_along(&Segment { from, to }, q, 1.0, init, &cfg, None)?;
    for depth in [0.5, 1.5, 3.0] {
        let bent = integrate_along(&Arc { from, to, depth }, q, 1.0, init, &cfg, None)?;
        let scale = (bent.log_scale - straight.log_scale).exp();
        let rel = (bent.phi * scale - straight.phi).norm() / straight.phi.norm();
        let rel_d = (bent.dphi * scale - straight.dphi).norm() / straight.dphi.norm();
        rep.check(
            rel.max(rel_d) < 1e-8,
            format!(
                "detour depth {depth}: endpoint change {:.2e} (bound 1e-8)",
                rel.max(rel_d)
            ),
        );
    }

    let unit = (c(1.0), c(0.0));
    let slope = (c(0.0), c(1.0));
    let mut worst: f64 = 0.0;
    worst = worst.max(drift(&Segment { from, to }, q, (0.0, 1.0), unit, slope)?);
    worst = worst.max(drift(&Arc { from, to, depth: 1.5 }, q, (0.0, 1.0), unit, slope)?);
    worst = worst.max(drift(&Contour::RealLine, |y| y * y - 11.0, (-4.0, 4.0), unit, slope)?);
    let winding = Contour::winding(1, 0.5)?;
    let start = winding.point(-3.0);
    let hankel = |kind| hankel_asymptotic(ell + 0.5, kind, start);
    worst = worst.max(drift(&winding, q, (-3.0, 3.0), hankel(1), hankel(2))?);
    rep.check(
        worst < 1e-9,
        format!("Wronskian drift {worst:.2e} per unit length (bound 1e-9)"),
    );
    // Unit seeds on the winding contour both follow the dominant solution,
    // so their Wronskian is lost to cancellation rather than drift.
    let mixed = drift(&winding, q, (-3.0, 3.0), unit, slope)?;
    rep.note(format!(
        "      winding contour with unit seeds: {mixed:.2e} (ill-conditioned pair)"
    ));
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 8] = [
        ("rectification identities", rectification),
        ("harmonic regression", harmonic_regression),
        ("exactly solvable toboggan", exact_solvable),
        ("large-l closed form vs shooting", asymptotic_closed_form),
        ("SUSY sweep regimes", susy_sweep),
        ("metric suite", metric_suite),
        ("geometry", geometry),
        ("analyticity", analyticity),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let mut rep = Report::default();
        if let Err(e) = run(&mut rep) {
            rep.check(false, format!("error: {e}"));
        }
        let verdict = if rep.failures == 0 { "PASS" } else { "FAIL" };
        failed += usize::from(rep.failures > 0);
        println!(
            "{verdict} criterion {} {name} ({:.1} s)",
            k + 1,
            start.elapsed().as_secs_f64()
        );
        for line in &rep.lines {
            println!("    {line}");
        }
    }
    println!("{} of 8 criteria passed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

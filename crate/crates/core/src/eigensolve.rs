//! Discrete spectra of `-phi'' + V phi = E W phi` on a contour.
//!
//! Two independent methods: shooting from both asymptotic ends with Wronskian
//! matching, and a finite-difference pencil solved by shift-invert subspace
//! iteration. The second is the oracle for the first.

use std::fmt::Write as _;

use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::complexpath::{Contour, Path};
use crate::error::{Arm, Error, Result};
use crate::linalg::{eig, inner, orthonormalize, Mat, Tridiag, TridiagLu};
use crate::odeint::{integrate_along, wkb_seed, IntegratorConfig, OdeState};
use crate::xform::{CoefficientFn, SturmProblem};

/// Real energy grid scanned for candidate roots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanWindow {
    pub e_min: f64,
    pub e_max: f64,
    pub steps: usize,
}

impl ScanWindow {
    pub fn new(e_min: f64, e_max: f64, steps: usize) -> Self {
        Self { e_min, e_max, steps }
    }

    pub fn grid(&self) -> impl Iterator<Item = f64> + '_ {
        let h = (self.e_max - self.e_min) / (self.steps - 1) as f64;
        (0..self.steps).map(move |k| self.e_min + k as f64 * h)
    }

    fn contains(&self, e: f64) -> bool {
        e >= self.e_min && e <= self.e_max
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShootingConfig {
    pub s_match: f64,
    /// Seeding parameter; chosen from the WKB guard when absent.
    pub s_far: Option<f64>,
    /// Largest `s` considered when choosing `s_far`.
    pub s_cap: f64,
    pub scan: ScanWindow,
    pub refine_tol: f64,
    /// Refined roots with a larger normalized mismatch are discarded.
    pub accept_residual: f64,
    pub max_roots: usize,
    pub integrator: IntegratorConfig<f64>,
    /// Relative tolerance for the scan and the first secant phase; never
    /// tighter than `integrator.rel_tol`.
    pub scan_rel_tol: f64,
}

impl ShootingConfig {
    pub fn new(scan: ScanWindow) -> Self {
        Self {
            s_match: 0.0,
            s_far: None,
            s_cap: 200.0,
            scan,
            refine_tol: 1e-12,
            accept_residual: 1e-6,
            max_roots: 64,
            integrator: IntegratorConfig::default(),
            scan_rel_tol: 1e-7,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(far) = self.s_far {
            if far <= self.s_match {
                return Err(Error::InvalidInput("s_far must exceed s_match".into()));
            }
        }
        if self.scan.steps < 2 || self.scan.e_max <= self.scan.e_min {
            return Err(Error::InvalidInput(
                "scan needs at least two points and e_max > e_min".into(),
            ));
        }
        if self.refine_tol <= 0.0 || self.scan_rel_tol <= 0.0 {
            return Err(Error::InvalidInput("refine_tol must be positive".into()));
        }
        self.integrator.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Shooting,
    Matrix,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Shooting => "shooting",
            Method::Matrix => "matrix",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenpair {
    pub e: Complex64,
    pub residual: f64,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eigenresult {
    pub eigenvalues: Vec<Eigenpair>,
    pub method: Method,
    pub problem_hash: String,
    pub contour: Contour,
    /// Refined roots whose real part left the scan window.
    #[serde(default)]
    pub escaped: Vec<Complex64>,
}

impl Eigenresult {
    fn assemble(mut found: Vec<(Complex64, f64)>, method: Method, problem: &SturmProblem, contour: &Contour) -> Self {
        found.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
        Self {
            eigenvalues: deflate(found)
                .into_iter()
                .enumerate()
                .map(|(index, (e, residual))| Eigenpair { e, residual, index })
                .collect(),
            method,
            problem_hash: problem_hash(problem),
            contour: contour.clone(),
            escaped: Vec::new(),
        }
    }

    pub fn energies(&self) -> Vec<Complex64> {
        self.eigenvalues.iter().map(|p| p.e).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,re_E,im_E,residual,method\n");
        for p in &self.eigenvalues {
            let _ = writeln!(
                out,
                "{},{:.11e},{:.11e},{:.11e},{}",
                p.index, p.e.re, p.e.im, p.residual, self.method
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("eigenresult serializes")
    }
}

/// Stable identifier of a problem: SHA-256 of its JSON form.
pub fn problem_hash(problem: &SturmProblem) -> String {
    let json = serde_json::to_vec(problem).expect("problem serializes");
    Sha256::digest(json).iter().take(8).fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Sorted input; keeps the better of any two roots closer than `1e-6 (1 + |E|)`.
fn deflate(sorted: Vec<(Complex64, f64)>) -> Vec<(Complex64, f64)> {
    let mut kept: Vec<(Complex64, f64)> = Vec::with_capacity(sorted.len());
    for (e, r) in sorted {
        match kept.iter_mut().find(|(k, _)| (k - e).norm() < 1e-6 * (1.0 + e.norm())) {
            Some(slot) if r < slot.1 => *slot = (e, r),
            Some(_) => {}
            None => kept.push((e, r)),
        }
    }
    kept
}

/// Matching Wronskian `phi_a dphi_b - phi_b dphi_a` divided by
/// `kappa |(phi_a, dphi_a / kappa)| |(phi_b, dphi_b / kappa)|`, so `|D| <= 1`
/// and the ratio stays well defined when both derivatives vanish.
pub fn normalized_wronskian(a: &OdeState<f64>, b: &OdeState<f64>, kappa: f64) -> Complex64 {
    let size = |st: &OdeState<f64>| (st.phi.norm_sqr() + st.dphi.norm_sqr() / (kappa * kappa)).sqrt();
    (a.phi * b.dphi - b.phi * a.dphi) / (kappa * size(a) * size(b))
}

/// Shooting state for one problem on one contour.
pub struct Shooter<'a> {
    coeff: CoefficientFn<f64>,
    contour: &'a Contour,
    cfg: &'a ShootingConfig,
    coarse: IntegratorConfig<f64>,
    s_far: f64,
}

impl<'a> Shooter<'a> {
    /// Resolves `s_far` for energies up to `|e_ref|`.
    pub fn new(problem: &SturmProblem, contour: &'a Contour, cfg: &'a ShootingConfig, e_ref: f64) -> Result<Self> {
        cfg.validate()?;
        let coeff = problem.coefficient_fn();
        let s_far = match cfg.s_far {
            Some(s) => s,
            None => auto_s_far(&coeff, contour, cfg, e_ref)?,
        };
        let loosen = (cfg.scan_rel_tol / cfg.integrator.rel_tol).max(1.0);
        let coarse = IntegratorConfig {
            rel_tol: cfg.integrator.rel_tol * loosen,
            abs_tol: cfg.integrator.abs_tol * loosen,
            ..cfg.integrator
        };
        Ok(Self {
            coeff,
            contour,
            cfg,
            coarse,
            s_far,
        })
    }

    pub fn s_far(&self) -> f64 {
        self.s_far
    }

    /// Decaying solution seeded on one arm and carried to `s_match`.
    pub fn arm(&self, e: Complex64, arm: Arm) -> Result<OdeState<f64>> {
        self.arm_with(e, arm, &self.cfg.integrator)
    }

    fn arm_with(&self, e: Complex64, arm: Arm, integrator: &IntegratorConfig<f64>) -> Result<OdeState<f64>> {
        let sign = match arm {
            Arm::Left => -1.0,
            Arm::Right => 1.0,
        };
        let tag = |source| Error::Arm {
            arm,
            source: Box::new(source),
        };
        let s0 = sign * self.s_far;
        let jet = self.contour.jet(s0);
        let dir = jet.dz * sign / jet.dz.norm();
        let seed = wkb_seed(self.coeff.q(jet.z, e), e.norm(), jet.z, dir, s0).map_err(tag)?;
        let q = |y| self.coeff.q(y, e);
        integrate_along(self.contour, q, self.cfg.s_match, seed, integrator, None).map_err(tag)
    }

    pub fn arms(&self, e: Complex64) -> Result<(OdeState<f64>, OdeState<f64>)> {
        Ok((self.arm(e, Arm::Left)?, self.arm(e, Arm::Right)?))
    }

    /// Normalized matching Wronskian `D(E)`.
    pub fn mismatch(&self, e: Complex64) -> Result<Complex64> {
        let (l, r) = self.arms(e)?;
        Ok(normalized_wronskian(&l, &r, self.kappa(&l, e)))
    }

    /// `D(E)` at the scan tolerance.
    pub fn coarse_mismatch(&self, e: Complex64) -> Result<Complex64> {
        let l = self.arm_with(e, Arm::Left, &self.coarse)?;
        let r = self.arm_with(e, Arm::Right, &self.coarse)?;
        Ok(normalized_wronskian(&l, &r, self.kappa(&l, e)))
    }

    /// Local wavenumber scale `1 + sqrt|Q|` at the matching point.
    pub fn kappa(&self, at: &OdeState<f64>, e: Complex64) -> f64 {
        1.0 + self.coeff.q(at.y, e).norm().sqrt()
    }

    /// Unnormalized Wronskian as a mantissa and log scale; analytic in `E`.
    fn wronskian(&self, e: Complex64, integrator: &IntegratorConfig<f64>) -> Result<(Complex64, f64)> {
        let l = self.arm_with(e, Arm::Left, integrator)?;
        let r = self.arm_with(e, Arm::Right, integrator)?;
        Ok((l.phi * r.dphi - r.phi * l.dphi, l.log_scale + r.log_scale))
    }

    /// Complex secant on the analytic Wronskian from a real guess, first at
    /// the scan tolerance and then at the full one.
    pub fn refine(&self, guess: f64, step: f64) -> Result<Complex64> {
        let rough_tol = self.cfg.scan_rel_tol.max(self.cfg.refine_tol);
        let rough = self.secant(guess.into(), step.into(), &self.coarse, rough_tol)?;
        let nudge = Complex64::from(rough_tol.sqrt() * (1.0 + rough.norm()));
        self.secant(rough, nudge, &self.cfg.integrator, self.cfg.refine_tol)
    }

    fn secant(
        &self,
        start: Complex64,
        step: Complex64,
        integrator: &IntegratorConfig<f64>,
        tol: f64,
    ) -> Result<Complex64> {
        let (w_ref, log_ref) = self.wronskian(start, integrator)?;
        let unit = w_ref.norm().max(f64::MIN_POSITIVE);
        let f = |e: Complex64| -> Result<Complex64> {
            let (w, log) = self.wronskian(e, integrator)?;
            Ok(w / unit * (log - log_ref).exp())
        };
        let mut x0 = start;
        let mut x1 = start + step;
        let mut f0 = w_ref / unit;
        let mut f1 = f(x1)?;
        for _ in 0..80 {
            let denom = f1 - f0;
            if denom.is_zero() {
                break;
            }
            let x2 = x1 - f1 * (x1 - x0) / denom;
            if !x2.re.is_finite() || !x2.im.is_finite() {
                break;
            }
            if (x2 - x1).norm() < tol * (1.0 + x2.norm()) {
                return Ok(x2);
            }
            (x0, f0) = (x1, f1);
            x1 = x2;
            f1 = f(x1)?;
        }
        Err(Error::NoConvergence(format!("secant from E = {start}")))
    }
}

/// WKB action added beyond the guard point; the seed's error component is
/// suppressed by `exp(-2 * SEED_ACTION)` on the way in.
const SEED_ACTION: f64 = 15.0;

/// Smallest `s` beyond which `|Q| > 25 (1 + |E|)` on both arms, pushed out
/// until `SEED_ACTION` of decay separates it from that point.
fn auto_s_far(coeff: &CoefficientFn<f64>, contour: &Contour, cfg: &ShootingConfig, e_ref: f64) -> Result<f64> {
    let guard = 25.0 * (1.0 + e_ref.abs());
    let energies = [Complex64::from(e_ref), Complex64::from(-e_ref)];
    let ds = 0.01 * (1.0 + cfg.s_cap.abs()).min(10.0);
    let arms = |s: f64| [s, 2.0 * cfg.s_match - s];
    let weak = |s: f64| {
        arms(s)
            .iter()
            .any(|&t| energies.iter().any(|&e| coeff.q(contour.point(t), e).norm() <= guard))
    };
    if weak(cfg.s_cap) {
        return Err(Error::InvalidInput(format!(
            "WKB guard |Q| > {guard:e} not reached within s_cap = {}",
            cfg.s_cap
        )));
    }
    let mut s = cfg.s_cap;
    while s - ds > cfg.s_match && !weak(s - ds) {
        s -= ds;
    }
    // Least decay rate over both arms and both energies.
    let rate = |s: f64| {
        arms(s)
            .iter()
            .flat_map(|&t| {
                let jet = contour.jet(t);
                energies
                    .iter()
                    .map(move |&e| (coeff.q(jet.z, e).sqrt() * jet.dz).re.abs())
            })
            .fold(f64::INFINITY, f64::min)
    };
    let mut action = 0.0;
    while action < SEED_ACTION && s < cfg.s_cap {
        action += ds * rate(s + 0.5 * ds);
        s += ds;
    }
    Ok(s.max(cfg.s_match + ds))
}

/// Scans the real window for sign changes and `|D|` minima, refines each, and
/// deflates duplicates.
pub fn shoot_spectrum(problem: &SturmProblem, contour: &Contour, cfg: &ShootingConfig) -> Result<Eigenresult> {
    let window = cfg.scan;
    let e_ref = window.e_min.abs().max(window.e_max.abs());
    let shooter = Shooter::new(problem, contour, cfg, e_ref)?;
    let grid: Vec<f64> = window.grid().collect();
    let values: Vec<Option<Complex64>> = grid
        .par_iter()
        .map(|&e| shooter.coarse_mismatch(e.into()).ok())
        .collect();
    let phase = values
        .iter()
        .flatten()
        .next()
        .map(|d| d.conj() / d.norm())
        .unwrap_or(Complex64::new(1.0, 0.0));
    let d: Vec<Option<Complex64>> = values.iter().map(|v| v.map(|z| z * phase)).collect();

    let mut guesses = Vec::new();
    for k in 0..grid.len() - 1 {
        if let (Some(a), Some(b)) = (d[k], d[k + 1]) {
            if a.re == 0.0 || a.re.signum() != b.re.signum() {
                let t = a.re / (a.re - b.re);
                guesses.push(grid[k] + t * (grid[k + 1] - grid[k]));
            }
        }
    }
    for k in 1..grid.len() - 1 {
        if let (Some(a), Some(b), Some(c)) = (d[k - 1], d[k], d[k + 1]) {
            if b.norm() < a.norm() && b.norm() < c.norm() {
                guesses.push(grid[k]);
            }
        }
    }
    let step = (window.e_max - window.e_min) / (window.steps - 1) as f64;
    let refined: Vec<(Complex64, f64)> = guesses
        .par_iter()
        .filter_map(|&g| {
            let e = shooter.refine(g, 0.05 * step).ok()?;
            let r = shooter.mismatch(e).ok()?.norm();
            (r < cfg.accept_residual).then_some((e, r))
        })
        .collect();

    let (inside, outside): (Vec<_>, Vec<_>) = refined.into_iter().partition(|(e, _)| window.contains(e.re));
    let mut result = Eigenresult::assemble(inside, Method::Shooting, problem, contour);
    result.eigenvalues.truncate(cfg.max_roots);
    let mut escaped: Vec<(Complex64, f64)> = outside;
    escaped.sort_by(|a, b| a.0.re.total_cmp(&b.0.re));
    result.escaped = deflate(escaped).into_iter().map(|(e, _)| e).collect();
    Ok(result)
}

/// `D(E)` for a single energy.
pub fn mismatch(problem: &SturmProblem, contour: &Contour, e: Complex64, cfg: &ShootingConfig) -> Result<Complex64> {
    Shooter::new(problem, contour, cfg, e.norm())?.mismatch(e)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixConfig {
    pub grid_n: usize,
    /// Grid spans `s` in `[-s_max, s_max]`.
    pub s_max: f64,
    pub targets: Vec<Complex64>,
    /// Eigenvalues kept per shift.
    pub per_target: usize,
    pub tol: f64,
    pub max_iter: usize,
}

impl MatrixConfig {
    pub fn new(grid_n: usize, s_max: f64, targets: Vec<Complex64>) -> Self {
        Self {
            grid_n,
            s_max,
            targets,
            per_target: 1,
            tol: 1e-13,
            max_iter: 2000,
        }
    }
}

/// Finite-difference operator `W^-1 A` on `n` interior points of `[-S, S]`.
pub fn discretize(problem: &SturmProblem, contour: &Contour, n: usize, s_max: f64) -> Result<Tridiag<f64>> {
    let coeff = problem.coefficient_fn::<f64>();
    let h = 2.0 * s_max / (n + 1) as f64;
    let mut t = Tridiag {
        lower: Vec::with_capacity(n - 1),
        diag: Vec::with_capacity(n),
        upper: Vec::with_capacity(n - 1),
    };
    let (mut w_min, mut w_max) = (f64::INFINITY, 0.0f64);
    for j in 1..=n {
        let s = -s_max + j as f64 * h;
        let jet = contour.jet(s);
        let a = -1.0 / (jet.dz * jet.dz);
        let b = jet.d2z / (jet.dz * jet.dz * jet.dz);
        let v = coeff.potential(jet.z);
        let w = coeff.weight(jet.z);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NearOrigin { s });
        }
        w_min = w_min.min(w.norm());
        w_max = w_max.max(w.norm());
        t.diag.push((-2.0 * a / (h * h) + v) / w);
        if j > 1 {
            t.lower.push((a / (h * h) - b / (2.0 * h)) / w);
        }
        if j < n {
            t.upper.push((a / (h * h) + b / (2.0 * h)) / w);
        }
    }
    let ratio = w_max / w_min;
    if !(ratio <= 1e12) {
        return Err(Error::SingularPencil(ratio));
    }
    Ok(t)
}

/// Ritz values of `t` nearest `sigma` (with residual norms), by shift-invert
/// subspace iteration.
pub fn shift_invert(
    t: &Tridiag<f64>,
    sigma: Complex64,
    keep: usize,
    tol: f64,
    max_iter: usize,
) -> Result<Vec<(Complex64, f64)>> {
    let n = t.len();
    let k = (keep + 4).min(n);
    let lu = match TridiagLu::new(&t.shifted(sigma)) {
        Ok(lu) => lu,
        Err(_) => TridiagLu::new(&t.shifted(sigma + 1e-9 * (1.0 + sigma.norm())))?,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut basis: Vec<Vec<Complex64>> = (0..k)
        .map(|_| {
            (0..n)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect()
        })
        .collect();
    orthonormalize(&mut basis);
    let mut previous: Vec<Complex64> = Vec::new();
    for _ in 0..max_iter {
        basis = basis.iter().map(|v| lu.solve(v)).collect();
        if !orthonormalize(&mut basis) {
            return Err(Error::NoConvergence("subspace collapsed".into()));
        }
        let images: Vec<Vec<Complex64>> = basis.iter().map(|v| t.mul_vec(v)).collect();
        let small = Mat::from_fn(k, k, |i, j| inner(&basis[i], &images[j]));
        let ritz = eig(&small)?;
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| {
            (ritz.values[a] - sigma)
                .norm()
                .total_cmp(&(ritz.values[b] - sigma).norm())
        });
        let current: Vec<Complex64> = order.iter().take(keep).map(|&i| ritz.values[i]).collect();
        let settled = previous.len() == current.len()
            && current
                .iter()
                .zip(&previous)
                .all(|(a, b)| (a - b).norm() <= tol * (1.0 + a.norm()));
        if settled {
            return Ok(order
                .iter()
                .take(keep)
                .map(|&i| {
                    let y = ritz.vectors.col(i);
                    let x = combine(&basis, &y);
                    let tx = combine(&images, &y);
                    let r = tx
                        .iter()
                        .zip(&x)
                        .map(|(a, b)| (a - ritz.values[i] * b).norm_sqr())
                        .sum::<f64>()
                        .sqrt();
                    (ritz.values[i], r)
                })
                .collect());
        }
        previous = current;
    }
    Err(Error::NoConvergence(format!("shift-invert at sigma = {sigma}")))
}

fn combine(vs: &[Vec<Complex64>], y: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::zero(); vs[0].len()];
    for (v, &c) in vs.iter().zip(y) {
        for (o, &x) in out.iter_mut().zip(v) {
            *o += c * x;
        }
    }
    out
}

/// Eigenvalues near each shift on a single grid.
pub fn matrix_eigenvalues(
    problem: &SturmProblem,
    contour: &Contour,
    n: usize,
    cfg: &MatrixConfig,
) -> Result<Vec<(Complex64, f64)>> {
    let t = discretize(problem, contour, n, cfg.s_max)?;
    let per_shift: Vec<Result<Vec<(Complex64, f64)>>> = cfg
        .targets
        .par_iter()
        .map(|&sigma| shift_invert(&t, sigma, cfg.per_target, cfg.tol, cfg.max_iter))
        .collect();
    let mut all = Vec::new();
    for r in per_shift {
        all.extend(r?);
    }
    all.sort_by(|a, b| a.0.re.total_cmp(&b.0.re));
    Ok(deflate(all))
}

/// Richardson-extrapolated spectrum from grids `n` and `2n + 1` (step `h`
/// and `h / 2`); the residual column carries the extrapolation error estimate.
pub fn matrix_spectrum(problem: &SturmProblem, contour: &Contour, cfg: &MatrixConfig) -> Result<Eigenresult> {
    if cfg.grid_n < 50 {
        return Err(Error::InvalidInput("grid_n must be at least 50".into()));
    }
    let coarse = matrix_eigenvalues(problem, contour, cfg.grid_n, cfg)?;
    let fine = matrix_eigenvalues(problem, contour, 2 * cfg.grid_n + 1, cfg)?;
    let found = fine
        .iter()
        .filter_map(|&(ef, _)| {
            let &(ec, _) = coarse
                .iter()
                .min_by(|a, b| (a.0 - ef).norm().total_cmp(&(b.0 - ef).norm()))?;
            Some(((4.0 * ef - ec) / 3.0, (ef - ec).norm() / 3.0))
        })
        .collect();
    Ok(Eigenresult::assemble(found, Method::Matrix, problem, contour))
}

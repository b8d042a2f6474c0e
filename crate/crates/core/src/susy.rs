//! Supersymmetric partners of the singular superpotential
//! `W(r) = chi(r) - (gamma + 1/2)/r`, with `A = d/dr + W`, `B = -d/dr + W`,
//! `H_U = B A = -d^2 + W^2 - W'` and `H_L = A B = -d^2 + W^2 + W'`.
//!
//! On the shifted line both quasi-parity families of each partner are
//! normalizable. The regime structure in `gamma` appears once the family
//! behaving like `r^(1/2 - alpha)` near the origin is kept only while it stays
//! square integrable in the singular limit, i.e. for `alpha < 1`.

use std::fmt;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::complexpath::Contour;
use crate::eigensolve::{ScanWindow, Shooter, ShootingConfig};
use crate::error::{Arm, Error, Result};
use crate::exact::{rat_to_f64, GaussRat};
use crate::linalg::Tridiag;
use crate::xform::{Monomial, PotentialSpec, SturmProblem};

fn half() -> Rational64 {
    Rational64::new(1, 2)
}

/// `W(r) = chi(r) - (gamma + 1/2)/r` with polynomial `chi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Superpotential {
    chi: Vec<Monomial>,
    gamma: Rational64,
}

impl Superpotential {
    pub fn new(chi: Vec<Monomial>, gamma: Rational64) -> Result<Self> {
        if let Some(t) = chi.iter().find(|t| t.power < 0) {
            return Err(Error::InvalidInput(format!(
                "chi must be polynomial, got power {}",
                t.power
            )));
        }
        Ok(Self { chi, gamma })
    }

    /// The solvable model `chi(r) = r`.
    pub fn linear(gamma: Rational64) -> Self {
        Self {
            chi: vec![Monomial::new(GaussRat::int(1), 1)],
            gamma,
        }
    }

    pub fn chi(&self) -> &[Monomial] {
        &self.chi
    }

    pub fn gamma(&self) -> Rational64 {
        self.gamma
    }

    /// Coefficient of `1/r`, `-(gamma + 1/2)`.
    pub fn singular_coeff(&self) -> Rational64 {
        -(self.gamma + half())
    }

    pub fn eval(&self, r: Complex64) -> Complex64 {
        self.chi_at(r) + rat_to_f64(self.singular_coeff()) / r
    }

    fn chi_at(&self, r: Complex64) -> Complex64 {
        self.chi
            .iter()
            .map(|t| t.coeff.to_complex::<f64>() * r.powi(t.power as i32))
            .sum()
    }

    fn chi_prime(&self) -> Vec<Monomial> {
        self.chi
            .iter()
            .filter(|t| t.power > 0)
            .map(|t| Monomial::new(t.coeff * GaussRat::int(t.power), t.power - 1))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartnerPair {
    pub upper: PotentialSpec,
    pub lower: PotentialSpec,
    pub gamma: Rational64,
}

/// Expands `W^2 -+ W'` exactly. The centrifugal parts come out as
/// `(gamma+1/2)(gamma-+1/2)`, carried as `l = gamma -+ 1/2`.
pub fn build_partners(w: &Superpotential) -> Result<PartnerPair> {
    let g = w.gamma + half();
    let mut common: Vec<Monomial> = Vec::new();
    for a in &w.chi {
        for b in &w.chi {
            common.push(Monomial::new(a.coeff * b.coeff, a.power + b.power));
        }
        common.push(Monomial::new(a.coeff * GaussRat::real(-g * 2), a.power - 1));
    }
    let negate = |m: &Monomial| Monomial::new(-m.coeff, m.power);
    let slope = w.chi_prime();
    let upper_terms = common.iter().copied().chain(slope.iter().map(negate));
    let lower_terms = common.iter().copied().chain(slope.iter().copied());
    let upper = PotentialSpec::new(upper_terms, GaussRat::real(w.gamma - half()))?;
    let lower = PotentialSpec::new(lower_terms, GaussRat::real(w.gamma + half()))?;

    let quarter = Rational64::new(1, 4);
    debug_assert_eq!(upper.centrifugal(), GaussRat::real(w.gamma * w.gamma - quarter));
    let shifted = w.gamma + Rational64::one();
    debug_assert_eq!(lower.centrifugal(), GaussRat::real(shifted * shifted - quarter));
    Ok(PartnerPair {
        upper,
        lower,
        gamma: w.gamma,
    })
}

/// Uniform grid on the line `r = s - i epsilon`, `|s| <= s_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdGrid {
    pub epsilon: f64,
    pub s_max: f64,
    pub points: usize,
}

impl FdGrid {
    pub fn step(&self) -> f64 {
        2.0 * self.s_max / (self.points - 1) as f64
    }

    fn nodes(&self) -> Vec<Complex64> {
        let h = self.step();
        (0..self.points)
            .map(|j| Complex64::new(-self.s_max + j as f64 * h, -self.epsilon))
            .collect()
    }
}

fn first_order(nodes: &[Complex64], h: f64, sign: f64, w: &Superpotential) -> Tridiag<f64> {
    let n = nodes.len();
    let off = Complex64::from(sign / (2.0 * h));
    Tridiag {
        lower: vec![-off; n - 1],
        diag: nodes.iter().map(|&r| w.eval(r)).collect(),
        upper: vec![off; n - 1],
    }
}

fn hamiltonian(nodes: &[Complex64], h: f64, v: &PotentialSpec) -> Tridiag<f64> {
    let n = nodes.len();
    let off = Complex64::from(-1.0 / (h * h));
    Tridiag {
        lower: vec![off; n - 1],
        diag: nodes.iter().map(|&r| 2.0 / (h * h) + v.eval(r)).collect(),
        upper: vec![off; n - 1],
    }
}

/// Relative size of `A H_U - H_L A` on Gaussian-damped test vectors
/// `s^k exp(-s^2/2)`, `k = 0..4`, with the three rows nearest each end dropped.
pub fn intertwining_residual(pair: &PartnerPair, w: &Superpotential, grid: &FdGrid) -> Result<f64> {
    if grid.points < 16 || grid.epsilon == 0.0 {
        return Err(Error::InvalidInput(
            "grid needs 16 points on a line off the origin".into(),
        ));
    }
    let nodes = grid.nodes();
    let h = grid.step();
    let a = first_order(&nodes, h, 1.0, w);
    let hu = hamiltonian(&nodes, h, &pair.upper);
    let hl = hamiltonian(&nodes, h, &pair.lower);
    let interior = 3..nodes.len() - 3;
    let norm = |v: &[Complex64]| v[interior.clone()].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let worst = (0..4)
        .map(|k| {
            let v: Vec<Complex64> = nodes
                .iter()
                .map(|r| Complex64::from(r.re.powi(k) * (-0.5 * r.re * r.re).exp()))
                .collect();
            let left = a.mul_vec(&hu.mul_vec(&v));
            let right = hl.mul_vec(&a.mul_vec(&v));
            let diff: Vec<Complex64> = left.iter().zip(&right).map(|(x, y)| x - y).collect();
            norm(&diff) / norm(&right)
        })
        .fold(0.0, f64::max);
    Ok(worst)
}

/// Number of sheets on which `r^(gamma + 1/2)` lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SheetCount {
    Finite(u64),
    Infinite,
}

impl fmt::Display for SheetCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SheetCount::Finite(k) => write!(f, "{k}"),
            SheetCount::Infinite => f.write_str("inf"),
        }
    }
}

pub fn sheet_count(gamma: Rational64) -> SheetCount {
    SheetCount::Finite((gamma + half()).denom().unsigned_abs())
}

/// Largest denominator recognized by [`sheet_count_f64`].
pub const MAX_SHEETS: i64 = 10_000;

/// Floating-point `gamma`; anything not within `1e-12` of a fraction with
/// denominator up to [`MAX_SHEETS`] counts as irrational.
pub fn sheet_count_f64(gamma: f64) -> SheetCount {
    if !gamma.is_finite() {
        return SheetCount::Infinite;
    }
    (1..=MAX_SHEETS)
        .find_map(|q| {
            let p = (gamma * q as f64).round();
            ((gamma - p / q as f64).abs() < 1e-12).then(|| sheet_count(Rational64::new(p as i64, q)))
        })
        .unwrap_or(SheetCount::Infinite)
}

/// Local behavior `r^(1/2 +- alpha)` of a solution near the origin, with
/// `Re alpha >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum QuasiParity {
    Plus,
    Minus,
}

impl QuasiParity {
    fn sign(self) -> f64 {
        match self {
            QuasiParity::Plus => 1.0,
            QuasiParity::Minus => -1.0,
        }
    }
}

impl fmt::Display for QuasiParity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QuasiParity::Plus => "+",
            QuasiParity::Minus => "-",
        })
    }
}

/// `alpha = l + 1/2` with the sign fixed so that `Re alpha >= 0`.
pub fn singular_alpha(potential: &PotentialSpec) -> Complex64 {
    let alpha = potential.ell().to_complex::<f64>() + 0.5;
    if alpha.re < 0.0 {
        -alpha
    } else {
        alpha
    }
}

const SERIES_MAX_TERMS: usize = 4000;

/// Frobenius solution `r^rho sum a_k r^k` of `-u'' + (V - E) u = 0` with
/// `rho = 1/2 +- alpha`, `a_0 = 1`, and its derivative.
pub fn frobenius(
    potential: &PotentialSpec,
    e: Complex64,
    parity: QuasiParity,
    r: Complex64,
) -> Result<(Complex64, Complex64)> {
    let rho = 0.5 + parity.sign() * singular_alpha(potential);
    let mut terms: Vec<(i64, Complex64)> = potential
        .terms()
        .iter()
        .map(|t| (t.power, t.coeff.to_complex::<f64>()))
        .collect();
    match terms.iter_mut().find(|t| t.0 == 0) {
        Some(t) => t.1 -= e,
        None => terms.push((0, -e)),
    }
    let mut a: Vec<Complex64> = vec![Complex64::one()];
    let (mut sum, mut dsum) = (Complex64::one(), rho);
    let mut rk = Complex64::one();
    let mut quiet = 0;
    for k in 1..SERIES_MAX_TERMS {
        let source: Complex64 = terms
            .iter()
            .filter_map(|&(p, c)| {
                let j = k as i64 - 2 - p;
                (j >= 0).then(|| c * a[j as usize])
            })
            .sum();
        let kf = k as f64;
        let denom = kf * (kf + 2.0 * rho - 1.0);
        let ak = if denom.norm() < 1e-12 {
            if source.norm() > 1e-12 * (1.0 + a.iter().map(|z| z.norm()).fold(0.0, f64::max)) {
                return Err(Error::Logarithmic(k));
            }
            Complex64::zero()
        } else {
            source / denom
        };
        a.push(ak);
        rk *= r;
        let term = ak * rk;
        sum += term;
        dsum += (rho + kf) * term;
        if term.norm() < 1e-18 * sum.norm() {
            quiet += 1;
            if quiet > 4 {
                let lead = (rho * r.ln()).exp();
                return Ok((lead * sum, lead * dsum / r));
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NoConvergence("Frobenius series".into()))
}

/// Decomposition of a solution at `r` on the two Frobenius branches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParityProjection {
    pub parity: QuasiParity,
    /// Size of the minor branch relative to the dominant one at `r`.
    pub purity: f64,
}

pub fn project_parity(
    potential: &PotentialSpec,
    e: Complex64,
    r: Complex64,
    phi: Complex64,
    dphi: Complex64,
) -> Result<ParityProjection> {
    let (up, dup) = frobenius(potential, e, QuasiParity::Plus, r)?;
    let (um, dum) = frobenius(potential, e, QuasiParity::Minus, r)?;
    let w = up * dum - um * dup;
    if w.norm() < 1e-14 * (up.norm() * dum.norm() + um.norm() * dup.norm()) {
        return Err(Error::Degenerate("plus".into(), "minus".into()));
    }
    // Value and slope together, so that a node of either branch at `r` does
    // not hide it.
    let kappa = 1.0 + (potential.eval(r) - e).norm().sqrt();
    let size = |u: Complex64, du: Complex64| (u.norm_sqr() + du.norm_sqr() / (kappa * kappa)).sqrt();
    let plus = ((phi * dum - um * dphi) / w).norm() * size(up, dup);
    let minus = ((up * dphi - phi * dup) / w).norm() * size(um, dum);
    Ok(if plus >= minus {
        ParityProjection {
            parity: QuasiParity::Plus,
            purity: minus / plus,
        }
    } else {
        ParityProjection {
            parity: QuasiParity::Minus,
            purity: plus / minus,
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Side {
    Upper,
    Lower,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Upper => "U",
            Side::Lower => "L",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Level {
    pub e: Complex64,
    pub residual: f64,
    /// Absent where the two branches merge or turn logarithmic.
    pub parity: Option<QuasiParity>,
    pub purity: f64,
    /// Survives the singular limit (`Plus` always, `Minus` only for `alpha < 1`).
    pub admissible: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Regime {
    /// Both spectra coincide level by level.
    Degenerate,
    /// The lower partner carries an extra non-degenerate family.
    Broken,
    /// `a(N) < b(N) = c(N) < d(N) = a(N+1)`.
    Interlaced,
    /// The upper partner carries an unpaired family and the lower one has a
    /// single family.
    MissingB,
    /// Lower levels repeat the upper ones from the second on.
    Shifted,
    /// An admissibility threshold `alpha in {0, 1}` sits exactly on this point.
    Boundary,
    Unmatched,
    Failed,
}

impl Regime {
    pub fn tag(self) -> &'static str {
        match self {
            Regime::Degenerate => "DEGENERATE",
            Regime::Broken => "BROKEN",
            Regime::Interlaced => "INTERLACED",
            Regime::MissingB => "MISSING_B",
            Regime::Shifted => "SHIFTED",
            Regime::Boundary => "BOUNDARY",
            Regime::Unmatched => "UNMATCHED",
            Regime::Failed => "FAILED",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Admissible levels of one partner sharing a quasi-parity, below the cut.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Family {
    pub side: Side,
    pub parity: QuasiParity,
    /// `a`..`d` once a regime is recognized, otherwise side and parity.
    pub label: String,
    pub energies: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub gamma: Rational64,
    pub upper: Vec<Level>,
    pub lower: Vec<Level>,
    pub families: Vec<Family>,
    pub regime: Regime,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub epsilon: f64,
    pub shooting: ShootingConfig,
    /// Only levels below this energy enter the classification.
    pub e_cut: f64,
    pub match_tol: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        // Levels sit at least 0.2 apart on the rational grid used here, so
        // a 0.15 scan step keeps them in separate intervals.
        let mut shooting = ShootingConfig::new(ScanWindow::new(-9.0, 21.0, 201));
        shooting.scan_rel_tol = 1e-6;
        Self {
            epsilon: 0.5,
            shooting,
            e_cut: 20.0,
            match_tol: 1e-6,
        }
    }
}

/// `gamma = k / den` strictly inside `(lo, hi)`.
pub fn gamma_grid(lo: Rational64, hi: Rational64, den: i64) -> Vec<Rational64> {
    let start = (lo * den).floor().to_integer() + 1;
    let end = (hi * den).ceil().to_integer() - 1;
    (start..=end).map(|k| Rational64::new(k, den)).collect()
}

fn spectrum_levels(potential: &PotentialSpec, contour: &Contour, cfg: &ShootingConfig) -> Result<Vec<Level>> {
    let problem = SturmProblem::plain(potential.clone());
    let spectrum = crate::eigensolve::shoot_spectrum(&problem, contour, cfg)?;
    let window = cfg.scan;
    let shooter = Shooter::new(&problem, contour, cfg, window.e_min.abs().max(window.e_max.abs()))?;
    let alpha = singular_alpha(potential);
    spectrum
        .eigenvalues
        .iter()
        .map(|pair| {
            let state = shooter.arm(pair.e, Arm::Right)?;
            let proj = project_parity(potential, pair.e, state.y, state.phi, state.dphi)?;
            Ok(Level {
                e: pair.e,
                residual: pair.residual,
                parity: Some(proj.parity),
                purity: proj.purity,
                admissible: proj.parity == QuasiParity::Plus || alpha.re < 1.0,
            })
        })
        .collect()
}

fn families(side: Side, levels: &[Level], e_cut: f64) -> Vec<Family> {
    [QuasiParity::Plus, QuasiParity::Minus]
        .into_iter()
        .filter_map(|parity| {
            let energies: Vec<f64> = levels
                .iter()
                .filter(|l| l.admissible && l.parity == Some(parity) && l.e.re < e_cut)
                .map(|l| l.e.re)
                .collect();
            (!energies.is_empty()).then(|| Family {
                side,
                parity,
                label: format!("{side}{parity}"),
                energies,
            })
        })
        .collect()
}

/// `lower[i] == upper[i + shift]` over the common range, at least two levels.
fn related(upper: &Family, lower: &Family, shift: usize, tol: f64) -> bool {
    let n = upper.energies.len().saturating_sub(shift).min(lower.energies.len());
    n >= 2 && (0..n).all(|i| (upper.energies[i + shift] - lower.energies[i]).abs() < tol)
}

fn isolated(family: &Family, others: &[&Family], tol: f64) -> bool {
    family
        .energies
        .iter()
        .all(|e| others.iter().flat_map(|f| &f.energies).all(|o| (e - o).abs() >= tol))
}

/// Recognizes the regime from family counts and cross-spectrum pairings and
/// relabels the families accordingly.
pub fn classify(fams: &mut [Family], tol: f64) -> Regime {
    let ups: Vec<usize> = (0..fams.len()).filter(|&i| fams[i].side == Side::Upper).collect();
    let lows: Vec<usize> = (0..fams.len()).filter(|&i| fams[i].side == Side::Lower).collect();
    let mut labels: Vec<(usize, &str)> = Vec::new();
    let regime = {
        let f = |i: usize| &fams[i];
        match (ups.as_slice(), lows.as_slice()) {
            (&[u], &[l]) if related(f(u), f(l), 0, tol) => {
                labels = vec![(u, "c"), (l, "d")];
                Regime::Degenerate
            }
            (&[u], &[l]) if related(f(u), f(l), 1, tol) => {
                labels = vec![(u, "c"), (l, "d")];
                Regime::Shifted
            }
            (&[u], &[l1, l2]) => [(l1, l2), (l2, l1)]
                .into_iter()
                .find(|&(d, b)| related(f(u), f(d), 0, tol) && isolated(f(b), &[f(u)], tol))
                .map_or(Regime::Unmatched, |(d, b)| {
                    labels = vec![(u, "c"), (d, "d"), (b, "b")];
                    Regime::Broken
                }),
            (&[u1, u2], &[l]) => [(u1, u2), (u2, u1)]
                .into_iter()
                .find(|&(a, c)| related(f(a), f(l), 1, tol) && isolated(f(c), &[f(l)], tol))
                .map_or(Regime::Unmatched, |(a, c)| {
                    labels = vec![(a, "a"), (c, "c"), (l, "d")];
                    Regime::MissingB
                }),
            (&[u1, u2], &[l1, l2]) => [(u1, u2, l1, l2), (u1, u2, l2, l1), (u2, u1, l1, l2), (u2, u1, l2, l1)]
                .into_iter()
                .find(|&(a, c, b, d)| {
                    let ordered = f(a)
                        .energies
                        .iter()
                        .zip(&f(b).energies)
                        .zip(&f(d).energies)
                        .all(|((a, b), d)| a < b && b < d);
                    related(f(c), f(b), 0, tol) && related(f(a), f(d), 1, tol) && ordered
                })
                .map_or(Regime::Unmatched, |(a, c, b, d)| {
                    labels = vec![(a, "a"), (b, "b"), (c, "c"), (d, "d")];
                    Regime::Interlaced
                }),
            _ => Regime::Unmatched,
        }
    };
    for (i, label) in labels {
        fams[i].label = label.to_string();
    }
    regime
}

fn on_threshold(alpha: Complex64) -> bool {
    alpha.im.abs() < 1e-12 && (alpha.re.abs() < 1e-12 || (alpha.re - 1.0).abs() < 1e-12)
}

fn sweep_point(chi: &[Monomial], gamma: Rational64, contour: &Contour, cfg: &SweepConfig) -> SweepRow {
    let mut row = SweepRow {
        gamma,
        upper: Vec::new(),
        lower: Vec::new(),
        families: Vec::new(),
        regime: Regime::Failed,
        error: None,
    };
    let outcome = (|| -> Result<()> {
        let w = Superpotential::new(chi.to_vec(), gamma)?;
        let pair = build_partners(&w)?;
        let boundary = on_threshold(singular_alpha(&pair.upper)) || on_threshold(singular_alpha(&pair.lower));
        if boundary {
            // Quasi-parity is undefined or logarithmic here; keep the raw levels.
            let levels = |v: &PotentialSpec| -> Result<Vec<Level>> {
                let problem = SturmProblem::plain(v.clone());
                let spec = crate::eigensolve::shoot_spectrum(&problem, contour, &cfg.shooting)?;
                Ok(spec
                    .eigenvalues
                    .iter()
                    .map(|p| Level {
                        e: p.e,
                        residual: p.residual,
                        parity: None,
                        purity: f64::NAN,
                        admissible: false,
                    })
                    .collect())
            };
            row.upper = levels(&pair.upper)?;
            row.lower = levels(&pair.lower)?;
            row.regime = Regime::Boundary;
            return Ok(());
        }
        row.upper = spectrum_levels(&pair.upper, contour, &cfg.shooting)?;
        row.lower = spectrum_levels(&pair.lower, contour, &cfg.shooting)?;
        row.families = families(Side::Upper, &row.upper, cfg.e_cut);
        row.families.extend(families(Side::Lower, &row.lower, cfg.e_cut));
        row.regime = classify(&mut row.families, cfg.match_tol);
        Ok(())
    })();
    if let Err(e) = outcome {
        row.regime = Regime::Failed;
        row.error = Some(e.to_string());
    }
    row
}

/// Both partner spectra on the shifted line for every `gamma`, classified.
/// Failures are recorded per row.
pub fn sweep_gamma(chi: &[Monomial], gammas: &[Rational64], cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    let contour = Contour::shifted_line(cfg.epsilon)?;
    cfg.shooting.validate()?;
    Ok(gammas.par_iter().map(|&g| sweep_point(chi, g, &contour, cfg)).collect())
}

/// `gamma,family_label,level_index,energy,regime_tag`, one line per level of
/// each admissible family.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("gamma,family_label,level_index,energy,regime_tag\n");
    for row in rows {
        let gamma = rat_to_f64(row.gamma);
        for fam in &row.families {
            for (n, e) in fam.energies.iter().enumerate() {
                out.push_str(&format!("{gamma:.11e},{},{n},{e:.11e},{}\n", fam.label, row.regime));
            }
        }
        if row.families.is_empty() {
            out.push_str(&format!("{gamma:.11e},,,,{}\n", row.regime));
        }
    }
    out
}

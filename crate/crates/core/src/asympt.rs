//! Large-`L` estimates for the rectified imaginary cubic toboggan
//! `-phi'' + [L(L+1)/y^2 + i(-1)^N m^2 y^K] phi = E m^2 y^(4N) phi`,
//! `m = 2N + 1`, `K = 10N + 3`.
//!
//! [`energy_estimate`] expands `V_eff = L(L+1)/y^2 + i(-1)^N m^2 y^K` about its
//! stationary point `-i tau` and freezes the weight there. For `N >= 1` the
//! weight varies on the same scale as the well, which shifts the true minimum;
//! [`saddle_point_estimate`] keeps that variation by expanding `V_eff / W`
//! instead, and reduces to the `N = 0` formula at the source-frame `l`.

use num_complex::Complex64;
use num_rational::Rational64;
use serde::Serialize;

use crate::complexpath::Contour;
use crate::eigensolve::{shoot_spectrum, ScanWindow, ShootingConfig};
use crate::error::{Error, Result};
use crate::exact::GaussRat;
use crate::xform::{rectify, Monomial, PotentialSpec, SturmProblem};

fn map_exponent(winding: u32) -> f64 {
    (2 * winding + 1) as f64
}

fn cubic_power(winding: u32) -> i32 {
    10 * winding as i32 + 3
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CubicAsymptoticCase {
    pub winding: u32,
    pub big_ell: f64,
    pub tau: f64,
    /// Width of the harmonic well, `tau^(-(10N+1)/4)`.
    pub sigma: f64,
    pub omega: f64,
    /// All `10N + 5` stationary points; the first is `-i tau`.
    pub roots: Vec<Complex64>,
}

impl CubicAsymptoticCase {
    /// Source-frame angular momentum, `l + 1/2 = (L + 1/2) / m`.
    pub fn ell(&self) -> f64 {
        (self.big_ell + 0.5) / map_exponent(self.winding) - 0.5
    }
}

/// `omega_N = m sqrt(K (K + 2) / 2)`.
pub fn omega(winding: u32) -> f64 {
    let k = cubic_power(winding) as f64;
    map_exponent(winding) * (k * (k + 2.0) / 2.0).sqrt()
}

/// Solves `2 L(L+1) = m^2 K tau^(K+2)` for `tau`.
pub fn build_case(winding: u32, big_ell: f64) -> Result<CubicAsymptoticCase> {
    if !(big_ell > 0.0) || !big_ell.is_finite() {
        return Err(Error::InvalidInput(format!("L must be positive, got {big_ell}")));
    }
    let m = map_exponent(winding);
    let k = cubic_power(winding);
    let order = k + 2;
    let tau = (2.0 * big_ell * (big_ell + 1.0) / (m * m * k as f64)).powf(1.0 / order as f64);
    let first = Complex64::new(0.0, -tau);
    let turn = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / order as f64);
    let roots = std::iter::successors(Some(first), |r| Some(r * turn))
        .take(order as usize)
        .collect();
    Ok(CubicAsymptoticCase {
        winding,
        big_ell,
        tau,
        sigma: tau.powf(-(10.0 * winding as f64 + 1.0) / 4.0),
        omega: omega(winding),
        roots,
    })
}

/// Inverse of [`build_case`]: the `L` that puts the stationary point at `-i tau`.
pub fn case_for_tau(winding: u32, tau: f64) -> Result<CubicAsymptoticCase> {
    if !(tau > 0.0) {
        return Err(Error::InvalidInput(format!("tau must be positive, got {tau}")));
    }
    let m = map_exponent(winding);
    let k = cubic_power(winding) as f64;
    let product = m * m * k * tau.powf(k + 2.0) / 2.0;
    build_case(winding, 0.5 * ((1.0 + 4.0 * product).sqrt() - 1.0))
}

/// `-((10N+5)/2) tau^(6N+3) + ((2n+1)/m) sqrt((10N+3)(10N+5)/2) tau^(N+1/2)`.
pub fn energy_estimate(case: &CubicAsymptoticCase, n: u32) -> f64 {
    let nf = case.winding as f64;
    let m = map_exponent(case.winding);
    -(10.0 * nf + 5.0) / 2.0 * case.tau.powf(6.0 * nf + 3.0)
        + (2.0 * n as f64 + 1.0) / m * case.omega / m * case.tau.powf(nf + 0.5)
}

/// The `N = 0` form `-(5/2) tau^3 + sqrt(15 tau / 2) (2n + 1)`.
pub fn zero_winding_estimate(tau: f64, n: u32) -> f64 {
    -2.5 * tau.powi(3) + (7.5 * tau).sqrt() * (2.0 * n as f64 + 1.0)
}

/// Two-term estimate from the stationary point of `V_eff / W`; depends on the
/// source-frame `l` only.
pub fn saddle_point_estimate(case: &CubicAsymptoticCase, n: u32) -> f64 {
    let ell = case.ell();
    let tau_x = (2.0 * ell * (ell + 1.0) / 3.0).powf(0.2);
    zero_winding_estimate(tau_x, n)
}

/// Taylor data of `V_eff` at the preferred stationary point `-i tau`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EffectiveMinimum {
    pub point: Complex64,
    pub value: Complex64,
    pub quadratic: Complex64,
    pub cubic: Complex64,
    /// `|V_eff'(Q)|` relative to `|V_eff(Q)| / tau`.
    pub stationarity: f64,
    /// Coefficients of `tau^(-K) V_eff(Q + tau eta)` in `1, eta^2, eta^3`.
    pub scaled: [Complex64; 3],
}

pub fn effective_minimum(winding: u32, big_ell: f64) -> Result<EffectiveMinimum> {
    let case = build_case(winding, big_ell)?;
    let m = map_exponent(winding);
    let k = cubic_power(winding);
    let kf = k as f64;
    let sign = if winding.is_multiple_of(2) { 1.0 } else { -1.0 };
    let a = big_ell * (big_ell + 1.0);
    let b = Complex64::new(0.0, sign * m * m);
    let q = case.roots[0];
    let value = a / (q * q) + b * q.powi(k);
    let slope = -2.0 * a / q.powi(3) + b * kf * q.powi(k - 1);
    let second = 6.0 * a / q.powi(4) + b * kf * (kf - 1.0) * q.powi(k - 2);
    let third = -24.0 * a / q.powi(5) + b * kf * (kf - 1.0) * (kf - 2.0) * q.powi(k - 3);
    let (quadratic, cubic) = (second / 2.0, third / 6.0);
    let t = case.tau;
    Ok(EffectiveMinimum {
        point: q,
        value,
        quadratic,
        cubic,
        stationarity: slope.norm() * t / value.norm(),
        scaled: [value / t.powi(k), quadratic / t.powi(k - 2), cubic / t.powi(k - 3)],
    })
}

/// `(rho, F) = (1/(l+1/2)^2, rho^(3/5) E)`.
pub fn rescale_f(e: f64, ell: f64) -> Result<(f64, f64)> {
    if !(ell > -0.5) {
        return Err(Error::InvalidInput(format!("l must exceed -1/2, got {ell}")));
    }
    let rho = (ell + 0.5).powi(-2);
    Ok((rho, rho.powf(0.6) * e))
}

/// The rectified cubic for a rational source-frame `l`.
pub fn rectified_cubic(winding: u32, ell: Rational64) -> Result<SturmProblem> {
    let cubic = PotentialSpec::new([Monomial::new(GaussRat::i(), 3)], GaussRat::real(ell))?;
    rectify(&cubic, 2 * winding + 1)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub winding: u32,
    pub ell: f64,
    pub tau: f64,
    pub n: u32,
    pub estimate: f64,
    pub saddle: f64,
    pub shooting: Option<Complex64>,
    pub abs_error: Option<f64>,
}

/// Shoots the lowest `levels` eigenvalues of the rectified cubic on the line
/// `y = s - i tau` and sets them against both estimates.
///
/// The scan covers the saddle-point levels with one spacing to spare on
/// each side; `steps_per_spacing` sets its resolution.
pub fn compare_with_shooting(
    winding: u32,
    ell: Rational64,
    levels: u32,
    steps_per_spacing: usize,
    cfg: &ShootingConfig,
) -> Result<Vec<Comparison>> {
    let problem = rectified_cubic(winding, ell)?;
    let big_ell = problem.big_ell();
    let case = build_case(winding, crate::exact::rat_to_f64(big_ell.re))?;
    let ell_f = case.ell();
    let tau_x = (2.0 * ell_f * (ell_f + 1.0) / 3.0).powf(0.2);
    let spacing = 2.0 * (7.5 * tau_x).sqrt();
    let lo = saddle_point_estimate(&case, 0) - spacing;
    let hi = saddle_point_estimate(&case, levels.saturating_sub(1)) + spacing;
    let steps = ((hi - lo) / spacing * steps_per_spacing as f64).ceil() as usize + 1;
    let mut shooting = cfg.clone();
    shooting.scan = ScanWindow::new(lo, hi, steps);
    let contour = Contour::shifted_line(case.tau)?;
    let found = shoot_spectrum(&problem, &contour, &shooting)?;
    let mut energies = found.energies();
    energies.sort_by(|a, b| a.re.total_cmp(&b.re));
    Ok((0..levels)
        .map(|n| {
            let estimate = energy_estimate(&case, n);
            let shot = energies.get(n as usize).copied();
            Comparison {
                winding,
                ell: ell_f,
                tau: case.tau,
                n,
                estimate,
                saddle: saddle_point_estimate(&case, n),
                shooting: shot,
                abs_error: shot.map(|e| (e - estimate).norm()),
            }
        })
        .collect())
}

/// `l` rounded to a multiple of `1/den`, large enough that the stationary
/// point of the rectified problem sits near `-i tau`.
pub fn ell_for_tau(winding: u32, tau: f64, den: i64) -> Result<Rational64> {
    let ell = case_for_tau(winding, tau)?.ell();
    Ok(Rational64::new((ell * den as f64).round() as i64, den))
}

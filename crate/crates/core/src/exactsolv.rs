//! The exactly solvable free toboggan: quantization arithmetic, Hankel
//! monodromy coefficients, and numerical continuation checks.
//!
//! Along a path circling the origin `m` half-turns, the Hankel solution
//! `H2(z)` continues into `c_physical H2 + c_unphysical H1`; a bound state
//! needs the growing `H1` part to vanish.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::complexpath::{rotate_path, Contour, Path, PathJet, Segment};
use crate::error::{Error, Result};
use crate::exact::rat_to_f64;
use crate::odeint::{integrate_along, IntegratorConfig, OdeState};

/// `a + b sqrt2 + c sqrt3 + d sqrt6` with rational coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct QuadSurd {
    pub a: Rational64,
    pub b: Rational64,
    pub c: Rational64,
    pub d: Rational64,
}

impl QuadSurd {
    pub fn rational(a: Rational64) -> Self {
        Self { a, ..Self::default() }
    }

    pub fn int(n: i64) -> Self {
        Self::rational(n.into())
    }

    fn new(a: (i64, i64), b: (i64, i64), c: (i64, i64), d: (i64, i64)) -> Self {
        let r = |(n, k)| Rational64::new(n, k);
        Self {
            a: r(a),
            b: r(b),
            c: r(c),
            d: r(d),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero() && self.c.is_zero() && self.d.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        rat_to_f64(self.a)
            + rat_to_f64(self.b) * 2f64.sqrt()
            + rat_to_f64(self.c) * 3f64.sqrt()
            + rat_to_f64(self.d) * 6f64.sqrt()
    }

    /// Conjugate `sqrt3 -> -sqrt3`.
    fn conj3(self) -> Self {
        Self {
            c: -self.c,
            d: -self.d,
            ..self
        }
    }

    /// Conjugate `sqrt2 -> -sqrt2`.
    fn conj2(self) -> Self {
        Self {
            b: -self.b,
            d: -self.d,
            ..self
        }
    }

    /// Multiplicative inverse through the two Galois conjugations.
    pub fn inverse(self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::InvalidInput("division by an exact zero".into()));
        }
        // x * conj3(x) lies in Q(sqrt2); times its sqrt2-conjugate lies in Q.
        let p = self * self.conj3();
        let q = p * p.conj2();
        debug_assert!(q.b.is_zero() && q.c.is_zero() && q.d.is_zero());
        let num = self.conj3() * p.conj2();
        let inv = Rational64::one() / q.a;
        Ok(num * Self::rational(inv))
    }
}

impl Add for QuadSurd {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            a: self.a + o.a,
            b: self.b + o.b,
            c: self.c + o.c,
            d: self.d + o.d,
        }
    }
}

impl Sub for QuadSurd {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + -o
    }
}

impl Neg for QuadSurd {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            a: -self.a,
            b: -self.b,
            c: -self.c,
            d: -self.d,
        }
    }
}

impl Mul for QuadSurd {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (two, three, six) = (Rational64::from(2), Rational64::from(3), Rational64::from(6));
        Self {
            a: self.a * o.a + two * self.b * o.b + three * self.c * o.c + six * self.d * o.d,
            b: self.a * o.b + self.b * o.a + three * (self.c * o.d + self.d * o.c),
            c: self.a * o.c + self.c * o.a + two * (self.b * o.d + self.d * o.b),
            d: self.a * o.d + self.d * o.a + self.b * o.c + self.c * o.b,
        }
    }
}

impl fmt::Display for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = [(self.a, ""), (self.b, "sqrt2"), (self.c, "sqrt3"), (self.d, "sqrt6")]
            .iter()
            .filter(|(r, _)| !r.is_zero())
            .map(|(r, unit)| match (*unit, r == &Rational64::one()) {
                ("", _) => r.to_string(),
                (u, true) => u.to_string(),
                (u, false) if r == &-Rational64::one() => format!("-{u}"),
                (u, false) if *r < Rational64::zero() => format!("-({}){u}", -r),
                (u, false) => format!("({r}){u}"),
            })
            .collect();
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + ").replace("+ -", "- "))
        }
    }
}

/// `sin(j pi / 12)` for `j = 0..=6`.
fn sin_table(j: i64) -> QuadSurd {
    match j {
        0 => QuadSurd::int(0),
        1 => QuadSurd::new((0, 1), (-1, 4), (0, 1), (1, 4)),
        2 => QuadSurd::rational(Rational64::new(1, 2)),
        3 => QuadSurd::new((0, 1), (1, 2), (0, 1), (0, 1)),
        4 => QuadSurd::new((0, 1), (0, 1), (1, 2), (0, 1)),
        5 => QuadSurd::new((0, 1), (1, 4), (0, 1), (1, 4)),
        6 => QuadSurd::int(1),
        _ => unreachable!("table covers the first quadrant"),
    }
}

/// Exact `sin(r pi)` when the denominator of `r` divides 12.
pub fn sin_pi(r: Rational64) -> Option<QuadSurd> {
    let twelfths = r * Rational64::from(12);
    if !twelfths.is_integer() {
        return None;
    }
    let j = twelfths.to_integer().mod_floor(&24);
    Some(match j {
        0..=6 => sin_table(j),
        7..=12 => sin_table(12 - j),
        13..=18 => -sin_table(j - 12),
        _ => -sin_table(24 - j),
    })
}

/// Exact `cos(r pi)` when the denominator of `r` divides 12.
pub fn cos_pi(r: Rational64) -> Option<QuadSurd> {
    sin_pi(r + Rational64::new(1, 2))
}

/// Exact complex number over `Q(sqrt2, sqrt3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SurdComplex {
    pub re: QuadSurd,
    pub im: QuadSurd,
}

impl SurdComplex {
    pub fn real(re: QuadSurd) -> Self {
        Self {
            re,
            im: QuadSurd::default(),
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

/// A coefficient computed exactly when possible, in floating point otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coefficient {
    Exact(SurdComplex),
    Approx(Complex64),
}

impl Coefficient {
    pub fn value(&self) -> Complex64 {
        match self {
            Self::Exact(z) => z.to_complex(),
            Self::Approx(z) => *z,
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self, Self::Exact(z) if z.re.is_zero() && z.im.is_zero())
    }

    fn int(n: i64) -> Self {
        Self::Exact(SurdComplex::real(QuadSurd::int(n)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monodromy {
    pub physical: Coefficient,
    pub unphysical: Coefficient,
}

fn check_m(m: u32) -> Result<()> {
    if m % 2 == 1 {
        return Err(Error::InvalidInput(format!("m = {m} must be even")));
    }
    Ok(())
}

/// Connection coefficients `(sin((1+m) pi nu) / sin(pi nu), e^{i pi nu} sin(m pi nu) / sin(pi nu))`.
///
/// Integer `nu` is routed to [`monodromy_limit`].
pub fn monodromy_coefficients(nu: Rational64, m: u32) -> Result<Monodromy> {
    check_m(m)?;
    if m == 0 {
        return Ok(Monodromy {
            physical: Coefficient::int(1),
            unphysical: Coefficient::int(0),
        });
    }
    if nu.is_integer() {
        return monodromy_limit(nu.to_integer(), m);
    }
    let mr = Rational64::from(m as i64);
    let m_nu = mr * nu;
    if m_nu.is_integer() {
        // sin((1+m) pi nu) = (-1)^(m nu) sin(pi nu) and sin(m pi nu) = 0.
        let sign = if m_nu.to_integer().is_even() { 1 } else { -1 };
        return Ok(Monodromy {
            physical: Coefficient::int(sign),
            unphysical: Coefficient::int(0),
        });
    }
    let exact = (|| {
        let inv = sin_pi(nu)?.inverse().ok()?;
        let ratio_m = sin_pi(m_nu)? * inv;
        Some(Monodromy {
            physical: Coefficient::Exact(SurdComplex::real(sin_pi(m_nu + nu)? * inv)),
            unphysical: Coefficient::Exact(SurdComplex {
                re: cos_pi(nu)? * ratio_m,
                im: sin_pi(nu)? * ratio_m,
            }),
        })
    })();
    Ok(exact.unwrap_or_else(|| {
        let x = std::f64::consts::PI * rat_to_f64(nu);
        let mf = m as f64;
        Monodromy {
            physical: Coefficient::Approx(Complex64::from(((1.0 + mf) * x).sin() / x.sin())),
            unphysical: Coefficient::Approx(Complex64::from_polar(1.0, x) * ((mf * x).sin() / x.sin())),
        }
    }))
}

/// Limit of the coefficients at integer `nu`: `((1+m)(-1)^(m nu), m (-1)^(m nu))`.
pub fn monodromy_limit(nu: i64, m: u32) -> Result<Monodromy> {
    check_m(m)?;
    let sign = if (m as i64 * nu).is_even() { 1 } else { -1 };
    Ok(Monodromy {
        physical: Coefficient::int(sign * (1 + m as i64)),
        unphysical: Coefficient::int(sign * m as i64),
    })
}

/// One instance of the solvable family with its derived rationals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolvableCase {
    pub dimension: i64,
    pub angular: i64,
    pub winding: i64,
    pub label: i64,
    pub gamma: Rational64,
    pub ell: Rational64,
    pub nu: Rational64,
    pub m: u32,
    pub bound: bool,
}

/// `l = (M - N) / 2N`, `nu = M / 2N`, `gamma = nu^2 - (n + (D - 2)/2)^2`,
/// bound unless `M` is a multiple of `2N`.
pub fn build_case(dimension: i64, angular: i64, winding: i64, label: i64) -> Result<SolvableCase> {
    if dimension < 1 || winding < 1 || label < 1 {
        return Err(Error::InvalidInput("D, N and M must be positive".into()));
    }
    let two_n = 2 * winding;
    let nu = Rational64::new(label, two_n);
    let shift = Rational64::from(angular) + Rational64::new(dimension - 2, 2);
    Ok(SolvableCase {
        dimension,
        angular,
        winding,
        label,
        gamma: nu * nu - shift * shift,
        ell: Rational64::new(label - winding, two_n),
        nu,
        m: two_n as u32,
        bound: label % two_n != 0,
    })
}

impl SolvableCase {
    pub fn ell_f64(&self) -> f64 {
        rat_to_f64(self.ell)
    }

    pub fn monodromy(&self) -> Result<Monodromy> {
        monodromy_coefficients(self.nu, self.m)
    }

    /// Contour circling the origin `m` half-turns with both ends in the
    /// lower half plane: `-i (s - i eps)^(2N)`.
    pub fn contour(&self, epsilon: f64) -> Result<Contour> {
        let power = Contour::power(self.m, epsilon)?;
        rotate_path(&power, 2, -self.winding)
    }
}

/// `sqrt(z) H2_nu(z)` up to a constant, from the two-term asymptotic form
/// `e^{-i z} (1 + (nu^2 - 1/4) / (2 i z))`; returns value, derivative and the
/// log scale split off from the exponential.
fn hankel2_seed(nu: f64, kappa: f64, r: Complex64) -> (Complex64, Complex64, f64) {
    let a = Complex64::new(0.0, -(nu * nu - 0.25) / 2.0);
    let z = kappa * r;
    let exponent = -Complex64::i() * z;
    let wave = Complex64::from_polar(1.0, exponent.im);
    let series = 1.0 + a / z;
    let d_series = -a / (z * r);
    (
        wave * series,
        wave * (-Complex64::i() * kappa * series + d_series),
        exponent.re,
    )
}

/// Carries the `H2` seed from `-s_far` to `s_far` along `contour` for the free
/// equation `-psi'' + l(l+1)/r^2 psi = kappa^2 psi`; returns the dense track.
pub fn continue_free_wave(
    contour: &Contour,
    ell: f64,
    kappa: f64,
    s_far: f64,
    cfg: &IntegratorConfig<f64>,
) -> Result<Vec<OdeState<f64>>> {
    if kappa <= 0.0 || s_far <= 0.0 {
        return Err(Error::InvalidInput("kappa and s_far must be positive".into()));
    }
    let nu = ell + 0.5;
    let start = contour.jet(-s_far).z;
    let (phi, dphi, log_scale) = hankel2_seed(nu, kappa, start);
    let init = OdeState {
        log_scale,
        ..OdeState::new(-s_far, start, phi, dphi)
    };
    let centrifugal = ell * (ell + 1.0);
    let q = |r: Complex64| centrifugal / (r * r) - kappa * kappa;
    let mut dense = Vec::new();
    integrate_along(contour, q, s_far, init, cfg, Some(&mut dense))?;
    Ok(dense)
}

/// Offset of the continuation contour; smaller values reach the asymptotic
/// sectors at smaller `s`.
pub const CONTINUATION_EPSILON: f64 = 0.5;

/// `|psi(s_far)| / max |psi|` for the continued `H2` seed; small values
/// confirm decay at both ends.
pub fn continuation_check(case: &SolvableCase, kappa: f64, s_far: f64) -> Result<f64> {
    let contour = case.contour(CONTINUATION_EPSILON)?;
    let cfg = IntegratorConfig {
        rel_tol: 1e-12,
        abs_tol: 1e-14,
        ..IntegratorConfig::default()
    };
    let track = continue_free_wave(&contour, case.ell_f64(), kappa, s_far, &cfg)?;
    Ok(decay_ratio(&track))
}

pub fn decay_ratio(track: &[OdeState<f64>]) -> f64 {
    let log_abs = |st: &OdeState<f64>| st.phi.norm().ln() + st.log_scale;
    let peak = track.iter().map(log_abs).fold(f64::NEG_INFINITY, f64::max);
    track.last().map_or(f64::NAN, |end| (log_abs(end) - peak).exp())
}

/// Circle `r e^{i theta}` with `theta` running over `[0, sweep]` as `s` goes over `[0, 1]`.
struct Arc {
    radius: f64,
    sweep: f64,
}

impl Path<f64> for Arc {
    fn jet(&self, s: f64) -> PathJet<f64> {
        let z = Complex64::from_polar(self.radius, self.sweep * s);
        let w = Complex64::new(0.0, self.sweep);
        PathJet {
            z,
            dz: w * z,
            d2z: w * w * z,
        }
    }
}

/// `sqrt(z) H_nu(z)` from the full asymptotic series (truncated at its
/// smallest term); `kind` is 1 or 2. Returns value and `d/dz`.
pub fn hankel_asymptotic(nu: f64, kind: u8, z: Complex64) -> (Complex64, Complex64) {
    let sign = if kind == 1 { 1.0 } else { -1.0 };
    let i_s = Complex64::new(0.0, sign);
    let omega = z - nu * std::f64::consts::FRAC_PI_2 - std::f64::consts::FRAC_PI_4;
    let four_nu2 = 4.0 * nu * nu;
    let (mut sum, mut dsum) = (Complex64::new(1.0, 0.0), Complex64::zero());
    let mut coeff = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        coeff *= (four_nu2 - odd * odd) / (k as f64 * 8.0);
        let term = i_s.powu(k) * coeff / z.powu(k);
        if term.norm() > last || term.norm() < 1e-18 * sum.norm() {
            break;
        }
        last = term.norm();
        sum += term;
        dsum -= term * k as f64 / z;
    }
    // sqrt(z) (2/(pi z))^{1/2} = (2/pi)^{1/2} is constant.
    let amp = (2.0 / std::f64::consts::PI).sqrt();
    let wave = (i_s * omega).exp() * amp;
    (wave * sum, wave * (i_s * sum + dsum))
}

/// Continues `sqrt(z) H2_nu(z)` numerically from `z = r_far` in to `r_near`,
/// around `m` half-turns and back out, then decomposes the result on the
/// Hankel pair: returns `(c_physical, c_unphysical)`.
pub fn numerical_monodromy(nu: f64, m: u32, r_far: f64, r_near: f64) -> Result<(Complex64, Complex64)> {
    check_m(m)?;
    if !(r_far > r_near && r_near > 0.0) {
        return Err(Error::InvalidInput("need r_far > r_near > 0".into()));
    }
    let cfg = IntegratorConfig {
        rel_tol: 1e-13,
        abs_tol: 1e-15,
        max_step: 0.05,
        ..IntegratorConfig::default()
    };
    let q = |z: Complex64| (nu * nu - 0.25) / (z * z) - 1.0;
    let (u, du) = hankel_asymptotic(nu, 2, r_far.into());
    let inward = Segment {
        from: Complex64::from(r_far),
        to: Complex64::from(r_near),
    };
    let st = integrate_along(&inward, q, 1.0, OdeState::new(0.0, r_far.into(), u, du), &cfg, None)?;
    let sweep = std::f64::consts::PI * m as f64;
    let arc = Arc { radius: r_near, sweep };
    let st = integrate_along(&arc, q, 1.0, OdeState { s: 0.0, ..st }, &cfg, None)?;
    let turn = Complex64::from_polar(1.0, sweep);
    let outward = Segment {
        from: turn * r_near,
        to: turn * r_far,
    };
    let end = integrate_along(&outward, q, 1.0, OdeState { s: 0.0, ..st }, &cfg, None)?;
    // sqrt(z) picks up exp(i m pi / 2); d/dz equals d/dzeta since exp(i m pi) = 1.
    let branch = Complex64::from_polar(end.log_scale.exp(), sweep / 2.0);
    let (val, der) = (end.phi / branch, end.dphi / branch);
    let (u2, du2) = hankel_asymptotic(nu, 2, r_far.into());
    let (u1, du1) = hankel_asymptotic(nu, 1, r_far.into());
    let det = u2 * du1 - u1 * du2;
    let physical = (val * du1 - u1 * der) / det;
    let unphysical = (u2 * der - val * du2) / det;
    Ok((physical, unphysical))
}

/// One row of the exact-check table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactRow {
    pub case: SolvableCase,
    pub unphysical_abs: f64,
    pub unphysical_exact_zero: bool,
    pub decay_ratio: Option<f64>,
}

/// Cases `M = 1..=m_max` at winding `N` (`D = 3`, `n = 0`).
pub fn exact_table(winding: i64, m_max: i64, with_decay: Option<(f64, f64)>) -> Result<Vec<ExactRow>> {
    (1..=m_max)
        .map(|label| {
            let case = build_case(3, 0, winding, label)?;
            let mono = case.monodromy()?;
            let decay_ratio = match with_decay {
                Some((kappa, s_far)) => Some(continuation_check(&case, kappa, s_far)?),
                None => None,
            };
            Ok(ExactRow {
                unphysical_abs: mono.unphysical.value().norm(),
                unphysical_exact_zero: mono.unphysical.is_exact_zero(),
                decay_ratio,
                case,
            })
        })
        .collect()
}

//! Contours in the complex coordinate plane: shifted lines, winding spirals,
//! their rectified preimages and rotated copies, plus Stokes-wedge geometry.

use std::f64::consts::PI;

use num_complex::{Complex, Complex64};
use num_rational::Rational64;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::rat_to;
use crate::scalar::{cis, Real};

/// Point, first and second derivative of a path at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathJet<T> {
    pub z: Complex<T>,
    pub dz: Complex<T>,
    pub d2z: Complex<T>,
}

/// Anything the integrator can walk along: a smooth map from a real parameter
/// to the complex plane.
pub trait Path<T: Real>: Sync {
    fn jet(&self, s: T) -> PathJet<T>;

    fn point(&self, s: T) -> Complex<T> {
        self.jet(s).z
    }
}

/// Straight segment `a + (b - a) s` for `s` in `[0, 1]`.
#[derive(Debug, Clone, Copy)]
pub struct Segment<T> {
    pub from: Complex<T>,
    pub to: Complex<T>,
}

impl<T: Real> Path<T> for Segment<T> {
    fn jet(&self, s: T) -> PathJet<T> {
        let d = self.to - self.from;
        PathJet {
            z: self.from + d * s,
            dz: d,
            d2z: Complex::zero(),
        }
    }
}

/// Logarithm of `i z(s)` with a continuous imaginary part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lift<T> {
    pub ln_r: T,
    pub theta: T,
}

/// A parametrized contour `s -> x(s)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Contour {
    /// The real axis itself; only meaningful for potentials regular at 0.
    RealLine,
    /// `s - i eps`.
    ShiftedLine { epsilon: f64 },
    /// `-i [i (s - i eps)]^(2n+1)`, encircling the origin by `(2n+1) pi`.
    Winding { epsilon: f64, n: u32 },
    /// `-i [i (s - i eps)]^power` for an arbitrary positive power.
    Power { epsilon: f64, power: u32 },
    /// Preimage of `parent` under `i x = (i y)^m`; `branch` selects the root.
    Pullback { parent: Box<Contour>, m: u32, branch: i64 },
    /// `parent` multiplied by `exp(2 pi i turns)`.
    Rotated { parent: Box<Contour>, turns: Rational64 },
}

impl Contour {
    pub fn shifted_line(epsilon: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        Ok(Self::ShiftedLine { epsilon })
    }

    pub fn winding(n: u32, epsilon: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        Ok(Self::Winding { epsilon, n })
    }

    pub fn power(power: u32, epsilon: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        if power == 0 {
            return Err(Error::InvalidInput("power must be positive".into()));
        }
        Ok(Self::Power { epsilon, power })
    }

    /// U-shaped preimage of the shifted line under `m = 2`.
    pub fn u_shape(epsilon: f64) -> Result<Self> {
        pullback_path(&Self::shifted_line(epsilon)?, 2)
    }

    /// Shift of the underlying base line, if any.
    pub fn epsilon(&self) -> Option<f64> {
        match self {
            Self::RealLine => None,
            Self::ShiftedLine { epsilon } | Self::Winding { epsilon, .. } | Self::Power { epsilon, .. } => {
                Some(*epsilon)
            }
            Self::Pullback { parent, .. } | Self::Rotated { parent, .. } => parent.epsilon(),
        }
    }

    pub fn avoids_origin(&self) -> bool {
        !matches!(self.base(), Self::RealLine)
    }

    fn base(&self) -> &Contour {
        match self {
            Self::Pullback { parent, .. } | Self::Rotated { parent, .. } => parent.base(),
            other => other,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::RealLine => "real-line",
            Self::ShiftedLine { .. } => "shifted-line",
            Self::Winding { .. } => "winding",
            Self::Power { .. } => "power",
            Self::Pullback { .. } => "pullback",
            Self::Rotated { .. } => "rotated",
        }
    }

    /// Continuous logarithm of `i x(s)`. Undefined on the real line at `s = 0`.
    pub fn lift<T: Real>(&self, s: T) -> Lift<T> {
        match self {
            Self::RealLine => Lift {
                ln_r: s.abs().ln(),
                theta: T::FRAC_PI_2().copysign(s),
            },
            Self::ShiftedLine { epsilon } => base_lift(T::lit(*epsilon), s, 1),
            Self::Winding { epsilon, n } => base_lift(T::lit(*epsilon), s, 2 * n + 1),
            Self::Power { epsilon, power } => base_lift(T::lit(*epsilon), s, *power),
            Self::Rotated { parent, turns } => {
                let l = parent.lift(s);
                Lift {
                    ln_r: l.ln_r,
                    theta: l.theta + T::TAU() * rat_to::<T>(*turns),
                }
            }
            Self::Pullback { parent, m, branch } => {
                let l = parent.lift(s);
                let m = T::lit(*m as f64);
                Lift {
                    ln_r: l.ln_r / m,
                    theta: (l.theta + T::TAU() * T::lit(*branch as f64)) / m,
                }
            }
        }
    }

    /// Samples `(s, x(s))` on a uniform grid of `n` points over `[-s_max, s_max]`.
    pub fn sample(&self, s_max: f64, n: usize) -> Vec<(f64, Complex64)> {
        let n = n.max(2);
        (0..n)
            .map(|k| {
                let s = -s_max + 2.0 * s_max * k as f64 / (n - 1) as f64;
                (s, Path::<f64>::point(self, s))
            })
            .collect()
    }

    /// Preimage point under `i x = (i y)^m` obtained by unwrapping `arg(i x)`
    /// along densely sampled parameter values from the anchor `s = 0`.
    pub fn tracked_pullback_point(&self, m: u32, s: f64) -> Result<Complex64> {
        let w = |t: f64| Complex64::i() * Path::<f64>::point(self, t);
        let w0 = w(0.0);
        if w0.norm() < 1e-12 {
            return Err(Error::NearOrigin { s: 0.0 });
        }
        let turn = unwrapped_turn(&w, 0.0, s)?;
        let theta = anchored_theta(w0.arg()) + turn;
        let r = w(s).norm();
        Ok(-Complex64::i() * Complex64::from_polar(r.powf(1.0 / m as f64), theta / m as f64))
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("epsilon must be positive, got {epsilon}")))
    }
}

fn base_lift<T: Real>(eps: T, s: T, p: u32) -> Lift<T> {
    let p = T::lit(p as f64);
    Lift {
        ln_r: p * eps.hypot(s).ln(),
        theta: p * s.atan2(eps),
    }
}

/// Smallest-magnitude representative of `theta0 + 2 pi k`, which puts the root
/// `y(0) = -i |.|^(1/m) e^{i theta/m}` closest to the negative imaginary axis.
fn anchored_theta(theta0: f64) -> f64 {
    theta0 + 2.0 * PI * branch_shift(theta0) as f64
}

fn branch_shift(theta0: f64) -> i64 {
    (-theta0 / (2.0 * PI)).round() as i64
}

/// Exact `e^{2 pi i turns}` for quarter turns, `cis` otherwise.
fn rotation_factor<T: Real>(turns: Rational64) -> Complex<T> {
    let frac = turns - turns.floor();
    let four = frac * Rational64::from_integer(4);
    if four.is_integer() {
        match four.to_integer() {
            0 => Complex::one(),
            1 => Complex::i(),
            2 => -Complex::<T>::one(),
            _ => -Complex::<T>::i(),
        }
    } else {
        cis(T::TAU() * rat_to::<T>(frac))
    }
}

impl<T: Real> Path<T> for Contour {
    fn jet(&self, s: T) -> PathJet<T> {
        let i = Complex::<T>::i();
        match self {
            Self::RealLine => PathJet {
                z: Complex::new(s, T::zero()),
                dz: Complex::one(),
                d2z: Complex::zero(),
            },
            Self::ShiftedLine { epsilon } => PathJet {
                z: Complex::new(s, -T::lit(*epsilon)),
                dz: Complex::one(),
                d2z: Complex::zero(),
            },
            Self::Winding { epsilon, n } => power_jet(T::lit(*epsilon), s, 2 * n + 1),
            Self::Power { epsilon, power } => power_jet(T::lit(*epsilon), s, *power),
            Self::Rotated { parent, turns } => {
                let r = rotation_factor::<T>(*turns);
                let j = parent.jet(s);
                PathJet {
                    z: j.z * r,
                    dz: j.dz * r,
                    d2z: j.d2z * r,
                }
            }
            Self::Pullback { parent, m, .. } => {
                let x = parent.jet(s);
                let l = self.lift(s);
                let mf = T::lit(*m as f64);
                let y = -i * Complex::from_polar(l.ln_r.exp(), l.theta);
                let g = x.dz / (x.z * mf);
                let dy = y * g;
                let d2y = dy * g + y * (x.d2z / x.z - (x.dz / x.z) * (x.dz / x.z)) / mf;
                PathJet { z: y, dz: dy, d2z: d2y }
            }
        }
    }
}

fn power_jet<T: Real>(eps: T, s: T, p: u32) -> PathJet<T> {
    let i = Complex::<T>::i();
    let w = Complex::new(eps, s);
    let pf = T::lit(p as f64);
    let wp2 = if p >= 2 { w.powi(p as i32 - 2) } else { Complex::zero() };
    let wp1 = if p >= 1 { w.powi(p as i32 - 1) } else { Complex::zero() };
    PathJet {
        z: -i * w.powi(p as i32),
        dz: wp1 * pf,
        d2z: i * wp2 * (pf * (pf - T::one())),
    }
}

/// `C^(N)(s) = -i [i (s - i eps)]^(2N+1)` and its derivative.
pub fn winding_path(n: u32, epsilon: f64, s: f64) -> Result<(Complex64, Complex64)> {
    let c = Contour::winding(n, epsilon)?;
    let j = Path::<f64>::jet(&c, s);
    Ok((j.z, j.dz))
}

/// Unwrapped change of `arg w(s)` from `a` to `b`, refining until adjacent
/// samples differ by less than `pi/4`.
fn unwrapped_turn(w: &dyn Fn(f64) -> Complex64, a: f64, b: f64) -> Result<f64> {
    const BASE: usize = 256;
    let mut total = 0.0;
    let mut prev_s = a;
    let mut prev = w(a);
    if prev.norm() < 1e-12 {
        return Err(Error::NearOrigin { s: a });
    }
    for k in 1..=BASE {
        let s = a + (b - a) * k as f64 / BASE as f64;
        let cur = w(s);
        total += refine_turn(w, prev_s, s, prev, cur, 0)?;
        prev_s = s;
        prev = cur;
    }
    Ok(total)
}

fn refine_turn(w: &dyn Fn(f64) -> Complex64, a: f64, b: f64, wa: Complex64, wb: Complex64, depth: u32) -> Result<f64> {
    if wb.norm() < 1e-12 {
        return Err(Error::NearOrigin { s: b });
    }
    let d = (wb / wa).arg();
    if d.abs() < PI / 4.0 || depth > 60 {
        return Ok(d);
    }
    let mid = 0.5 * (a + b);
    let wm = w(mid);
    Ok(refine_turn(w, a, mid, wa, wm, depth + 1)? + refine_turn(w, mid, b, wm, wb, depth + 1)?)
}

/// Unwrapped change of `arg x(s)` over `[-s_max, s_max]`.
pub fn total_turning(contour: &Contour, s_max: f64) -> Result<f64> {
    if !(s_max > 0.0) {
        return Err(Error::InvalidInput("s_max must be positive".into()));
    }
    let x = |s: f64| Path::<f64>::point(contour, s);
    // Graded grid: the argument changes fastest near the closest approach.
    let grid = |k: i64, n: i64| -> f64 {
        let u = k as f64 / n as f64;
        u.signum() * s_max * (u.abs().powi(3))
    };
    let n = 2048;
    let mut total = 0.0;
    let mut prev_s = grid(-n, n);
    let mut prev = x(prev_s);
    if prev.norm() < 1e-12 {
        return Err(Error::NearOrigin { s: prev_s });
    }
    for k in (-n + 1)..=n {
        let s = grid(k, n);
        let cur = x(s);
        total += refine_turn(&x, prev_s, s, prev, cur, 0)?;
        prev_s = s;
        prev = cur;
    }
    Ok(total)
}

/// Preimage of `x_contour` under `i x = (i y)^m`, anchored below the origin.
pub fn pullback_path(x_contour: &Contour, m: u32) -> Result<Contour> {
    if m == 0 {
        return Err(Error::InvalidInput("map exponent must be positive".into()));
    }
    if !x_contour.avoids_origin() {
        return Err(Error::NearOrigin { s: 0.0 });
    }
    if m == 1 {
        return Ok(x_contour.clone());
    }
    Ok(Contour::Pullback {
        parent: Box::new(x_contour.clone()),
        m,
        branch: branch_shift(x_contour.lift::<f64>(0.0).theta),
    })
}

/// Rotation by `exp(2 pi i n / K)`; nested rotations are merged exactly.
pub fn rotate_path(y_contour: &Contour, k: u32, n: i64) -> Result<Contour> {
    if k == 0 {
        return Err(Error::InvalidInput("K must be at least 1".into()));
    }
    let turns = Rational64::new(n, k as i64);
    Ok(match y_contour {
        Contour::Rotated { parent, turns: t } => {
            let total = *t + turns;
            if total.is_zero() {
                (**parent).clone()
            } else {
                Contour::Rotated {
                    parent: parent.clone(),
                    turns: total,
                }
            }
        }
        other if turns.is_zero() => other.clone(),
        other => Contour::Rotated {
            parent: Box::new(other.clone()),
            turns,
        },
    })
}

/// One angular sector of the asymptotic plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StokesWedge {
    pub center_angle: f64,
    pub half_width: f64,
    pub decay: bool,
}

impl StokesWedge {
    pub fn contains(&self, theta: f64) -> bool {
        angle_diff(theta, self.center_angle).abs() < self.half_width
    }
}

/// Signed difference `a - b` reduced to `(-pi, pi]`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    let mut d = (a - b).rem_euclid(2.0 * PI);
    if d > PI {
        d -= 2.0 * PI;
    }
    d
}

fn reduce_angle(theta: f64) -> f64 {
    let d = angle_diff(theta, 0.0);
    if d <= -PI + 1e-15 {
        PI
    } else {
        d
    }
}

/// All sectors of `{cos(p theta + phase) > 0}` (decay) and its complement,
/// with centers in `(-pi, pi]`, sorted by center.
pub fn stokes_sectors(p: f64, phase: f64) -> Result<Vec<StokesWedge>> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::InvalidInput(format!("growth power must exceed 1, got {p}")));
    }
    let half = PI / (2.0 * p);
    let mut out = Vec::new();
    let kmax = (p.ceil() as i64) + 2;
    for k in -kmax..=kmax {
        for (offset, decay) in [(0.0, true), (PI, false)] {
            let c = (2.0 * PI * k as f64 + offset - phase) / p;
            if c > -PI + 1e-12 && c <= PI + 1e-12 {
                out.push(StokesWedge {
                    center_angle: reduce_angle(c),
                    half_width: half,
                    decay,
                });
            }
        }
    }
    out.sort_by(|a, b| a.center_angle.total_cmp(&b.center_angle));
    out.dedup_by(|a, b| (a.center_angle - b.center_angle).abs() < 1e-12);
    Ok(out)
}

/// Decay wedges `{theta : cos(p theta + phase) > 0}`.
pub fn stokes_wedges(p: f64, phase: f64) -> Result<Vec<StokesWedge>> {
    Ok(stokes_sectors(p, phase)?.into_iter().filter(|w| w.decay).collect())
}

/// Pairs `(i, j)`, `i <= j`, of wedges mirrored through the imaginary axis
/// (`theta -> pi - theta`).
pub fn symmetric_pairs(wedges: &[StokesWedge]) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for (i, a) in wedges.iter().enumerate() {
        for (j, b) in wedges.iter().enumerate().skip(i) {
            if angle_diff(PI - a.center_angle, b.center_angle).abs() < 1e-9 {
                pairs.push((i, j));
            }
        }
    }
    pairs
}

/// Flat JSON form `{kind, epsilon, winding_n, rotation_num, rotation_den,
/// map_exponent, parent}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContourRecord {
    pub kind: String,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub winding_n: u32,
    #[serde(default)]
    pub rotation_num: i64,
    #[serde(default = "one_i64")]
    pub rotation_den: i64,
    #[serde(default = "one_u32")]
    pub map_exponent: u32,
    #[serde(default)]
    pub parent: Option<Box<ContourRecord>>,
}

fn one_i64() -> i64 {
    1
}

fn one_u32() -> u32 {
    1
}

impl From<&Contour> for ContourRecord {
    fn from(c: &Contour) -> Self {
        let mut r = ContourRecord {
            kind: c.kind_name().to_string(),
            epsilon: None,
            winding_n: 0,
            rotation_num: 0,
            rotation_den: 1,
            map_exponent: 1,
            parent: None,
        };
        match c {
            Contour::RealLine => {}
            Contour::ShiftedLine { epsilon } => r.epsilon = Some(*epsilon),
            Contour::Winding { epsilon, n } => {
                r.epsilon = Some(*epsilon);
                r.winding_n = *n;
            }
            Contour::Power { epsilon, power } => {
                r.epsilon = Some(*epsilon);
                r.map_exponent = *power;
            }
            Contour::Pullback { parent, m, .. } => {
                r.map_exponent = *m;
                r.parent = Some(Box::new(parent.as_ref().into()));
            }
            Contour::Rotated { parent, turns } => {
                r.rotation_num = *turns.numer();
                r.rotation_den = *turns.denom();
                r.parent = Some(Box::new(parent.as_ref().into()));
            }
        }
        r
    }
}

impl TryFrom<&ContourRecord> for Contour {
    type Error = Error;

    fn try_from(r: &ContourRecord) -> Result<Self> {
        let eps = || {
            r.epsilon
                .ok_or_else(|| Error::InvalidInput(format!("{} contour needs epsilon", r.kind)))
        };
        let parent = || -> Result<Contour> {
            let p = r
                .parent
                .as_ref()
                .ok_or_else(|| Error::InvalidInput(format!("{} contour needs a parent", r.kind)))?;
            Contour::try_from(p.as_ref())
        };
        match r.kind.as_str() {
            "real-line" => Ok(Contour::RealLine),
            "shifted-line" => Contour::shifted_line(eps()?),
            "winding" => Contour::winding(r.winding_n, eps()?),
            "power" => Contour::power(r.map_exponent, eps()?),
            "pullback" => pullback_path(&parent()?, r.map_exponent),
            "rotated" => {
                if r.rotation_den <= 0 {
                    return Err(Error::InvalidInput("rotation_den must be positive".into()));
                }
                let turns = Rational64::new(r.rotation_num, r.rotation_den);
                let p = parent()?;
                Ok(if turns.is_zero() {
                    p
                } else {
                    Contour::Rotated {
                        parent: Box::new(p),
                        turns,
                    }
                })
            }
            other => Err(Error::InvalidInput(format!("unknown contour kind {other:?}"))),
        }
    }
}

impl Serialize for Contour {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ContourRecord::from(self).serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Contour {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let r = ContourRecord::deserialize(de)?;
        Contour::try_from(&r).map_err(serde::de::Error::custom)
    }
}

/// Rotation angle of a rotated contour in radians (0 for other kinds).
pub fn rotation_angle(c: &Contour) -> f64 {
    match c {
        Contour::Rotated { turns, .. } => 2.0 * PI * turns.to_f64().unwrap_or(0.0),
        _ => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn winding_zero_is_shifted_line() {
        let (z, dz) = winding_path(0, 0.5, 2.0).unwrap();
        assert_eq!(z, Complex64::new(2.0, -0.5));
        assert_eq!(dz, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn winding_one_at_origin_parameter() {
        let (z, _) = winding_path(1, 1.0, 0.0).unwrap();
        assert_abs_diff_eq!(z.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(z.im, -1.0, epsilon = 1e-15);
    }

    #[test]
    fn jet_derivatives_match_differences() {
        let c = rotate_path(&Contour::u_shape(0.7).unwrap(), 8, 3).unwrap();
        for &s in &[-3.0, -0.4, 0.0, 1.3, 5.0] {
            let h = 1e-5;
            let j = Path::<f64>::jet(&c, s);
            let fp = Path::<f64>::point(&c, s + h);
            let fm = Path::<f64>::point(&c, s - h);
            assert!(((fp - fm) / (2.0 * h) - j.dz).norm() < 1e-7);
            assert!(((fp - 2.0 * j.z + fm) / (h * h) - j.d2z).norm() < 1e-3);
        }
    }

    #[test]
    fn sectors_alternate() {
        let s = stokes_sectors(3.0, 0.4).unwrap();
        assert_eq!(s.len(), 6);
        for w in s.windows(2) {
            assert_ne!(w[0].decay, w[1].decay);
            assert_abs_diff_eq!(w[1].center_angle - w[0].center_angle, PI / 3.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn record_roundtrip() {
        let c = rotate_path(&Contour::u_shape(0.5).unwrap(), 8, 3).unwrap();
        let text = serde_json::to_string(&c).unwrap();
        let back: Contour = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn rejects_nonpositive_epsilon() {
        assert!(Contour::shifted_line(0.0).is_err());
        assert!(stokes_wedges(1.0, 0.0).is_err());
    }
}

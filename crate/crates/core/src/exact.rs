//! Exact Gaussian-rational arithmetic for symbolic coefficient work.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub};
use std::str::FromStr;

use num_complex::Complex;
use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// `re + i im` with rational parts.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct GaussRat {
    pub re: Rational64,
    pub im: Rational64,
}

impl GaussRat {
    pub const fn new(re: Rational64, im: Rational64) -> Self {
        Self { re, im }
    }

    pub fn real(re: Rational64) -> Self {
        Self::new(re, Rational64::zero())
    }

    pub fn int(n: i64) -> Self {
        Self::real(Rational64::from_integer(n))
    }

    pub fn frac(num: i64, den: i64) -> Self {
        Self::real(Rational64::new(num, den))
    }

    pub fn i() -> Self {
        Self::new(Rational64::zero(), Rational64::one())
    }

    /// `i^k` for any integer `k`, reduced mod 4.
    pub fn i_pow(k: i64) -> Self {
        match k.rem_euclid(4) {
            0 => Self::int(1),
            1 => Self::i(),
            2 => Self::int(-1),
            _ => -Self::i(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(self) -> Self {
        Self::new(self.re, -self.im)
    }

    pub fn norm_sqr(self) -> Rational64 {
        self.re * self.re + self.im * self.im
    }

    pub fn powu(self, k: u32) -> Self {
        (0..k).fold(Self::int(1), |acc, _| acc * self)
    }

    pub fn to_complex<T: Real>(self) -> Complex<T> {
        Complex::new(rat_to::<T>(self.re), rat_to::<T>(self.im))
    }
}

/// Nearest floating value of a rational.
pub fn rat_to<T: Real>(r: Rational64) -> T {
    T::lit(r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN))
}

pub fn rat_to_f64(r: Rational64) -> f64 {
    rat_to::<f64>(r)
}

impl From<Rational64> for GaussRat {
    fn from(r: Rational64) -> Self {
        Self::real(r)
    }
}

impl From<i64> for GaussRat {
    fn from(n: i64) -> Self {
        Self::int(n)
    }
}

impl Add for GaussRat {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.im + o.im)
    }
}

impl AddAssign for GaussRat {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for GaussRat {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.re - o.re, self.im - o.im)
    }
}

impl Neg for GaussRat {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

impl Mul for GaussRat {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }
}

impl MulAssign for GaussRat {
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl Div for GaussRat {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let d = o.norm_sqr();
        let n = self * o.conj();
        Self::new(n.re / d, n.im / d)
    }
}

fn fmt_rat(r: Rational64) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for GaussRat {
    /// Canonical forms: `3`, `-1/4`, `i`, `-2i`, `1/2+3i`, `(3/4)i`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let im_part = |im: Rational64| -> String {
            if im == Rational64::one() {
                "i".into()
            } else if im == -Rational64::one() {
                "-i".into()
            } else if im.is_integer() {
                format!("{}i", im.numer())
            } else {
                format!("({})i", fmt_rat(im))
            }
        };
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => f.write_str(&fmt_rat(self.re)),
            (true, false) => f.write_str(&im_part(self.im)),
            (false, false) => {
                let im = im_part(self.im.abs());
                let sign = if self.im.is_negative() { '-' } else { '+' };
                write!(f, "{}{}{}", fmt_rat(self.re), sign, im)
            }
        }
    }
}

/// Parses `-3`, `7/4`, `0.125` or `2.5e-3` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational64> {
    let t = text.trim();
    let bad = || Error::InvalidInput(format!("not a rational number: {text:?}"));
    if let Some((n, d)) = t.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Rational64::new(n, d));
    }
    if let Ok(n) = t.parse::<i64>() {
        return Ok(Rational64::from_integer(n));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(k) => (&t[..k], t[k + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let all: String = format!("{int_part}{frac_part}");
    let num: i64 = all.parse().map_err(|_| bad())?;
    let scale = exp - frac_part.len() as i32;
    let pow10 = |k: u32| 10i64.checked_pow(k).ok_or_else(bad);
    let mut r = if scale >= 0 {
        Rational64::from_integer(num.checked_mul(pow10(scale as u32)?).ok_or_else(bad)?)
    } else {
        Rational64::new(num, pow10((-scale) as u32)?)
    };
    if neg {
        r = -r;
    }
    Ok(r)
}

impl FromStr for GaussRat {
    type Err = Error;
    /// Accepts the [`Display`](fmt::Display) forms, e.g. `-1/4`, `i`, `-2i`,
    /// `1/2+3i`, `(3/4)i`, with decimals allowed in either part.
    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let Some(body) = t.strip_suffix('i') else {
            return parse_rational(&t).map(Self::real);
        };
        let bytes = body.as_bytes();
        let mut depth = 0i32;
        let mut split = 0;
        for (k, &b) in bytes.iter().enumerate() {
            match b {
                b'(' => depth += 1,
                b')' => depth -= 1,
                b'+' | b'-' if depth == 0 && k > 0 && !matches!(bytes[k - 1], b'e' | b'E') => split = k,
                _ => {}
            }
        }
        let (re_text, im_text) = body.split_at(split);
        let re = if re_text.is_empty() {
            Rational64::zero()
        } else {
            parse_rational(re_text)?
        };
        let (sign, mag) = match im_text.as_bytes().first() {
            Some(b'-') => (-Rational64::one(), &im_text[1..]),
            Some(b'+') => (Rational64::one(), &im_text[1..]),
            _ => (Rational64::one(), im_text),
        };
        let mag = mag.strip_prefix('(').and_then(|m| m.strip_suffix(')')).unwrap_or(mag);
        let im = if mag.is_empty() {
            Rational64::one()
        } else {
            parse_rational(mag)?
        };
        Ok(Self::new(re, sign * im))
    }
}

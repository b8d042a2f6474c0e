//! Rectification `i x = (i y)^m` of a monomial potential with a centrifugal
//! term into a weighted (Sturm) problem `-phi'' + U(y) phi = E W(y) phi`.

use num_complex::{Complex, Complex64};
use num_rational::Rational64;
use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::complexpath::Contour;
use crate::error::{Error, Result};
use crate::exact::{rat_to_f64, GaussRat};
use crate::scalar::Real;

/// `coeff * x^power`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub coeff: GaussRat,
    pub power: i64,
}

impl Monomial {
    pub fn new(coeff: GaussRat, power: i64) -> Self {
        Self { coeff, power }
    }
}

/// `V(x) = sum c_k x^{p_k} + l(l+1)/x^2` with exact coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PotentialSpec {
    terms: Vec<Monomial>,
    ell: GaussRat,
}

impl PotentialSpec {
    /// Like powers are merged, zero terms dropped, terms sorted by falling power.
    pub fn new(terms: impl IntoIterator<Item = Monomial>, ell: GaussRat) -> Result<Self> {
        let mut merged: Vec<Monomial> = Vec::new();
        for t in terms {
            if t.power < -1 {
                return Err(Error::UnsupportedPower(t.power));
            }
            match merged.iter_mut().find(|m| m.power == t.power) {
                Some(m) => m.coeff += t.coeff,
                None => merged.push(t),
            }
        }
        merged.retain(|m| !m.coeff.is_zero());
        merged.sort_by_key(|t| std::cmp::Reverse(t.power));
        Ok(Self { terms: merged, ell })
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    /// Angular momentum `l`.
    pub fn ell(&self) -> GaussRat {
        self.ell
    }

    /// `l(l+1)`, exactly; overflows for `|l|` beyond about `3e9`.
    pub fn centrifugal(&self) -> GaussRat {
        self.ell * (self.ell + GaussRat::int(1))
    }

    /// `l(l+1)` in floating point, safe for any representable `l`.
    pub fn centrifugal_value<T: Real>(&self) -> Complex<T> {
        let l = self.ell.to_complex::<T>();
        l * (l + T::one())
    }

    /// Coefficient of `x^power` (zero if absent).
    pub fn coeff(&self, power: i64) -> GaussRat {
        self.terms
            .iter()
            .find(|t| t.power == power)
            .map_or(GaussRat::default(), |t| t.coeff)
    }

    pub fn eval<T: Real>(&self, x: Complex<T>) -> Complex<T> {
        let mut v = self.centrifugal_value::<T>() / (x * x);
        for t in &self.terms {
            v += t.coeff.to_complex::<T>() * x.powi(t.power as i32);
        }
        v
    }
}

/// Planarized problem `-phi'' + [U(y) + L(L+1)/y^2] phi = E w y^q phi`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SturmProblem {
    pub potential: PotentialSpec,
    pub weight: Monomial,
    pub map_exponent: u32,
}

impl SturmProblem {
    /// The unweighted problem `-phi'' + V phi = E phi`.
    pub fn plain(potential: PotentialSpec) -> Self {
        Self {
            potential,
            weight: Monomial::new(GaussRat::int(1), 0),
            map_exponent: 1,
        }
    }

    /// Transformed angular momentum `L`.
    pub fn big_ell(&self) -> GaussRat {
        self.potential.ell()
    }

    pub fn coefficient_fn<T: Real>(&self) -> CoefficientFn<T> {
        CoefficientFn {
            terms: self
                .potential
                .terms()
                .iter()
                .map(|t| (t.coeff.to_complex(), t.power as i32))
                .collect(),
            centrifugal: self.potential.centrifugal_value(),
            weight: (self.weight.coeff.to_complex(), self.weight.power as i32),
        }
    }

    /// Canonical one-line text of the equation in the variable `var`.
    ///
    /// With `alpha` set, the centrifugal coefficient is printed symbolically as
    /// `m^2 alpha^2 - 1/4`, `alpha` being `l + 1/2` of the source problem.
    pub fn equation_text(&self, var: &str, alpha: bool) -> String {
        let mut lhs = format!("-d^2/d{var}^2");
        for t in self.potential.terms() {
            push_term(&mut lhs, t.coeff, &power_text(var, t.power));
        }
        let cent = if alpha {
            let m2 = (self.map_exponent as i64).pow(2);
            let lead = if m2 == 1 { String::new() } else { format!("{m2} ") };
            Some(format!("({lead}alpha^2 - 1/4)/{var}^2"))
        } else {
            let c = self.potential.centrifugal();
            (!c.is_zero()).then(|| format!("({c})/{var}^2"))
        };
        if let Some(c) = cent {
            lhs.push_str(" + ");
            lhs.push_str(&c);
        }
        let w = self.weight;
        let rhs = format!(
            "{} phi({var})",
            scaled_text(w.coeff, &format!("E{}", spaced(&power_text(var, w.power))))
        );
        format!("({lhs}) phi({var}) = {rhs}")
    }
}

fn spaced(s: &str) -> String {
    if s.is_empty() {
        String::new()
    } else {
        format!(" {s}")
    }
}

fn power_text(var: &str, p: i64) -> String {
    match p {
        0 => String::new(),
        1 => var.to_string(),
        _ => format!("{var}^{p}"),
    }
}

/// `coeff * body` with unit coefficients suppressed.
fn scaled_text(c: GaussRat, body: &str) -> String {
    let cs = c.to_string();
    if body.is_empty() {
        return cs;
    }
    match cs.as_str() {
        "1" => body.to_string(),
        "-1" => format!("-{body}"),
        _ if c.is_real() || c.re.is_zero() && !cs.contains('(') => format!("{cs} {body}"),
        _ => format!("({cs}) {body}"),
    }
}

fn push_term(out: &mut String, c: GaussRat, body: &str) {
    let negative_real = c.is_real() && c.re < Rational64::zero();
    let negative_imag = c.re.is_zero() && c.im < Rational64::zero();
    if negative_real || negative_imag {
        out.push_str(" - ");
        out.push_str(&scaled_text(-c, body));
    } else {
        out.push_str(" + ");
        out.push_str(&scaled_text(c, body));
    }
}

/// Numeric `Q(y, E) = U(y) + L(L+1)/y^2 - E W(y)`.
#[derive(Debug, Clone)]
pub struct CoefficientFn<T> {
    terms: Vec<(Complex<T>, i32)>,
    centrifugal: Complex<T>,
    weight: (Complex<T>, i32),
}

impl<T: Real> CoefficientFn<T> {
    pub fn potential(&self, y: Complex<T>) -> Complex<T> {
        let mut v = if self.centrifugal.is_zero() {
            Complex::zero()
        } else {
            self.centrifugal / (y * y)
        };
        for &(c, p) in &self.terms {
            v += c * y.powi(p);
        }
        v
    }

    pub fn weight(&self, y: Complex<T>) -> Complex<T> {
        self.weight.0 * y.powi(self.weight.1)
    }

    pub fn q(&self, y: Complex<T>, e: Complex<T>) -> Complex<T> {
        self.potential(y) - e * self.weight(y)
    }
}

/// Applies `i x = (i y)^m`, i.e. `x = i^(m-1) y^m` and `psi = sqrt(x'(y)) phi`.
pub fn rectify(problem: &PotentialSpec, m: u32) -> Result<SturmProblem> {
    if m == 0 {
        return Err(Error::InvalidInput("map exponent must be positive".into()));
    }
    let mi = m as i64;
    let m2 = GaussRat::int(mi * mi);
    let terms = problem
        .terms()
        .iter()
        .map(|t| {
            let power = mi * (t.power + 2) - 2;
            if power < -1 {
                return Err(Error::UnsupportedPower(t.power));
            }
            let coeff = t.coeff * m2 * GaussRat::i_pow((mi - 1) * (t.power + 2));
            Ok(Monomial::new(coeff, power))
        })
        .collect::<Result<Vec<_>>>()?;
    let half = GaussRat::frac(1, 2);
    let big_ell = GaussRat::int(mi) * (problem.ell() + half) - half;
    Ok(SturmProblem {
        potential: PotentialSpec::new(terms, big_ell)?,
        weight: Monomial::new(m2 * GaussRat::i_pow(2 * (mi - 1)), 2 * mi - 2),
        map_exponent: m,
    })
}

/// `sqrt(x'(y))` for `x = i^(m-1) y^m`, on the branch continuous in the lower
/// half-plane (principal logarithm of `i y`).
pub fn prefactor(m: u32, y: Complex64) -> Result<Complex64> {
    if y.norm() == 0.0 {
        return Err(Error::InvalidInput("prefactor is singular at y = 0".into()));
    }
    let iy = Complex64::i() * y;
    Ok(prefactor_from_log(m, iy.ln()))
}

/// `sqrt(x'(y(s)))` using the contour's continuous logarithm of `i y(s)`.
pub fn prefactor_on(contour: &Contour, m: u32, s: f64) -> Result<Complex64> {
    if !contour.avoids_origin() {
        return Err(Error::NearOrigin { s });
    }
    let l = contour.lift::<f64>(s);
    Ok(prefactor_from_log(m, Complex64::new(l.ln_r, l.theta)))
}

fn prefactor_from_log(m: u32, log_iy: Complex64) -> Complex64 {
    let mf = m as f64;
    mf.sqrt() * (log_iy * (0.5 * (mf - 1.0))).exp()
}

impl Serialize for SturmProblem {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Record {
            terms: Vec<(f64, f64, i64)>,
            big_ell: (f64, f64),
            weight: (f64, f64, i64),
            map_exponent: u32,
        }
        let c = |g: GaussRat| (rat_to_f64(g.re), rat_to_f64(g.im));
        Record {
            terms: self
                .potential
                .terms()
                .iter()
                .map(|t| {
                    let (re, im) = c(t.coeff);
                    (re, im, t.power)
                })
                .collect(),
            big_ell: c(self.big_ell()),
            weight: {
                let (re, im) = c(self.weight.coeff);
                (re, im, self.weight.power)
            },
            map_exponent: self.map_exponent,
        }
        .serialize(ser)
    }
}

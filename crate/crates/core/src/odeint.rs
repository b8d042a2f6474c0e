//! Adaptive Dormand-Prince integration of `phi'' = Q(y) phi` along a
//! parametrized complex path, with magnitude renormalization.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::complexpath::Path;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_step: T,
    pub min_step: T,
    pub max_steps: usize,
}

impl<T: Real> Default for IntegratorConfig<T> {
    fn default() -> Self {
        Self {
            rel_tol: T::lit(1e-10),
            abs_tol: T::lit(1e-12),
            max_step: T::lit(0.5),
            min_step: T::lit(1e-13),
            max_steps: 5_000_000,
        }
    }
}

impl<T: Real> IntegratorConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let ok = self.rel_tol > T::zero()
            && self.abs_tol > T::zero()
            && self.min_step > T::zero()
            && self.min_step < self.max_step;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(
                "integrator tolerances and step bounds must be positive with min_step < max_step".into(),
            ))
        }
    }
}

/// Solution value at one path point. The true values are
/// `(phi, dphi) * exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeState<T> {
    pub s: T,
    pub y: Complex<T>,
    pub phi: Complex<T>,
    pub dphi: Complex<T>,
    pub log_scale: T,
}

impl<T: Real> OdeState<T> {
    pub fn new(s: T, y: Complex<T>, phi: Complex<T>, dphi: Complex<T>) -> Self {
        Self {
            s,
            y,
            phi,
            dphi,
            log_scale: T::zero(),
        }
    }

    /// `ln |phi|` including the accumulated scale.
    pub fn log_abs_phi(&self) -> T {
        self.phi.norm().ln() + self.log_scale
    }
}

/// `phi_a dphi_b - phi_b dphi_a` as a mantissa and a log scale.
pub fn wronskian<T: Real>(a: &OdeState<T>, b: &OdeState<T>) -> (Complex<T>, T) {
    (a.phi * b.dphi - b.phi * a.dphi, a.log_scale + b.log_scale)
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const RESCALE_HIGH: f64 = 1e100;
const RESCALE_LOW: f64 = 1e-100;

/// Several solutions of the same equation sharing one log scale; slots are
/// `(phi_0, dphi_0, phi_1, dphi_1, ...)`.
struct Bundle<T, const N: usize> {
    s: T,
    v: [Complex<T>; N],
    log_scale: T,
}

struct Rhs<'a, T, P, F> {
    path: &'a P,
    q: &'a F,
    _t: std::marker::PhantomData<T>,
}

impl<'a, T: Real, P: Path<T>, F: Fn(Complex<T>) -> Complex<T>> Rhs<'a, T, P, F> {
    /// Derivatives in `s` plus `|Q|` at the point.
    fn eval<const N: usize>(&self, s: T, v: &[Complex<T>; N]) -> ([Complex<T>; N], T) {
        let j = self.path.jet(s);
        let qv = (self.q)(j.z);
        let mut out = [Complex::zero(); N];
        for k in (0..N).step_by(2) {
            out[k] = j.dz * v[k + 1];
            out[k + 1] = j.dz * qv * v[k];
        }
        (out, qv.norm())
    }
}

fn axpy<T: Real, const N: usize>(base: &[Complex<T>; N], h: T, terms: &[(T, &[Complex<T>; N])]) -> [Complex<T>; N] {
    let mut out = *base;
    for (c, k) in terms {
        if c.is_zero() {
            continue;
        }
        for i in 0..N {
            out[i] += k[i] * (h * *c);
        }
    }
    out
}

/// Weighted error norm: each solution is measured by its local amplitude
/// `max(|phi|, |dphi| / kappa)` with `kappa = 1 + sqrt|Q|`.
fn error_norm<T: Real, const N: usize>(
    old: &[Complex<T>; N],
    new: &[Complex<T>; N],
    err: &[Complex<T>; N],
    kappa: T,
    cfg: &IntegratorConfig<T>,
) -> T {
    let amp = |v: &[Complex<T>; N], k: usize| v[k].norm().max(v[k + 1].norm() / kappa);
    let mut total_amp = T::zero();
    for k in (0..N).step_by(2) {
        total_amp = total_amp.max(amp(old, k)).max(amp(new, k));
    }
    let mut worst = T::zero();
    for k in (0..N).step_by(2) {
        let a = amp(old, k).max(amp(new, k));
        let sc = cfg.rel_tol * a + cfg.abs_tol * total_amp;
        worst = worst.max(err[k].norm() / sc).max(err[k + 1].norm() / (sc * kappa));
    }
    worst
}

fn renormalize<T: Real, const N: usize>(b: &mut Bundle<T, N>) {
    let big = b.v.iter().fold(T::zero(), |m, z| m.max(z.norm()));
    if big > T::lit(RESCALE_HIGH) || (big < T::lit(RESCALE_LOW) && big > T::zero()) {
        for z in b.v.iter_mut() {
            *z /= big;
        }
        b.log_scale += big.ln();
    }
}

/// Solution, error estimate and last stage of one step, plus `|Q|` there.
type StepOut<T, const N: usize> = ([Complex<T>; N], [Complex<T>; N], [Complex<T>; N], T);

/// One Dormand-Prince step from `(s, v)` with first stage `k1`; returns the
/// fifth-order solution, the embedded error, the last stage and `|Q|` there.
fn dp_step<T, P, F, const N: usize>(
    rhs: &Rhs<'_, T, P, F>,
    s: T,
    v: &[Complex<T>; N],
    k1: &[Complex<T>; N],
    hs: T,
    s_new: T,
) -> StepOut<T, N>
where
    T: Real,
    P: Path<T>,
    F: Fn(Complex<T>) -> Complex<T>,
{
    let c = |i: usize| T::lit(C[i]);
    let a = |i: usize, j: usize| T::lit(A[i][j]);
    let k2 = rhs.eval(s + hs * c(1), &axpy(v, hs, &[(a(1, 0), k1)])).0;
    let k3 = rhs
        .eval(s + hs * c(2), &axpy(v, hs, &[(a(2, 0), k1), (a(2, 1), &k2)]))
        .0;
    let k4 = rhs
        .eval(
            s + hs * c(3),
            &axpy(v, hs, &[(a(3, 0), k1), (a(3, 1), &k2), (a(3, 2), &k3)]),
        )
        .0;
    let k5 = rhs
        .eval(
            s + hs * c(4),
            &axpy(v, hs, &[(a(4, 0), k1), (a(4, 1), &k2), (a(4, 2), &k3), (a(4, 3), &k4)]),
        )
        .0;
    let k6 = rhs
        .eval(
            s + hs * c(5),
            &axpy(
                v,
                hs,
                &[
                    (a(5, 0), k1),
                    (a(5, 1), &k2),
                    (a(5, 2), &k3),
                    (a(5, 3), &k4),
                    (a(5, 4), &k5),
                ],
            ),
        )
        .0;
    let new = axpy(
        v,
        hs,
        &[
            (a(6, 0), k1),
            (a(6, 2), &k3),
            (a(6, 3), &k4),
            (a(6, 4), &k5),
            (a(6, 5), &k6),
        ],
    );
    let (k7, q_new) = rhs.eval(s_new, &new);
    let e = |i: usize| T::lit(E[i]);
    let err = axpy(
        &[Complex::zero(); N],
        hs,
        &[
            (e(0), k1),
            (e(2), &k3),
            (e(3), &k4),
            (e(4), &k5),
            (e(5), &k6),
            (e(6), &k7),
        ],
    );
    (new, err, k7, q_new)
}

fn integrate_bundle<T, P, F, const N: usize>(
    path: &P,
    q: &F,
    mut b: Bundle<T, N>,
    s_to: T,
    cfg: &IntegratorConfig<T>,
    mut dense: Option<&mut Vec<OdeState<T>>>,
) -> Result<Bundle<T, N>>
where
    T: Real,
    P: Path<T>,
    F: Fn(Complex<T>) -> Complex<T>,
{
    cfg.validate()?;
    let rhs = Rhs {
        path,
        q,
        _t: std::marker::PhantomData,
    };
    let span = s_to - b.s;
    if span.is_zero() {
        return Ok(b);
    }
    let dir = span.signum();
    let push = |dense: &mut Option<&mut Vec<OdeState<T>>>, b: &Bundle<T, N>| {
        if let Some(d) = dense.as_deref_mut() {
            d.push(OdeState {
                s: b.s,
                y: path.jet(b.s).z,
                phi: b.v[0],
                dphi: b.v[1],
                log_scale: b.log_scale,
            });
        }
    };
    push(&mut dense, &b);
    let (mut k1, mut qabs) = rhs.eval(b.s, &b.v);
    let speed = path.jet(b.s).dz.norm().max(T::lit(1e-300));
    let mut h = cfg
        .max_step
        .min(span.abs())
        .min(T::lit(0.1) / ((T::one() + qabs.sqrt()) * speed));
    h = h.max(cfg.min_step);
    let mut steps = 0usize;
    while (s_to - b.s) * dir > T::zero() {
        steps += 1;
        if steps > cfg.max_steps {
            return Err(Error::TooManySteps(cfg.max_steps));
        }
        let remaining = (s_to - b.s).abs();
        let last = h >= remaining;
        let hs = if last { remaining } else { h } * dir;
        let s_new = if last { s_to } else { b.s + hs };
        let (new, err, k7, q_new) = dp_step(&rhs, b.s, &b.v, &k1, hs, s_new);
        let kappa = T::one() + qabs.max(q_new).sqrt();
        let en = error_norm(&b.v, &new, &err, kappa, cfg);
        if !en.is_finite() || new.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            h *= T::lit(0.25);
            if h < cfg.min_step {
                return Err(Error::NonFinite { s: b.s.to_f64_lossy() });
            }
            continue;
        }
        let factor = if en.is_zero() {
            T::lit(5.0)
        } else {
            (T::lit(0.9) * en.powf(T::lit(-0.2))).min(T::lit(5.0)).max(T::lit(0.2))
        };
        if en <= T::one() {
            b.s = s_new;
            b.v = new;
            k1 = k7;
            qabs = q_new;
            let before = b.log_scale;
            renormalize(&mut b);
            if b.log_scale != before {
                k1 = rhs.eval(b.s, &b.v).0;
            }
            push(&mut dense, &b);
            h = (h * factor).min(cfg.max_step);
        } else {
            h *= factor;
            if h < cfg.min_step {
                return Err(Error::StepUnderflow {
                    s: b.s.to_f64_lossy(),
                    step: h.to_f64_lossy(),
                });
            }
        }
    }
    Ok(b)
}

/// Integrates one solution from `init.s` to `s_to`.
pub fn integrate_along<T, P, F>(
    path: &P,
    q: F,
    s_to: T,
    init: OdeState<T>,
    cfg: &IntegratorConfig<T>,
    dense: Option<&mut Vec<OdeState<T>>>,
) -> Result<OdeState<T>>
where
    T: Real,
    P: Path<T>,
    F: Fn(Complex<T>) -> Complex<T>,
{
    let b = Bundle {
        s: init.s,
        v: [init.phi, init.dphi],
        log_scale: init.log_scale,
    };
    let out = integrate_bundle(path, &q, b, s_to, cfg, dense)?;
    Ok(OdeState {
        s: out.s,
        y: path.jet(out.s).z,
        phi: out.v[0],
        dphi: out.v[1],
        log_scale: out.log_scale,
    })
}

/// Integrates two solutions together; both results carry the same log scale.
pub fn integrate_pair<T, P, F>(
    path: &P,
    q: F,
    s_to: T,
    a: OdeState<T>,
    b: OdeState<T>,
    cfg: &IntegratorConfig<T>,
) -> Result<(OdeState<T>, OdeState<T>)>
where
    T: Real,
    P: Path<T>,
    F: Fn(Complex<T>) -> Complex<T>,
{
    if a.s != b.s {
        return Err(Error::InvalidInput("paired states must start at the same s".into()));
    }
    // Bring both to a common scale.
    let shift = b.log_scale - a.log_scale;
    let (fa, fb, base) = if shift > T::zero() {
        (T::one(), shift.exp(), a.log_scale)
    } else {
        ((-shift).exp(), T::one(), b.log_scale)
    };
    let bundle = Bundle {
        s: a.s,
        v: [a.phi * fa, a.dphi * fa, b.phi * fb, b.dphi * fb],
        log_scale: base,
    };
    let out = integrate_bundle(path, &q, bundle, s_to, cfg, None)?;
    let y = path.jet(out.s).z;
    let mk = |phi, dphi| OdeState {
        s: out.s,
        y,
        phi,
        dphi,
        log_scale: out.log_scale,
    };
    Ok((mk(out.v[0], out.v[1]), mk(out.v[2], out.v[3])))
}

/// The fifth-order Dormand-Prince solution with `n` equal steps, for order
/// checks of the adaptive scheme.
pub fn integrate_fixed<T, P, F>(path: &P, q: F, s_to: T, init: OdeState<T>, n: usize) -> OdeState<T>
where
    T: Real,
    P: Path<T>,
    F: Fn(Complex<T>) -> Complex<T>,
{
    let rhs = Rhs {
        path,
        q: &q,
        _t: std::marker::PhantomData,
    };
    let h = (s_to - init.s) / T::lit(n as f64);
    let mut v = [init.phi, init.dphi];
    let mut s = init.s;
    for _ in 0..n {
        let k1 = rhs.eval(s, &v).0;
        v = dp_step(&rhs, s, &v, &k1, h, s + h).0;
        s += h;
    }
    OdeState {
        s: s_to,
        y: path.jet(s_to).z,
        phi: v[0],
        dphi: v[1],
        log_scale: init.log_scale,
    }
}

/// WKB seed `phi = Q^{-1/4}`, `dphi = -Q^{1/2} phi` on the branch with
/// `Re(Q^{1/2} dir) > 0`, so the solution decays when continued along `dir`.
pub fn wkb_seed<T: Real>(q_far: Complex<T>, e_abs: T, y_far: Complex<T>, dir: Complex<T>, s: T) -> Result<OdeState<T>> {
    let guard = T::lit(25.0) * e_abs.max(T::one());
    if q_far.norm() <= guard {
        return Err(Error::WeakSeed {
            q: q_far.norm().to_f64_lossy(),
            guard: guard.to_f64_lossy(),
        });
    }
    let mut root = q_far.sqrt();
    let proj = (root * dir).re;
    if proj.abs() < T::lit(1e-6) * root.norm() {
        return Err(Error::AmbiguousSeed);
    }
    if proj < T::zero() {
        root = -root;
    }
    let phi = Complex::<T>::one() / root.sqrt();
    Ok(OdeState::new(s, y_far, phi, -root * phi))
}

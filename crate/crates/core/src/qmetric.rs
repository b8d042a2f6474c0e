//! Biorthogonal eigenbases of a matrix pencil `(H, W)` and the metric `Theta`
//! that makes both `H` and `W` quasi-Hermitian.
//!
//! Right vectors solve `H r = lambda W r`, left vectors `H^dagger l =
//! conj(lambda) W^dagger l`, normalized so that `l^dagger W r = 1`. The metric
//! is the sum `Theta = sum_i kappa_i l_i l_i^dagger W`. Each right vector is
//! only fixed up to a scale `a_i`, which changes its term by `1 / |a_i|^2`; the
//! real weights `kappa_i` absorb that freedom and are chosen so the sum is
//! Hermitian. When the plain sum is already Hermitian they are all one.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{condition_number, eig, hermitian_eigenvalues, Lu, Mat};
use crate::CMatrix as CMat;

pub const MAX_DIM: usize = 64;
/// Relative gap below which two eigenvalues count as one.
pub const DEGENERACY_TOL: f64 = 1e-8;
/// Largest acceptable condition number of `W`.
pub const MAX_WEIGHT_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct Pencil {
    h: CMat,
    w: CMat,
    weight_condition: f64,
}

impl Pencil {
    pub fn new(h: CMat, w: CMat) -> Result<Self> {
        if !h.is_square() || h.rows() != w.rows() || h.cols() != w.cols() {
            return Err(Error::InvalidInput(format!(
                "pencil needs square matrices of equal size, got {}x{} and {}x{}",
                h.rows(),
                h.cols(),
                w.rows(),
                w.cols()
            )));
        }
        if h.rows() == 0 || h.rows() > MAX_DIM {
            return Err(Error::InvalidInput(format!(
                "pencil dimension must be in 1..={MAX_DIM}, got {}",
                h.rows()
            )));
        }
        let weight_condition = condition_number(&w).map_err(|_| Error::SingularPencil(f64::INFINITY))?;
        if !(weight_condition <= MAX_WEIGHT_CONDITION) {
            return Err(Error::SingularPencil(weight_condition));
        }
        Ok(Self { h, w, weight_condition })
    }

    pub fn h(&self) -> &CMat {
        &self.h
    }

    pub fn w(&self) -> &CMat {
        &self.w
    }

    pub fn dim(&self) -> usize {
        self.h.rows()
    }

    /// 1-norm condition number of `W`.
    pub fn weight_condition(&self) -> f64 {
        self.weight_condition
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: PencilFile =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("pencil JSON: {e}")))?;
        Self::new(matrix_from_pairs(&file.h, "h")?, matrix_from_pairs(&file.w, "w")?)
    }

    pub fn to_json(&self) -> String {
        let file = PencilFile {
            h: matrix_to_pairs(&self.h),
            w: matrix_to_pairs(&self.w),
        };
        serde_json::to_string_pretty(&file).expect("pencil serializes")
    }
}

/// On-disk form: each entry is `[re, im]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PencilFile {
    pub h: Vec<Vec<[f64; 2]>>,
    pub w: Vec<Vec<[f64; 2]>>,
}

pub fn matrix_to_pairs(m: &CMat) -> Vec<Vec<[f64; 2]>> {
    m.to_rows()
        .iter()
        .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

pub fn matrix_from_pairs(rows: &[Vec<[f64; 2]>], name: &str) -> Result<CMat> {
    let rows: Vec<Vec<Complex64>> = rows
        .iter()
        .map(|row| row.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
        .collect();
    Mat::from_rows(&rows).map_err(|e| Error::InvalidInput(format!("matrix {name}: {e}")))
}

/// Biorthonormal eigensystem of a pencil; column `i` of `right` and `left`
/// belongs to `eigenvalues[i]`.
#[derive(Debug, Clone)]
pub struct Biorthogonal {
    pub pencil: Pencil,
    pub eigenvalues: Vec<Complex64>,
    pub right: CMat,
    pub left: CMat,
}

impl Biorthogonal {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `l_i^dagger W r_j`, which should be the identity.
    pub fn overlaps(&self) -> CMat {
        &(&self.left.adjoint() * self.pencil.w()) * &self.right
    }

    /// Largest entry of `overlaps - I`.
    pub fn orthogonality_defect(&self) -> f64 {
        (&self.overlaps() - &Mat::identity(self.len())).max_abs()
    }

    /// Keeps only the listed eigenpairs.
    pub fn subset(&self, keep: &[usize]) -> Self {
        let pick = |m: &CMat| {
            let mut out = Mat::zeros(m.rows(), keep.len());
            for (k, &i) in keep.iter().enumerate() {
                out.set_col(k, &m.col(i));
            }
            out
        };
        Self {
            pencil: self.pencil.clone(),
            eigenvalues: keep.iter().map(|&i| self.eigenvalues[i]).collect(),
            right: pick(&self.right),
            left: pick(&self.left),
        }
    }
}

/// Scales `v` so its largest-magnitude component is exactly one.
fn unit_peak(v: &mut [Complex64]) {
    let peak = v
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or_default();
    if peak.norm() > 0.0 {
        for x in v.iter_mut() {
            *x /= peak;
        }
    }
}

pub fn solve_biorthogonal(pencil: &Pencil) -> Result<Biorthogonal> {
    let n = pencil.dim();
    let w_lu = Lu::new(pencil.w())?;
    let wh_lu = Lu::new(&pencil.w().adjoint())?;
    let right_sys = eig(&w_lu.solve_mat(pencil.h()))?;
    let left_sys = eig(&wh_lu.solve_mat(&pencil.h().adjoint()))?;

    let values = right_sys.values;
    for i in 0..n {
        for j in i + 1..n {
            let scale = values[i].norm().max(values[j].norm()).max(1.0);
            if (values[i] - values[j]).norm() < DEGENERACY_TOL * scale {
                return Err(Error::Degenerate(values[i].to_string(), values[j].to_string()));
            }
        }
    }

    let mut used = vec![false; n];
    let mut right = Mat::zeros(n, n);
    let mut left = Mat::zeros(n, n);
    for (i, lambda) in values.iter().enumerate() {
        let j = (0..n)
            .filter(|&j| !used[j])
            .min_by(|&a, &b| {
                let da = (left_sys.values[a] - lambda.conj()).norm();
                let db = (left_sys.values[b] - lambda.conj()).norm();
                da.total_cmp(&db)
            })
            .expect("one unused left vector per right vector");
        used[j] = true;
        let mut r = right_sys.vectors.col(i);
        unit_peak(&mut r);
        let l = left_sys.vectors.col(j);
        let wr = pencil.w().mul_vec(&r);
        let overlap = crate::linalg::inner(&l, &wr);
        if overlap.norm() < f64::EPSILON {
            return Err(Error::NoConvergence(format!(
                "left and right vectors of {lambda} are W-orthogonal"
            )));
        }
        // l <- l / conj(overlap) makes l^dagger W r = 1.
        let scale = overlap.conj().inv();
        right.set_col(i, &r);
        left.set_col(i, &l.iter().map(|x| x * scale).collect::<Vec<_>>());
    }
    Ok(Biorthogonal {
        pencil: pencil.clone(),
        eigenvalues: values,
        right,
        left,
    })
}

#[derive(Debug, Clone)]
pub struct MetricBundle {
    pub eigenvalues: Vec<Complex64>,
    pub right: CMat,
    pub left: CMat,
    /// Weight of each term in the metric sum.
    pub calibration: Vec<f64>,
    pub theta: CMat,
    /// Relative Frobenius residuals of `H^dagger Theta = Theta H` and
    /// `W^dagger Theta = Theta W`.
    pub dieudonne: (f64, f64),
    /// `|Theta - Theta^dagger|_F / |Theta|_F`.
    pub hermiticity: f64,
    /// Smallest eigenvalue of the Hermitian part of `Theta W`.
    pub positivity: f64,
}

impl MetricBundle {
    pub fn all_real(&self, tol: f64) -> bool {
        self.eigenvalues.iter().all(|z| z.im.abs() <= tol * z.norm().max(1.0))
    }
}

/// Relative Frobenius norm of `A^dagger Theta - Theta A`.
pub fn dieudonne_residual(a: &CMat, theta: &CMat) -> f64 {
    let lhs = &a.adjoint() * theta;
    let rhs = theta * a;
    let scale = a.frobenius() * theta.frobenius();
    if scale == 0.0 {
        return 0.0;
    }
    (&lhs - &rhs).frobenius() / scale
}

/// Real weights `kappa` with `sum_i kappa_i l_i l_i^dagger W` Hermitian.
///
/// Hermiticity in the right basis reads `kappa_j (r_i^dagger l_j) = kappa_i
/// conj(r_j^dagger l_i)`, a real homogeneous system. The weights are the
/// projection of the all-ones vector onto its null space.
fn calibrate(right: &CMat, left: &CMat) -> Vec<f64> {
    let n = right.cols();
    let a = &right.adjoint() * left;
    let mut rows = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in i..n {
            let mut re = vec![0.0; n];
            let mut im = vec![0.0; n];
            let (aij, aji) = (a[(i, j)], a[(j, i)].conj());
            re[j] += aij.re;
            im[j] += aij.im;
            re[i] -= aji.re;
            im[i] -= aji.im;
            rows.push(re);
            rows.push(im);
        }
    }
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    let (sigma, v) = jacobi_svd(&rows, n);
    let null: Vec<&Vec<f64>> = sigma
        .iter()
        .zip(&v)
        .filter(|(s, _)| **s <= 1e-10 * scale)
        .map(|(_, col)| col)
        .collect();
    let mut kappa = vec![0.0; n];
    for col in null {
        let weight: f64 = col.iter().sum();
        for (k, c) in kappa.iter_mut().zip(col) {
            *k += weight * c;
        }
    }
    kappa
}

/// One-sided Jacobi SVD of a real `m x n` matrix given by rows. Returns the
/// singular values and the matching right singular vectors.
fn jacobi_svd(rows: &[Vec<f64>], n: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|i| f64::from(u8::from(i == j))).collect())
        .collect();
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for m in [&mut cols, &mut v] {
                    let (head, tail) = m.split_at_mut(q);
                    for (x, y) in head[p].iter_mut().zip(tail[0].iter_mut()) {
                        let (a, b) = (*x, *y);
                        *x = c * a - s * b;
                        *y = s * a + c * b;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    (cols.iter().map(|c| dot(c, c).sqrt()).collect(), v)
}

pub fn assemble_theta(systems: &Biorthogonal) -> Result<MetricBundle> {
    let n = systems.len();
    let w = systems.pencil.w();
    let calibration = calibrate(&systems.right, &systems.left);
    let mut theta = Mat::zeros(n, n);
    for (i, kappa) in calibration.iter().enumerate() {
        let l = systems.left.col(i);
        // kappa l (l^dagger W)
        let lw = w.adjoint().mul_vec(&l);
        for a in 0..n {
            for b in 0..n {
                theta[(a, b)] += l[a] * lw[b].conj() * *kappa;
            }
        }
    }
    let theta_w = &theta * w;
    let positivity = hermitian_eigenvalues(&theta_w)?.first().copied().unwrap_or(f64::NAN);
    let hermiticity = theta.hermiticity_defect() / theta.frobenius().max(f64::MIN_POSITIVE);
    Ok(MetricBundle {
        eigenvalues: systems.eigenvalues.clone(),
        right: systems.right.clone(),
        left: systems.left.clone(),
        calibration,
        dieudonne: (
            dieudonne_residual(systems.pencil.h(), &theta),
            dieudonne_residual(w, &theta),
        ),
        hermiticity,
        theta,
        positivity,
    })
}

/// `sum_i r_i (l_i^dagger W)`, the identity for a complete system.
fn resolution(systems: &Biorthogonal) -> CMat {
    &(&systems.right * &systems.left.adjoint()) * systems.pencil.w()
}

/// Spectral norm of `I - sum_i r_i (l_i^dagger W)`.
pub fn completeness_residual(systems: &Biorthogonal) -> Result<f64> {
    let n = systems.pencil.dim();
    (&Mat::identity(n) - &resolution(systems)).spectral_norm()
}

/// Relative spectral-norm residuals of `H = sum_i W r_i lambda_i l_i^dagger W`
/// and `W = sum_i W r_i l_i^dagger W`.
pub fn spectral_residuals(systems: &Biorthogonal) -> Result<(f64, f64)> {
    let (h, w) = (systems.pencil.h(), systems.pencil.w());
    let wr = w * &systems.right;
    let lw = &systems.left.adjoint() * w;
    let lambda = Mat::diag(&systems.eigenvalues);
    let h_sum = &(&wr * &lambda) * &lw;
    let w_sum = &wr * &lw;
    let rel = |a: &CMat, b: &CMat| -> Result<f64> {
        Ok((a - b).spectral_norm()? / a.spectral_norm()?.max(f64::MIN_POSITIVE))
    };
    Ok((rel(h, &h_sum)?, rel(w, &w_sum)?))
}

/// A pencil similar to a Hermitian-definite one, with its Dyson map.
#[derive(Debug, Clone)]
pub struct DysonPencil {
    pub pencil: Pencil,
    pub omega: CMat,
    /// `Omega^dagger Omega`, a second admissible metric.
    pub metric: CMat,
}

pub const MAX_OMEGA_CONDITION: f64 = 1e3;
const DYSON_RETRIES: usize = 100;

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    Mat::from_fn(n, n, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

/// Draws Hermitian `h`, positive-definite `w` and `Omega`, and returns
/// `H = Omega^-1 h Omega`, `W = Omega^-1 w Omega`.
pub fn random_dyson_pencil(dim: usize, seed: u64) -> Result<DysonPencil> {
    if !(2..=MAX_DIM).contains(&dim) {
        return Err(Error::InvalidInput(format!(
            "Dyson pencil dimension must be in 2..={MAX_DIM}, got {dim}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = random_matrix(&mut rng, dim);
    let h = (&g + &g.adjoint()).scale(Complex64::new(0.5, 0.0));
    let b = random_matrix(&mut rng, dim);
    let w = &(&b * &b.adjoint()).scale(Complex64::new(1.0 / dim as f64, 0.0))
        + &Mat::identity(dim).scale(Complex64::new(0.5, 0.0));
    for _ in 0..DYSON_RETRIES {
        let noise = random_matrix(&mut rng, dim).scale(Complex64::new(1.0 / (dim as f64).sqrt(), 0.0));
        let omega = &Mat::identity(dim) + &noise;
        let Ok(cond) = condition_number(&omega) else { continue };
        if cond > MAX_OMEGA_CONDITION {
            continue;
        }
        let inv = Lu::new(&omega)?.inverse();
        let pencil = Pencil::new(&(&inv * &h) * &omega, &(&inv * &w) * &omega)?;
        let metric = &omega.adjoint() * &omega;
        return Ok(DysonPencil { pencil, omega, metric });
    }
    Err(Error::NoConvergence(format!(
        "no Dyson map with condition below {MAX_OMEGA_CONDITION:e} in {DYSON_RETRIES} draws"
    )))
}

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use toboggan::linalg::{condition_number, eig, hermitian_eigenvalues, Lu, Mat, Tridiag, TridiagLu};

fn random(n: usize, seed: u64) -> Mat<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Mat::from_fn(n, n, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

#[test]
fn eig_residuals_on_random_matrices() {
    for (n, seed) in [(3, 1), (8, 2), (16, 3), (40, 4)] {
        let a = random(n, seed);
        let e = eig(&a).unwrap();
        for k in 0..n {
            let v = e.vectors.col(k);
            let av = a.mul_vec(&v);
            let r = av
                .iter()
                .zip(&v)
                .map(|(x, y)| (x - e.values[k] * y).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(r < 1e-12 * a.frobenius(), "n={n} k={k} r={r}");
        }
        let trace: Complex64 = (0..n).map(|i| a[(i, i)]).sum();
        let sum: Complex64 = e.values.iter().sum();
        assert!((trace - sum).norm() < 1e-11 * n as f64);
    }
}

#[test]
fn hermitian_spectrum_is_real_and_sorted() {
    let a = random(10, 7);
    let h = &(&a * &a.adjoint()) + &Mat::identity(10);
    let ev = hermitian_eigenvalues(&h).unwrap();
    assert!(ev.windows(2).all(|w| w[0] <= w[1]));
    assert!(ev[0] >= 1.0 - 1e-12);
    let trace: f64 = (0..10).map(|i| h[(i, i)].re).sum();
    assert!((trace - ev.iter().sum::<f64>()).abs() < 1e-10);
}

#[test]
fn lu_inverse_and_condition() {
    let a = random(12, 11);
    let inv = Lu::new(&a).unwrap().inverse();
    let id = &a * &inv;
    assert!((&id - &Mat::identity(12)).frobenius() < 1e-12);
    assert!((condition_number(&Mat::<f64>::identity(5)).unwrap() - 1.0).abs() < 1e-15);
    assert!(Lu::new(&Mat::<f64>::zeros(3, 3)).is_err());
}

#[test]
fn spectral_norm_of_diagonal() {
    let d = Mat::diag(&[Complex64::new(3.0, 4.0), Complex64::new(1.0, 0.0)]);
    assert!((d.spectral_norm().unwrap() - 5.0).abs() < 1e-13);
}

proptest! {
    #[test]
    fn tridiagonal_lu_solves(seed in 0u64..1000, n in 1usize..30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |k: usize| (0..k).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect::<Vec<_>>();
        let t = Tridiag { lower: draw(n - 1), diag: draw(n), upper: draw(n - 1) };
        let b = draw(n);
        if let Ok(lu) = TridiagLu::new(&t) {
            let x = lu.solve(&b);
            let r = t.mul_vec(&x);
            let scale = 1.0 + x.iter().map(|z| z.norm()).fold(0.0, f64::max);
            for (p, q) in r.iter().zip(&b) {
                prop_assert!((p - q).norm() < 1e-10 * scale);
            }
        }
    }
}

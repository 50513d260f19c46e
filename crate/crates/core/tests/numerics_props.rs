use num_complex::Complex;
use proptest::prelude::*;
use zigzag::numerics::{
    dft, eig_hermitian, eig_symmetric, eigvals_symmetric, idft, savitzky_golay, HermitianMatrix, RandomStream,
    SymmetricMatrix,
};

fn random_hermitian(dim: usize, seed: u64, real: bool) -> HermitianMatrix<f64> {
    let mut rng = RandomStream::new(seed, dim as u64);
    let mut m = HermitianMatrix::zeros(dim);
    for i in 0..dim {
        for j in i..dim {
            let re = rng.uniform(-1.0, 1.0).unwrap();
            let im = if real || i == j { 0.0 } else { rng.uniform(-1.0, 1.0).unwrap() };
            m.set(i, j, Complex::new(re, im));
        }
    }
    m
}

fn check_decomposition(m: &HermitianMatrix<f64>) {
    let n = m.dim();
    let s = eig_hermitian(m).unwrap();
    let norm = m.frobenius_norm();
    assert!(s.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
    assert!(s.max_residual(m) <= 1e-9 * (1.0 + norm));
    for a in 0..n {
        for b in a..n {
            let dot: Complex<f64> = s.vector(a).iter().zip(s.vector(b)).map(|(x, y)| x.conj() * y).sum();
            let want = if a == b { 1.0 } else { 0.0 };
            assert!((dot - want).norm() < 1e-9, "overlap ({a},{b}) = {dot}");
        }
    }
    let mut err = 0.0;
    for i in 0..n {
        for j in 0..n {
            let r: Complex<f64> =
                (0..n).map(|k| s.vector(k)[i] * s.vector(k)[j].conj() * s.eigenvalue(k)).sum();
            err += (r - m.get(i, j)).norm_sqr();
        }
    }
    assert!(err.sqrt() <= 1e-9 * norm, "reconstruction error {}", err.sqrt() / norm);
    let tr: f64 = s.eigenvalues().iter().sum();
    assert!((tr - m.trace()).abs() <= 1e-10 * (1.0 + m.trace().abs()).max(norm));
}

#[test]
fn reconstruction_up_to_256() {
    for (dim, real) in [(2, false), (3, true), (17, false), (64, true), (64, false), (256, false), (256, true)] {
        check_decomposition(&random_hermitian(dim, 11, real));
    }
}

#[test]
fn degenerate_spectrum_is_orthonormal() {
    // Block-diagonal copy of the same matrix: every eigenvalue doubly degenerate.
    let base = random_hermitian(12, 5, false);
    let mut m = HermitianMatrix::zeros(24);
    for i in 0..12 {
        for j in i..12 {
            m.set(i, j, base.get(i, j));
            m.set(i + 12, j + 12, base.get(i, j));
        }
    }
    check_decomposition(&m);
}

#[test]
fn symmetric_path_matches_hermitian_path() {
    let h = random_hermitian(40, 9, true);
    let data: Vec<f64> = h.as_slice().iter().map(|z| z.re).collect();
    let s = SymmetricMatrix::from_row_major(40, data).unwrap();
    let (vals, vecs) = eig_symmetric(&s).unwrap();
    let only = eigvals_symmetric(&s).unwrap();
    let full = eig_hermitian(&h).unwrap();
    for k in 0..40 {
        assert!((vals[k] - full.eigenvalue(k)).abs() < 1e-12);
        assert!((vals[k] - only[k]).abs() < 1e-12);
        let v = &vecs[k * 40..(k + 1) * 40];
        let hv = h.matvec(&v.iter().map(|&x| Complex::new(x, 0.0)).collect::<Vec<_>>());
        let res: f64 = hv.iter().zip(v).map(|(a, &b)| (a.re - vals[k] * b).powi(2)).sum::<f64>().sqrt();
        assert!(res < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn random_hermitian_contract(dim in 1usize..24, seed in any::<u64>(), real in any::<bool>()) {
        check_decomposition(&random_hermitian(dim, seed, real));
    }

    #[test]
    fn parseval(xs in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 1..64)) {
        let x: Vec<Complex<f64>> = xs.iter().map(|&(a, b)| Complex::new(a, b)).collect();
        let y = dft(&x);
        let e_in: f64 = x.iter().map(|z| z.norm_sqr()).sum();
        let e_out: f64 = y.iter().map(|z| z.norm_sqr()).sum::<f64>() / x.len() as f64;
        prop_assert!((e_in - e_out).abs() <= 1e-10 * e_in.max(1e-300));
        let back = idft(&y);
        for (a, b) in back.iter().zip(&x) {
            prop_assert!((a - b).norm() < 1e-10 * (1.0 + b.norm()));
        }
    }

    #[test]
    fn savgol_reproduces_low_degree(c0 in -5.0f64..5.0, c1 in -5.0f64..5.0, c2 in -1.0f64..1.0,
                                    half in 1usize..5, extra in 0usize..10) {
        let window = 2 * half + 1;
        let len = window.max(3) + extra;
        let y: Vec<f64> = (0..len).map(|n| { let t = n as f64; c0 + c1 * t + c2 * t * t }).collect();
        let order = 2.min(window - 1);
        let s = savitzky_golay(&y, window, order).unwrap();
        let scale = y.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for (a, b) in s.iter().zip(&y) {
            if order == 2 {
                prop_assert!((a - b).abs() < 1e-10 * scale);
            }
        }
    }

    #[test]
    fn streams_reproduce(seed in any::<u64>(), stream in 0u64..1000) {
        let mut a = RandomStream::new(seed, stream);
        let mut b = RandomStream::new(seed, stream);
        for _ in 0..16 {
            prop_assert_eq!(a.uniform(-1.0, 2.0).unwrap(), b.uniform(-1.0, 2.0).unwrap());
        }
    }
}

//! Plain O(L²) discrete Fourier transform with the e^{−iKn} sign convention.

use num_complex::Complex;

use crate::scalar::Real;

fn twiddles<T: Real>(len: usize, sign: T) -> Vec<Complex<T>> {
    let step = sign * T::TAU() / T::from_usize(len).unwrap_or_else(T::one);
    (0..len)
        .map(|m| Complex::from_polar(T::one(), step * T::from_usize(m).unwrap_or_else(T::zero)))
        .collect()
}

fn transform<T: Real>(x: &[Complex<T>], sign: T) -> Vec<Complex<T>> {
    let len = x.len();
    let w = twiddles(len, sign);
    (0..len)
        .map(|j| {
            x.iter()
                .enumerate()
                .fold(Complex::new(T::zero(), T::zero()), |acc, (n, &xn)| acc + xn * w[(j * n) % len])
        })
        .collect()
}

/// X_j = Σ_n x_n e^{−i(2πj/L)n}.
pub fn dft<T: Real>(x: &[Complex<T>]) -> Vec<Complex<T>> {
    transform(x, -T::one())
}

/// Inverse of [`dft`], including the 1/L factor.
pub fn idft<T: Real>(x: &[Complex<T>]) -> Vec<Complex<T>> {
    let scale = T::one() / T::from_usize(x.len().max(1)).unwrap_or_else(T::one);
    transform(x, T::one()).into_iter().map(|z| z * scale).collect()
}

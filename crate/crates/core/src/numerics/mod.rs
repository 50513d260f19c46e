//! Numerical kernels: eigensolvers, determinants, DFT, smoothing, random streams.

mod dft;
mod eigen;
mod fit;
mod matrix;
mod rng;
mod savgol;

pub use dft::{dft, idft};
pub use eigen::{eig_hermitian, eig_symmetric, eigvals_hermitian, eigvals_symmetric, Spectrum};
pub use fit::{fit_line, LineFit};
pub use matrix::{det2, HermitianMatrix, SymmetricMatrix};
pub use rng::RandomStream;
pub use savgol::{savgol_weights, savitzky_golay};

/// Population mean and standard deviation with compensated accumulation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    if values.iter().all(|&v| v == values[0]) {
        return (values[0], 0.0);
    }
    let n = values.len() as f64;
    let mean = kahan_sum(values.iter().copied()) / n;
    let var = kahan_sum(values.iter().map(|v| (v - mean) * (v - mean))) / n;
    (mean, var.max(0.0).sqrt())
}

fn kahan_sum(it: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in it {
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

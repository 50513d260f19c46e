use num_complex::Complex;

use crate::error::{invalid, Result};
use crate::scalar::Real;

/// Dense complex Hermitian matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix<T: Real = f64> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> HermitianMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![Complex::new(T::zero(), T::zero()); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex::new(T::one(), T::zero());
        }
        m
    }

    /// Validated constructor from row-major entries.
    pub fn from_row_major(dim: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if dim == 0 {
            return invalid("matrix dimension must be at least 1");
        }
        if data.len() != dim * dim {
            return invalid(format!("expected {} entries, got {}", dim * dim, data.len()));
        }
        let m = Self { dim, data };
        m.check_hermitian()?;
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<Complex<T>>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return invalid("rows must form a square matrix");
        }
        Self::from_row_major(dim, rows.concat())
    }

    pub fn from_real_rows(rows: &[Vec<T>]) -> Result<Self> {
        let complex: Vec<Vec<Complex<T>>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex::new(x, T::zero())).collect())
            .collect();
        Self::from_rows(&complex)
    }

    /// Largest deviation from Hermiticity relative to the largest entry.
    pub fn hermitian_defect(&self) -> T {
        let n = self.dim;
        let scale = self.max_abs();
        if scale == T::zero() {
            return T::zero();
        }
        let mut worst = T::zero();
        for i in 0..n {
            for j in i..n {
                let d = (self.data[i * n + j] - self.data[j * n + i].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst / scale
    }

    pub fn check_hermitian(&self) -> Result<()> {
        if self.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return invalid("matrix has non-finite entries");
        }
        let tol = T::lit(1e-12).max(T::eps() * T::lit(16.0));
        let defect = self.hermitian_defect();
        if defect > tol {
            return invalid(format!("matrix is not Hermitian (relative defect {defect:e})"));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.data[i * self.dim + j]
    }

    /// Sets entry (i, j) and its mirror (j, i) to the conjugate. Diagonal entries keep only the real part.
    pub fn set(&mut self, i: usize, j: usize, z: Complex<T>) {
        let n = self.dim;
        if i == j {
            self.data[i * n + i] = Complex::new(z.re, T::zero());
        } else {
            self.data[i * n + j] = z;
            self.data[j * n + i] = z.conj();
        }
    }

    /// Adds z to (i, j) and conj(z) to (j, i).
    pub fn add(&mut self, i: usize, j: usize, z: Complex<T>) {
        let cur = self.get(i, j);
        self.set(i, j, cur + z);
    }

    pub fn set_real(&mut self, i: usize, j: usize, x: T) {
        self.set(i, j, Complex::new(x, T::zero()));
    }

    pub fn add_real(&mut self, i: usize, j: usize, x: T) {
        self.add(i, j, Complex::new(x, T::zero()));
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn trace(&self) -> T {
        (0..self.dim).map(|i| self.data[i * self.dim + i].re).sum()
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == T::zero())
    }

    pub fn matvec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.dim;
        (0..n)
            .map(|i| {
                self.data[i * n..(i + 1) * n]
                    .iter()
                    .zip(v)
                    .fold(Complex::new(T::zero(), T::zero()), |acc, (&a, &x)| acc + a * x)
            })
            .collect()
    }

    /// Returns P·H·Pᵀ where `perm[new] = old`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for (a, &pa) in perm.iter().enumerate() {
            for (b, &pb) in perm.iter().enumerate() {
                out.data[a * n + b] = self.data[pa * n + pb];
            }
        }
        out
    }

    /// Real part as a symmetric matrix; only meaningful when `is_real()`.
    pub fn real_part(&self) -> SymmetricMatrix<T> {
        SymmetricMatrix { dim: self.dim, data: self.data.iter().map(|z| z.re).collect() }
    }
}

/// Dense real symmetric matrix, row-major. Used where every entry is real
/// (chains, charge-basis circuits) to halve memory and work.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix<T: Real = f64> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Real> SymmetricMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![T::zero(); dim * dim] }
    }

    pub fn from_row_major(dim: usize, data: Vec<T>) -> Result<Self> {
        if dim == 0 {
            return invalid("matrix dimension must be at least 1");
        }
        if data.len() != dim * dim {
            return invalid(format!("expected {} entries, got {}", dim * dim, data.len()));
        }
        let scale = data.iter().fold(T::zero(), |m, x| m.max(x.abs()));
        if data.iter().any(|x| !x.is_finite()) {
            return invalid("matrix has non-finite entries");
        }
        let tol = T::lit(1e-12).max(T::eps() * T::lit(16.0)) * scale;
        for i in 0..dim {
            for j in i + 1..dim {
                if (data[i * dim + j] - data[j * dim + i]).abs() > tol {
                    return invalid("matrix is not symmetric");
                }
            }
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: T) {
        let n = self.dim;
        self.data[i * n + j] = x;
        self.data[j * n + i] = x;
    }

    pub fn add(&mut self, i: usize, j: usize, x: T) {
        let n = self.dim;
        self.data[i * n + j] += x;
        if i != j {
            self.data[j * n + i] += x;
        }
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }

    pub fn trace(&self) -> T {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    pub fn to_hermitian(&self) -> HermitianMatrix<T> {
        HermitianMatrix {
            dim: self.dim,
            data: self.data.iter().map(|&x| Complex::new(x, T::zero())).collect(),
        }
    }

    pub(crate) fn into_data(self) -> Vec<T> {
        self.data
    }
}

/// ad − bc for a row-major 2×2 complex matrix.
pub fn det2<T: Real>(m: &[[Complex<T>; 2]; 2]) -> Complex<T> {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

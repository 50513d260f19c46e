//! Householder tridiagonalization followed by implicit-shift QL.
//!
//! Real symmetric input takes a real-arithmetic path. Complex Hermitian input is
//! reduced with complex reflectors to a Hermitian tridiagonal, whose off-diagonal
//! phases are then absorbed into a diagonal unitary so QL runs on a real matrix.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex;

use super::matrix::{HermitianMatrix, SymmetricMatrix};
use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

/// Sorted eigenvalues with matching unit eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T: Real = f64> {
    dim: usize,
    eigenvalues: Vec<T>,
    /// Vector k occupies `vectors[k*dim .. (k+1)*dim]`.
    vectors: Vec<Complex<T>>,
}

impl<T: Real> Spectrum<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    pub fn eigenvalue(&self, k: usize) -> T {
        self.eigenvalues[k]
    }

    pub fn vector(&self, k: usize) -> &[Complex<T>] {
        &self.vectors[k * self.dim..(k + 1) * self.dim]
    }

    /// ‖H v_k − λ_k v_k‖ maximized over k.
    pub fn max_residual(&self, m: &HermitianMatrix<T>) -> T {
        (0..self.len())
            .map(|k| {
                let v = self.vector(k);
                let hv = m.matvec(v);
                hv.iter()
                    .zip(v)
                    .map(|(&a, &b)| (a - b * self.eigenvalues[k]).norm_sqr())
                    .sum::<T>()
                    .sqrt()
            })
            .fold(T::zero(), T::max)
    }
}

const SWEEPS_PER_EIGENVALUE: usize = 60;

/// Full eigendecomposition of a Hermitian matrix.
pub fn eig_hermitian<T: Real>(m: &HermitianMatrix<T>) -> Result<Spectrum<T>> {
    m.check_hermitian()?;
    let n = m.dim();
    if n == 0 {
        return invalid("matrix dimension must be at least 1");
    }
    if m.is_real() {
        let (values, vecs) = symmetric_decompose(m.real_part().into_data(), n, true)?;
        let vectors = vecs.into_iter().map(|x| Complex::new(x, T::zero())).collect();
        return Ok(Spectrum { dim: n, eigenvalues: values, vectors });
    }
    let (values, vectors) = hermitian_decompose(m.as_slice().to_vec(), n, true)?;
    Ok(Spectrum { dim: n, eigenvalues: values, vectors })
}

/// Eigenvalues only, ascending.
pub fn eigvals_hermitian<T: Real>(m: &HermitianMatrix<T>) -> Result<Vec<T>> {
    m.check_hermitian()?;
    let n = m.dim();
    if n == 0 {
        return invalid("matrix dimension must be at least 1");
    }
    if m.is_real() {
        return Ok(symmetric_decompose(m.real_part().into_data(), n, false)?.0);
    }
    Ok(hermitian_decompose(m.as_slice().to_vec(), n, false)?.0)
}

/// Eigenvalues and real eigenvectors (vector k at `[k*dim..(k+1)*dim]`).
pub fn eig_symmetric<T: Real>(m: &SymmetricMatrix<T>) -> Result<(Vec<T>, Vec<T>)> {
    let n = m.dim();
    if n == 0 {
        return invalid("matrix dimension must be at least 1");
    }
    symmetric_decompose(m.as_slice().to_vec(), n, true)
}

pub fn eigvals_symmetric<T: Real>(m: &SymmetricMatrix<T>) -> Result<Vec<T>> {
    let n = m.dim();
    if n == 0 {
        return invalid("matrix dimension must be at least 1");
    }
    Ok(symmetric_decompose(m.as_slice().to_vec(), n, false)?.0)
}

fn symmetric_decompose<T: Real>(mut a: Vec<T>, n: usize, want_vectors: bool) -> Result<(Vec<T>, Vec<T>)> {
    let (mut d, mut e, q) = tridiagonalize_real(&mut a, n, want_vectors);
    let mut zt = q.unwrap_or_default();
    ql_implicit(&mut d, &mut e, if want_vectors { Some(&mut zt) } else { None })?;
    Ok(sort_pairs(d, zt, n, want_vectors))
}

fn hermitian_decompose<T: Real>(
    mut a: Vec<Complex<T>>,
    n: usize,
    want_vectors: bool,
) -> Result<(Vec<T>, Vec<Complex<T>>)> {
    let (mut d, mut e, q) = tridiagonalize_complex(&mut a, n, want_vectors);
    let mut zt = q.unwrap_or_default();
    ql_implicit(&mut d, &mut e, if want_vectors { Some(&mut zt) } else { None })?;
    Ok(sort_pairs(d, zt, n, want_vectors))
}

fn sort_pairs<T: Real, V: Copy>(d: Vec<T>, zt: Vec<V>, n: usize, want_vectors: bool) -> (Vec<T>, Vec<V>) {
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = if want_vectors {
        let mut out = Vec::with_capacity(n * n);
        for &i in &order {
            out.extend_from_slice(&zt[i * n..(i + 1) * n]);
        }
        out
    } else {
        Vec::new()
    };
    (values, vectors)
}

/// Builds the reflector that annihilates row `i` left of the subdiagonal.
/// Returns false when no reflection is needed (`e[i]` is then the plain entry).
fn prepare_reflector<T: Real>(a: &[T], n: usize, i: usize, u: &mut [T], e: &mut [T], hs: &mut [T]) -> bool {
    let l = i - 1;
    let row = &a[i * n..i * n + i];
    let scale: T = row.iter().map(|x| x.abs()).sum();
    if l == 0 || scale == T::zero() {
        e[i] = row[l];
        hs[i] = T::zero();
        return false;
    }
    let mut h = T::zero();
    for (uk, &x) in u[..i].iter_mut().zip(row) {
        *uk = x / scale;
        h += *uk * *uk;
    }
    let f = u[l];
    let g = if f >= T::zero() { -h.sqrt() } else { h.sqrt() };
    e[i] = scale * g;
    h -= f * g;
    u[l] = f - g;
    hs[i] = h;
    true
}

/// Returns Σ row·v while adding row·s into `out`; four partial sums keep the loop vectorizable.
#[inline]
fn dot_scatter<T: Real>(row: &[T], v: &[T], s: T, out: &mut [T]) -> T {
    let mut acc = [T::zero(); 4];
    let split = row.len() - row.len() % 4;
    for ((r, x), o) in row[..split].chunks_exact(4).zip(v[..split].chunks_exact(4)).zip(out[..split].chunks_exact_mut(4)) {
        for t in 0..4 {
            acc[t] += r[t] * x[t];
            o[t] += r[t] * s;
        }
    }
    let mut total = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for k in split..row.len() {
        total += row[k] * v[k];
        out[k] += row[k] * s;
    }
    total
}

/// p[..m] = B·u[..m] for the leading m×m block, reading only its lower triangle.
fn lower_matvec<T: Real>(a: &[T], n: usize, m: usize, u: &[T], p: &mut [T]) {
    p[..m].iter_mut().for_each(|x| *x = T::zero());
    for j in 0..m {
        let row = &a[j * n..j * n + j + 1];
        let uj = u[j];
        let acc = dot_scatter(&row[..j], &u[..j], uj, &mut p[..j]);
        p[j] += acc + row[j] * uj;
    }
}

/// Returns (diagonal, off-diagonal with `e[i]` coupling i and i+1, Qᵀ row-major).
///
/// Works on the lower triangle only. The rank-2 update of one step is fused with
/// the matrix-vector product of the next, so the active block is streamed once per step.
fn tridiagonalize_real<T: Real>(a: &mut [T], n: usize, want_q: bool) -> (Vec<T>, Vec<T>, Option<Vec<T>>) {
    let mut e = vec![T::zero(); n];
    let mut hs = vec![T::zero(); n];
    let mut u = vec![T::zero(); n];
    let mut u_next = vec![T::zero(); n];
    let mut p = vec![T::zero(); n];
    let mut p_next = vec![T::zero(); n];
    if n >= 2 && prepare_reflector(a, n, n - 1, &mut u, &mut e, &mut hs) {
        lower_matvec(a, n, n - 1, &u, &mut p);
    }
    for i in (1..n).rev() {
        let l = i - 1;
        let h = hs[i];
        if h == T::zero() {
            if l >= 1 && prepare_reflector(a, n, l, &mut u, &mut e, &mut hs) {
                lower_matvec(a, n, l, &u, &mut p);
            }
            continue;
        }
        let mut up = T::zero();
        for j in 0..i {
            p[j] /= h;
            up += p[j] * u[j];
        }
        let kk = up / (h + h);
        for j in 0..i {
            p[j] -= kk * u[j];
        }
        let q = &p;
        {
            let (ul, ql) = (u[l], q[l]);
            let row = &mut a[l * n..l * n + l + 1];
            for k in 0..=l {
                row[k] -= ul * q[k] + ql * u[k];
            }
        }
        let next = l >= 1 && prepare_reflector(a, n, l, &mut u_next, &mut e, &mut hs);
        if next {
            p_next[..l].iter_mut().for_each(|x| *x = T::zero());
        }
        for j in 0..l {
            let (uj, qj) = (u[j], q[j]);
            let row = &mut a[j * n..j * n + j + 1];
            for k in 0..=j {
                row[k] -= uj * q[k] + qj * u[k];
            }
            if next {
                let vj = u_next[j];
                let acc = dot_scatter(&row[..j], &u_next[..j], vj, &mut p_next[..j]);
                p_next[j] += acc + row[j] * vj;
            }
        }
        a[i * n..i * n + i].copy_from_slice(&u[..i]);
        std::mem::swap(&mut u, &mut u_next);
        std::mem::swap(&mut p, &mut p_next);
    }
    let d: Vec<T> = (0..n).map(|i| a[i * n + i]).collect();
    let mut off = vec![T::zero(); n];
    off[..n - 1].copy_from_slice(&e[1..n]);

    let q = want_q.then(|| {
        // Q = P_{n-1}···P_1, built by left-multiplying the reflectors in ascending order.
        let mut m = vec![T::zero(); n * n];
        for i in 0..n {
            m[i * n + i] = T::one();
        }
        let mut w = vec![T::zero(); n];
        for i in 1..n {
            let h = hs[i];
            if h == T::zero() {
                continue;
            }
            let u = &a[i * n..i * n + i];
            w[..i].iter_mut().for_each(|x| *x = T::zero());
            for s in 0..i {
                let us = u[s];
                for (wc, &msc) in w[..i].iter_mut().zip(&m[s * n..s * n + i]) {
                    *wc += us * msc;
                }
            }
            for s in 0..i {
                let f = u[s] / h;
                for (msc, &wc) in m[s * n..s * n + i].iter_mut().zip(&w[..i]) {
                    *msc -= f * wc;
                }
            }
        }
        transpose(&m, n)
    });
    (d, off, q)
}

fn tridiagonalize_complex<T: Real>(
    a: &mut [Complex<T>],
    n: usize,
    want_q: bool,
) -> (Vec<T>, Vec<T>, Option<Vec<Complex<T>>>) {
    let zero = Complex::new(T::zero(), T::zero());
    // t[i]: tridiagonal entry (i-1, i).
    let mut t = vec![zero; n];
    let mut hs = vec![T::zero(); n];
    let mut u = vec![zero; n];
    let mut p = vec![zero; n];
    for i in (1..n).rev() {
        let l = i - 1;
        // Column i above the diagonal: x_k = a[k][i] = conj(a[i][k]).
        let scale: T = a[i * n..i * n + i].iter().map(|z| z.re.abs() + z.im.abs()).sum();
        if l == 0 || scale == T::zero() {
            t[i] = a[i * n + l].conj();
            continue;
        }
        let mut sigma = T::zero();
        for k in 0..i {
            let x = a[i * n + k].conj() / scale;
            u[k] = x;
            sigma += x.norm_sqr();
        }
        let norm = sigma.sqrt();
        let xl = u[l];
        let xl_abs = xl.norm();
        let phase = if xl_abs == T::zero() { Complex::new(T::one(), T::zero()) } else { xl / xl_abs };
        let alpha = -phase * norm;
        let h = sigma + norm * xl_abs;
        u[l] = xl - alpha;
        t[i] = alpha * scale;
        let mut up = T::zero();
        for j in 0..i {
            let s = a[j * n..j * n + i]
                .iter()
                .zip(&u[..i])
                .fold(zero, |acc, (&x, &y)| acc + x * y);
            p[j] = s / h;
            up += (u[j].conj() * p[j]).re;
        }
        let kk = up / (h + h);
        for j in 0..i {
            p[j] = p[j] - u[j] * kk;
        }
        for j in 0..i {
            let (uj, pj) = (u[j], p[j]);
            let row = &mut a[j * n..j * n + i];
            for k in 0..i {
                row[k] = row[k] - uj * p[k].conj() - pj * u[k].conj();
            }
        }
        a[i * n..i * n + i].copy_from_slice(&u[..i]);
        hs[i] = h;
    }
    let d: Vec<T> = (0..n).map(|i| a[i * n + i].re).collect();

    // Phase matrix D with D^† T D real and non-negative off the diagonal.
    let mut phases = vec![Complex::new(T::one(), T::zero()); n];
    let mut off = vec![T::zero(); n];
    for i in 1..n {
        let ti = t[i];
        let r = ti.norm();
        phases[i] = if r == T::zero() { phases[i - 1] } else { phases[i - 1] * ti.conj() / r };
        off[i - 1] = r;
    }

    let q = want_q.then(|| {
        let mut m = vec![zero; n * n];
        for i in 0..n {
            m[i * n + i] = Complex::new(T::one(), T::zero());
        }
        let mut w = vec![zero; n];
        for i in 1..n {
            let h = hs[i];
            if h == T::zero() {
                continue;
            }
            let u = &a[i * n..i * n + i];
            w[..i].iter_mut().for_each(|x| *x = zero);
            for s in 0..i {
                let us = u[s].conj();
                for (wc, &msc) in w[..i].iter_mut().zip(&m[s * n..s * n + i]) {
                    *wc = *wc + us * msc;
                }
            }
            for s in 0..i {
                let f = u[s] / h;
                for (msc, &wc) in m[s * n..s * n + i].iter_mut().zip(&w[..i]) {
                    *msc = *msc - f * wc;
                }
            }
        }
        // Rows of the result are the columns of Q·D.
        let mut zt = transpose(&m, n);
        for (i, ph) in phases.iter().enumerate() {
            zt[i * n..(i + 1) * n].iter_mut().for_each(|z| *z = *z * *ph);
        }
        zt
    });
    (d, off, q)
}

fn transpose<V: Copy>(m: &[V], n: usize) -> Vec<V> {
    let mut out = m.to_vec();
    for i in 0..n {
        for j in 0..n {
            out[j * n + i] = m[i * n + j];
        }
    }
    out
}

/// Implicit-shift QL on a symmetric tridiagonal (`e[i]` couples i and i+1).
/// Rotations act on the rows of `zt`, the transposed eigenvector matrix.
fn ql_implicit<T, V>(d: &mut [T], e: &mut [T], mut zt: Option<&mut Vec<V>>) -> Result<()>
where
    T: Real,
    V: Copy + Mul<T, Output = V> + Add<Output = V> + Sub<Output = V>,
{
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = T::zero();
    let two = T::lit(2.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= T::eps() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > SWEEPS_PER_EIGENVALUE {
                return Err(Error::NoConvergence { residual: e[l].abs().to_f64_lossy() });
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + if g >= T::zero() { r.abs() } else { -r.abs() });
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] -= p;
                    e[m] = T::zero();
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = zt.as_deref_mut() {
                    let (lo, hi) = z.split_at_mut((i + 1) * n);
                    let ri = &mut lo[i * n..];
                    let ri1 = &mut hi[..n];
                    for (a, b) in ri.iter_mut().zip(ri1.iter_mut()) {
                        let f = *b;
                        *b = *a * s + f * c;
                        *a = *a * c - f * s;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(())
}

//! Savitzky–Golay smoothing by local least-squares polynomial fits.

use crate::error::{invalid, Result};
use crate::scalar::Real;

/// Solves a small dense system by Gaussian elimination with partial pivoting.
pub(crate) fn solve_dense<T: Real>(mut a: Vec<T>, mut b: Vec<T>) -> Option<Vec<T>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i * n + col].abs().partial_cmp(&a[j * n + col].abs()).unwrap())?;
        if a[pivot * n + col] == T::zero() {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            b.swap(col, pivot);
        }
        for row in col + 1..n {
            let f = a[row * n + col] / a[col * n + col];
            for k in col..n {
                let v = a[col * n + k];
                a[row * n + k] -= f * v;
            }
            let v = b[col];
            b[row] -= f * v;
        }
    }
    let mut x = vec![T::zero(); n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in row + 1..n {
            s -= a[row * n + k] * x[k];
        }
        x[row] = s / a[row * n + row];
    }
    Some(x)
}

/// Weights w such that Σ w_k y_k is the order-`order` least-squares polynomial over
/// `window` equally spaced samples, evaluated at sample index `at` (0-based within the window).
pub fn savgol_weights<T: Real>(window: usize, order: usize, at: usize) -> Result<Vec<T>> {
    if window <= order {
        return invalid(format!("window {window} must exceed polynomial order {order}"));
    }
    if at >= window {
        return invalid("evaluation point outside the window");
    }
    let half = T::from_usize(window - 1).unwrap() / T::lit(2.0);
    let scale = if half > T::zero() { half } else { T::one() };
    let xs: Vec<T> = (0..window).map(|k| (T::from_usize(k).unwrap() - half) / scale).collect();
    let m = order + 1;
    let mut gram = vec![T::zero(); m * m];
    for &x in &xs {
        for a in 0..m {
            for b in 0..m {
                gram[a * m + b] += x.powi((a + b) as i32);
            }
        }
    }
    let t = xs[at];
    let rhs: Vec<T> = (0..m).map(|a| t.powi(a as i32)).collect();
    let c = solve_dense(gram, rhs).ok_or_else(|| crate::Error::Validation("singular fit".into()))?;
    Ok(xs
        .iter()
        .map(|&x| c.iter().enumerate().map(|(a, &ca)| ca * x.powi(a as i32)).sum())
        .collect())
}

/// Smooths `series`; points closer than half a window to either end are taken from the
/// fit over the first (or last) full window evaluated at their own position.
pub fn savitzky_golay<T: Real>(series: &[T], window: usize, order: usize) -> Result<Vec<T>> {
    if window % 2 == 0 {
        return invalid(format!("window {window} must be odd"));
    }
    if window <= order {
        return invalid(format!("window {window} must exceed polynomial order {order}"));
    }
    if series.len() < window {
        return invalid(format!("series length {} shorter than window {window}", series.len()));
    }
    let half = window / 2;
    let len = series.len();
    let centre = savgol_weights::<T>(window, order, half)?;
    let apply = |w: &[T], start: usize| -> T { w.iter().zip(&series[start..start + window]).map(|(&a, &b)| a * b).sum() };
    let mut out = Vec::with_capacity(len);
    for i in 0..len {
        let value = if i < half {
            apply(&savgol_weights(window, order, i)?, 0)
        } else if i + half >= len {
            apply(&savgol_weights(window, order, i + window - len)?, len - window)
        } else {
            apply(&centre, i - half)
        };
        out.push(value);
    }
    Ok(out)
}

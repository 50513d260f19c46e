//! Winding invariants, analytic phase boundary and band gaps of the extended model.

use std::f64::consts::{PI, TAU};

use num_complex::Complex;

use crate::error::{invalid, Error, Result};
use crate::lattice::{bands_extended, det_q, singular_values2, q_block, ChainHamiltonian, SiteLabel, Sublattice, ZigZagParams};
use crate::numerics::{dft, Spectrum};

pub const DEFAULT_K_INTERVALS: usize = 1024;
pub const MIN_K_INTERVALS: usize = 64;
/// Gapless threshold relative to max |det Q| on the grid.
pub const GAP_TOLERANCE: f64 = 1e-8;
/// Allowed distance of the accumulated phase from an integer.
pub const INTEGER_TOLERANCE: f64 = 0.01;

/// `n_intervals + 1` uniform samples from −π to π inclusive.
pub fn k_grid(n_intervals: usize) -> Vec<f64> {
    let n = n_intervals.max(1);
    let mut k: Vec<f64> = (0..=n).map(|j| -PI + TAU * j as f64 / n as f64).collect();
    k[n] = PI;
    k
}

/// Wraps an angle difference into (−π, π].
pub fn wrap_phase(x: f64) -> f64 {
    let mut y = x.rem_euclid(TAU);
    if y > PI {
        y -= TAU;
    }
    y
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindingContour {
    pub k_samples: Vec<f64>,
    pub det_values: Vec<Complex<f64>>,
    /// `None` when the contour touches the origin.
    pub winding: Option<i64>,
    /// −(1/2π)·Σ wrapped phase increments, before rounding.
    pub raw_winding: f64,
    pub min_abs_det: f64,
    pub max_abs_det: f64,
}

impl WindingContour {
    pub fn is_gapped(&self) -> bool {
        self.min_abs_det > GAP_TOLERANCE * self.max_abs_det
    }
}

/// Samples det Q_K over the zone and accumulates its phase. Never fails on gapless input.
pub fn winding_contour(p: &ZigZagParams, n_k: usize) -> Result<WindingContour> {
    if n_k < MIN_K_INTERVALS {
        return invalid(format!("n_k = {n_k} below the minimum of {MIN_K_INTERVALS}"));
    }
    let k_samples = k_grid(n_k);
    let det_values = k_samples.iter().map(|&k| det_q(k, p)).collect::<Result<Vec<_>>>()?;
    // The analytic closure points K = 0, π are checked even when the grid misses them.
    let extra = [det_q(0.0, p)?.norm(), det_q(PI, p)?.norm()];
    let min_abs_det = det_values.iter().map(|z| z.norm()).chain(extra).fold(f64::INFINITY, f64::min);
    let max_abs_det = det_values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let total: f64 = det_values.windows(2).map(|w| wrap_phase(w[1].arg() - w[0].arg())).sum();
    let raw_winding = -total / TAU;
    let gapped = min_abs_det > GAP_TOLERANCE * max_abs_det;
    let winding = gapped.then(|| raw_winding.round() as i64);
    Ok(WindingContour { k_samples, det_values, winding, raw_winding, min_abs_det, max_abs_det })
}

/// Integer winding of det Q_K; errors at gap closure or when the grid is too coarse.
pub fn winding_number(p: &ZigZagParams, n_k: usize) -> Result<WindingContour> {
    let c = winding_contour(p, n_k)?;
    if !c.is_gapped() {
        return Err(Error::Gapless { min_abs_det: c.min_abs_det });
    }
    let deviation = (c.raw_winding - c.raw_winding.round()).abs();
    let largest_step = c
        .det_values
        .windows(2)
        .map(|w| wrap_phase(w[1].arg() - w[0].arg()).abs())
        .fold(0.0, f64::max);
    if deviation >= INTEGER_TOLERANCE || largest_step > PI / 2.0 {
        return Err(Error::InsufficientResolution { deviation: deviation.max(largest_step / TAU) });
    }
    Ok(c)
}

/// g_c = |t‖ + t⊥|/2.
pub fn phase_boundary(t_par: f64, t_perp: f64) -> f64 {
    (t_par + t_perp).abs() / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandGap {
    /// Full gap width, 2·min_K |E|.
    pub gap: f64,
    /// Grid momentum where the minimum occurs.
    pub k_at_min: f64,
}

pub fn band_gap(p: &ZigZagParams, n_k: usize) -> Result<BandGap> {
    let mut best = BandGap { gap: f64::INFINITY, k_at_min: 0.0 };
    for k in k_grid(n_k) {
        let e = bands_extended(k, p)?[2];
        if 2.0 * e < best.gap {
            best = BandGap { gap: 2.0 * e, k_at_min: k };
        }
    }
    Ok(best)
}

/// Smallest singular value of Q_K over the grid, i.e. the bulk half-gap.
pub fn half_gap(p: &ZigZagParams, n_k: usize) -> Result<f64> {
    k_grid(n_k).into_iter().try_fold(f64::INFINITY, |m, k| Ok(m.min(singular_values2(&q_block(k, p)?).0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellConvention {
    /// Cells (1,2), (3,4), … counted from the left edge.
    Left,
    /// Cells counted from the right edge; the unpaired site on the left is dropped.
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BulkBand {
    Lower,
    Upper,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SublatticeRatioPath {
    /// K_j = 2πj/M for M unit cells.
    pub k_samples: Vec<f64>,
    pub ratio_values: Vec<Complex<f64>>,
    pub cell_convention: CellConvention,
    pub winding: i64,
}

/// Pairs site amplitudes into (A, B) cells according to the convention.
fn cell_sequences(
    amplitudes: &[Complex<f64>],
    labels: &[SiteLabel],
    convention: CellConvention,
) -> Result<(Vec<Complex<f64>>, Vec<Complex<f64>>)> {
    let n = amplitudes.len();
    if labels.len() != n {
        return invalid("labels and amplitudes differ in length");
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| labels[i].site());
    let (first, cells) = match convention {
        CellConvention::Left => (0, n / 2),
        CellConvention::Right => (1, (n - 1) / 2),
    };
    let (mut a, mut b) = (Vec::with_capacity(cells), Vec::with_capacity(cells));
    for c in 0..cells {
        let (i, j) = (order[first + 2 * c], order[first + 2 * c + 1]);
        let sub = |idx: usize| match labels[idx] {
            SiteLabel::Sublattice { sub, .. } => Ok(sub),
            SiteLabel::Polarized { .. } => invalid("sublattice labels required"),
        };
        match (sub(i)?, sub(j)?) {
            (Sublattice::A, Sublattice::B) => {
                a.push(amplitudes[i]);
                b.push(amplitudes[j]);
            }
            (Sublattice::B, Sublattice::A) => {
                a.push(amplitudes[j]);
                b.push(amplitudes[i]);
            }
            _ => return invalid("cell does not contain one A and one B site"),
        }
    }
    Ok((a, b))
}

fn ratio_winding(ratios: &[Complex<f64>]) -> i64 {
    let m = ratios.len();
    let total: f64 = (0..m).map(|j| wrap_phase(ratios[(j + 1) % m].arg() - ratios[j].arg())).sum();
    (-total / TAU).round() as i64
}

fn cell_momenta(m: usize) -> Vec<f64> {
    (0..m).map(|j| TAU * j as f64 / m as f64).collect()
}

const RATIO_FLOOR: f64 = 1e-10;
const MIN_CHAIN: usize = 9;

/// Ratio path ψ_A(K)/ψ_B(K) of a single SSH eigenstate.
///
/// Standing-wave eigenstates of an open chain often have ψ_B(K) = 0 at some DFT
/// momentum; those inputs fail with [`Error::DegenerateRatio`]. [`band_ratio_path`]
/// avoids this by combining every mode of one band.
pub fn finite_chain_winding(
    amplitudes: &[Complex<f64>],
    labels: &[SiteLabel],
    convention: CellConvention,
) -> Result<SublatticeRatioPath> {
    if amplitudes.len() < MIN_CHAIN {
        return invalid(format!("chain of {} sites is shorter than {MIN_CHAIN}", amplitudes.len()));
    }
    let (a, b) = cell_sequences(amplitudes, labels, convention)?;
    let (fa, fb) = (dft(&a), dft(&b));
    let scale = fa.iter().chain(&fb).map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut ratio_values = Vec::with_capacity(fa.len());
    for (j, (za, zb)) in fa.iter().zip(&fb).enumerate() {
        if zb.norm() < RATIO_FLOOR * scale.max(1.0) {
            return Err(Error::DegenerateRatio { sample: j, value: zb.norm() });
        }
        ratio_values.push(za / zb);
    }
    let winding = ratio_winding(&ratio_values);
    Ok(SublatticeRatioPath { k_samples: cell_momenta(a.len()), ratio_values, cell_convention: convention, winding })
}

/// Band-resolved ratio path: at each DFT momentum the mode of the chosen band with the
/// largest spectral weight there supplies ψ_A(K)/ψ_B(K).
pub fn band_ratio_path(
    h: &ChainHamiltonian,
    spectrum: &Spectrum,
    band: BulkBand,
    convention: CellConvention,
) -> Result<SublatticeRatioPath> {
    let n = h.dim();
    if n < MIN_CHAIN {
        return invalid(format!("chain of {n} sites is shorter than {MIN_CHAIN}"));
    }
    let emax = spectrum.eigenvalues().iter().fold(0.0f64, |m, e| m.max(e.abs()));
    let cut = 1e-6 * emax;
    let modes: Vec<usize> = (0..spectrum.len())
        .filter(|&k| {
            let e = spectrum.eigenvalue(k);
            match band {
                BulkBand::Lower => e < -cut,
                BulkBand::Upper => e > cut,
            }
        })
        .collect();
    if modes.is_empty() {
        return Err(Error::InsufficientData("no bulk modes in the selected band".into()));
    }
    let transforms = modes
        .iter()
        .map(|&k| {
            let (a, b) = cell_sequences(spectrum.vector(k), &h.labels, convention)?;
            Ok((dft(&a), dft(&b)))
        })
        .collect::<Result<Vec<_>>>()?;
    let m = transforms[0].0.len();
    let mut ratio_values = Vec::with_capacity(m);
    for j in 0..m {
        let (fa, fb) = transforms
            .iter()
            .max_by(|x, y| {
                let wx = x.0[j].norm_sqr() + x.1[j].norm_sqr();
                let wy = y.0[j].norm_sqr() + y.1[j].norm_sqr();
                wx.partial_cmp(&wy).unwrap_or(std::cmp::Ordering::Equal)
            })
            .map(|t| (t.0[j], t.1[j]))
            .unwrap();
        if fb.norm() < RATIO_FLOOR {
            return Err(Error::DegenerateRatio { sample: j, value: fb.norm() });
        }
        ratio_values.push(fa / fb);
    }
    let winding = ratio_winding(&ratio_values);
    Ok(SublatticeRatioPath { k_samples: cell_momenta(m), ratio_values, cell_convention: convention, winding })
}

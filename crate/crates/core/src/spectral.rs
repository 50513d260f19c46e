//! Finite-chain spectra: IPR, edge profiles, phase-diagram sweeps, transition spectra
//! and SSH edge-decay fits.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::lattice::{build_zigzag_chain, ChainHamiltonian, Polarization, SiteLabel, Sublattice, ZigZagParams};
use crate::numerics::{eig_hermitian, eigvals_hermitian, fit_line, Spectrum};
use crate::topology::{half_gap, phase_boundary, DEFAULT_K_INTERVALS};

const NORM_TOLERANCE: f64 = 1e-8;

/// One eigenstate split into its p_x and p_y amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarizedState {
    pub energy: f64,
    pub amp_x: Vec<Complex<f64>>,
    pub amp_y: Vec<Complex<f64>>,
}

impl PolarizedState {
    pub fn from_vector(energy: f64, v: &[Complex<f64>], labels: &[SiteLabel]) -> Result<Self> {
        if v.len() != labels.len() {
            return invalid("vector and labels differ in length");
        }
        let n = labels.iter().map(|l| l.site() + 1).max().unwrap_or(0);
        let zero = Complex::new(0.0, 0.0);
        let (mut amp_x, mut amp_y) = (vec![zero; n], vec![zero; n]);
        for (z, l) in v.iter().zip(labels) {
            match *l {
                SiteLabel::Polarized { site, pol: Polarization::X } => amp_x[site] = *z,
                SiteLabel::Polarized { site, pol: Polarization::Y } => amp_y[site] = *z,
                SiteLabel::Sublattice { .. } => return invalid("polarization labels required"),
            }
        }
        Ok(Self { energy, amp_x, amp_y })
    }

    pub fn site_count(&self) -> usize {
        self.amp_x.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.components().map(|z| z.norm_sqr()).sum()
    }

    pub fn components(&self) -> impl Iterator<Item = &Complex<f64>> {
        self.amp_x.iter().chain(&self.amp_y)
    }

    /// Blocked vector (x amplitudes, then y amplitudes).
    pub fn to_vector(&self) -> Vec<Complex<f64>> {
        self.components().copied().collect()
    }
}

pub fn diagonalize_chain(h: &ChainHamiltonian) -> Result<(Spectrum, Vec<PolarizedState>)> {
    let s = eig_hermitian(&h.matrix)?;
    let states = (0..s.len())
        .map(|k| PolarizedState::from_vector(s.eigenvalue(k), s.vector(k), &h.labels))
        .collect::<Result<Vec<_>>>()?;
    Ok((s, states))
}

fn ipr_of(components: impl Iterator<Item = f64>) -> f64 {
    1.0 / components.map(|p| p * p).sum::<f64>()
}

/// (Σ|ψ|⁴)⁻¹ over every site and polarization.
pub fn ipr(s: &PolarizedState) -> Result<f64> {
    let norm = s.norm_sqr();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return invalid(format!("state is not normalized (norm^2 = {norm})"));
    }
    Ok(ipr_of(s.components().map(|z| z.norm_sqr())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateRule {
    /// Lower of the two central eigenvalues (N-th of 2N, 1-based).
    MidSpectrum,
    /// round(3·(2N)/4)-th eigenvalue, 1-based.
    MidBulk,
    /// Explicit 0-based index.
    Index(usize),
}

/// 0-based index of the state chosen by `rule` in an ascending spectrum of length `len`.
pub fn select_state(len: usize, rule: StateRule) -> Result<usize> {
    if len == 0 {
        return invalid("empty spectrum");
    }
    let k = match rule {
        StateRule::MidSpectrum => (len / 2).max(1) - 1,
        StateRule::MidBulk => ((3.0 * len as f64 / 4.0).round() as usize).max(1) - 1,
        StateRule::Index(k) => k,
    };
    if k >= len {
        return invalid(format!("state index {k} out of range for {len} states"));
    }
    Ok(k)
}

/// Weight of site `s` assigned to the left half; the central site of an odd chain splits evenly.
fn left_fraction(site: usize, n: usize) -> f64 {
    if n % 2 == 1 && site == n / 2 {
        0.5
    } else if site < n / 2 {
        1.0
    } else {
        0.0
    }
}

/// Rotates the span of two orthonormal vectors into its most left- and most right-localized members.
pub fn edge_resolved_pair(
    a: &[Complex<f64>],
    b: &[Complex<f64>],
    labels: &[SiteLabel],
) -> (Vec<Complex<f64>>, Vec<Complex<f64>>) {
    let n = labels.iter().map(|l| l.site() + 1).max().unwrap_or(0);
    let w: Vec<f64> = labels.iter().map(|l| left_fraction(l.site(), n)).collect();
    let zero = Complex::new(0.0, 0.0);
    let (mut paa, mut pbb, mut pab) = (0.0, 0.0, zero);
    for i in 0..a.len() {
        paa += w[i] * a[i].norm_sqr();
        pbb += w[i] * b[i].norm_sqr();
        pab += a[i].conj() * b[i] * w[i];
    }
    // Leading eigenvector of [[paa, pab], [conj(pab), pbb]].
    let half_diff = 0.5 * (paa - pbb);
    let r = half_diff.hypot(pab.norm());
    let (ca, cb) = if pab.norm() == 0.0 {
        if paa >= pbb {
            (Complex::new(1.0, 0.0), zero)
        } else {
            (zero, Complex::new(1.0, 0.0))
        }
    } else {
        let lam = 0.5 * (paa + pbb) + r;
        let (x, y) = (pab, Complex::new(lam - paa, 0.0));
        let nrm = (x.norm_sqr() + y.norm_sqr()).sqrt();
        (x / nrm, y / nrm)
    };
    let left: Vec<Complex<f64>> = a.iter().zip(b).map(|(&p, &q)| p * ca + q * cb).collect();
    // Orthogonal complement within the span.
    let (da, db) = (-cb.conj(), ca.conj());
    let right: Vec<Complex<f64>> = a.iter().zip(b).map(|(&p, &q)| p * da + q * db).collect();
    (left, right)
}

/// Indices of the two central eigenvalues (0-based N−1 and N for a 2N spectrum).
fn central_pair(len: usize) -> Option<(usize, usize)> {
    (len >= 2).then(|| (len / 2 - 1, len / 2))
}

/// Relative splitting below which the central pair is treated as degenerate.
pub const DEGENERACY_TOLERANCE: f64 = 1e-12;

/// IPR of the selected state. For the mid-spectrum rule the central pair is first rotated
/// into its edge-resolved basis, so a near-degenerate doublet reports the IPR of one edge
/// state rather than of an arbitrary superposition of both ends.
pub fn selected_ipr(h: &ChainHamiltonian, spectrum: &Spectrum, rule: StateRule) -> Result<f64> {
    let k = select_state(spectrum.len(), rule)?;
    if rule == StateRule::MidSpectrum {
        if let Some((i, j)) = central_pair(spectrum.len()) {
            let (left, _) = edge_resolved_pair(spectrum.vector(i), spectrum.vector(j), &h.labels);
            return Ok(ipr_of(left.iter().map(|z| z.norm_sqr())));
        }
    }
    Ok(ipr_of(spectrum.vector(k).iter().map(|z| z.norm_sqr())))
}

/// States of the central doublet reported for profiles. Exactly degenerate pairs are
/// replaced by the symmetric and antisymmetric combinations of their edge-resolved members.
pub fn central_doublet(h: &ChainHamiltonian, spectrum: &Spectrum) -> Result<[PolarizedState; 2]> {
    let (i, j) = central_pair(spectrum.len()).ok_or_else(|| Error::Validation("spectrum too short".into()))?;
    let (ei, ej) = (spectrum.eigenvalue(i), spectrum.eigenvalue(j));
    let scale = spectrum.eigenvalues().iter().fold(0.0f64, |m, e| m.max(e.abs())).max(f64::MIN_POSITIVE);
    let (vi, vj) = if (ej - ei).abs() <= DEGENERACY_TOLERANCE * scale {
        let (l, r) = edge_resolved_pair(spectrum.vector(i), spectrum.vector(j), &h.labels);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = l.iter().zip(&r).map(|(a, b)| (a + b) * s).collect::<Vec<_>>();
        let minus = l.iter().zip(&r).map(|(a, b)| (a - b) * s).collect::<Vec<_>>();
        (plus, minus)
    } else {
        (spectrum.vector(i).to_vec(), spectrum.vector(j).to_vec())
    };
    Ok([PolarizedState::from_vector(ei, &vi, &h.labels)?, PolarizedState::from_vector(ej, &vj, &h.labels)?])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeProfile {
    pub left_weight_x: f64,
    pub right_weight_x: f64,
    pub left_weight_y: f64,
    pub right_weight_y: f64,
    pub ipr: f64,
}

impl EdgeProfile {
    /// Largest fraction of the x-subspace norm found on one half.
    pub fn x_concentration(&self) -> f64 {
        concentration(self.left_weight_x, self.right_weight_x)
    }

    pub fn y_concentration(&self) -> f64 {
        concentration(self.left_weight_y, self.right_weight_y)
    }

    /// True when x and y weights sit mostly on opposite halves.
    pub fn polarizations_opposite(&self) -> bool {
        (self.left_weight_x > self.right_weight_x) != (self.left_weight_y > self.right_weight_y)
    }
}

fn concentration(l: f64, r: f64) -> f64 {
    if l + r == 0.0 {
        0.0
    } else {
        l.max(r) / (l + r)
    }
}

pub fn edge_profile(s: &PolarizedState) -> Result<EdgeProfile> {
    let n = s.site_count();
    let split = |amps: &[Complex<f64>]| {
        amps.iter().enumerate().fold((0.0, 0.0), |(l, r), (i, z)| {
            let f = left_fraction(i, n);
            (l + f * z.norm_sqr(), r + (1.0 - f) * z.norm_sqr())
        })
    };
    let (lx, rx) = split(&s.amp_x);
    let (ly, ry) = split(&s.amp_y);
    Ok(EdgeProfile { left_weight_x: lx, right_weight_x: rx, left_weight_y: ly, right_weight_y: ry, ipr: ipr(s)? })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDiagram {
    pub t_par: f64,
    pub n_sites: usize,
    pub rule: StateRule,
    pub t_perp_axis: Vec<f64>,
    pub g_axis: Vec<f64>,
    /// `ipr_grid[i][j]` belongs to (t_perp_axis[i], g_axis[j]).
    pub ipr_grid: Vec<Vec<f64>>,
}

pub fn run_pool<R: Send>(workers: Option<usize>, job: impl FnOnce() -> R + Send) -> Result<R> {
    match workers {
        None => Ok(job()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::Validation(format!("worker pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

/// IPR of the selected state over a (t⊥, g) grid. Cells are independent; the result
/// does not depend on the number of workers.
pub fn phase_diagram_sweep(
    t_par: f64,
    t_perp_axis: &[f64],
    g_axis: &[f64],
    n_sites: usize,
    rule: StateRule,
    workers: Option<usize>,
) -> Result<PhaseDiagram> {
    if t_perp_axis.is_empty() || g_axis.is_empty() {
        return invalid("phase diagram axes must be non-empty");
    }
    let cells: Vec<(usize, usize)> =
        (0..t_perp_axis.len()).flat_map(|i| (0..g_axis.len()).map(move |j| (i, j))).collect();
    let values = run_pool(workers, || {
        cells
            .par_iter()
            .map(|&(i, j)| {
                let h = build_zigzag_chain(&ZigZagParams::new(t_par, t_perp_axis[i], g_axis[j], n_sites))?;
                let s = eig_hermitian(&h.matrix)?;
                selected_ipr(&h, &s, rule)
            })
            .collect::<Result<Vec<f64>>>()
    })??;
    let ipr_grid = values.chunks(g_axis.len()).map(|c| c.to_vec()).collect();
    Ok(PhaseDiagram {
        t_par,
        n_sites,
        rule,
        t_perp_axis: t_perp_axis.to_vec(),
        g_axis: g_axis.to_vec(),
        ipr_grid,
    })
}

/// Localized→delocalized boundary of one t⊥ column: the first g whose IPR reaches `threshold`.
pub fn ipr_boundary(g_axis: &[f64], column: &[f64], threshold: f64) -> Option<f64> {
    column.iter().position(|&v| v >= threshold).map(|j| g_axis[j])
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionSpectrum {
    pub t_par: f64,
    pub t_perp: f64,
    pub n_sites: usize,
    pub g_axis: Vec<f64>,
    pub eigenvalue_rows: Vec<Vec<f64>>,
    /// Bulk half-gap per g from the Bloch bands.
    pub half_gaps: Vec<f64>,
}

/// In-gap margin: a state counts as in-gap when |E| < margin·half-gap.
pub const IN_GAP_MARGIN: f64 = 0.9;

impl TransitionSpectrum {
    pub fn in_gap_counts(&self) -> Vec<usize> {
        self.eigenvalue_rows
            .iter()
            .zip(&self.half_gaps)
            .map(|(row, hg)| row.iter().filter(|e| e.abs() < IN_GAP_MARGIN * hg).count())
            .collect()
    }

    /// Spacing between the two lowest positive levels per row.
    pub fn edge_bulk_spacing(&self) -> Vec<f64> {
        self.eigenvalue_rows
            .iter()
            .map(|row| {
                let mut pos: Vec<f64> = row.iter().copied().filter(|e| *e > 0.0).collect();
                pos.sort_by(|a, b| a.partial_cmp(b).unwrap());
                if pos.len() >= 2 {
                    pos[1] - pos[0]
                } else {
                    f64::NAN
                }
            })
            .collect()
    }

    /// First local minimum above g_c of the spacing between the innermost in-gap level
    /// and the next one: where the edge states meet the bulk.
    pub fn merge_point(&self) -> Option<f64> {
        let gc = phase_boundary(self.t_par, self.t_perp);
        let sp = self.edge_bulk_spacing();
        (1..sp.len().saturating_sub(1))
            .find(|&i| self.g_axis[i] > gc && sp[i] < sp[i - 1] && sp[i] <= sp[i + 1])
            .map(|i| self.g_axis[i])
    }
}

pub fn transition_spectrum(
    t_par: f64,
    t_perp: f64,
    g_axis: &[f64],
    n_sites: usize,
    workers: Option<usize>,
) -> Result<TransitionSpectrum> {
    if g_axis.windows(2).any(|w| w[1] < w[0]) {
        return invalid("g axis must be sorted");
    }
    let rows = run_pool(workers, || {
        g_axis
            .par_iter()
            .map(|&g| {
                let p = ZigZagParams::new(t_par, t_perp, g, n_sites);
                let e = eigvals_hermitian(&build_zigzag_chain(&p)?.matrix)?;
                Ok((e, half_gap(&p, DEFAULT_K_INTERVALS)?))
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let (eigenvalue_rows, half_gaps) = rows.into_iter().unzip();
    Ok(TransitionSpectrum { t_par, t_perp, n_sites, g_axis: g_axis.to_vec(), eigenvalue_rows, half_gaps })
}

/// Largest violation of λ_k = −λ_{len−1−k}.
pub fn chiral_pairing_defect(eigenvalues: &[f64]) -> f64 {
    let n = eigenvalues.len();
    (0..n).map(|k| (eigenvalues[k] + eigenvalues[n - 1 - k]).abs()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeDecayFit {
    /// Successive A-amplitude ratio ψ_{A,n+1}/ψ_{A,n}; negative when the signs alternate.
    pub ratio: f64,
    /// RMS residual of the log-amplitude fit.
    pub residual: f64,
    pub points: usize,
    pub energy: f64,
}

const AMPLITUDE_FLOOR: f64 = 1e-8;

/// Fits the decay of the SSH eigenstate closest to zero energy.
pub fn edge_decay_fit(h: &ChainHamiltonian, spectrum: &Spectrum) -> Result<EdgeDecayFit> {
    let n = h.dim();
    let (v, w) = ssh_couplings(h)?;
    let k = (0..spectrum.len())
        .min_by(|&a, &b| spectrum.eigenvalue(a).abs().partial_cmp(&spectrum.eigenvalue(b).abs()).unwrap())
        .ok_or_else(|| Error::Validation("empty spectrum".into()))?;
    let energy = spectrum.eigenvalue(k);
    let full_gap = 2.0 * (v.abs() - w.abs()).abs();
    // A chain without an in-gap state has nothing to fit, whatever its length.
    if energy.abs() >= 0.1 * full_gap {
        return Err(Error::InsufficientData(format!("no in-gap state (closest |E| = {:.3e})", energy.abs())));
    }
    if n < 9 {
        return invalid(format!("chain of {n} sites is shorter than 9"));
    }
    let psi = spectrum.vector(k);
    let mut a_sites: Vec<(usize, Complex<f64>)> = h
        .labels
        .iter()
        .zip(psi)
        .filter_map(|(l, z)| match l {
            SiteLabel::Sublattice { site, sub: Sublattice::A } => Some((*site, *z)),
            _ => None,
        })
        .collect();
    a_sites.sort_by_key(|p| p.0);
    // Remove the global phase using the largest A amplitude.
    let anchor = a_sites.iter().map(|p| p.1).max_by(|x, y| x.norm().partial_cmp(&y.norm()).unwrap()).unwrap();
    let phase = if anchor.norm() > 0.0 { anchor.conj() / anchor.norm() } else { Complex::new(1.0, 0.0) };
    let usable: Vec<(f64, f64)> = a_sites
        .iter()
        .enumerate()
        .filter(|(_, p)| p.1.norm() > AMPLITUDE_FLOOR)
        .map(|(cell, p)| (cell as f64, (p.1 * phase).re))
        .collect();
    if usable.len() < 3 {
        return Err(Error::InsufficientData(format!("{} A-site amplitudes above {AMPLITUDE_FLOOR:e}", usable.len())));
    }
    let xs: Vec<f64> = usable.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = usable.iter().map(|p| p.1.abs().ln()).collect();
    let fit = fit_line(&xs, &ys)?;
    let flips = usable.windows(2).filter(|w| w[0].1.signum() != w[1].1.signum()).count();
    let sign = if 2 * flips >= usable.len() - 1 { -1.0 } else { 1.0 };
    Ok(EdgeDecayFit { ratio: sign * fit.slope.exp(), residual: fit.rms_residual, points: usable.len(), energy })
}

/// Recovers (v, w) from the first two bonds of an SSH chain.
fn ssh_couplings(h: &ChainHamiltonian) -> Result<(f64, f64)> {
    if !matches!(h.labels.first(), Some(SiteLabel::Sublattice { .. })) {
        return invalid("SSH chain expected");
    }
    let v = if h.dim() > 1 { h.matrix.get(0, 1).re } else { 0.0 };
    let w = if h.dim() > 2 { h.matrix.get(1, 2).re } else { 0.0 };
    Ok((v, w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_ssh_chain, SSHParams};

    fn chain(g: f64, n: usize) -> ChainHamiltonian {
        build_zigzag_chain(&ZigZagParams::new(-0.1, 0.037, g, n)).unwrap()
    }

    #[test]
    fn single_site_chain() {
        let (s, states) = diagonalize_chain(&chain(0.0, 1)).unwrap();
        assert_eq!(s.eigenvalues(), &[0.0, 0.0]);
        assert_eq!(states.len(), 2);
    }

    #[test]
    fn seven_site_mid_gap_fully_polarized() {
        let h = chain(0.0, 7);
        let (s, _) = diagonalize_chain(&h).unwrap();
        let [a, b] = central_doublet(&h, &s).unwrap();
        for st in [a, b] {
            assert!(st.energy.abs() < 1e-12);
            let wx: f64 = st.amp_x.iter().map(|z| z.norm_sqr()).sum();
            let p = edge_profile(&st).unwrap();
            assert!((wx - 0.5).abs() < 1e-9);
            assert!(p.x_concentration() > 0.95 && p.y_concentration() > 0.95);
            assert!(p.polarizations_opposite());
        }
        // Edge-resolved members are each confined to one polarization.
        let (l, r) = edge_resolved_pair(s.vector(6), s.vector(7), &h.labels);
        for v in [l, r] {
            let wx: f64 = v[..7].iter().map(|z| z.norm_sqr()).sum();
            assert!(wx < 1e-9 || wx > 1.0 - 1e-9);
        }
    }

    #[test]
    fn ipr_examples() {
        let one = Complex::new(1.0, 0.0);
        let zero = Complex::new(0.0, 0.0);
        let single = PolarizedState { energy: 0.0, amp_x: vec![one, zero], amp_y: vec![zero, zero] };
        assert_eq!(ipr(&single).unwrap(), 1.0);
        let u = Complex::new(0.5, 0.0);
        let uniform = PolarizedState { energy: 0.0, amp_x: vec![u, u], amp_y: vec![u, u] };
        assert!((ipr(&uniform).unwrap() - 4.0).abs() < 1e-12);
        let h = Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let two = PolarizedState { energy: 0.0, amp_x: vec![h, zero], amp_y: vec![zero, h] };
        assert!((ipr(&two).unwrap() - 2.0).abs() < 1e-12);
        let bad = PolarizedState { energy: 0.0, amp_x: vec![one, one], amp_y: vec![zero, zero] };
        assert!(ipr(&bad).is_err());
    }

    #[test]
    fn selection_rules() {
        assert_eq!(select_state(18, StateRule::MidSpectrum).unwrap(), 8);
        assert_eq!(select_state(80, StateRule::MidBulk).unwrap(), 59);
        assert_eq!(select_state(18, StateRule::Index(5)).unwrap(), 5);
        assert!(select_state(18, StateRule::Index(18)).is_err());
    }

    #[test]
    fn mid_spectrum_in_gap_below_transition() {
        let p = ZigZagParams::new(-0.1, 0.037, 0.016, 9);
        let h = build_zigzag_chain(&p).unwrap();
        let (s, _) = diagonalize_chain(&h).unwrap();
        let k = select_state(s.len(), StateRule::MidSpectrum).unwrap();
        assert!(s.eigenvalue(k).abs() < half_gap(&p, 1024).unwrap());
    }

    #[test]
    fn uniform_profile() {
        let u = Complex::new(0.5, 0.0);
        let st = PolarizedState { energy: 0.0, amp_x: vec![u, u], amp_y: vec![u, u] };
        let p = edge_profile(&st).unwrap();
        for v in [p.left_weight_x, p.right_weight_x, p.left_weight_y, p.right_weight_y] {
            assert!((v - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn one_cell_sweep_matches_direct() {
        let d = phase_diagram_sweep(-0.1, &[0.037], &[0.01], 9, StateRule::MidSpectrum, None).unwrap();
        let h = chain(0.01, 9);
        let s = eig_hermitian(&h.matrix).unwrap();
        assert_eq!(d.ipr_grid, vec![vec![selected_ipr(&h, &s, StateRule::MidSpectrum).unwrap()]]);
    }

    #[test]
    fn sweep_independent_of_workers() {
        let tp = [-0.05, 0.02, 0.06];
        let gs = [0.0, 0.02, 0.05];
        let a = phase_diagram_sweep(-0.1, &tp, &gs, 11, StateRule::MidSpectrum, Some(1)).unwrap();
        let b = phase_diagram_sweep(-0.1, &tp, &gs, 11, StateRule::MidSpectrum, Some(3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn nine_site_g_zero_has_one_zero_mode_per_polarization() {
        // Two decoupled odd chains of nine sites each carry one exact zero mode.
        let ts = transition_spectrum(-0.1, 0.037, &[0.0], 9, None).unwrap();
        assert_eq!(ts.in_gap_counts(), vec![2]);
        let inner: Vec<f64> =
            ts.eigenvalue_rows[0].iter().copied().filter(|e| e.abs() < 0.9 * ts.half_gaps[0]).collect();
        assert!(inner.iter().all(|e| e.abs() < 1e-12));
    }

    #[test]
    fn small_g_splits_doublet() {
        let ts = transition_spectrum(-0.1, 0.037, &[0.01], 9, None).unwrap();
        let inner: Vec<f64> =
            ts.eigenvalue_rows[0].iter().copied().filter(|e| e.abs() < 0.9 * ts.half_gaps[0]).collect();
        assert_eq!(inner.len(), 2);
        assert!((inner[0] - inner[1]).abs() > 1e-6);
        assert!((inner[0] + inner[1]).abs() < 1e-12);
    }

    #[test]
    fn nine_site_merge_point() {
        let gs: Vec<f64> = (0..=48).map(|i| 0.0025 * i as f64).collect();
        let ts = transition_spectrum(-0.1, 0.037, &gs, 9, None).unwrap();
        let m = ts.merge_point().unwrap();
        assert!((m - 0.06).abs() <= 0.015, "merge at {m}");
    }

    #[test]
    fn ssh_decay() {
        let h = build_ssh_chain(&SSHParams::new(0.037, 0.1, 17)).unwrap();
        let s = eig_hermitian(&h.matrix).unwrap();
        let f = edge_decay_fit(&h, &s).unwrap();
        assert!((f.ratio + 0.37).abs() < 0.02 * 0.37);
        assert!(f.ratio < 0.0);
        assert!(f.residual < 1e-6);
    }

    #[test]
    fn ssh_decay_dimerized_limit_is_flagged() {
        let h = build_ssh_chain(&SSHParams::new(0.0, 1.0, 17)).unwrap();
        let s = eig_hermitian(&h.matrix).unwrap();
        assert!(matches!(edge_decay_fit(&h, &s), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn short_trivial_chain_has_no_in_gap_state() {
        let h = build_ssh_chain(&SSHParams::new(1.0, 0.0, 4)).unwrap();
        let s = eig_hermitian(&h.matrix).unwrap();
        assert!(matches!(edge_decay_fit(&h, &s), Err(Error::InsufficientData(_))));
        let h = build_ssh_chain(&SSHParams::new(0.037, 0.1, 5)).unwrap();
        let s = eig_hermitian(&h.matrix).unwrap();
        assert!(matches!(edge_decay_fit(&h, &s), Err(Error::Validation(_))));
    }

    #[test]
    fn chiral_pairs() {
        let e = eigvals_hermitian(&chain(0.03, 12).matrix).unwrap();
        assert!(chiral_pairing_defect(&e) < 1e-12);
    }
}

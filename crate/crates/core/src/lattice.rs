//! Hamiltonian builders: SSH chains, finite Zig-Zag chains and the Bloch forms
//! of the extended model.

use num_complex::Complex;

use crate::error::{invalid, Error, Result};
use crate::numerics::{det2, HermitianMatrix};
use crate::scalar::Real;

/// Couplings of the Zig-Zag chain. `theta` is the bond angle in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZigZagParams<T: Real = f64> {
    pub t_par: T,
    pub t_perp: T,
    pub g: T,
    pub theta: T,
    pub n_sites: usize,
}

impl<T: Real> ZigZagParams<T> {
    /// Right-angle chain.
    pub fn new(t_par: T, t_perp: T, g: T, n_sites: usize) -> Self {
        Self { t_par, t_perp, g, theta: T::FRAC_PI_2(), n_sites }
    }

    pub fn with_theta(mut self, theta: T) -> Self {
        self.theta = theta;
        self
    }

    pub fn with_g(mut self, g: T) -> Self {
        self.g = g;
        self
    }

    /// Δ = (t‖ − t⊥)/2.
    pub fn delta(&self) -> T {
        (self.t_par - self.t_perp) / T::lit(2.0)
    }

    /// t̄ = (t‖ + t⊥)/2.
    pub fn t_bar(&self) -> T {
        (self.t_par + self.t_perp) / T::lit(2.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_par.is_finite() && self.t_perp.is_finite() && self.g.is_finite()) {
            return invalid("couplings must be finite");
        }
        if !(self.theta > T::zero() && self.theta <= T::PI()) {
            return invalid(format!("bond angle {} outside (0, pi]", self.theta));
        }
        Ok(())
    }

    pub fn is_right_angle(&self) -> bool {
        (self.theta - T::FRAC_PI_2()).abs() <= T::lit(1e-12).max(T::eps() * T::lit(4.0))
    }

    fn require_right_angle(&self) -> Result<()> {
        self.validate()?;
        if !self.is_right_angle() {
            return Err(Error::Unsupported(format!(
                "the extended model is defined only for a 90 degree bond angle (theta = {})",
                self.theta
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SSHParams<T: Real = f64> {
    /// Intracell coupling.
    pub v: T,
    /// Intercell coupling.
    pub w: T,
    pub n_sites: usize,
}

impl<T: Real> SSHParams<T> {
    pub fn new(v: T, w: T, n_sites: usize) -> Self {
        Self { v, w, n_sites }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sublattice {
    A,
    B,
}

/// Tag of one basis index. Sites are numbered from 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SiteLabel {
    Polarized { site: usize, pol: Polarization },
    Sublattice { site: usize, sub: Sublattice },
}

impl SiteLabel {
    pub fn site(&self) -> usize {
        match *self {
            SiteLabel::Polarized { site, .. } | SiteLabel::Sublattice { site, .. } => site,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainHamiltonian<T: Real = f64> {
    pub matrix: HermitianMatrix<T>,
    pub labels: Vec<SiteLabel>,
}

impl<T: Real> ChainHamiltonian<T> {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Number of physical sites (N for both SSH and Zig-Zag chains).
    pub fn site_count(&self) -> usize {
        self.labels.iter().map(|l| l.site() + 1).max().unwrap_or(0)
    }
}

pub fn build_ssh_chain<T: Real>(p: &SSHParams<T>) -> Result<ChainHamiltonian<T>> {
    let n = p.n_sites;
    if n < 2 {
        return invalid(format!("SSH chain needs at least 2 sites, got {n}"));
    }
    if !(p.v.is_finite() && p.w.is_finite()) {
        return invalid("couplings must be finite");
    }
    let mut m = HermitianMatrix::zeros(n);
    for b in 0..n - 1 {
        m.set_real(b, b + 1, if b % 2 == 0 { p.v } else { p.w });
    }
    let labels = (0..n)
        .map(|site| SiteLabel::Sublattice { site, sub: if site % 2 == 0 { Sublattice::A } else { Sublattice::B } })
        .collect();
    Ok(ChainHamiltonian { matrix: m, labels })
}

/// Bond-resolved couplings of an open Zig-Zag chain.
///
/// `x[b]` and `y[b]` couple sites b and b+1 in each polarization; `g_fwd[i]` couples
/// d_i with c_{i+2} and `g_bwd[i]` couples d_{i+2} with c_i (0-based sites).
#[derive(Debug, Clone, PartialEq)]
pub struct ZigZagBonds<T: Real = f64> {
    pub n_sites: usize,
    pub x: Vec<T>,
    pub y: Vec<T>,
    pub g_fwd: Vec<T>,
    pub g_bwd: Vec<T>,
}

impl<T: Real> ZigZagBonds<T> {
    pub fn nominal(p: &ZigZagParams<T>) -> Result<Self> {
        p.require_right_angle()?;
        let n = p.n_sites;
        if n == 0 {
            return invalid("chain needs at least one site");
        }
        let nb = n - 1;
        let ng = n.saturating_sub(2);
        let x = (0..nb).map(|b| if b % 2 == 0 { p.t_par } else { p.t_perp }).collect();
        let y = (0..nb).map(|b| if b % 2 == 0 { p.t_perp } else { p.t_par }).collect();
        Ok(Self { n_sites: n, x, y, g_fwd: vec![p.g; ng], g_bwd: vec![p.g; ng] })
    }

    pub fn bond_count(&self) -> usize {
        self.x.len() + self.y.len() + self.g_fwd.len() + self.g_bwd.len()
    }

    /// All bonds in a fixed order: x, y, g forward, g backward.
    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.x.iter().chain(&self.y).chain(&self.g_fwd).chain(&self.g_bwd)
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = &mut T> {
        self.x.iter_mut().chain(self.y.iter_mut()).chain(self.g_fwd.iter_mut()).chain(self.g_bwd.iter_mut())
    }

    pub fn to_chain(&self) -> ChainHamiltonian<T> {
        let n = self.n_sites;
        let mut m = HermitianMatrix::zeros(2 * n);
        for (b, (&tx, &ty)) in self.x.iter().zip(&self.y).enumerate() {
            m.set_real(b, b + 1, tx);
            m.set_real(n + b, n + b + 1, ty);
        }
        for i in 0..self.g_fwd.len() {
            m.add_real(n + i, i + 2, self.g_fwd[i]);
            m.add_real(n + i + 2, i, self.g_bwd[i]);
        }
        ChainHamiltonian { matrix: m, labels: zigzag_labels(n) }
    }
}

fn zigzag_labels(n: usize) -> Vec<SiteLabel> {
    (0..n)
        .map(|site| SiteLabel::Polarized { site, pol: Polarization::X })
        .chain((0..n).map(|site| SiteLabel::Polarized { site, pol: Polarization::Y }))
        .collect()
}

/// Open chain in the blocked basis (c_0..c_{N−1}, d_0..d_{N−1}).
pub fn build_zigzag_chain<T: Real>(p: &ZigZagParams<T>) -> Result<ChainHamiltonian<T>> {
    Ok(ZigZagBonds::nominal(p)?.to_chain())
}

/// Ring-closed chain (N even), used to compare finite spectra with the Bloch bands.
pub fn build_zigzag_ring<T: Real>(p: &ZigZagParams<T>) -> Result<ChainHamiltonian<T>> {
    p.require_right_angle()?;
    let n = p.n_sites;
    if n < 4 || n % 2 != 0 {
        return invalid(format!("ring needs an even number of sites >= 4, got {n}"));
    }
    let mut m = HermitianMatrix::zeros(2 * n);
    for b in 0..n {
        let (tx, ty) = if b % 2 == 0 { (p.t_par, p.t_perp) } else { (p.t_perp, p.t_par) };
        let c = (b + 1) % n;
        m.add_real(b, c, tx);
        m.add_real(n + b, n + c, ty);
    }
    for i in 0..n {
        let j = (i + 2) % n;
        m.add_real(n + i, j, p.g);
        m.add_real(n + j, i, p.g);
    }
    Ok(ChainHamiltonian { matrix: m, labels: zigzag_labels(n) })
}

fn cis<T: Real>(k: T) -> Complex<T> {
    Complex::new(k.cos(), k.sin())
}

fn re<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

fn chiral_block<T: Real>(q: [[Complex<T>; 2]; 2]) -> HermitianMatrix<T> {
    let mut m = HermitianMatrix::zeros(4);
    for a in 0..2 {
        for b in 0..2 {
            m.set(a, 2 + b, q[a][b]);
        }
    }
    m
}

/// Nearest-neighbour Zig-Zag Bloch matrix at arbitrary bond angle θ:
/// Q = t̄(1+e^{−iK})σ0 + Δ(1+e^{−iK}cos2θ)σz + Δe^{−iK}sin2θ·σx.
///
/// The dipole axes of consecutive bonds are rotated by 2θ relative to each other, so the
/// harmonics enter at 2θ: θ = 90° splits into two SSH chains and θ = 180° is a straight chain.
pub fn bloch_zz_nn<T: Real>(k: T, p: &ZigZagParams<T>) -> Result<HermitianMatrix<T>> {
    p.validate()?;
    let one = re(T::one());
    let em = cis(-k);
    let (tb, dl) = (p.t_bar(), p.delta());
    let two_theta = T::lit(2.0) * p.theta;
    let a = (one + em) * tb;
    let z = (one + em * two_theta.cos()) * dl;
    let x = em * (dl * two_theta.sin());
    Ok(chiral_block([[a + z, x], [x, a - z]]))
}

/// d(K) = t‖ + t⊥e^{iK}.
pub fn d_x<T: Real>(k: T, p: &ZigZagParams<T>) -> Complex<T> {
    re(p.t_par) + cis(k) * p.t_perp
}

/// d'(K) = t⊥ + t‖e^{iK}.
pub fn d_y<T: Real>(k: T, p: &ZigZagParams<T>) -> Complex<T> {
    re(p.t_perp) + cis(k) * p.t_par
}

/// Four-site Bloch matrix of the extended model in the basis (A_x, B_x, A_y, B_y).
pub fn bloch_extended<T: Real>(k: T, p: &ZigZagParams<T>) -> Result<HermitianMatrix<T>> {
    p.require_right_angle()?;
    let c = re(T::lit(2.0) * p.g * k.cos());
    let mut m = HermitianMatrix::zeros(4);
    m.set(0, 1, d_x(k, p));
    m.set(2, 3, d_y(k, p));
    m.set(0, 2, c);
    m.set(1, 3, c);
    Ok(m)
}

/// Pauli-matrix expansion Re d₊ τ0σx + Im d₊ τ0σy + Re d₋ τzσx + Im d₋ τzσy + 2g cosK τxσ0,
/// with τ acting on polarization and σ on sublattice.
///
/// With σy = [[0, −i], [i, 0]] this is the complex conjugate of [`bloch_extended`] at the
/// same K, i.e. `bloch_extended(−K)`.
pub fn bloch_pauli<T: Real>(k: T, p: &ZigZagParams<T>) -> Result<HermitianMatrix<T>> {
    p.require_right_angle()?;
    let half = T::lit(0.5);
    let (d, dp) = (d_x(k, p), d_y(k, p));
    let dplus = (d + dp) * half;
    let dminus = (d - dp) * half;
    let zero = re(T::zero());
    let i = Complex::new(T::zero(), T::one());
    let sx = [[zero, re(T::one())], [re(T::one()), zero]];
    let sy = [[zero, -i], [i, zero]];
    let s0 = [[re(T::one()), zero], [zero, re(T::one())]];
    let g2 = T::lit(2.0) * p.g * k.cos();
    let mut m = HermitianMatrix::zeros(4);
    for ta in 0..2 {
        for tb in 0..2 {
            let tau0 = if ta == tb { T::one() } else { T::zero() };
            let tauz = if ta == tb { if ta == 0 { T::one() } else { -T::one() } } else { T::zero() };
            let taux = if ta != tb { T::one() } else { T::zero() };
            for sa in 0..2 {
                for sb in 0..2 {
                    let v = (sx[sa][sb] * dplus.re + sy[sa][sb] * dplus.im) * tau0
                        + (sx[sa][sb] * dminus.re + sy[sa][sb] * dminus.im) * tauz
                        + s0[sa][sb] * (g2 * taux);
                    let (r, c) = (2 * ta + sa, 2 * tb + sb);
                    if r <= c {
                        m.set(r, c, v);
                    }
                }
            }
        }
    }
    Ok(m)
}

/// Chiral operator Γ = τz⊗σz = diag(1, −1, −1, 1).
pub const CHIRAL_DIAGONAL: [f64; 4] = [1.0, -1.0, -1.0, 1.0];

/// Off-diagonal block Q_K in the basis (A_x, B_y | B_x, A_y).
pub fn q_block<T: Real>(k: T, p: &ZigZagParams<T>) -> Result<[[Complex<T>; 2]; 2]> {
    p.require_right_angle()?;
    let half = T::lit(0.5);
    let ep = cis(k);
    let em = cis(-k);
    let s0 = re(p.t_bar()) + (ep * p.t_perp + em * p.t_par) * half;
    let sz = re(p.delta()) + (ep * p.t_perp - em * p.t_par) * half;
    let c = re(T::lit(2.0) * p.g * k.cos());
    Ok([[s0 + sz, c], [c, s0 - sz]])
}

/// Basis order that turns [`bloch_extended`] into the block form [[0, Q], [Q†, 0]].
pub const OFF_DIAGONAL_ORDER: [usize; 4] = [0, 3, 1, 2];

pub fn det_q<T: Real>(k: T, p: &ZigZagParams<T>) -> Result<Complex<T>> {
    Ok(det2(&q_block(k, p)?))
}

/// Singular values (σ_min, σ_max) of a 2×2 complex matrix.
pub fn singular_values2<T: Real>(q: &[[Complex<T>; 2]; 2]) -> (T, T) {
    // Eigenvalues of Q†Q = [[a, b], [b*, c]] without cancellation in the discriminant.
    let a = q[0][0].norm_sqr() + q[1][0].norm_sqr();
    let c = q[0][1].norm_sqr() + q[1][1].norm_sqr();
    let b = q[0][0].conj() * q[0][1] + q[1][0].conj() * q[1][1];
    let half = T::lit(0.5);
    let smax = ((a + c) * half + ((a - c) * half).hypot(b.norm())).sqrt();
    let det = det2(q).norm();
    let smin = if smax > T::zero() { det / smax } else { T::zero() };
    (smin, smax)
}

/// Bands of the extended model from the singular values of Q_K, ascending.
pub fn bands_extended<T: Real>(k: T, p: &ZigZagParams<T>) -> Result<[T; 4]> {
    let (smin, smax) = singular_values2(&q_block(k, p)?);
    Ok([-smax, -smin, smin, smax])
}

/// Positive branch of the degenerate nearest-neighbour bands, √(t‖² + t⊥² + 2t‖t⊥cosK).
pub fn bands_nn_degenerate<T: Real>(k: T, t_par: T, t_perp: T) -> T {
    (t_par + t_perp * k.cos()).hypot(t_perp * k.sin())
}

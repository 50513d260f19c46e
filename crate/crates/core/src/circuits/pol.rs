use std::collections::HashMap;

use num_complex::Complex;

use super::EC_ONE_FEMTOFARAD_GHZ;
use crate::error::{invalid, Error, Result};
use crate::numerics::{eig_symmetric, eigvals_symmetric, HermitianMatrix, SymmetricMatrix};

/// Charge shifts of the four junction operators: cos φ₁, cos φ₃, cos(φ₂ − φ₃), cos(φ₂ − φ₁).
const HOPS: [[i32; 3]; 4] = [[1, 0, 0], [0, 0, 1], [0, 1, -1], [-1, 1, 0]];

/// Largest cube cutoff accepted for the literal (2c+1)³ basis.
pub const MAX_CUBE_CUTOFF: usize = 7;
/// Largest parity block (or unreduced matrix) diagonalized by the auto-converging paths.
pub const MAX_BLOCK_DIM: usize = 4096;

/// Four-island polarization transmon at zero external flux; energies in GHz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolTransmonSpec {
    pub e_j: f64,
    /// Capacitance C between adjacent islands, fF.
    pub c_axial: f64,
    /// Capacitance C' across each diagonal, fF.
    pub c_diag: f64,
    pub n_g: [f64; 3],
    /// Per-axis cutoff of the cube basis.
    pub cutoff: usize,
    pub phi_ext: f64,
}

impl PolTransmonSpec {
    pub const DEFAULT_CUTOFF: usize = 5;

    pub fn new(e_j: f64, c_axial: f64, c_diag: f64) -> Self {
        Self { e_j, c_axial, c_diag, n_g: [0.0; 3], cutoff: Self::DEFAULT_CUTOFF, phi_ext: 0.0 }
    }

    /// Effective charging energy e²/(2(2C + C')) in GHz.
    pub fn ec_tilde(&self) -> f64 {
        EC_ONE_FEMTOFARAD_GHZ / (2.0 * self.c_axial + self.c_diag)
    }

    pub fn ratio(&self) -> f64 {
        self.e_j / self.ec_tilde()
    }

    /// Same circuit with E_J set to `ratio`·ẼC.
    pub fn with_ratio(mut self, ratio: f64) -> Self {
        self.e_j = ratio * self.ec_tilde();
        self
    }

    pub fn with_n_g(mut self, n_g: [f64; 3]) -> Self {
        self.n_g = n_g;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.e_j.is_finite() && self.e_j >= 0.0) {
            return invalid(format!("E_J must be finite and non-negative, got {}", self.e_j));
        }
        if !(self.c_axial > 0.0 && self.c_diag > 0.0 && self.c_axial.is_finite() && self.c_diag.is_finite()) {
            return invalid("capacitances must be positive");
        }
        if self.n_g.iter().any(|x| !x.is_finite()) {
            return invalid("offset charges must be finite");
        }
        if self.cutoff < 2 {
            return invalid(format!("cutoff {} below 2", self.cutoff));
        }
        if self.phi_ext != 0.0 {
            return Err(Error::Unsupported("non-zero external flux".into()));
        }
        Ok(())
    }
}

/// Reduced Maxwell matrix of the four-island ring with island 0 grounded, fF.
pub fn capacitance_matrix(c: f64, cp: f64) -> [[f64; 3]; 3] {
    let a = 2.0 * c + cp;
    [[a, -c, -cp], [-c, a, -c], [-cp, -c, a]]
}

/// Junction stiffness matrix of the four cosines expanded to second order, in units of E_J.
const JUNCTION_LAPLACIAN: [[f64; 3]; 3] = [[2.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 2.0]];

fn sym3_apply(m: &[[f64; 3]; 3], f: impl Fn(f64) -> f64) -> Result<[[f64; 3]; 3]> {
    let flat = SymmetricMatrix::from_row_major(3, m.iter().flatten().copied().collect())?;
    let (w, u) = eig_symmetric(&flat)?;
    let mut out = [[0.0; 3]; 3];
    for k in 0..3 {
        let fk = f(w[k]);
        let v = &u[3 * k..3 * k + 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] += fk * v[i] * v[j];
            }
        }
    }
    Ok(out)
}

fn mul3(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

fn symmetrize(m: [[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = m;
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = 0.5 * (m[i][j] + m[j][i]);
        }
    }
    out
}

/// Inverse capacitance matrix scaled to the kinetic term: H_kin = ½ (n − n_g)ᵀ K (n − n_g), GHz.
fn kinetic_matrix(spec: &PolTransmonSpec) -> Result<[[f64; 3]; 3]> {
    let inv = sym3_apply(&capacitance_matrix(spec.c_axial, spec.c_diag), |x| 1.0 / x)?;
    Ok(inv.map(|r| r.map(|x| 8.0 * EC_ONE_FEMTOFARAD_GHZ * x)))
}

/// Charge covariance ⟨n nᵀ⟩ of the harmonic ground state, used to shape the truncated basis.
pub fn charge_covariance(spec: &PolTransmonSpec) -> Result<[[f64; 3]; 3]> {
    spec.validate()?;
    let k = kinetic_matrix(spec)?;
    let b = JUNCTION_LAPLACIAN.map(|r| r.map(|x| x * spec.e_j));
    let k_half = sym3_apply(&k, f64::sqrt)?;
    let k_inv_half = sym3_apply(&k, |x| 1.0 / x.sqrt())?;
    let inner = sym3_apply(&symmetrize(mul3(&mul3(&k_half, &b), &k_half)), |x| x.max(0.0).sqrt())?;
    let s = mul3(&mul3(&k_inv_half, &inner), &k_inv_half);
    Ok(symmetrize(s.map(|r| r.map(|x| 0.5 * x))))
}

/// How the infinite charge lattice is truncated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truncation {
    /// Every nᵢ ∈ [−cutoff, cutoff].
    Cube { cutoff: usize },
    /// Charge states within Mahalanobis radius `radius` of n_g under the harmonic ground-state
    /// covariance. Converges with far fewer states than the cube centered on zero.
    Ellipsoid { radius: f64 },
}

/// Enumerated charge states |n₁, n₂, n₃⟩.
#[derive(Debug, Clone)]
pub struct ChargeBasis {
    states: Vec<[i32; 3]>,
    index: HashMap<[i32; 3], usize>,
}

impl ChargeBasis {
    fn from_states(states: Vec<[i32; 3]>) -> Self {
        let index = states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        Self { states, index }
    }

    pub fn cube(cutoff: usize) -> Self {
        let c = cutoff as i32;
        let mut states = Vec::with_capacity((2 * cutoff + 1).pow(3));
        for a in -c..=c {
            for b in -c..=c {
                for d in -c..=c {
                    states.push([a, b, d]);
                }
            }
        }
        Self::from_states(states)
    }

    pub fn ellipsoid(spec: &PolTransmonSpec, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return invalid("ellipsoid radius must be positive");
        }
        let cov = if spec.e_j == 0.0 {
            [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
        } else {
            charge_covariance(spec)?
        };
        let prec = sym3_apply(&cov, |x| 1.0 / x)?;
        let reach = (0..3).map(|i| cov[i][i]).fold(0.0, f64::max).sqrt() * radius;
        let ext = reach.ceil() as i32 + 2;
        let center = spec.n_g.map(|x| x.round() as i32);
        let mut states = Vec::new();
        for a in -ext..=ext {
            for b in -ext..=ext {
                for d in -ext..=ext {
                    let s = [center[0] + a, center[1] + b, center[2] + d];
                    let q = quadratic(&prec, &offset(s, spec.n_g));
                    if q <= radius * radius {
                        states.push(s);
                    }
                }
            }
        }
        Ok(Self::from_states(states))
    }

    pub fn build(spec: &PolTransmonSpec, truncation: Truncation) -> Result<Self> {
        match truncation {
            Truncation::Cube { cutoff } => {
                if !(2..=MAX_CUBE_CUTOFF).contains(&cutoff) {
                    return invalid(format!("cube cutoff {cutoff} outside [2, {MAX_CUBE_CUTOFF}]"));
                }
                Ok(Self::cube(cutoff))
            }
            Truncation::Ellipsoid { radius } => Self::ellipsoid(spec, radius),
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[[i32; 3]] {
        &self.states
    }

    fn find(&self, s: &[i32; 3]) -> Option<usize> {
        self.index.get(s).copied()
    }
}

fn offset(s: [i32; 3], n_g: [f64; 3]) -> [f64; 3] {
    [s[0] as f64 - n_g[0], s[1] as f64 - n_g[1], s[2] as f64 - n_g[2]]
}

fn quadratic(m: &[[f64; 3]; 3], d: &[f64; 3]) -> f64 {
    (0..3).map(|i| (0..3).map(|j| d[i] * m[i][j] * d[j]).sum::<f64>()).sum()
}

/// Sparse application of H to a basis state: (column, value) pairs including the diagonal.
struct ChargeHamiltonian<'a> {
    basis: &'a ChargeBasis,
    kinetic: [[f64; 3]; 3],
    n_g: [f64; 3],
    hop: f64,
}

impl<'a> ChargeHamiltonian<'a> {
    fn new(spec: &PolTransmonSpec, basis: &'a ChargeBasis) -> Result<Self> {
        Ok(Self { basis, kinetic: kinetic_matrix(spec)?, n_g: spec.n_g, hop: -0.5 * spec.e_j })
    }

    fn column(&self, i: usize, out: &mut Vec<(usize, f64)>) {
        out.clear();
        let s = self.basis.states[i];
        out.push((i, 0.5 * quadratic(&self.kinetic, &offset(s, self.n_g))));
        if self.hop == 0.0 {
            return;
        }
        for d in HOPS {
            for sign in [1, -1] {
                let t = [s[0] + sign * d[0], s[1] + sign * d[1], s[2] + sign * d[2]];
                if let Some(j) = self.basis.find(&t) {
                    out.push((j, self.hop));
                }
            }
        }
    }

    fn dense(&self) -> SymmetricMatrix {
        let n = self.basis.len();
        let mut m = SymmetricMatrix::zeros(n);
        let mut col = Vec::new();
        for i in 0..n {
            self.column(i, &mut col);
            for &(j, v) in &col {
                if j >= i {
                    m.set(i, j, v);
                }
            }
        }
        m
    }
}

/// Literal charge-basis Hamiltonian on the (2·cutoff+1)³ cube.
pub fn pol_transmon_hamiltonian(spec: &PolTransmonSpec) -> Result<HermitianMatrix> {
    spec.validate()?;
    let basis = ChargeBasis::build(spec, Truncation::Cube { cutoff: spec.cutoff })?;
    let m = ChargeHamiltonian::new(spec, &basis)?.dense();
    let data = m.as_slice().iter().map(|&x| Complex::new(x, 0.0)).collect();
    HermitianMatrix::from_row_major(m.dim(), data)
}

/// Even and odd blocks under n → 2n_g − n, or `None` when 2n_g is not integral or the
/// basis is not closed under the inversion.
fn parity_blocks(h: &ChargeHamiltonian, n_g: [f64; 3]) -> Option<(SymmetricMatrix, SymmetricMatrix)> {
    let twice = n_g.map(|x| 2.0 * x);
    if twice.iter().any(|x| (x - x.round()).abs() > 0.0) {
        return None;
    }
    let twice = twice.map(|x| x as i32);
    let basis = h.basis;
    let n = basis.len();
    let mut partner = vec![0usize; n];
    for (i, s) in basis.states.iter().enumerate() {
        partner[i] = basis.find(&[twice[0] - s[0], twice[1] - s[1], twice[2] - s[2]])?;
    }
    // Block slot and coefficients of every state: (even slot, even coef, odd slot, odd coef).
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let (mut n_even, mut n_odd) = (0usize, 0usize);
    let mut slot = vec![(0usize, 0.0f64, usize::MAX, 0.0f64); n];
    for i in 0..n {
        let j = partner[i];
        if i == j {
            slot[i] = (n_even, 1.0, usize::MAX, 0.0);
            n_even += 1;
        } else if i < j {
            slot[i] = (n_even, r, n_odd, r);
            slot[j] = (n_even, r, n_odd, -r);
            n_even += 1;
            n_odd += 1;
        }
    }
    let mut even = SymmetricMatrix::zeros(n_even.max(1));
    let mut odd = SymmetricMatrix::zeros(n_odd.max(1));
    let mut col = Vec::new();
    for i in 0..n {
        let j = partner[i];
        if i > j {
            continue;
        }
        // H acting on the rep state i alone suffices: the partner contributes the mirrored column.
        let (ea, ec, oa, oc) = slot[i];
        let scale_e = if i == j { 1.0 } else { 2.0 * ec };
        h.column(i, &mut col);
        for &(k, v) in &col {
            let (eb, ecb, ob, ocb) = slot[k];
            if eb >= ea {
                let cur = even.get(ea, eb);
                even.set(ea, eb, cur + scale_e * v * ecb);
            }
            if i != j && ob != usize::MAX && ob >= oa {
                let cur = odd.get(oa, ob);
                odd.set(oa, ob, cur + 2.0 * oc * v * ocb);
            }
        }
    }
    if n_odd == 0 {
        odd = SymmetricMatrix::zeros(0);
    }
    Some((even, odd))
}

/// Lowest `count` levels (GHz), ascending. Inversion-symmetric offsets are diagonalized
/// block by block.
pub fn pol_transmon_levels(spec: &PolTransmonSpec, truncation: Truncation, count: usize) -> Result<Vec<f64>> {
    spec.validate()?;
    let basis = ChargeBasis::build(spec, truncation)?;
    if basis.len() < count {
        return invalid(format!("basis of {} states cannot supply {count} levels", basis.len()));
    }
    let h = ChargeHamiltonian::new(spec, &basis)?;
    let mut levels = match parity_blocks(&h, spec.n_g) {
        Some((even, odd)) => {
            check_dim(even.dim(), truncation)?;
            let mut v = eigvals_symmetric(&even)?;
            if odd.dim() > 0 {
                v.extend(eigvals_symmetric(&odd)?);
            }
            v
        }
        None => {
            check_dim(basis.len(), truncation)?;
            eigvals_symmetric(&h.dense())?
        }
    };
    levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
    levels.truncate(count);
    Ok(levels)
}

fn check_dim(dim: usize, truncation: Truncation) -> Result<()> {
    if matches!(truncation, Truncation::Ellipsoid { .. }) && dim > MAX_BLOCK_DIM {
        return Err(Error::CutoffNotConverged(format!("block dimension {dim} exceeds {MAX_BLOCK_DIM}")));
    }
    Ok(())
}

/// Small-oscillation modes of the circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicModes {
    /// Degenerate dipole pair, GHz.
    pub dipole: [f64; 2],
    /// Quadrupole mode, GHz.
    pub quadrupole: f64,
    /// Effective capacitance of each mode (dipole, dipole, quadrupole), fF, normalized so the
    /// junction stiffness of every mode is 4E_J.
    pub mode_capacitance: [f64; 3],
}

pub fn harmonic_modes(spec: &PolTransmonSpec) -> Result<HarmonicModes> {
    spec.validate()?;
    let c = capacitance_matrix(spec.c_axial, spec.c_diag);
    let c_inv_half = sym3_apply(&c, |x| 1.0 / x.sqrt())?;
    let lam = {
        let m = symmetrize(mul3(&mul3(&c_inv_half, &JUNCTION_LAPLACIAN), &c_inv_half));
        let flat = SymmetricMatrix::from_row_major(3, m.iter().flatten().copied().collect())?;
        eigvals_symmetric(&flat)?
    };
    // The dipole pair is the closest pair of generalized eigenvalues.
    let (d0, d1, q) = if (lam[1] - lam[0]).abs() <= (lam[2] - lam[1]).abs() { (0, 1, 2) } else { (1, 2, 0) };
    let freq = |l: f64| (8.0 * EC_ONE_FEMTOFARAD_GHZ * spec.e_j * l).sqrt();
    Ok(HarmonicModes {
        dipole: [freq(lam[d0]), freq(lam[d1])],
        quadrupole: freq(lam[q]),
        mode_capacitance: [4.0 / lam[d0], 4.0 / lam[d1], 4.0 / lam[q]],
    })
}

/// √(16 E_J ẼC) in GHz.
pub fn dipole_frequency(spec: &PolTransmonSpec) -> Result<f64> {
    spec.validate()?;
    Ok((16.0 * spec.e_j * spec.ec_tilde()).sqrt())
}

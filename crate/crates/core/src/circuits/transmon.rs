use num_complex::Complex;

use crate::error::{invalid, Result};
use crate::numerics::{eigvals_symmetric, HermitianMatrix, SymmetricMatrix};

/// Cooper-pair box in units of E_C: H = 4(n − n_g)² − (E_J/2)(|n⟩⟨n+1| + h.c.).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmonSpec {
    pub ej_over_ec: f64,
    pub n_g: f64,
    /// Charge states n ∈ [−cutoff, cutoff].
    pub cutoff: usize,
}

impl TransmonSpec {
    pub const DEFAULT_CUTOFF: usize = 15;

    pub fn new(ej_over_ec: f64, n_g: f64) -> Self {
        Self { ej_over_ec, n_g, cutoff: Self::DEFAULT_CUTOFF }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ej_over_ec.is_finite() && self.ej_over_ec >= 0.0) {
            return invalid(format!("E_J/E_C must be finite and non-negative, got {}", self.ej_over_ec));
        }
        if !self.n_g.is_finite() {
            return invalid("n_g must be finite");
        }
        if self.cutoff < 3 {
            return invalid(format!("transmon cutoff {} below 3", self.cutoff));
        }
        Ok(())
    }

    fn real_matrix(&self) -> Result<SymmetricMatrix> {
        self.validate()?;
        let c = self.cutoff as i64;
        let dim = 2 * self.cutoff + 1;
        let mut m = SymmetricMatrix::zeros(dim);
        for (i, n) in (-c..=c).enumerate() {
            let q = n as f64 - self.n_g;
            m.set(i, i, 4.0 * q * q);
            if i + 1 < dim {
                m.set(i, i + 1, -0.5 * self.ej_over_ec);
            }
        }
        Ok(m)
    }
}

pub fn transmon_hamiltonian(spec: &TransmonSpec) -> Result<HermitianMatrix> {
    let m = spec.real_matrix()?;
    let data = m.as_slice().iter().map(|&x| Complex::new(x, 0.0)).collect();
    HermitianMatrix::from_row_major(m.dim(), data)
}

/// Ascending levels in units of E_C.
pub fn transmon_levels(spec: &TransmonSpec) -> Result<Vec<f64>> {
    eigvals_symmetric(&spec.real_matrix()?)
}

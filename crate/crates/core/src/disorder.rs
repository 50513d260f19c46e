//! Chiral-preserving hopping disorder and ensemble dispersion of edge and bulk levels.

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::lattice::{ZigZagBonds, ZigZagParams};
use crate::numerics::{eigvals_hermitian, mean_std, savitzky_golay, RandomStream};
use crate::spectral::{select_state, StateRule};

pub const DEFAULT_RELATIVE_RANGE: f64 = 0.2;
pub const DEFAULT_REALIZATIONS: usize = 1000;
pub const DEFAULT_SG_WINDOW: usize = 7;
pub const SG_ORDER: usize = 2;
/// Largest tolerated fraction of failed realizations per g value.
pub const MAX_FAILURE_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DisorderMode {
    /// Every bond draws its own multiplier.
    #[default]
    BondResolved,
    /// One multiplier per coupling kind (t‖, t⊥, g) shared by all bonds of that kind.
    Global,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DisorderSpec {
    pub base: ZigZagParams,
    pub relative_range: f64,
    pub realizations: usize,
    pub master_seed: u64,
    pub mode: DisorderMode,
    pub freeze_g: bool,
}

impl DisorderSpec {
    pub fn new(base: ZigZagParams, master_seed: u64) -> Self {
        Self {
            base,
            relative_range: DEFAULT_RELATIVE_RANGE,
            realizations: DEFAULT_REALIZATIONS,
            master_seed,
            mode: DisorderMode::BondResolved,
            freeze_g: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if !(0.0..1.0).contains(&self.relative_range) {
            return invalid(format!("relative range {} outside [0, 1)", self.relative_range));
        }
        if self.realizations == 0 {
            return invalid("at least one realization required");
        }
        Ok(())
    }
}

/// Disordered bonds of one realization, drawn from stream `index` of the master seed.
pub fn sample_params(spec: &DisorderSpec, index: usize) -> Result<ZigZagBonds> {
    spec.validate()?;
    if index >= spec.realizations {
        return invalid(format!("realization {index} out of range ({})", spec.realizations));
    }
    let mut bonds = ZigZagBonds::nominal(&spec.base)?;
    let r = spec.relative_range;
    if r == 0.0 {
        return Ok(bonds);
    }
    let mut rng = RandomStream::new(spec.master_seed, index as u64);
    let mut draw = || rng.uniform(1.0 - r, 1.0 + r);
    match spec.mode {
        DisorderMode::BondResolved => {
            for t in bonds.x.iter_mut().chain(bonds.y.iter_mut()) {
                *t *= draw()?;
            }
            if !spec.freeze_g {
                for t in bonds.g_fwd.iter_mut().chain(bonds.g_bwd.iter_mut()) {
                    *t *= draw()?;
                }
            }
        }
        DisorderMode::Global => {
            let (m_par, m_perp, m_g) = (draw()?, draw()?, draw()?);
            for (b, t) in bonds.x.iter_mut().enumerate() {
                *t *= if b % 2 == 0 { m_par } else { m_perp };
            }
            for (b, t) in bonds.y.iter_mut().enumerate() {
                *t *= if b % 2 == 0 { m_perp } else { m_par };
            }
            if !spec.freeze_g {
                for t in bonds.g_fwd.iter_mut().chain(bonds.g_bwd.iter_mut()) {
                    *t *= m_g;
                }
            }
        }
    }
    Ok(bonds)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispersionVsG {
    pub g_axis: Vec<f64>,
    pub sigma_edge: Vec<f64>,
    pub sigma_bulk: Vec<f64>,
    pub sigma_edge_smoothed: Vec<f64>,
    pub sigma_bulk_smoothed: Vec<f64>,
    /// Realizations dropped per g because the eigensolver failed.
    pub failures: Vec<usize>,
}

/// Population standard deviation of the mid-spectrum and mid-bulk levels over the ensemble,
/// with Savitzky–Golay smoothed copies when the g axis is long enough.
pub fn dispersion_vs_g(
    spec: &DisorderSpec,
    g_axis: &[f64],
    n_sites: usize,
    sg_window: usize,
    workers: Option<usize>,
) -> Result<DispersionVsG> {
    spec.validate()?;
    if g_axis.is_empty() {
        return invalid("g axis must be non-empty");
    }
    if sg_window % 2 == 0 || sg_window <= SG_ORDER {
        return invalid(format!("smoothing window {sg_window} must be odd and larger than {SG_ORDER}"));
    }
    let dim = 2 * n_sites;
    let k_edge = select_state(dim, StateRule::MidSpectrum)?;
    let k_bulk = select_state(dim, StateRule::MidBulk)?;
    let job = || {
        g_axis
            .iter()
            .map(|&g| {
                let mut s = spec.clone();
                s.base = ZigZagParams { g, n_sites, ..spec.base };
                let levels: Vec<Option<(f64, f64)>> = (0..s.realizations)
                    .into_par_iter()
                    .map(|i| -> Result<Option<(f64, f64)>> {
                        let h = sample_params(&s, i)?.to_chain();
                        Ok(eigvals_hermitian(&h.matrix).ok().map(|e| (e[k_edge], e[k_bulk])))
                    })
                    .collect::<Result<_>>()?;
                let ok: Vec<(f64, f64)> = levels.iter().flatten().copied().collect();
                let failed = levels.len() - ok.len();
                if failed as f64 > MAX_FAILURE_FRACTION * levels.len() as f64 {
                    return Err(Error::Ensemble { failed, total: levels.len() });
                }
                let edge: Vec<f64> = ok.iter().map(|p| p.0).collect();
                let bulk: Vec<f64> = ok.iter().map(|p| p.1).collect();
                Ok((mean_std(&edge).1, mean_std(&bulk).1, failed))
            })
            .collect::<Result<Vec<_>>>()
    };
    let rows = match workers {
        None => job()?,
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::Validation(format!("worker pool: {e}")))?
            .install(job)?,
    };
    let sigma_edge: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let sigma_bulk: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let smooth = |v: &[f64]| -> Result<Vec<f64>> {
        if v.len() < sg_window {
            return Ok(v.to_vec());
        }
        Ok(savitzky_golay(v, sg_window, SG_ORDER)?.into_iter().map(|x| x.max(0.0)).collect())
    };
    Ok(DispersionVsG {
        g_axis: g_axis.to_vec(),
        sigma_edge_smoothed: smooth(&sigma_edge)?,
        sigma_bulk_smoothed: smooth(&sigma_bulk)?,
        sigma_edge,
        sigma_bulk,
        failures: rows.iter().map(|r| r.2).collect(),
    })
}

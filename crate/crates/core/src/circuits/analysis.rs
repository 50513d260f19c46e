use rayon::prelude::*;

use super::pol::{harmonic_modes, pol_transmon_levels, PolTransmonSpec, Truncation};
use super::transmon::{transmon_levels, TransmonSpec};
use super::CONVERGENCE_TOLERANCE;
use crate::error::{invalid, Error, Result};
use crate::numerics::{fit_line, LineFit};

/// |ε_m|/E_01 below this is indistinguishable from eigenvalue round-off.
pub const DISPERSION_FLOOR: f64 = 1e-12;
/// Relative change of E_n0 accepted between successive bases for level tables.
const LEVEL_TOLERANCE: f64 = 1e-4;
const FIRST_RADIUS: f64 = 5.0;
const RADIUS_STEP: f64 = 1.0;
const TRANSMON_CUTOFF_STEP: usize = 2;
const TRANSMON_MAX_CUTOFF: usize = 201;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CircuitKind {
    /// Energies in units of E_C; the ratio is E_J/E_C.
    Transmon,
    /// Energies in units of ẼC; the ratio is E_J/ẼC.
    PolTransmon { c_axial: f64, c_diag: f64 },
}

impl CircuitKind {
    /// Circuit of the reference device (C = 33.9 fF, C' = 7.7 fF).
    pub const REFERENCE_POL: CircuitKind = CircuitKind::PolTransmon { c_axial: 33.9, c_diag: 7.7 };

    /// Coefficient c of the tunnelling exponent √(c·ratio).
    pub fn wkb_coefficient(&self) -> f64 {
        match self {
            CircuitKind::Transmon => 8.0,
            CircuitKind::PolTransmon { .. } => 16.0,
        }
    }

    pub fn max_dispersion_levels(&self) -> usize {
        match self {
            CircuitKind::Transmon => 4,
            CircuitKind::PolTransmon { .. } => 7,
        }
    }

    pub fn max_transitions(&self) -> usize {
        match self {
            CircuitKind::Transmon => 5,
            CircuitKind::PolTransmon { .. } => 6,
        }
    }

    fn pol_spec(&self, ratio: f64) -> Option<PolTransmonSpec> {
        match *self {
            CircuitKind::Transmon => None,
            CircuitKind::PolTransmon { c_axial, c_diag } => {
                Some(PolTransmonSpec::new(0.0, c_axial, c_diag).with_ratio(ratio))
            }
        }
    }

    fn validate(&self) -> Result<()> {
        if let Some(s) = self.pol_spec(1.0) {
            s.validate()?;
        }
        Ok(())
    }
}

/// Lowest `count` levels in charging-energy units at one offset and basis size `step`.
fn levels_at(kind: &CircuitKind, ratio: f64, n_g: [f64; 3], count: usize, step: usize) -> Result<Vec<f64>> {
    match kind.pol_spec(ratio) {
        None => {
            let cutoff = TransmonSpec::DEFAULT_CUTOFF + TRANSMON_CUTOFF_STEP * step;
            if cutoff > TRANSMON_MAX_CUTOFF {
                return Err(Error::CutoffNotConverged(format!("transmon cutoff above {TRANSMON_MAX_CUTOFF}")));
            }
            let mut e = transmon_levels(&TransmonSpec { ej_over_ec: ratio, n_g: n_g[0], cutoff })?;
            e.truncate(count);
            Ok(e)
        }
        Some(spec) => {
            let radius = FIRST_RADIUS + RADIUS_STEP * step as f64;
            let e = pol_transmon_levels(&spec.with_n_g(n_g), Truncation::Ellipsoid { radius }, count)?;
            Ok(e.into_iter().map(|x| x / spec.ec_tilde()).collect())
        }
    }
}

/// Raises the basis until every entry of `f(step)` changes by less than `tol` relative,
/// ignoring entries that stay below `floor` in absolute value.
fn converge(tol: f64, floor: f64, f: impl Fn(usize) -> Result<Vec<f64>>) -> Result<Vec<f64>> {
    let mut prev = f(0)?;
    for step in 1.. {
        let next = f(step)?;
        let settled = prev.iter().zip(&next).all(|(a, b)| {
            (a.abs() < floor && b.abs() < floor) || (a - b).abs() <= tol * b.abs()
        });
        if settled {
            return Ok(next);
        }
        prev = next;
    }
    unreachable!()
}

fn ensure_ratios(ratio_axis: &[f64]) -> Result<()> {
    if ratio_axis.is_empty() {
        return invalid("ratio axis must be non-empty");
    }
    if ratio_axis.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
        return invalid("ratios must be finite and non-negative");
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DispersionProbe {
    /// Offset applied to the first charge axis only (the only axis for the transmon).
    Single,
    /// Root-sum-square of the dispersions along each of the three charge axes.
    RootSumSquare,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DispersionValue {
    Value(f64),
    /// |ε|/E_01 below the double-precision floor.
    BelowFloor,
}

impl DispersionValue {
    pub fn value(&self) -> Option<f64> {
        match self {
            DispersionValue::Value(v) => Some(*v),
            DispersionValue::BelowFloor => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispersionCurve {
    pub kind: CircuitKind,
    pub probe: DispersionProbe,
    pub ratio_axis: Vec<f64>,
    pub levels: usize,
    /// `values[i][m]` is |ε_m|/E_01 at `ratio_axis[i]`.
    pub values: Vec<Vec<DispersionValue>>,
}

impl DispersionCurve {
    pub fn level(&self, m: usize) -> impl Iterator<Item = DispersionValue> + '_ {
        self.values.iter().map(move |row| row[m])
    }
}

fn offsets(kind: &CircuitKind, probe: DispersionProbe) -> Result<Vec<[f64; 3]>> {
    match (kind, probe) {
        (_, DispersionProbe::Single) => Ok(vec![[0.5, 0.0, 0.0]]),
        (CircuitKind::Transmon, DispersionProbe::RootSumSquare) => {
            invalid("root-sum-square probe needs three charge axes")
        }
        (_, DispersionProbe::RootSumSquare) => Ok(vec![[0.5, 0.0, 0.0], [0.0, 0.5, 0.0], [0.0, 0.0, 0.5]]),
    }
}

/// Signed ε_m/E_01 per level (single probe) or the root-sum-square magnitude.
fn dispersion_point(kind: &CircuitKind, ratio: f64, levels: usize, probes: &[[f64; 3]]) -> Result<Vec<f64>> {
    let count = levels.max(2);
    converge(CONVERGENCE_TOLERANCE, DISPERSION_FLOOR, |step| {
        let base = levels_at(kind, ratio, [0.0; 3], count, step)?;
        let e01 = base[1] - base[0];
        let per_axis = probes
            .iter()
            .map(|ng| {
                let e = levels_at(kind, ratio, *ng, count, step)?;
                Ok((0..levels).map(|m| (e[m] - base[m]) / e01).collect::<Vec<f64>>())
            })
            .collect::<Result<Vec<_>>>()?;
        if per_axis.len() == 1 {
            return Ok(per_axis.into_iter().next().unwrap());
        }
        Ok((0..levels).map(|m| per_axis.iter().map(|v| v[m] * v[m]).sum::<f64>().sqrt()).collect())
    })
}

pub fn charge_dispersion(
    kind: CircuitKind,
    ratio_axis: &[f64],
    levels: usize,
    probe: DispersionProbe,
) -> Result<DispersionCurve> {
    kind.validate()?;
    ensure_ratios(ratio_axis)?;
    if levels == 0 || levels > kind.max_dispersion_levels() {
        return invalid(format!("levels must be in 1..={}", kind.max_dispersion_levels()));
    }
    let probes = offsets(&kind, probe)?;
    let values = ratio_axis
        .par_iter()
        .map(|&r| {
            let eps = dispersion_point(&kind, r, levels, &probes)?;
            Ok(eps
                .into_iter()
                .map(|x| {
                    if x.abs() < DISPERSION_FLOOR {
                        DispersionValue::BelowFloor
                    } else {
                        DispersionValue::Value(x.abs())
                    }
                })
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DispersionCurve { kind, probe, ratio_axis: ratio_axis.to_vec(), levels, values })
}

/// Fit of ln(ε₁/E_01) against √(c·ratio) over the above-floor points of `curve`.
pub fn wkb_exponent_fit(curve: &DispersionCurve) -> Result<LineFit> {
    if curve.levels < 2 {
        return invalid("curve must include level 1");
    }
    let c = curve.kind.wkb_coefficient();
    let (xs, ys): (Vec<f64>, Vec<f64>) = curve
        .ratio_axis
        .iter()
        .zip(curve.level(1))
        .filter_map(|(&r, v)| v.value().map(|v| ((c * r).sqrt(), v.ln())))
        .unzip();
    if xs.len() < 5 {
        return Err(Error::InsufficientData(format!("{} above-floor points, need 5", xs.len())));
    }
    fit_line(&xs, &ys)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelTable {
    pub kind: CircuitKind,
    pub ratio_axis: Vec<f64>,
    /// `rows[i][n-1]` is E_n0 in charging-energy units at `ratio_axis[i]`.
    pub rows: Vec<Vec<f64>>,
}

fn converged_levels(kind: &CircuitKind, ratio: f64, count: usize) -> Result<Vec<f64>> {
    converge(LEVEL_TOLERANCE, 0.0, |step| levels_at(kind, ratio, [0.0; 3], count, step))
}

/// E_n − E_0 for n = 1..=transitions at n_g = 0.
pub fn level_curves(kind: CircuitKind, ratio_axis: &[f64], transitions: usize) -> Result<LevelTable> {
    kind.validate()?;
    ensure_ratios(ratio_axis)?;
    if transitions == 0 || transitions > kind.max_transitions() {
        return invalid(format!("transitions must be in 1..={}", kind.max_transitions()));
    }
    let rows = ratio_axis
        .par_iter()
        .map(|&r| {
            let e = converged_levels(&kind, r, transitions + 1)?;
            Ok(e[1..].iter().map(|x| x - e[0]).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LevelTable { kind, ratio_axis: ratio_axis.to_vec(), rows })
}

/// Transmon E_J/E_C whose E_01/E_C equals `e01_over_ec`.
pub fn frequency_matching_ratio(e01_over_ec: f64) -> Result<f64> {
    let free_rotor_gap = 4.0;
    if !(e01_over_ec.is_finite() && e01_over_ec > free_rotor_gap) {
        return invalid(format!("target E01/E_C must exceed {free_rotor_gap}"));
    }
    let e01 = |r: f64| -> Result<f64> {
        let e = converged_levels(&CircuitKind::Transmon, r, 2)?;
        Ok(e[1] - e[0])
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    while e01(hi)? < e01_over_ec {
        lo = hi;
        hi *= 2.0;
        if hi > 1e6 {
            return invalid("target frequency out of range");
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if e01(mid)? < e01_over_ec {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Indices (in the ascending harmonic ladder) of the two-quantum dipole triplet and the
/// number of levels needed to reach it.
fn dipole_triplet_indices(spec: &PolTransmonSpec) -> Result<([usize; 3], usize)> {
    let m = harmonic_modes(spec)?;
    let mut ladder = Vec::new();
    for a in 0..3 {
        for b in 0..3 {
            for q in 0..3 {
                let e = a as f64 * m.dipole[0] + b as f64 * m.dipole[1] + q as f64 * m.quadrupole;
                ladder.push((e, a + b == 2 && q == 0));
            }
        }
    }
    ladder.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let idx: Vec<usize> = ladder.iter().enumerate().filter(|(_, p)| p.1).map(|(i, _)| i).collect();
    Ok(([idx[0], idx[1], idx[2]], idx[2] + 1))
}

/// α = E_12 − E_01 in charging-energy units. The transmon row has one entry; the
/// polarization transmon row holds the three members of the two-quantum dipole manifold.
pub fn anharmonicity(kind: CircuitKind, ratio_axis: &[f64]) -> Result<Vec<Vec<f64>>> {
    kind.validate()?;
    ensure_ratios(ratio_axis)?;
    ratio_axis
        .par_iter()
        .map(|&r| match kind.pol_spec(r) {
            None => {
                let e = converged_levels(&kind, r, 3)?;
                Ok(vec![e[2] - 2.0 * e[1] + e[0]])
            }
            Some(spec) => {
                if r == 0.0 {
                    return invalid("anharmonicity of the free polarization transmon is undefined");
                }
                let (triplet, count) = dipole_triplet_indices(&spec)?;
                let e = converged_levels(&kind, r, count)?;
                let e01 = e[1] - e[0];
                Ok(triplet.iter().map(|&k| e[k] - e[0] - 2.0 * e01).collect())
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_rotor_dispersion() {
        let c = charge_dispersion(CircuitKind::Transmon, &[0.0], 1, DispersionProbe::Single).unwrap();
        assert_eq!(c.values[0][0], DispersionValue::Value(0.25));
    }

    #[test]
    fn synthetic_wkb_fit() {
        let ratios: Vec<f64> = (0..8).map(|i| 15.0 + 5.0 * i as f64).collect();
        let values = ratios
            .iter()
            .map(|r| vec![DispersionValue::Value(1.0), DispersionValue::Value((-(8.0 * r).sqrt()).exp())])
            .collect();
        let curve = DispersionCurve {
            kind: CircuitKind::Transmon,
            probe: DispersionProbe::Single,
            ratio_axis: ratios,
            levels: 2,
            values,
        };
        let f = wkb_exponent_fit(&curve).unwrap();
        assert!((f.slope + 1.0).abs() < 1e-12 && (f.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wkb_fit_needs_points() {
        let curve = DispersionCurve {
            kind: CircuitKind::Transmon,
            probe: DispersionProbe::Single,
            ratio_axis: vec![10.0, 20.0],
            levels: 2,
            values: vec![vec![DispersionValue::BelowFloor; 2]; 2],
        };
        assert!(matches!(wkb_exponent_fit(&curve), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn transmon_dispersion_decreases() {
        let c = charge_dispersion(CircuitKind::Transmon, &[10.0, 20.0, 30.0], 4, DispersionProbe::Single).unwrap();
        for m in 0..4 {
            let v: Vec<f64> = c.level(m).map(|x| x.value().unwrap()).collect();
            assert!(v[0] > v[1] && v[1] > v[2]);
        }
    }

    #[test]
    fn transmon_dispersion_extremal_at_zero_and_half() {
        let e = |ng: f64| transmon_levels(&TransmonSpec::new(5.0, ng)).unwrap()[1];
        let h = 1e-4;
        for ng in [0.0, 0.5] {
            let slope = (e(ng + h) - e(ng - h)) / (2.0 * h);
            assert!(slope.abs() < 1e-8, "slope {slope} at {ng}");
        }
    }

    #[test]
    fn transmon_level_and_anharmonicity_oracles() {
        let t = level_curves(CircuitKind::Transmon, &[50.0], 5).unwrap();
        assert!((t.rows[0][0] / (400f64.sqrt() - 1.0) - 1.0).abs() < 0.03);
        let a = anharmonicity(CircuitKind::Transmon, &[200.0]).unwrap();
        assert!((a[0][0] + 1.0).abs() < 0.1);
    }

    #[test]
    fn validation() {
        assert!(charge_dispersion(CircuitKind::Transmon, &[10.0], 5, DispersionProbe::Single).is_err());
        assert!(charge_dispersion(CircuitKind::Transmon, &[10.0], 2, DispersionProbe::RootSumSquare).is_err());
        assert!(level_curves(CircuitKind::REFERENCE_POL, &[10.0], 7).is_err());
        assert!(charge_dispersion(CircuitKind::Transmon, &[], 1, DispersionProbe::Single).is_err());
        assert!(frequency_matching_ratio(3.0).is_err());
    }

    #[test]
    fn frequency_matching_inverts_transmon() {
        let t = level_curves(CircuitKind::Transmon, &[37.0], 1).unwrap();
        let r = frequency_matching_ratio(t.rows[0][0]).unwrap();
        assert!((r - 37.0).abs() < 1e-6);
    }

    #[test]
    fn pol_levels_above_transmon_and_matching_band() {
        let pol = level_curves(CircuitKind::REFERENCE_POL, &[20.0], 3).unwrap();
        let tr = level_curves(CircuitKind::Transmon, &[20.0], 1).unwrap();
        let e01 = pol.rows[0][0];
        assert!((pol.rows[0][1] - e01).abs() < 1e-9 * e01);
        assert!(e01 > tr.rows[0][0]);
        let r = frequency_matching_ratio(e01).unwrap() / 20.0;
        assert!((1.6..=2.0).contains(&r), "ratio of ratios {r}");
    }

    #[test]
    fn pol_triplet_anharmonicity() {
        let a = anharmonicity(CircuitKind::REFERENCE_POL, &[20.0]).unwrap();
        assert_eq!(a[0].len(), 3);
        assert!(a[0][0] < 0.0 && a[0][0] <= a[0][1] && a[0][1] <= a[0][2]);
    }
}

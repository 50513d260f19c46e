//! Charge-basis models of the transmon and the four-island polarization transmon:
//! spectra, charge dispersion, level curves, anharmonicity and harmonic modes.

mod analysis;
mod pol;
mod transmon;

pub use analysis::{
    anharmonicity, charge_dispersion, frequency_matching_ratio, level_curves, wkb_exponent_fit, CircuitKind,
    DispersionCurve, DispersionProbe, DispersionValue, LevelTable, DISPERSION_FLOOR,
};
pub use pol::{
    capacitance_matrix, charge_covariance, dipole_frequency, harmonic_modes, pol_transmon_hamiltonian,
    pol_transmon_levels, ChargeBasis, HarmonicModes, PolTransmonSpec, Truncation, MAX_BLOCK_DIM, MAX_CUBE_CUTOFF,
};
pub use transmon::{transmon_hamiltonian, transmon_levels, TransmonSpec};

/// Elementary charge in coulomb.
pub const ELEMENTARY_CHARGE: f64 = 1.602176634e-19;
/// Planck constant in J·s.
pub const PLANCK: f64 = 6.62607015e-34;
/// e²/(2·1 fF) expressed as a frequency in GHz.
pub const EC_ONE_FEMTOFARAD_GHZ: f64 = ELEMENTARY_CHARGE * ELEMENTARY_CHARGE / (2.0e-15 * PLANCK) / 1e9;

/// Charging energy e²/(2C) in GHz for a capacitance in fF.
pub fn charging_energy_ghz(c_ff: f64) -> f64 {
    EC_ONE_FEMTOFARAD_GHZ / c_ff
}

/// Relative level change accepted between successive basis sizes when auto-raising.
pub const CONVERGENCE_TOLERANCE: f64 = 0.01;

//! Extended Zig-Zag chain simulator: tight-binding Hamiltonians, winding invariants,
//! finite-chain spectra, coupling disorder and charge-basis transmon circuits.

pub mod circuits;
pub mod disorder;
pub mod lattice;
pub mod numerics;
pub mod spectral;
pub mod topology;
pub mod scalar;

mod error;

pub use error::{Error, Result};
pub use scalar::Real;

/// Single-precision aliases for the generic lattice and numerics types.
pub type ZigZagParamsF32 = lattice::ZigZagParams<f32>;
pub type ChainHamiltonianF32 = lattice::ChainHamiltonian<f32>;
pub type HermitianMatrixF32 = numerics::HermitianMatrix<f32>;
pub type SymmetricMatrixF32 = numerics::SymmetricMatrix<f32>;
pub type SpectrumF32 = numerics::Spectrum<f32>;

/// Double-precision aliases; the analysis modules work in f64.
pub type ZigZagParamsF64 = lattice::ZigZagParams<f64>;
pub type ChainHamiltonianF64 = lattice::ChainHamiltonian<f64>;
pub type HermitianMatrixF64 = numerics::HermitianMatrix<f64>;
pub type SymmetricMatrixF64 = numerics::SymmetricMatrix<f64>;
pub type SpectrumF64 = numerics::Spectrum<f64>;

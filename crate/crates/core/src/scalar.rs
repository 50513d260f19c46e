//! Scalar abstraction shared by the numeric kernels and Hamiltonian builders.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, NumCast};

/// Real floating-point scalar (implemented for `f32` and `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + NumCast + NumAssign + Sum + Debug + Display + std::fmt::LowerExp + Default + Send + Sync + 'static
{
    /// Machine epsilon as the scalar type.
    fn eps() -> Self {
        Self::epsilon()
    }

    /// Converts an `f64` literal; every literal used in the crate is representable.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).unwrap_or_else(Self::nan)
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

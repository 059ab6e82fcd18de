//! Numeric traits the algorithms are generic over.
//!
//! Combination-weight machinery only needs field arithmetic, so it is generic
//! over [`Weight`] and can run on exact rationals. Everything that touches a
//! kernel needs transcendental functions and is generic over [`Scalar`].

use std::fmt::{Debug, Display};

use nalgebra::{ClosedAddAssign, ClosedMulAssign};
use num_traits::{Float, FromPrimitive, Num};

/// Field-like element usable as a combination weight.
pub trait Weight:
    nalgebra::Scalar + Copy + Num + PartialOrd + FromPrimitive + ClosedAddAssign + ClosedMulAssign
{
    /// `1 / count`.
    fn reciprocal_of(count: usize) -> Self {
        Self::one() / Self::from_usize(count).expect("count representable")
    }
}

impl<T> Weight for T where
    T: nalgebra::Scalar + Copy + Num + PartialOrd + FromPrimitive + ClosedAddAssign + ClosedMulAssign
{
}

/// Floating point: `f32` or `f64`.
pub trait Scalar: Weight + Float + Debug + Display + Default + Send + Sync + 'static {
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

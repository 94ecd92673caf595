//! Scalar abstraction for the arithmetic kernels.
//!
//! The bandit state, the ℓ1 projection and the discretization grid only need
//! field operations plus `sqrt`/`ln`, so they are written against [`Scalar`]
//! and work for `f32` and `f64` alike. The simulation layers (noise laws,
//! optimizers, estimators) are `f64` throughout.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Sum + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal; panics only for types that cannot hold it.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("scalar literal out of range")
    }

    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("integer not representable")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

//! Scalar abstraction for the statistical kernels.
//!
//! Metrics emit `f64`. The association statistics, rank correlation,
//! transport solver and vector similarities are written once against
//! [`Scalar`] so they can be instantiated at `f32` or `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from a metric score.
    fn from_score(v: f64) -> Self {
        Self::from_f64(v).unwrap_or_else(Self::nan)
    }

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).unwrap_or_else(Self::nan)
    }

    fn to_score(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Sum in slice order.
pub fn ordered_sum<T: Scalar>(values: impl IntoIterator<Item = T>) -> T {
    values.into_iter().fold(T::zero(), |acc, v| acc + v)
}

pub fn mean<T: Scalar>(values: &[T]) -> T {
    if values.is_empty() {
        return T::nan();
    }
    ordered_sum(values.iter().copied()) / T::from_count(values.len())
}

/// Population standard deviation (divides by N).
pub fn population_std<T: Scalar>(values: &[T]) -> T {
    let m = mean(values);
    let var = ordered_sum(values.iter().map(|&v| (v - m) * (v - m))) / T::from_count(values.len());
    var.sqrt()
}

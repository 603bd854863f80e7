//! Floating-point scalar abstraction.
//!
//! Every reported statistic (scores, proportions, p-values, q-values, AUCs) is
//! generic over [`Scalar`]. Comparisons that decide ties or exceedances are done
//! in exact integer or rational arithmetic upstream, so `f32` and `f64` runs
//! produce the same decisions and differ only in the printed precision.

use std::fmt::{self, Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + LowerExp + Sum + Send + Sync + 'static
{
    /// Lossy conversion from `f64`; every value routed through here is finite.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 converts to scalar")
    }

    /// Ratio of two counts.
    #[inline]
    fn ratio(num: u64, den: u64) -> Self {
        Self::of(num as f64 / den as f64)
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

/// Display wrapper used in result files: plain decimals, switching to
/// exponent notation below 1e-4 so tiny p-values stay readable.
#[derive(Debug, Clone, Copy)]
pub struct Num<T>(pub T);

impl<T: Scalar> Display for Num<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = self.0.abs();
        if a.is_finite() && !a.is_zero() && (a < T::of(1e-4) || a >= T::of(1e15)) {
            write!(f, "{:e}", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + ToPrimitive + Debug + Display + LowerExp + Sum + Send + Sync + 'static
{
}

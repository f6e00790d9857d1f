use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Scalar type for measures, thresholds and bounds.
///
/// Degrees and set sizes stay in exact integers everywhere; only derived
/// quantities (mu, delta, theta, e_s, ...) live in a floating-point type.
/// All comparisons against thresholds are exact `>=` / `<=` with no epsilon,
/// so runs are bit-reproducible for a fixed scalar type.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
    /// Exact integer count converted into the scalar domain.
    fn from_count(c: u64) -> Self {
        Self::from_u64(c).expect("count not representable in scalar type")
    }

    fn from_ratio(num: u64, den: u64) -> Self {
        Self::from_count(num) / Self::from_count(den)
    }

    /// 2^e for possibly negative e.
    fn two_pow(e: i32) -> Self {
        Self::from_count(2).powi(e)
    }

    /// Lossy view for report lines.
    fn report(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
}

/// Default scalar used by the CLI and the test suites.
pub type Real = f64;

/// n choose 2 as an exponent-friendly integer.
pub fn choose2(n: u32) -> i32 {
    (n as i32) * (n as i32 - 1) / 2
}

/// Exact factorial for small n (scale-guarded by callers; r <= 8 everywhere).
pub fn factorial(n: u32) -> u64 {
    (1..=n as u64).product()
}

/// Binomial coefficient with saturation, used only for desk-scale bounds.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

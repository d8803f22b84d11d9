//! Floating-point scalar abstraction shared by every metric computation.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// A real scalar usable for edge lengths, stretch factors and eigenvalues.
///
/// Lengths coming out of Perron-Frobenius computations are irrational, so
/// only floating types implement this; each carries its own comparison
/// tolerances.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Absolute tolerance for equality of lengths and distances.
    fn tolerance() -> Self;

    /// Target residual for power iteration.
    fn eigen_residual() -> Self;

    /// Converts an `f64` literal. Panics only if the value is not representable.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    #[inline]
    fn tolerance() -> Self {
        1e-9
    }
    #[inline]
    fn eigen_residual() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    #[inline]
    fn tolerance() -> Self {
        1e-5
    }
    #[inline]
    fn eigen_residual() -> Self {
        1e-6
    }
}

/// Formats a value with nine significant digits, the precision used in all
/// emitted reports.
pub fn fmt_sig(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let mag = v.abs().log10().floor() as i32;
    if (-4..9).contains(&mag) {
        let decimals = (8 - mag).max(0) as usize;
        let s = format!("{v:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{v:.8e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_sig(0.28768207245178), "0.287682072");
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_sig(-2.5), "-2.5");
        assert_eq!(fmt_sig(123456789.4), "123456789");
        assert_eq!(fmt_sig(1.5e-7), "1.50000000e-7");
    }

    #[test]
    fn tolerances_are_ordered() {
        assert!(f64::eigen_residual() < f64::tolerance());
        assert!(f32::eigen_residual() < f32::tolerance());
    }
}

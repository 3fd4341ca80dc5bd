use std::fmt::{Debug, Display};

use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, ToPrimitive};

/// Numeric type a density can be reported in.
///
/// Every density in this crate is a ratio of two small integers, so a
/// scalar only needs to be constructible from such a pair. Exact types
/// (`Ratio<i64>`, `Ratio<i128>`) preserve equality; floating types round
/// once, at construction.
pub trait Scalar:
    Num + FromPrimitive + ToPrimitive + PartialOrd + Copy + Debug + Display + Send + Sync + 'static
{
    /// Builds `num / den`. `den` must be positive.
    fn from_frac(num: i64, den: i64) -> Self;

    /// Whether comparisons and equality on this type are exact.
    const EXACT: bool;

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn from_frac(num: i64, den: i64) -> Self {
        debug_assert!(den > 0);
        num as f64 / den as f64
    }
    const EXACT: bool = false;
}

impl Scalar for f32 {
    fn from_frac(num: i64, den: i64) -> Self {
        debug_assert!(den > 0);
        (num as f64 / den as f64) as f32
    }
    const EXACT: bool = false;
}

impl Scalar for Ratio<i64> {
    fn from_frac(num: i64, den: i64) -> Self {
        Ratio::new(num, den)
    }
    const EXACT: bool = true;
}

impl Scalar for Ratio<i128> {
    fn from_frac(num: i64, den: i64) -> Self {
        Ratio::new(i128::from(num), i128::from(den))
    }
    const EXACT: bool = true;
}

/// Renders a rational as `p/q`, or `p` when the denominator is one.
pub fn format_rational(value: &Ratio<i64>) -> String {
    if *value.denom() == 1 {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Parses `p/q` or `p`.
pub fn parse_rational(text: &str) -> Option<Ratio<i64>> {
    match text.split_once('/') {
        Some((n, d)) => {
            let d: i64 = d.trim().parse().ok()?;
            if d == 0 {
                return None;
            }
            Some(Ratio::new(n.trim().parse().ok()?, d))
        }
        None => Some(Ratio::from_integer(text.trim().parse().ok()?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frac_is_reduced() {
        let r = <Ratio<i64> as Scalar>::from_frac(6, 4);
        assert_eq!(*r.numer(), 3);
        assert_eq!(*r.denom(), 2);
        assert_eq!(<f64 as Scalar>::from_frac(6, 4), 1.5);
    }

    #[test]
    fn rational_text_round_trip() {
        for (n, d) in [(31, 10), (3, 1), (0, 1), (7, 4)] {
            let r = Ratio::new(n, d);
            assert_eq!(parse_rational(&format_rational(&r)), Some(r));
        }
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }
}

use std::fmt::{Debug, Display};

use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, Signed};

/// Scalar used for criterion weights and solution scores.
pub trait Weight: Num + Signed + FromPrimitive + Clone + PartialOrd + Debug + Display + Send + Sync + 'static {
    /// Parses `2`, `1.5` or (for exact types) `3/2`.
    fn parse_weight(s: &str) -> Option<Self>;
}

impl Weight for f64 {
    fn parse_weight(s: &str) -> Option<Self> {
        s.parse().ok().filter(|w: &f64| w.is_finite())
    }
}

impl Weight for f32 {
    fn parse_weight(s: &str) -> Option<Self> {
        s.parse().ok().filter(|w: &f32| w.is_finite())
    }
}

impl Weight for Ratio<i64> {
    fn parse_weight(s: &str) -> Option<Self> {
        if let Some((n, d)) = s.split_once('/') {
            let (n, d): (i64, i64) = (n.trim().parse().ok()?, d.trim().parse().ok()?);
            return (d != 0).then(|| Ratio::new(n, d));
        }
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (int, frac) = body.split_once('.').unwrap_or((body, ""));
        if int.is_empty() && frac.is_empty() {
            return None;
        }
        if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
            return None;
        }
        let denom = 10i64.checked_pow(frac.len() as u32)?;
        let digits: i64 = format!("{int}{frac}").parse().ok()?;
        let r = Ratio::new(digits, denom);
        Some(if neg { -r } else { r })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_parsing() {
        assert_eq!(Ratio::<i64>::parse_weight("3"), Some(Ratio::from_integer(3)));
        assert_eq!(Ratio::<i64>::parse_weight("1.5"), Some(Ratio::new(3, 2)));
        assert_eq!(Ratio::<i64>::parse_weight("3/4"), Some(Ratio::new(3, 4)));
        assert_eq!(Ratio::<i64>::parse_weight("-.5"), Some(Ratio::new(-1, 2)));
        assert_eq!(Ratio::<i64>::parse_weight("x"), None);
        assert_eq!(Ratio::<i64>::parse_weight("1/0"), None);
        assert_eq!(f64::parse_weight("2.5"), Some(2.5));
        assert_eq!(f64::parse_weight("inf"), None);
    }
}

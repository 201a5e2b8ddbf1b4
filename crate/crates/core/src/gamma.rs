//! The non-negative rational parameter selecting a member of the
//! Jacobi-Stirling family.

use std::fmt;
use std::str::FromStr;

use rug::ops::Pow;
use rug::Rational;

use crate::error::{LabError, Result};

/// Exact non-negative rational parameter.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GammaParam(Rational);

impl GammaParam {
    pub fn new(value: Rational) -> Result<Self> {
        if value < 0 {
            return Err(LabError::Domain(format!("gamma must be non-negative, got {value}")));
        }
        Ok(GammaParam(value))
    }

    pub fn from_ratio(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(LabError::Parse("gamma denominator is zero".into()));
        }
        Self::new(Rational::from((num, den)))
    }

    /// gamma = 1.
    pub fn legendre() -> Self {
        GammaParam(Rational::from(1))
    }

    /// gamma = 1/2.
    pub fn chebyshev() -> Self {
        GammaParam(Rational::from((1, 2)))
    }

    pub fn zero() -> Self {
        GammaParam(Rational::new())
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn is_legendre(&self) -> bool {
        self.0 == 1
    }

    pub fn is_chebyshev(&self) -> bool {
        self.0 == Rational::from((1, 2))
    }

    pub fn is_zero(&self) -> bool {
        self.0 == 0
    }

    /// `2*gamma - 1`, the shift appearing in every weight `j(j + 2gamma - 1)`.
    pub fn shift(&self) -> Rational {
        Rational::from(&self.0 * 2u32) - 1u32
    }

    /// Recurrence weight `j(j + 2gamma - 1)`.
    pub fn weight(&self, j: usize) -> Rational {
        let j = Rational::from(j as u64);
        let t = Rational::from(&j + &self.shift());
        j * t
    }

    /// True when every triangle entry is a non-negative integer (gamma in {0, 1/2, 1}).
    pub fn has_integer_entries(&self) -> bool {
        self.is_zero() || self.is_chebyshev() || self.is_legendre()
    }
}

impl fmt::Display for GammaParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for GammaParam {
    type Err = LabError;

    /// Accepts `p/q`, an integer, or a finite decimal such as `0.5`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let value = if let Some((int_part, frac_part)) = s.split_once('.') {
            let digits = format!("{int_part}{frac_part}");
            let num: rug::Integer = digits
                .parse()
                .map_err(|_| LabError::Parse(format!("invalid gamma {s:?}")))?;
            let den = rug::Integer::from(10u32).pow(frac_part.len() as u32);
            Rational::from((num, den))
        } else {
            Rational::from_str(s).map_err(|_| LabError::Parse(format!("invalid gamma {s:?}")))?
        };
        GammaParam::new(value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_and_decimal() {
        assert!("1/2".parse::<GammaParam>().unwrap().is_chebyshev());
        assert!("0.5".parse::<GammaParam>().unwrap().is_chebyshev());
        assert!("1".parse::<GammaParam>().unwrap().is_legendre());
        assert!("0".parse::<GammaParam>().unwrap().is_zero());
        assert_eq!("7/3".parse::<GammaParam>().unwrap().value(), &Rational::from((7, 3)));
    }

    #[test]
    fn rejects_negative_and_garbage() {
        assert!("-1/2".parse::<GammaParam>().is_err());
        assert!("abc".parse::<GammaParam>().is_err());
        assert!(GammaParam::from_ratio(1, 0).is_err());
    }

    #[test]
    fn weights() {
        assert_eq!(GammaParam::legendre().weight(3), 12);
        assert_eq!(GammaParam::chebyshev().weight(3), 9);
        assert_eq!(GammaParam::zero().weight(3), 6);
        assert_eq!(GammaParam::from_ratio(2, 1).unwrap().weight(1), 4);
    }
}

//! Exact rational propensities.
//!
//! A propensity is the probability that a random bit realises 1. Everything
//! the engines compute with is one of these: arbitrary-precision rationals
//! confined to the unit interval, so engine identities can be checked by
//! equality instead of tolerance.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{FiqError, Result};

/// Probability that a bit equals 1, stored as a reduced rational in [0, 1].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Propensity(BigRational);

impl Propensity {
    /// Builds a propensity from an integer ratio, reducing to lowest terms.
    pub fn new(numerator: u64, denominator: u64) -> Result<Self> {
        Self::from_big(BigUint::from(numerator), BigUint::from(denominator))
    }

    /// Builds a propensity from arbitrary-precision parts.
    pub fn from_big(numerator: BigUint, denominator: BigUint) -> Result<Self> {
        if denominator.is_zero() {
            return Err(FiqError::ZeroDenominator);
        }
        let ratio = BigRational::new(
            BigInt::from(numerator.clone()),
            BigInt::from(denominator.clone()),
        );
        if ratio > BigRational::one() {
            return Err(FiqError::OutOfRange {
                value: format!("{numerator}/{denominator}"),
            });
        }
        Ok(Self(ratio))
    }

    /// Wraps an already-computed rational, rejecting values outside [0, 1].
    pub fn from_ratio(ratio: BigRational) -> Result<Self> {
        if ratio.is_negative() || ratio > BigRational::one() {
            return Err(FiqError::OutOfRange {
                value: ratio.to_string(),
            });
        }
        Ok(Self(ratio))
    }

    /// The deterministic-0 bit.
    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    /// The deterministic-1 bit.
    pub fn one() -> Self {
        Self(BigRational::one())
    }

    /// The fair bit, carrying no information.
    pub fn half() -> Self {
        Self(BigRational::new(BigInt::one(), BigInt::from(2)))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_half(&self) -> bool {
        self == &Self::half()
    }

    /// True when the bit is deterministic (propensity 0 or 1).
    pub fn is_deterministic(&self) -> bool {
        self.is_zero() || self.is_one()
    }

    /// Propensity of the complementary event, `1 - p`.
    pub fn complement(&self) -> Self {
        Self(BigRational::one() - &self.0)
    }

    /// The underlying exact rational.
    pub fn ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0
            .to_f64()
            .expect("propensity in [0,1] converts to f64")
    }
}

impl fmt::Display for Propensity {
    /// Renders `a/b`, or just `a` for integers, e.g. `0`, `1`, `1/2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Propensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Propensity({self})")
    }
}

impl FromStr for Propensity {
    type Err = FiqError;

    /// Parses `a/b` or a bare integer `a`.
    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let parse_part = |part: &str| -> Result<BigUint> {
            BigUint::from_str(part.trim()).map_err(|_| FiqError::Parse {
                field: "propensity".into(),
                message: format!("`{part}` is not a non-negative integer"),
            })
        };
        match text.split_once('/') {
            Some((num, den)) => Self::from_big(parse_part(num)?, parse_part(den)?),
            None => Self::from_big(parse_part(text)?, BigUint::one()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fair_bit_identity() {
        assert_eq!(Propensity::new(1, 2).unwrap(), Propensity::half());
    }

    #[test]
    fn reduces_to_lowest_terms() {
        let p = Propensity::new(2, 4).unwrap();
        assert_eq!(p, Propensity::half());
        assert_eq!(p.to_string(), "1/2");
    }

    #[test]
    fn rejects_values_above_one() {
        assert!(matches!(
            Propensity::new(3, 2),
            Err(FiqError::OutOfRange { .. })
        ));
    }

    #[test]
    fn rejects_zero_denominator() {
        assert_eq!(Propensity::new(1, 0), Err(FiqError::ZeroDenominator));
    }

    #[test]
    fn parses_integers_and_ratios() {
        assert_eq!("0".parse::<Propensity>().unwrap(), Propensity::zero());
        assert_eq!("1".parse::<Propensity>().unwrap(), Propensity::one());
        assert_eq!(
            "3/4".parse::<Propensity>().unwrap(),
            Propensity::new(3, 4).unwrap()
        );
        assert!("5/4".parse::<Propensity>().is_err());
        assert!("a/b".parse::<Propensity>().is_err());
    }

    #[test]
    fn complement_is_exact() {
        let p = Propensity::new(1, 3).unwrap();
        assert_eq!(p.complement(), Propensity::new(2, 3).unwrap());
    }
}

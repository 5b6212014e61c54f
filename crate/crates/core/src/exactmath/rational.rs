//! Exact rationals backed by arbitrary-precision integers.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A rational number in lowest terms with positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    /// `num / den`. Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_int(v: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// Greatest integer `<= self`.
    pub fn floor(&self) -> BigInt {
        self.0.numer().div_floor(self.0.denom())
    }

    /// Least integer `>= self`.
    pub fn ceil(&self) -> BigInt {
        -((-self.0.clone()).numer().div_floor(self.0.denom()))
    }

    /// Floor as a machine integer. Panics on overflow, which cannot happen for
    /// the ramification-sized values this crate manipulates.
    pub fn floor_i64(&self) -> i64 {
        self.floor().to_i64().expect("floor overflows i64")
    }

    pub fn to_i64(&self) -> Option<i64> {
        if self.is_integer() {
            self.0.numer().to_i64()
        } else {
            None
        }
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }
}

/// Fractional part `q - floor(q)`, always in `[0, 1)`.
pub fn frac(q: &Rational) -> Rational {
    Rational(q.0.clone() - BigRational::from_integer(q.floor()))
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Rational::from_int(v)
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        Rational(self.0 + rhs.0)
    }
}

impl<'a> Add<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn add(self, rhs: &Rational) -> Rational {
        Rational(&self.0 + &rhs.0)
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Rational) -> Rational {
        Rational(self.0 - rhs.0)
    }
}

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Rational) -> Rational {
        Rational(self.0 * rhs.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn frac_examples() {
        assert_eq!(frac(&Rational::new(-1, 3)), Rational::new(2, 3));
        assert_eq!(frac(&Rational::zero()), Rational::zero());
        assert_eq!(frac(&Rational::new(-2, 3)), Rational::new(1, 3));
        assert_eq!(frac(&Rational::new(7, 2)), Rational::new(1, 2));
    }

    #[test]
    fn lowest_terms() {
        let q = Rational::new(6, -4);
        assert_eq!(q.numerator(), &BigInt::from(-3));
        assert_eq!(q.denominator(), &BigInt::from(2));
        assert_eq!(q.floor(), BigInt::from(-2));
        assert_eq!(q.ceil(), BigInt::from(-1));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn frac_plus_floor_is_identity(num in -10_000i64..10_000, den in 1i64..500) {
            let q = Rational::new(num, den);
            let f = frac(&q);
            prop_assert!(!f.is_negative());
            prop_assert!(f < Rational::one());
            let back = f + Rational(BigRational::from_integer(q.floor()));
            prop_assert_eq!(back, q);
        }
    }
}

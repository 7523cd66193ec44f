//! Arbitrary-precision rational numbers.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An exact rational number, always stored in lowest terms with a positive
/// denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RationalParseError {
    #[error("expected `<num>/<den>`, got `{0}`")]
    Syntax(String),
    #[error("denominator must be positive in `{0}`")]
    Denominator(String),
    #[error("`{0}` is not in lowest terms")]
    NotReduced(String),
}

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// Builds `num/den`, reducing to lowest terms. Panics on a zero denominator.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_big(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        Rational(BigRational::new(num, den))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn signum(&self) -> i32 {
        if self.0.is_positive() {
            1
        } else if self.0.is_negative() {
            -1
        } else {
            0
        }
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        Rational(self.0.recip())
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn ceil(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or_else(|| {
            // Ratios of huge integers can fail the direct conversion.
            let n = self.numer().to_f64().unwrap_or(f64::NAN);
            let d = self.denom().to_f64().unwrap_or(f64::NAN);
            n / d
        })
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Multiplies by `2^-k`.
    pub fn halved(&self, k: u32) -> Self {
        Rational(&self.0 / BigRational::from_integer(BigInt::one() << k))
    }

    /// A rational `r` with `0 <= r` and `r^2 <= self`, accurate to about
    /// `bits` binary digits. Panics on negative input.
    pub fn sqrt_floor(&self, bits: u32) -> Self {
        assert!(!self.is_negative(), "square root of a negative rational");
        if self.is_zero() {
            return Rational::zero();
        }
        // Pick a power-of-two scale so that the scaled integer has enough digits.
        let mut k: u32 = 0;
        loop {
            let scale = BigInt::one() << (2 * k);
            let scaled = (self.numer() * &scale).div_floor(self.denom());
            if scaled.bits() as u32 >= 2 * bits || k > 4096 {
                let root = scaled.sqrt();
                return Rational::from_big(root, BigInt::one() << k);
            }
            k += bits.max(8);
        }
    }

    /// Largest value of the form `2^e` (e may be negative) not exceeding `self`.
    /// Panics unless `self > 0`.
    pub fn floor_pow2(&self) -> Self {
        assert!(self.is_positive());
        let one = Rational::one();
        let two = Rational::from_int(2);
        let mut r = Rational::one();
        if *self >= one {
            while &r * &two <= *self {
                r = &r * &two;
            }
        } else {
            while r > *self {
                r = r.halved(1);
            }
        }
        r
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

/// Strict `num/den` syntax: the denominator must be positive and the fraction
/// reduced (`0` is written `0/1`).
impl FromStr for Rational {
    type Err = RationalParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (n, d) = s
            .split_once('/')
            .ok_or_else(|| RationalParseError::Syntax(s.to_string()))?;
        let valid_int = |t: &str, signed: bool| {
            let digits = if signed { t.strip_prefix('-').unwrap_or(t) } else { t };
            !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
        };
        if !valid_int(n, true) || !valid_int(d, false) {
            return Err(RationalParseError::Syntax(s.to_string()));
        }
        let num: BigInt = n.parse().map_err(|_| RationalParseError::Syntax(s.to_string()))?;
        let den: BigInt = d.parse().map_err(|_| RationalParseError::Syntax(s.to_string()))?;
        if !den.is_positive() {
            return Err(RationalParseError::Denominator(s.to_string()));
        }
        if !num.gcd(&den).is_one() {
            return Err(RationalParseError::NotReduced(s.to_string()));
        }
        Ok(Rational(BigRational::new_raw(num, den)))
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl<'a> $trait<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
        impl<'a> $trait<Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_requires_reduced_form() {
        assert_eq!("3/4".parse::<Rational>().unwrap(), Rational::new(3, 4));
        assert_eq!("-3/4".parse::<Rational>().unwrap(), Rational::new(-3, 4));
        assert_eq!("0/1".parse::<Rational>().unwrap(), Rational::zero());
        assert!(matches!("2/4".parse::<Rational>(), Err(RationalParseError::NotReduced(_))));
        assert!(matches!("0/2".parse::<Rational>(), Err(RationalParseError::NotReduced(_))));
        assert!(matches!("1/0".parse::<Rational>(), Err(RationalParseError::Denominator(_))));
        assert!(matches!("1/-2".parse::<Rational>(), Err(RationalParseError::Syntax(_))));
        assert!(matches!("7".parse::<Rational>(), Err(RationalParseError::Syntax(_))));
        assert!(matches!("a/2".parse::<Rational>(), Err(RationalParseError::Syntax(_))));
    }

    #[test]
    fn display_round_trips() {
        for r in [Rational::new(-7, 3), Rational::zero(), Rational::from_int(12)] {
            assert_eq!(r.to_string().parse::<Rational>().unwrap(), r);
        }
    }

    #[test]
    fn sqrt_floor_is_a_lower_bound() {
        for (n, d) in [(2, 1), (1, 3), (512, 1), (1, 1_000_000), (49, 4)] {
            let x = Rational::new(n, d);
            let r = x.sqrt_floor(32);
            assert!(&r * &r <= x, "{r} squared exceeds {x}");
            let slack = Rational::new(1001, 1000);
            assert!(&(&r * &slack) * &(&r * &slack) > x, "{r} too loose for {x}");
        }
        assert_eq!(Rational::new(49, 4).sqrt_floor(16), Rational::new(7, 2));
    }

    #[test]
    fn floor_pow2() {
        assert_eq!(Rational::new(5, 1).floor_pow2(), Rational::from_int(4));
        assert_eq!(Rational::new(3, 16).floor_pow2(), Rational::new(1, 8));
        assert_eq!(Rational::new(1, 4).floor_pow2(), Rational::new(1, 4));
    }
}

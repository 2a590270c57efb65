//! Exact rational valuations with a `+∞` element.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Ratio;
use num_traits::{Signed, Zero};

pub type Rational = Ratio<i64>;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(num, den)
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n)
}

/// Smallest integer `>= x`.
pub fn ceil(x: &Rational) -> i64 {
    x.ceil().to_integer()
}

/// Largest integer `<= x`.
pub fn floor(x: &Rational) -> i64 {
    x.floor().to_integer()
}

/// An additive valuation: an exact rational or `+∞`.
///
/// Ordered with `+∞` above every finite value, closed under `+` and `min`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(Rational),
    Infinite,
}

impl Valuation {
    pub fn finite(num: i64, den: i64) -> Self {
        Valuation::Finite(rat(num, den))
    }

    pub fn from_int(n: i64) -> Self {
        Valuation::Finite(int(n))
    }

    pub fn zero() -> Self {
        Valuation::Finite(Rational::zero())
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Valuation::Infinite)
    }

    pub fn as_finite(&self) -> Option<Rational> {
        match self {
            Valuation::Finite(r) => Some(*r),
            Valuation::Infinite => None,
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl From<Rational> for Valuation {
    fn from(r: Rational) -> Self {
        Valuation::Finite(r)
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Infinite, Valuation::Infinite) => Ordering::Equal,
            (Valuation::Infinite, _) => Ordering::Greater,
            (_, Valuation::Infinite) => Ordering::Less,
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
        }
    }
}

impl Add for Valuation {
    type Output = Valuation;
    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl Add<Rational> for Valuation {
    type Output = Valuation;
    fn add(self, rhs: Rational) -> Self {
        match self {
            Valuation::Finite(a) => Valuation::Finite(a + rhs),
            Valuation::Infinite => Valuation::Infinite,
        }
    }
}

impl Sub<Rational> for Valuation {
    type Output = Valuation;
    fn sub(self, rhs: Rational) -> Self {
        self + (-rhs)
    }
}

impl Mul<Rational> for Valuation {
    type Output = Valuation;
    /// Scaling by a positive rational; `+∞` stays `+∞`.
    fn mul(self, rhs: Rational) -> Self {
        debug_assert!(rhs.is_positive());
        match self {
            Valuation::Finite(a) => Valuation::Finite(a * rhs),
            Valuation::Infinite => Valuation::Infinite,
        }
    }
}

impl Neg for Valuation {
    type Output = Option<Valuation>;
    fn neg(self) -> Option<Valuation> {
        self.as_finite().map(|r| Valuation::Finite(-r))
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(r) => write!(f, "{r}"),
            Valuation::Infinite => write!(f, "+inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_dominates() {
        let a = Valuation::finite(1, 2);
        assert!(Valuation::Infinite > a);
        assert_eq!(a.min(Valuation::Infinite), a);
        assert_eq!(a + Valuation::Infinite, Valuation::Infinite);
    }

    #[test]
    fn rounding() {
        assert_eq!(ceil(&rat(7, 4)), 2);
        assert_eq!(ceil(&rat(-7, 4)), -1);
        assert_eq!(floor(&rat(-7, 4)), -2);
        assert_eq!(ceil(&int(3)), 3);
    }
}

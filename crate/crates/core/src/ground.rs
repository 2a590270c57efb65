use crate::error::{Error, Result};
use crate::fp::is_prime;
use crate::tower::ExtensionTower;
use crate::valuation::{rat, Rational};

/// Numerical invariants `(p, e, f)` of the base field `O_P`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ground {
    pub p: u64,
    pub e: i64,
    pub f: usize,
}

impl Ground {
    pub fn new(p: u64, e: i64, f: usize) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        if e < 1 || f < 1 {
            return Err(Error::InvalidInput("e and f must be positive".into()));
        }
        Ok(Ground { p, e, f })
    }

    pub fn of(tower: &ExtensionTower) -> Self {
        Ground {
            p: tower.p(),
            e: tower.e(),
            f: tower.f(),
        }
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.f as u32)
    }

    /// `e/(p−1)`.
    pub fn e_over_p1(&self) -> Rational {
        rat(self.e, self.p as i64 - 1)
    }
}

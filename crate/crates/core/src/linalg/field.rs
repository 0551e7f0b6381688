use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_PRIME: u32 = 32003;

/// The prime field GF(p). Elements are plain `u32` residues in `[0, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Field {
    p: u32,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Field {
    pub fn new(p: u64) -> Result<Self> {
        if p >= (1 << 31) || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Field { p: p as u32 })
    }

    #[inline]
    pub fn prime(self) -> u32 {
        self.p
    }

    /// Reduces an arbitrary signed integer into `[0, p)`.
    #[inline]
    pub fn reduce(self, x: i64) -> u32 {
        x.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        (s % self.p as u64) as u32
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1u32;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn inv(self, a: u32) -> Result<u32> {
        if a.is_multiple_of(self.p) {
            return Err(Error::DivisionByZero(self.p));
        }
        Ok(self.pow(a, self.p as u64 - 2))
    }

    pub fn div(self, a: u32, b: u32) -> Result<u32> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Inverse of a known-nonzero element; used inside elimination where the
    /// pivot is nonzero by construction.
    #[inline]
    pub(crate) fn inv_nonzero(self, a: u32) -> u32 {
        debug_assert!(a != 0);
        self.pow(a, self.p as u64 - 2)
    }
}

impl Default for Field {
    fn default() -> Self {
        Field { p: DEFAULT_PRIME }
    }
}

impl TryFrom<u64> for Field {
    type Error = Error;

    fn try_from(p: u64) -> Result<Self> {
        Field::new(p)
    }
}

impl From<Field> for u64 {
    fn from(f: Field) -> u64 {
        f.p as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composites_and_large_values() {
        assert!(Field::new(32003).is_ok());
        assert!(Field::new(2).is_ok());
        assert!(matches!(Field::new(1), Err(Error::NotPrime(1))));
        assert!(Field::new(32004).is_err());
        assert!(Field::new((1 << 31) - 1).is_ok());
        assert!(Field::new(1 << 31).is_err());
    }

    #[test]
    fn arithmetic_wraps() {
        let f = Field::new(5).unwrap();
        assert_eq!(f.add(3, 4), 2);
        assert_eq!(f.sub(1, 3), 3);
        assert_eq!(f.neg(2), 3);
        assert_eq!(f.mul(4, 4), 1);
        assert_eq!(f.inv(2).unwrap(), 3);
        assert_eq!(f.reduce(-1), 4);
        assert!(matches!(f.inv(0), Err(Error::DivisionByZero(5))));
        assert!(f.div(1, 0).is_err());
    }
}

//! Arithmetic in the prime field F_p for small primes.

use crate::LinalgError;

/// The prime field F_p. Elements are stored as `u8` values in `[0, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u8,
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self, LinalgError> {
        if !(2..=251).contains(&p) || !is_prime(p) {
            return Err(LinalgError::NotPrime(p));
        }
        Ok(PrimeField { p: p as u8 })
    }

    #[inline]
    pub fn p(self) -> u8 {
        self.p
    }

    #[inline]
    pub fn reduce(self, x: i64) -> u8 {
        x.rem_euclid(self.p as i64) as u8
    }

    #[inline]
    pub fn add(self, a: u8, b: u8) -> u8 {
        add(self.p, a, b)
    }

    #[inline]
    pub fn sub(self, a: u8, b: u8) -> u8 {
        sub(self.p, a, b)
    }

    #[inline]
    pub fn mul(self, a: u8, b: u8) -> u8 {
        mul(self.p, a, b)
    }

    #[inline]
    pub fn neg(self, a: u8) -> u8 {
        neg(self.p, a)
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(self, a: u8) -> u8 {
        inv(self.p, a)
    }

    pub fn pow(self, a: u8, e: u64) -> u8 {
        let mut base = a;
        let mut e = e;
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }
}

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[inline]
pub(crate) fn add(p: u8, a: u8, b: u8) -> u8 {
    let s = a as u16 + b as u16;
    if s >= p as u16 {
        (s - p as u16) as u8
    } else {
        s as u8
    }
}

#[inline]
pub(crate) fn sub(p: u8, a: u8, b: u8) -> u8 {
    if a >= b {
        a - b
    } else {
        (a as u16 + p as u16 - b as u16) as u8
    }
}

#[inline]
pub(crate) fn mul(p: u8, a: u8, b: u8) -> u8 {
    ((a as u16 * b as u16) % p as u16) as u8
}

#[inline]
pub(crate) fn neg(p: u8, a: u8) -> u8 {
    if a == 0 {
        0
    } else {
        p - a
    }
}

pub(crate) fn inv(p: u8, a: u8) -> u8 {
    assert!(a % p != 0, "inverse of zero in F_{p}");
    // Fermat: a^(p-2).
    let mut base = a as u32;
    let mut e = p as u32 - 2;
    let mut acc = 1u32;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u32;
        }
        base = base * base % p as u32;
        e >>= 1;
    }
    acc as u8
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverses() {
        for p in [2u32, 3, 5, 7, 11, 251] {
            let f = PrimeField::new(p).unwrap();
            for a in 1..p as u8 {
                assert_eq!(f.mul(a, f.inv(a)), 1);
            }
        }
    }

    #[test]
    fn rejects_composites() {
        assert!(PrimeField::new(4).is_err());
        assert!(PrimeField::new(1).is_err());
        assert!(PrimeField::new(257).is_err());
    }
}

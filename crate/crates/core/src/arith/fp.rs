//! Scalars mod p: the prime newtype, inverses, and binomial coefficients via Lucas.

use std::fmt;

use crate::error::Error;

/// A prime modulus small enough that products of residues fit in a `u64`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self, Error> {
        if p >= 1 << 31 {
            return Err(Error::PrimeTooLarge(p));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Prime(p))
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn reduce(self, a: u64) -> u64 {
        a % self.0
    }

    /// Maps a signed integer into `[0, p)`.
    pub fn reduce_signed(self, a: i64) -> u64 {
        a.rem_euclid(self.0 as i64) as u64
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.0 - b
        }
    }

    #[inline]
    pub fn neg(self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        (a * b) % self.0
    }

    pub fn pow(self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.0;
        base %= self.0;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Inverse of a nonzero residue (Fermat).
    pub fn inv(self, a: u64) -> Option<u64> {
        let a = a % self.0;
        if a == 0 {
            None
        } else {
            Some(self.pow(a, self.0 - 2))
        }
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// C(n, k) for `n < p`, using the multiplicative formula with inverses.
fn small_binom(n: u64, k: u64, p: Prime) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut num = 1;
    let mut den = 1;
    for i in 0..k {
        num = p.mul(num, (n - i) % p.get());
        den = p.mul(den, (i + 1) % p.get());
    }
    p.mul(num, p.inv(den).expect("k! is a unit for k < p"))
}

/// C(n, k) mod p by Lucas' theorem: the product of digit-wise binomials in base p.
pub fn binom_mod_p(mut n: u64, mut k: u64, p: Prime) -> u64 {
    if k > n {
        return 0;
    }
    let q = p.get();
    let mut acc = 1;
    while k > 0 || n > 0 {
        let (nd, kd) = (n % q, k % q);
        if kd > nd {
            return 0;
        }
        acc = p.mul(acc, small_binom(nd, kd, p));
        n /= q;
        k /= q;
    }
    acc
}

/// Multi-index binomial Π C(n_i, k_i) mod p.
pub fn multi_binom_mod_p(n: &[u32], k: &[u32], p: Prime) -> u64 {
    n.iter().zip(k).fold(1, |acc, (&a, &b)| {
        if acc == 0 {
            0
        } else {
            p.mul(acc, binom_mod_p(a as u64, b as u64, p))
        }
    })
}

/// The coefficient (kp)!/(p!^k k!) relating (x^[p])^[k] to x^[pk], reduced mod p.
///
/// Uses the recursion c_k = c_{k-1} * C(kp - 1, p - 1), so no factorial is ever formed.
pub fn pd_coefficient(k: u64, p: Prime) -> u64 {
    let q = p.get();
    (1..=k).fold(1 % q, |acc, j| p.mul(acc, binom_mod_p(j * q - 1, q - 1, p)))
}

/// The coefficient C(kp + r, r) in x^[pk] x^[r] = C(kp + r, r) x^[kp + r].
pub fn pd_shift_coefficient(k: u64, r: u64, p: Prime) -> u64 {
    binom_mod_p(k * p.get() + r, r, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn rejects_composites() {
        assert!(matches!(Prime::new(4), Err(Error::NotPrime(4))));
        assert!(matches!(Prime::new(1), Err(Error::NotPrime(1))));
        assert!(Prime::new(7).is_ok());
    }

    #[test]
    fn binom_examples() {
        assert_eq!(binom_mod_p(5, 2, p(3)), 1);
        assert_eq!(binom_mod_p(17, 0, p(5)), 1);
        assert_eq!(binom_mod_p(3, 1, p(3)), 0);
        assert_eq!(binom_mod_p(2, 5, p(3)), 0);
    }

    #[test]
    fn pd_coefficient_examples() {
        assert_eq!(pd_coefficient(2, p(3)), 1);
        for q in [2, 3, 5, 7] {
            assert_eq!(pd_coefficient(1, p(q)), 1);
        }
        assert_eq!(pd_coefficient(3, p(2)), 1);
    }

    #[test]
    fn inverse_roundtrip() {
        let q = p(7);
        for a in 1..7 {
            assert_eq!(q.mul(a, q.inv(a).unwrap()), 1);
        }
        assert_eq!(q.inv(0), None);
    }
}

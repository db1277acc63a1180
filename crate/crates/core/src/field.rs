//! Arithmetic in `F_p` for word-sized odd primes.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// The ambient prime field. Elements are canonical residues in `[0, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeFieldCtx {
    p: u64,
}

impl PrimeFieldCtx {
    /// Checks that `p` is an odd prime below `2^32`, so products of two
    /// residues fit in a `u64`.
    pub fn new(p: u64) -> Result<Self> {
        if p < 3 || p.is_multiple_of(2) || p >= 1 << 32 || !is_prime(p) {
            return Err(Error::NotAnOddPrime(p));
        }
        Ok(Self { p })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    /// Number of field elements, as an index bound.
    #[inline]
    pub fn size(&self) -> usize {
        self.p as usize
    }

    #[inline]
    pub fn reduce(&self, x: u64) -> u64 {
        x % self.p
    }

    #[inline]
    pub fn from_i64(&self, x: i64) -> u64 {
        x.rem_euclid(self.p as i64) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.p;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self, a: u64) -> Option<u64> {
        let a = a % self.p;
        if a == 0 {
            return None;
        }
        let (mut r0, mut r1) = (self.p as i64, a as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Some(self.from_i64(t0))
    }

    /// Legendre symbol: 0 for zero, 1 for non-zero squares, -1 otherwise.
    pub fn legendre(&self, a: u64) -> i8 {
        let a = a % self.p;
        if a == 0 {
            return 0;
        }
        if self.pow(a, (self.p - 1) / 2) == 1 {
            1
        } else {
            -1
        }
    }

    /// Whether `a` is a square in `F_p` (zero included).
    pub fn is_square(&self, a: u64) -> bool {
        self.legendre(a) >= 0
    }

    /// Representative of `a` in `(-p/2, p/2]`.
    pub fn centered(&self, a: u64) -> i64 {
        let a = a % self.p;
        if a > self.p / 2 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// All primes in `[lo, hi]` by a sieve of Eratosthenes.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    if hi < 2 || lo > hi {
        return Vec::new();
    }
    let n = hi as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    let mut i = 2usize;
    while i <= n {
        if !composite[i] {
            if i as u64 >= lo {
                out.push(i as u64);
            }
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
        i += 1;
    }
    out
}

/// Residue-class filter used by the prime sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidueFilter {
    Any,
    OneMod4,
    ThreeMod4,
}

impl ResidueFilter {
    pub fn accepts(self, p: u64) -> bool {
        match self {
            ResidueFilter::Any => true,
            ResidueFilter::OneMod4 => p % 4 == 1,
            ResidueFilter::ThreeMod4 => p % 4 == 3,
        }
    }
}

/// Odd primes in `[lo, hi]` passing `filter`.
pub fn odd_primes_in(lo: u64, hi: u64, filter: ResidueFilter) -> Vec<u64> {
    primes_in(lo.max(3), hi)
        .into_iter()
        .filter(|&p| filter.accepts(p))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_bad_moduli() {
        for p in [0, 1, 2, 4, 9, 15, 1 << 32] {
            assert!(PrimeFieldCtx::new(p).is_err(), "{p}");
        }
        assert!(PrimeFieldCtx::new(4294967291).is_ok());
    }

    #[test]
    fn sieve_matches_miller_rabin() {
        let sieved = primes_in(0, 5000);
        let tested: Vec<u64> = (0..=5000).filter(|&n| is_prime(n)).collect();
        assert_eq!(sieved, tested);
        assert_eq!(odd_primes_in(0, 20, ResidueFilter::ThreeMod4), [3, 7, 11, 19]);
        assert_eq!(odd_primes_in(0, 20, ResidueFilter::OneMod4), [5, 13, 17]);
    }

    #[test]
    fn inverse_of_three_mod_seven() {
        let f = PrimeFieldCtx::new(7).unwrap();
        assert_eq!(f.inv(3), Some(5));
        assert_eq!(f.inv(0), None);
    }

    #[test]
    fn exactly_one_of_a_and_minus_a_is_a_residue_when_three_mod_four() {
        for p in [3, 7, 11, 19, 23, 43] {
            let f = PrimeFieldCtx::new(p).unwrap();
            for a in 1..p {
                assert_ne!(f.legendre(a), f.legendre(f.neg(a)));
            }
        }
    }

    proptest! {
        #[test]
        fn inverse_and_arithmetic_agree(p_idx in 0usize..40, a in 0u64..10_000, b in 0u64..10_000) {
            let primes = odd_primes_in(3, 400, ResidueFilter::Any);
            let f = PrimeFieldCtx::new(primes[p_idx % primes.len()]).unwrap();
            let (a, b) = (f.reduce(a), f.reduce(b));
            prop_assert_eq!(f.sub(f.add(a, b), b), a);
            prop_assert_eq!(f.add(a, f.neg(a)), 0);
            if let Some(ia) = f.inv(a) {
                prop_assert_eq!(f.mul(a, ia), 1);
                prop_assert_eq!(ia, f.pow(a, f.p() - 2));
            }
            prop_assert_eq!(f.from_i64(f.centered(a)), a);
        }
    }
}

//! Integer groundwork: prime sieving, Kronecker symbols, factorization,
//! and exact rationals.
//!
//! Everything downstream leans on this module: curve orders reduce to
//! character sums, class numbers to discriminant factorizations, and the
//! Euler products to prime enumeration. All routines here are exact;
//! floating point never enters.

use crate::error::{Error, Result};

/// Exact rational with arbitrary-precision numerator and denominator.
/// Values are always reduced and carry a positive denominator.
pub type Rational = num_rational::BigRational;

/// Small-integer rational constructor, handy in tests and weights.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(numer.into(), denom.into())
}

/// Eratosthenes sieve up to a fixed limit, with the sorted prime list
/// kept alongside the primality bitmap.
pub struct PrimeSieve {
    limit: u64,
    is_prime: Vec<bool>,
    primes: Vec<u64>,
}

impl PrimeSieve {
    /// Sieve all primes `<= limit`. Fails for `limit < 2`.
    pub fn new(limit: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::LimitTooSmall(limit));
        }
        let n = limit as usize;
        let mut is_prime = vec![true; n + 1];
        is_prime[0] = false;
        is_prime[1] = false;
        let mut d = 2usize;
        while d * d <= n {
            if is_prime[d] {
                let mut m = d * d;
                while m <= n {
                    is_prime[m] = false;
                    m += d;
                }
            }
            d += 1;
        }
        let primes = is_prime
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i as u64)
            .collect();
        Ok(PrimeSieve { limit, is_prime, primes })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// All primes `<= limit`, ascending.
    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Primality of `n`. Panics beyond the sieve limit.
    pub fn is_prime(&self, n: u64) -> bool {
        assert!(n <= self.limit, "{n} is beyond the sieve limit {}", self.limit);
        self.is_prime[n as usize]
    }

    /// Primes in the open interval `(lo, hi)`, as a slice of the full list.
    pub fn primes_between(&self, lo: u64, hi: u64) -> &[u64] {
        let start = self.primes.partition_point(|&p| p <= lo);
        let end = self.primes.partition_point(|&p| p < hi);
        &self.primes[start..end.max(start)]
    }

    /// Number of primes `<= x` (requires `x <= limit`).
    pub fn count_up_to(&self, x: u64) -> u64 {
        assert!(x <= self.limit, "{x} is beyond the sieve limit {}", self.limit);
        self.primes.partition_point(|&p| p <= x) as u64
    }
}

/// Primality by trial division; fine at the scale this crate targets.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for d in [2u64, 3, 5] {
        if n == d {
            return true;
        }
        if n % d == 0 {
            return false;
        }
    }
    // Wheel over 6k +- 1.
    let mut d = 5u64;
    while d * d <= n {
        if n % d == 0 || n % (d + 2) == 0 {
            return false;
        }
        d += 6;
    }
    true
}

/// Kronecker symbol `(a | n)`, extending the Jacobi symbol to all
/// integers `n` (including zero, negatives, and even moduli).
pub fn kronecker(a: i64, n: i64) -> i32 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut a = a;
    let mut n = n;
    let mut result = 1i32;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    if n % 2 == 0 {
        if a % 2 == 0 {
            return 0;
        }
        let mut twos = 0u32;
        while n % 2 == 0 {
            n /= 2;
            twos += 1;
        }
        // (a | 2) depends on a mod 8 and enters once per factor of 2.
        if twos % 2 == 1 {
            let r = a.rem_euclid(8);
            if r == 3 || r == 5 {
                result = -result;
            }
        }
    }
    // n is now odd and positive; run the Jacobi reciprocity loop.
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Prime factorization `n = prod p_i^{e_i}` with the factors ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// Exponent of `p` in `n` (zero when `p` does not divide `n`).
    pub fn valuation(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }

    /// Euler totient of `n`.
    pub fn phi(&self) -> u64 {
        let mut phi = self.n;
        for &(p, _) in &self.factors {
            phi = phi / p * (p - 1);
        }
        phi
    }
}

/// Factor `n >= 1` by trial division.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::InvalidParameter("cannot factor 0".into()));
    }
    let mut m = n;
    let mut factors = Vec::new();
    let mut push = |p: u64, m: &mut u64| {
        let mut e = 0u32;
        while *m % p == 0 {
            *m /= p;
            e += 1;
        }
        if e > 0 {
            factors.push((p, e));
        }
    };
    push(2, &mut m);
    push(3, &mut m);
    let mut d = 5u64;
    while d * d <= m {
        push(d, &mut m);
        push(d + 2, &mut m);
        d += 6;
    }
    if m > 1 {
        factors.push((m, 1));
    }
    Ok(Factorization { n, factors })
}

/// Euler totient of `n >= 1`.
pub fn euler_phi(n: u64) -> Result<u64> {
    Ok(factorize(n)?.phi())
}

/// Smallest-prime-factor table for fast repeated factorization of many
/// inputs below a common limit (census scans, Euler-product batches).
pub struct FactorSieve {
    limit: u64,
    spf: Vec<u32>,
}

impl FactorSieve {
    pub fn new(limit: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::LimitTooSmall(limit));
        }
        assert!(limit < u32::MAX as u64, "factor sieve limit must fit in u32");
        let n = limit as usize;
        let mut spf: Vec<u32> = vec![0; n + 1];
        for i in 2..=n {
            if spf[i] == 0 {
                let mut m = i;
                while m <= n {
                    if spf[m] == 0 {
                        spf[m] = i as u32;
                    }
                    m += i;
                }
            }
        }
        Ok(FactorSieve { limit, spf })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Factor `1 <= n <= limit` via the table.
    pub fn factorize(&self, n: u64) -> Factorization {
        assert!(n >= 1 && n <= self.limit, "{n} outside factor sieve range");
        let mut m = n as usize;
        let mut factors: Vec<(u64, u32)> = Vec::new();
        while m > 1 {
            let p = self.spf[m] as u64;
            let mut e = 0u32;
            while m as u64 % p == 0 {
                m /= p as usize;
                e += 1;
            }
            factors.push((p, e));
        }
        Factorization { n, factors }
    }

    pub fn phi(&self, n: u64) -> u64 {
        self.factorize(n).phi()
    }
}

/// Largest integer `t` with `t^2 < 4n` (zero for `n = 0`); the half-width
/// of the Hasse interval around `n + 1`.
pub fn two_sqrt_floor_strict(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let r = (4 * n).isqrt();
    if r * r == 4 * n {
        r - 1
    } else {
        r
    }
}

//! Euler products, exact coefficient combinatorics, and logarithmic
//! integrals: the predictive side of the census statistics.
//!
//! * `K(N)` — the per-order singular series, a product of local factors
//!   over primes, split by whether `p` divides `N`, `N - 1`, or neither.
//! * `C(m)` — the `m`-th moment constant of `N K(N) / phi(N)`, an Euler
//!   product whose local factors involve the series `f_m(p)`.
//! * `d_{l,r}(m)` — exact rational coefficients from an alternating sum,
//!   independently recoverable by solving a unit-lower-triangular system.
//! * `Li_m(x)` — `integral from 2 to x of dt / (log t)^m` by adaptive
//!   Simpson quadrature.
//!
//! Products are truncated at a prime bound and always report a tail
//! estimate from the elementary bound `|log factor| <= c/p^2`, summed as
//! `sum_{n > B} c/n^2 <= c/B`.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::arith::{factorize, is_prime_u64, FactorSieve, PrimeSieve, Rational};
use crate::error::{Error, Result};

/// Cutoff for the inner geometric series of `f_m`; terms decay like
/// `p^{-2j}`, so 64 is far past double-precision exhaustion.
pub const F_SERIES_CUTOFF: u32 = 64;

/// Absolute tolerance for the adaptive quadrature behind [`li_m`].
pub const LI_ABS_TOL: f64 = 1e-8;

/// A truncated Euler product: the value over primes `<= prime_bound` and
/// a heuristic bound on everything the truncation dropped.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct TruncatedProduct {
    pub value: f64,
    pub prime_bound: u64,
    pub tail_estimate: f64,
}

/// Reusable evaluator for `K(N)` at a fixed prime bound: the generic
/// product over odd primes is precomputed once, and each `N` only pays
/// for corrections at primes dividing `N` or `N - 1`.
pub struct KEvaluator {
    prime_bound: u64,
    base_odd: f64,
}

impl KEvaluator {
    pub fn new(prime_bound: u64) -> Result<Self> {
        if prime_bound < 100 {
            return Err(Error::InvalidParameter(format!(
                "prime bound {prime_bound} is too small for K (need at least 100)"
            )));
        }
        let sieve = PrimeSieve::new(prime_bound)?;
        let mut base_odd = 1.0f64;
        for &p in &sieve.primes()[1..] {
            let q = (p - 1) as f64;
            base_odd *= 1.0 - 1.0 / (q * q);
        }
        Ok(KEvaluator { prime_bound, base_odd })
    }

    pub fn prime_bound(&self) -> u64 {
        self.prime_bound
    }

    /// `K(N)` truncated at the evaluator's bound. The factors at primes
    /// dividing `N` form a finite product and are never truncated.
    pub fn eval(&self, n: u64) -> Result<f64> {
        if n == 0 {
            return Err(Error::InvalidParameter("K is defined for N >= 1".into()));
        }
        if n == 1 {
            // Every prime divides N - 1 = 0, so every local factor takes
            // the Kronecker-zero form; the precomputed base is useless.
            let sieve = PrimeSieve::new(self.prime_bound)?;
            let mut v = 2.0 / 3.0;
            for &p in &sieve.primes()[1..] {
                let q = (p - 1) as f64;
                v *= 1.0 - 1.0 / (q * q * (p + 1) as f64);
            }
            return Ok(v);
        }
        let mut v = self.base_odd;
        // p = 2 divides exactly one of N, N - 1.
        if n % 2 == 0 {
            v *= 1.0 - 0.5f64.powi(n.trailing_zeros() as i32);
        } else {
            v *= 2.0 / 3.0;
        }
        for &(p, e) in factorize(n)?.factors() {
            if p == 2 {
                continue;
            }
            let q = (p - 1) as f64;
            if p <= self.prime_bound {
                v /= 1.0 - 1.0 / (q * q);
            }
            v *= 1.0 - 1.0 / ((p as f64).powi(e as i32) * q);
        }
        for &(p, _) in factorize(n - 1)?.factors() {
            if p == 2 || p > self.prime_bound {
                continue;
            }
            let q = (p - 1) as f64;
            v *= (1.0 - 1.0 / (q * q * (p + 1) as f64)) / (1.0 - 1.0 / (q * q));
        }
        Ok(v)
    }
}

/// `K(N)` as a one-off truncated product.
pub fn k_constant(n: u64, prime_bound: u64) -> Result<TruncatedProduct> {
    let value = KEvaluator::new(prime_bound)?.eval(n)?;
    Ok(TruncatedProduct {
        value,
        prime_bound,
        tail_estimate: value.abs() * (2.0 / prime_bound as f64).exp_m1(),
    })
}

/// Local series `f_m(p)`: the prime-power corrections entering the local
/// factor of `C(m)`. The inner sum over `j >= 2` is truncated at
/// `series_cutoff` terms; it decays geometrically like `p^{-2j}`.
pub fn f_m(p: u64, m: u32, series_cutoff: u32) -> f64 {
    assert!(m >= 1, "f_m needs m >= 1");
    assert!(series_cutoff >= 8, "series cutoff too small");
    assert!(is_prime_u64(p), "f_m needs a prime, got {p}");
    let mi = m as i32;
    if p == 2 {
        let mut sum = 0.0f64;
        for j in 2..=series_cutoff as i32 {
            let prev = 1.0 - 0.5f64.powi(j - 1);
            let cur = 1.0 - 0.5f64.powi(j);
            sum += 0.5f64.powi(j) * (cur.powi(mi) - prev.powi(mi));
        }
        return 0.5 * ((2.0f64 / 3.0).powi(mi) - 1.0) + 2.0f64.powi(mi) * sum;
    }
    let pf = p as f64;
    let q = pf - 1.0;
    let a_inv = (1.0 - 1.0 / (q * q)).powi(-mi);
    let head = (a_inv
        * ((1.0 - 1.0 / (q * q * (pf + 1.0))).powi(mi)
            + (pf / q).powi(mi) * (1.0 - 1.0 / (pf * q)).powi(mi))
        - 2.0)
        / pf;
    let mut sum = 0.0f64;
    let mut pj = pf * pf;
    for _ in 2..=series_cutoff {
        let prev = 1.0 - 1.0 / (pj / pf * q);
        let cur = 1.0 - 1.0 / (pj * q);
        let term = (cur.powi(mi) - prev.powi(mi)) / pj;
        sum += term;
        if term.abs() < 1e-300 {
            break;
        }
        pj *= pf;
    }
    head + (pf / q).powi(mi) * a_inv * sum
}

/// Moment constant `C(m) = prod_{p>2} (1 - 1/(p-1)^2)^m * prod_p (1 + f_m(p))`,
/// truncated at `prime_bound`. `C(1) = 1` exactly: every local factor
/// collapses to 1, which doubles as a self-test of `f_m`.
pub fn c_constant(m: u32, prime_bound: u64) -> Result<TruncatedProduct> {
    if m < 1 {
        return Err(Error::InvalidParameter("C is defined for m >= 1".into()));
    }
    if prime_bound < 1_000 {
        return Err(Error::InvalidParameter(format!(
            "prime bound {prime_bound} is too small for C (need at least 1000)"
        )));
    }
    let sieve = PrimeSieve::new(prime_bound)?;
    let mi = m as i32;
    let mut value = 1.0 + f_m(2, m, F_SERIES_CUTOFF);
    for &p in &sieve.primes()[1..] {
        let q = (p - 1) as f64;
        value *= (1.0 - 1.0 / (q * q)).powi(mi) * (1.0 + f_m(p, m, F_SERIES_CUTOFF));
    }
    let tail_estimate = value.abs().max(1.0) * (4.0 * m as f64 / prime_bound as f64).exp_m1();
    Ok(TruncatedProduct { value, prime_bound, tail_estimate })
}

/// Finite-average cross-check of `C(m)`:
/// `(1/x) sum_{N <= x} (N K(N) / phi(N))^m`, which converges to `C(m)`
/// as `x` grows (the sequence is multiplicative-on-average; its moments
/// are governed by the same local factors).
pub fn k_moment_average(m: u32, x: u64, prime_bound: u64) -> Result<f64> {
    if m < 1 {
        return Err(Error::InvalidParameter("moment average needs m >= 1".into()));
    }
    if x < 100 {
        return Err(Error::InvalidParameter(format!(
            "moment average needs x >= 100, got {x}"
        )));
    }
    let evaluator = KEvaluator::new(prime_bound)?;
    let sieve = FactorSieve::new(x)?;
    let mut acc = 0.0f64;
    for n in 1..=x {
        acc += (n as f64 * evaluator.eval(n)? / sieve.phi(n) as f64).powi(m as i32);
    }
    Ok(acc / x as f64)
}

fn factorial(n: u32) -> BigInt {
    let mut f = BigInt::one();
    for k in 2..=n as u64 {
        f *= k;
    }
    f
}

/// Exact coefficient
/// `d_{l,r}(m) = sum_{k=l}^{m} (k^r / k!) * (-1)^{m-k} / (m-k)!`.
pub fn d_coeff(ell: u32, r: u32, m: u32) -> Result<Rational> {
    if ell < 1 {
        return Err(Error::InvalidParameter("d coefficient needs l >= 1".into()));
    }
    if m < ell {
        return Err(Error::InvalidParameter(format!(
            "d coefficient needs m >= l, got m = {m} < l = {ell}"
        )));
    }
    let mut sum = Rational::zero();
    for k in ell..=m {
        let mut numer = BigInt::from(k).pow(r);
        if (m - k) % 2 == 1 {
            numer = -numer;
        }
        sum += Rational::new(numer, factorial(k) * factorial(m - k));
    }
    Ok(sum)
}

/// The unit lower-triangular relation matrix `A` with
/// `a_{mn} = 1/(m-n)!` for `m >= n` (indices `0..size`).
pub fn relation_matrix(size: usize) -> Vec<Vec<Rational>> {
    (0..size)
        .map(|i| {
            (0..size)
                .map(|j| {
                    if i >= j {
                        Rational::new(BigInt::one(), factorial((i - j) as u32))
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect()
}

/// Closed-form inverse of [`relation_matrix`]: `b_{mn} = (-1)^{m-n} a_{mn}`.
pub fn relation_matrix_inverse(size: usize) -> Vec<Vec<Rational>> {
    (0..size)
        .map(|i| {
            (0..size)
                .map(|j| {
                    if i >= j {
                        let mut numer = BigInt::one();
                        if (i - j) % 2 == 1 {
                            numer = -numer;
                        }
                        Rational::new(numer, factorial((i - j) as u32))
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect()
}

/// Solve `A z = J` with `J_j = j^r / j!` for `j = l .. l + size - 1` by
/// forward substitution, cross-checked internally against the closed-form
/// inverse. Returns `(j, z(j))` pairs; `z(j)` must (and does) reproduce
/// [`d_coeff`] with `m = j`.
pub fn solve_relation_system(ell: u32, r: u32, size: usize) -> Result<Vec<(u32, Rational)>> {
    if ell < 1 {
        return Err(Error::InvalidParameter("relation system needs l >= 1".into()));
    }
    if size < 1 {
        return Err(Error::InvalidParameter("relation system needs size >= 1".into()));
    }
    let rhs: Vec<Rational> = (0..size)
        .map(|i| {
            let j = ell + i as u32;
            Rational::new(BigInt::from(j).pow(r), factorial(j))
        })
        .collect();
    let mut z: Vec<Rational> = Vec::with_capacity(size);
    for i in 0..size {
        let mut v = rhs[i].clone();
        for (k, zk) in z.iter().enumerate() {
            v -= zk * Rational::new(BigInt::one(), factorial((i - k) as u32));
        }
        z.push(v);
    }
    let inverse = relation_matrix_inverse(size);
    for i in 0..size {
        let alt: Rational = (0..=i).map(|k| &inverse[i][k] * &rhs[k]).sum();
        assert_eq!(alt, z[i], "forward substitution disagrees with the closed-form inverse");
    }
    Ok(z.into_iter().enumerate().map(|(i, v)| (ell + i as u32, v)).collect())
}

/// Stirling number of the second kind `S(n, k)`: partitions of an
/// `n`-set into `k` nonempty blocks.
pub fn stirling2(n: u32, k: u32) -> BigUint {
    if n == 0 && k == 0 {
        return BigUint::one();
    }
    if k == 0 || k > n {
        return BigUint::zero();
    }
    // Row-by-row recurrence S(n,k) = k S(n-1,k) + S(n-1,k-1).
    let mut row = vec![BigUint::zero(); k as usize + 1];
    row[0] = BigUint::one();
    for _ in 1..=n {
        for j in (1..=k as usize).rev() {
            let carried = std::mem::take(&mut row[j]);
            row[j] = carried * j as u64 + row[j - 1].clone();
        }
        row[0] = BigUint::zero();
    }
    row[k as usize].clone()
}

/// Quadrature result with the accumulated Richardson error estimate.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct LiEstimate {
    pub value: f64,
    pub abs_error: f64,
}

/// `Li_m(x) = integral from 2 to x of dt / (log t)^m`, by adaptive
/// Simpson with absolute tolerance [`LI_ABS_TOL`].
pub fn li_m(x: f64, m: u32) -> Result<LiEstimate> {
    if m < 1 {
        return Err(Error::InvalidParameter("Li needs m >= 1".into()));
    }
    if !(x >= 2.0) || !x.is_finite() {
        return Err(Error::InvalidParameter(format!("Li needs finite x >= 2, got {x}")));
    }
    if x == 2.0 {
        return Ok(LiEstimate { value: 0.0, abs_error: 0.0 });
    }
    let f = |t: f64| t.ln().powi(-(m as i32));
    let (a, b) = (2.0, x);
    let fa = f(a);
    let fb = f(b);
    let mid = 0.5 * (a + b);
    let fmid = f(mid);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fmid + fb);
    let (value, abs_error) = adapt(&f, a, b, fa, fmid, fb, whole, LI_ABS_TOL, 48);
    Ok(LiEstimate { value, abs_error })
}

#[allow(clippy::too_many_arguments)]
fn adapt(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> (f64, f64) {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        return (left + right + delta / 15.0, delta.abs() / 15.0);
    }
    let (lv, le) = adapt(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1);
    let (rv, re) = adapt(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
    (lv + rv, le + re)
}

//! Complete exponential sums `S(g; p) = sum_{x=0}^{p-1} e(g(x)/p)` for
//! integer polynomials `g`, checked against the square-root cancellation
//! bound `|S| <= (n - 1) sqrt(p)` for degree `n` with `p` not dividing
//! the leading coefficient.
//!
//! The sum is accumulated in double precision with Kahan compensation;
//! at desk scale (`p` in the hundreds, thousands of random cases) the
//! rounding slack is far below the `1e-6` pass margin.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::arith::{is_prime_u64, PrimeSieve};
use crate::error::{Error, Result};

/// Slack added to the bound before declaring a pass, covering the
/// floating-point error of the accumulated sum.
pub const PASS_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ExpSumResult {
    pub p: u64,
    /// Coefficients `a_0, a_1, ..., a_n` (lowest degree first).
    pub coefficients: Vec<u64>,
    pub magnitude: f64,
    pub bound: f64,
    pub pass: bool,
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    (a as u128 * b as u128 % p as u128) as u64
}

/// Evaluate `S(g; p)` and compare against `(n - 1) sqrt(p)`.
///
/// `coefficients[i]` multiplies `x^i`; the nominal degree is
/// `coefficients.len() - 1` and must satisfy `0 < n < p` with the
/// leading coefficient nonzero mod `p`.
pub fn exp_sum(p: u64, coefficients: &[u64]) -> Result<ExpSumResult> {
    if !is_prime_u64(p) {
        return Err(Error::NotPrime(p));
    }
    if coefficients.len() < 2 {
        return Err(Error::InvalidParameter(
            "exponential sum needs degree at least 1".into(),
        ));
    }
    let n = (coefficients.len() - 1) as u64;
    if n >= p {
        return Err(Error::InvalidParameter(format!(
            "degree {n} must be smaller than p = {p}"
        )));
    }
    if coefficients.last().unwrap() % p == 0 {
        return Err(Error::InvalidParameter(format!(
            "leading coefficient divisible by p = {p}"
        )));
    }
    let reduced: Vec<u64> = coefficients.iter().map(|&c| c % p).collect();
    let mut re = 0.0f64;
    let mut im = 0.0f64;
    let mut re_c = 0.0f64;
    let mut im_c = 0.0f64;
    let tau = std::f64::consts::TAU;
    for x in 0..p {
        let mut g = 0u64;
        for &c in reduced.iter().rev() {
            g = (mulmod(g, x, p) + c) % p;
        }
        let angle = tau * (g as f64) / (p as f64);
        let (s, c) = angle.sin_cos();
        // Kahan: accumulate each component with a running compensation.
        let y = c - re_c;
        let t = re + y;
        re_c = (t - re) - y;
        re = t;
        let y = s - im_c;
        let t = im + y;
        im_c = (t - im) - y;
        im = t;
    }
    let magnitude = re.hypot(im);
    let bound = (n - 1) as f64 * (p as f64).sqrt();
    Ok(ExpSumResult {
        p,
        coefficients: coefficients.to_vec(),
        magnitude,
        bound,
        pass: magnitude <= bound + PASS_MARGIN,
    })
}

/// Run `cases` random instances: `p` uniform over odd primes in
/// `[5, max_p]`, degree uniform in `2..=6` (capped below `p`),
/// coefficients uniform mod `p` with a nonzero leading one. The seed
/// fixes the whole suite.
pub fn random_suite(max_p: u64, cases: u32, seed: u64) -> Result<Vec<ExpSumResult>> {
    if max_p < 5 {
        return Err(Error::InvalidParameter(
            "random suite needs max_p >= 5".into(),
        ));
    }
    let sieve = PrimeSieve::new(max_p)?;
    let pool: Vec<u64> = sieve.primes().iter().copied().filter(|&p| p >= 5).collect();
    if pool.is_empty() {
        return Err(Error::InvalidParameter(
            "no odd primes at or below max_p".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut results = Vec::with_capacity(cases as usize);
    for _ in 0..cases {
        let p = pool[rng.gen_range(0..pool.len())];
        let degree = rng.gen_range(2..=6u64.min(p - 1)) as usize;
        let mut coefficients: Vec<u64> = (0..degree).map(|_| rng.gen_range(0..p)).collect();
        coefficients.push(rng.gen_range(1..p));
        results.push(exp_sum(p, &coefficients)?);
    }
    Ok(results)
}

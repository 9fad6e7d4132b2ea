//! Class numbers of imaginary quadratic orders, two ways: exact counts of
//! reduced binary quadratic forms, and truncated L-series through the
//! analytic class number formula. The routes share no code, so each one
//! checks the other.
//!
//! The weighted Kronecker class number here is
//! `H(D) = sum over f^2 | D with D/f^2 a discriminant of h(D/f^2) / w(D/f^2)`,
//! with `w = 6, 4, 2` for discriminants `-3`, `-4`, and everything else.
//! With that normalization `H((p+1-N)^2 - 4p)` equals the `1/aut`-weighted
//! number of curve classes over `F_p` with exactly `N` points, which is
//! what [`deuring_check`] verifies.

use num_traits::Zero;

use crate::arith::{is_prime_u64, kronecker, Rational};
use crate::curves::weighted_counts_by_order;
use crate::error::{Error, Result};

/// Class number of primitive reduced forms of one discriminant, together
/// with the unit weight `w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FormClassCount {
    pub d: i64,
    pub h: u64,
    pub w: u32,
}

fn validate_discriminant(d: i64) -> Result<()> {
    if d >= 0 || d.rem_euclid(4) > 1 {
        return Err(Error::NotDiscriminant(d));
    }
    Ok(())
}

/// Count primitive reduced forms `(a, b, c)` with `b^2 - 4ac = d`:
/// `|b| <= a <= c`, `b >= 0` whenever `|b| = a` or `a = c`, and
/// `gcd(a, b, c) = 1`.
pub fn reduced_form_count(d: i64) -> Result<FormClassCount> {
    validate_discriminant(d)?;
    let abs_d = d.unsigned_abs();
    let gcd = |mut a: u64, mut b: u64| {
        while b != 0 {
            let r = a % b;
            a = b;
            b = r;
        }
        a
    };
    let mut h = 0u64;
    let a_max = (abs_d / 3).isqrt().max(1);
    for a in 1..=a_max {
        // b must match the parity of d for b^2 - d to be divisible by 4.
        let parity = d.rem_euclid(2);
        let mut b = -(a as i64);
        if b.rem_euclid(2) != parity {
            b += 1;
        }
        while b <= a as i64 {
            let num = (b * b - d) as u64;
            if num % (4 * a) == 0 {
                let c = num / (4 * a);
                if c >= a {
                    // A mirror pair (a, -b, c) ~ (a, b, c) on the boundary
                    // of the fundamental domain is counted once, with b >= 0.
                    let boundary = (-b) as u64 == a || a == c;
                    if !(b < 0 && boundary) && gcd(gcd(a, b.unsigned_abs()), c) == 1 {
                        h += 1;
                    }
                }
            }
            b += 2;
        }
    }
    let w = match d {
        -3 => 6,
        -4 => 4,
        _ => 2,
    };
    Ok(FormClassCount { d, h, w })
}

/// One suborder term of a weighted class number: the conductor `f`, the
/// discriminant `d = D / f^2`, and its form count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HTerm {
    pub f: u64,
    pub disc: i64,
    pub h: u64,
    pub w: u32,
}

/// Weighted Kronecker class number `H(D)` with its per-conductor terms.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassNumberRecord {
    pub d: i64,
    pub terms: Vec<HTerm>,
    pub value: Rational,
}

/// Exact `H(D) = sum h(D/f^2) / w(D/f^2)` over conductors `f` with
/// `f^2 | D` and `D/f^2` still a discriminant.
pub fn kronecker_h(d: i64) -> Result<ClassNumberRecord> {
    validate_discriminant(d)?;
    let abs_d = d.unsigned_abs();
    let mut terms = Vec::new();
    let mut value = Rational::zero();
    let mut f = 1u64;
    while f * f <= abs_d {
        if abs_d % (f * f) == 0 {
            let df = d / (f * f) as i64;
            if df.rem_euclid(4) <= 1 {
                let fc = reduced_form_count(df)?;
                terms.push(HTerm { f, disc: df, h: fc.h, w: fc.w });
                value += Rational::new(fc.h.into(), (fc.w as u64).into());
            }
        }
        f += 1;
    }
    Ok(ClassNumberRecord { d, terms, value })
}

/// Truncated-L-series estimate of `H(D)` with a crude tail bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LSeriesEstimate {
    pub d: i64,
    pub cutoff: u64,
    pub value: f64,
    pub tail_bound: f64,
}

/// Analytic route to the same number:
/// `H(D) = sum_f sqrt|D| / (2 pi f) * L(1, chi_{D/f^2})`,
/// each `L` truncated at `cutoff` terms. Character values are read from a
/// table of one full period, and the tail is bounded by `|d| / cutoff`
/// per series (Abel summation against period-sum cancellation).
pub fn kronecker_h_via_l(d: i64, cutoff: u64) -> Result<LSeriesEstimate> {
    validate_discriminant(d)?;
    if cutoff < 1_000 {
        return Err(Error::InvalidParameter(format!(
            "L-series cutoff {cutoff} is too small (need at least 1000)"
        )));
    }
    let abs_d = d.unsigned_abs();
    let mut value = 0.0f64;
    let mut tail_bound = 0.0f64;
    let mut f = 1u64;
    while f * f <= abs_d {
        if abs_d % (f * f) == 0 {
            let df = d / (f * f) as i64;
            if df.rem_euclid(4) <= 1 {
                let q = df.unsigned_abs();
                let chi: Vec<i32> = (0..q).map(|r| kronecker(df, r as i64)).collect();
                let mut l = 0.0f64;
                for n in 1..=cutoff {
                    let c = chi[(n % q) as usize];
                    if c != 0 {
                        l += c as f64 / n as f64;
                    }
                }
                let scale = (q as f64).sqrt() / (2.0 * std::f64::consts::PI);
                value += scale * l;
                tail_bound += scale * q as f64 / cutoff as f64;
            }
        }
        f += 1;
    }
    Ok(LSeriesEstimate { d, cutoff, value, tail_bound })
}

/// The discriminant attached to a prime and a target point count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiscOfTrace {
    pub n: u64,
    pub p: u64,
    pub disc: i64,
}

/// `D = (p + 1 - N)^2 - 4p`, defined (negative) exactly when `N` lies in
/// the open Hasse interval of `p`.
pub fn disc_of_order(n: u64, p: u64) -> Result<DiscOfTrace> {
    if p == 2 || p == 3 {
        return Err(Error::SmallCharacteristic(p));
    }
    if !is_prime_u64(p) {
        return Err(Error::NotPrime(p));
    }
    let trace = p as i128 + 1 - n as i128;
    let disc = trace * trace - 4 * p as i128;
    if disc >= 0 {
        return Err(Error::OutsideHasse { n, p });
    }
    Ok(DiscOfTrace { n, p, disc: disc as i64 })
}

/// Both sides of the class-number identity at one `(p, N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeuringCheck {
    pub p: u64,
    pub n: u64,
    pub disc: i64,
    /// `H(D)` from reduced forms.
    pub class_number: Rational,
    /// Sum of `1/aut` over curve classes with `N` points.
    pub weighted: Rational,
    pub equal: bool,
    /// `N = p + 1`, the trace-zero column reported separately.
    pub supersingular: bool,
}

/// Compare `H((p+1-N)^2 - 4p)` against the weighted census of classes
/// with `N` points over `F_p`.
pub fn deuring_check(p: u64, n: u64) -> Result<DeuringCheck> {
    let disc = disc_of_order(n, p)?.disc;
    let class_number = kronecker_h(disc)?.value;
    let weighted = crate::curves::weighted_count_with_order(p, n)?;
    let equal = class_number == weighted;
    Ok(DeuringCheck { p, n, disc, class_number, weighted, equal, supersingular: n == p + 1 })
}

/// [`deuring_check`] for every order in the Hasse interval of `p`, with
/// one class scan shared across all of them.
pub fn deuring_suite(p: u64) -> Result<Vec<DeuringCheck>> {
    let by_order = weighted_counts_by_order(p)?;
    // Orders N with (p+1-N)^2 < 4p: the mirror image of the Hasse
    // interval of primes around a fixed order.
    let half = crate::arith::two_sqrt_floor_strict(p);
    let mut rows = Vec::new();
    for n in (p + 1 - half)..=(p + 1 + half) {
        let disc = disc_of_order(n, p)?.disc;
        let class_number = kronecker_h(disc)?.value;
        let weighted = by_order.get(&n).cloned().unwrap_or_else(Rational::zero);
        let equal = class_number == weighted;
        rows.push(DeuringCheck {
            p,
            n,
            disc,
            class_number,
            weighted,
            equal,
            supersingular: n == p + 1,
        });
    }
    Ok(rows)
}

//! Elliptic curves `y^2 = x^3 + sx + t` over `F_p`: point counts,
//! automorphism counts, isomorphism classes, and dense order tables.
//!
//! A single order comes from the quadratic-character sum
//! `#E(F_p) = p + 1 + sum_x chi(x^3 + sx + t)`. A whole table is filled
//! orbit by orbit under the isomorphism action `(s, t) ~ (s u^4, t u^6)`:
//! one character sum per class, one table write per cell, `O(p^2)` overall
//! instead of the naive `O(p^3)`. Cubic values stream by finite
//! differences, so the inner loops are add/compare only.
//!
//! Table entries are `u32` point counts with `0` reserved for singular
//! (bad-reduction) cells; `(0, 0)` and the rest of the discriminant locus
//! never receive an order, and every prime has exactly `p` such cells.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use num_traits::Zero;

use crate::arith::{is_prime_u64, Rational};
use crate::error::{Error, Result};

/// Default ceiling on order-table memory (bytes): 256 MiB, i.e. p <= 8192.
pub const DEFAULT_TABLE_BUDGET: u64 = 256 << 20;

const TABLE_MAGIC: &[u8; 4] = b"EOT1";

/// Reduce a signed coefficient into `[0, p)`.
pub fn reduce_coeff(a: i64, p: u64) -> u64 {
    a.rem_euclid(p as i64) as u64
}

/// Check that `p` is a valid characteristic for this crate: prime and `> 3`.
fn validate_char(p: u64) -> Result<()> {
    if p == 2 || p == 3 {
        return Err(Error::SmallCharacteristic(p));
    }
    if !is_prime_u64(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(())
}

/// `chi(v)` for all residues: `+1` on nonzero squares, `-1` on
/// non-squares, `0` at zero.
fn square_table(p: u64) -> Vec<i8> {
    let pu = p as usize;
    let mut tbl = vec![-1i8; pu];
    tbl[0] = 0;
    for x in 1..=(p - 1) / 2 {
        tbl[(x * x % p) as usize] = 1;
    }
    tbl
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// A nonsingular curve `y^2 = x^3 + sx + t` over `F_p`, `p > 3` prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CurveFp {
    p: u64,
    s: u64,
    t: u64,
}

impl CurveFp {
    /// Validate the characteristic and the discriminant; coefficients are
    /// reduced mod `p`.
    pub fn new(p: u64, s: u64, t: u64) -> Result<Self> {
        validate_char(p)?;
        let s = s % p;
        let t = t % p;
        if (4 * mulmod(mulmod(s, s, p), s, p) + 27 * mulmod(t, t, p)) % p == 0 {
            return Err(Error::SingularReduction { p, s, t });
        }
        Ok(CurveFp { p, s, t })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn s(&self) -> u64 {
        self.s
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    /// `#E(F_p)`, the group order including the point at infinity.
    pub fn order(&self) -> u64 {
        let chi = square_table(self.p);
        chi_sum_order(self.p, self.s, self.t, &chi)
    }

    /// Size of the automorphism group over `F_p`.
    pub fn aut(&self) -> u32 {
        aut_closed(self.p, self.s, self.t)
    }
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

/// Order via the character sum, streaming `x^3 + sx + t` by finite
/// differences (three modular additions per point, no multiplications).
fn chi_sum_order(p: u64, s: u64, t: u64, chi: &[i8]) -> u64 {
    let pp = p as u32;
    let mut v = (t % p) as u32;
    let mut d1 = ((1 + s) % p) as u32;
    let mut d2 = (6 % p) as u32;
    let six = (6 % p) as u32;
    let mut acc = 0i64;
    for _ in 0..p {
        acc += chi[v as usize] as i64;
        v += d1;
        if v >= pp {
            v -= pp;
        }
        d1 += d2;
        if d1 >= pp {
            d1 -= pp;
        }
        d2 += six;
        if d2 >= pp {
            d2 -= pp;
        }
    }
    debug_assert!(acc * acc < 4 * p as i64, "Hasse bound violated");
    (p as i64 + 1 + acc) as u64
}

/// `#E(F_p)` for `y^2 = x^3 + sx + t`; errors on bad characteristic or a
/// singular reduction.
pub fn curve_order(p: u64, s: u64, t: u64) -> Result<u64> {
    Ok(CurveFp::new(p, s, t)?.order())
}

fn aut_closed(p: u64, s: u64, t: u64) -> u32 {
    if s % p == 0 {
        gcd(6, p - 1) as u32
    } else if t % p == 0 {
        gcd(4, p - 1) as u32
    } else {
        2
    }
}

/// Number of `F_p`-automorphisms, i.e. of units `u` with
/// `(s u^4, t u^6) = (s, t)`: 2 generically, `gcd(4, p-1)` for `t = 0`,
/// `gcd(6, p-1)` for `s = 0`.
pub fn aut_count(p: u64, s: u64, t: u64) -> Result<u32> {
    Ok(CurveFp::new(p, s, t)?.aut())
}

/// Shared orbit walk over all nonsingular `(s, t)` cells.
///
/// Calls `on_class(s, t, aut, order)` once per isomorphism class at its
/// first cell in row-major scan order, and `on_member(s, t, order)`
/// exactly once per nonsingular cell. Cost is `O(p)` per class for the
/// character sum plus `O(p)` per class for the walk.
fn orbit_scan<FC, FM>(p: u64, budget_bytes: u64, mut on_class: FC, mut on_member: FM) -> Result<()>
where
    FC: FnMut(u64, u64, u32, u64),
    FM: FnMut(u64, u64, u64),
{
    validate_char(p)?;
    // The visited bitmap is the irreducible memory cost of a scan.
    let bitmap_bytes = (p * p).div_ceil(8);
    if bitmap_bytes > budget_bytes {
        return Err(Error::TableBudget { p, required: bitmap_bytes, budget: budget_bytes });
    }
    let pu = p as usize;
    let pp = p as u32;
    let chi = square_table(p);
    let mut visited = vec![0u64; (pu * pu).div_ceil(64)];
    let mut u4 = vec![0u64; pu];
    let mut u6 = vec![0u64; pu];
    for u in 1..p {
        let uu = mulmod(u, u, p);
        let q = mulmod(uu, uu, p);
        u4[u as usize] = q;
        u6[u as usize] = mulmod(q, uu, p);
    }
    let mut t27 = vec![0u32; pu];
    for t in 0..p {
        t27[t as usize] = (27 * mulmod(t, t, p) % p) as u32;
    }
    // Lazily filled row of x^3 + sx values; most rows past the first few
    // are fully visited before any class starts in them.
    let mut g_row = vec![0u32; pu];
    for s in 0..p {
        let fours3 = (4 * mulmod(mulmod(s, s, p), s, p)) % p;
        let mut row_ready = false;
        let row_base = s as usize * pu;
        for t in 0..p {
            let idx = row_base + t as usize;
            if visited[idx >> 6] >> (idx & 63) & 1 == 1 {
                continue;
            }
            if (fours3 as u32 + t27[t as usize]) % pp == 0 {
                continue; // singular cell; never joins an orbit
            }
            if !row_ready {
                fill_g_row(&mut g_row, p, s);
                row_ready = true;
            }
            // Character sum for the class representative.
            let mut acc = 0i64;
            let tt = t as u32;
            for &g in &g_row {
                let mut v = g + tt;
                if v >= pp {
                    v -= pp;
                }
                acc += chi[v as usize] as i64;
            }
            debug_assert!(acc * acc < 4 * p as i64, "Hasse bound violated");
            let order = (p as i64 + 1 + acc) as u64;
            let aut = aut_closed(p, s, t);
            on_class(s, t, aut, order);
            let mut members = 0u64;
            for u in 1..pu {
                let s2 = s * u4[u] % p;
                let t2 = t * u6[u] % p;
                let idx2 = s2 as usize * pu + t2 as usize;
                let bit = 1u64 << (idx2 & 63);
                if visited[idx2 >> 6] & bit == 0 {
                    visited[idx2 >> 6] |= bit;
                    members += 1;
                    on_member(s2, t2, order);
                }
            }
            debug_assert_eq!(members * aut as u64, p - 1, "orbit size mismatch");
        }
    }
    Ok(())
}

fn fill_g_row(row: &mut [u32], p: u64, s: u64) {
    let pp = p as u32;
    let mut g = 0u32;
    let mut d1 = ((1 + s) % p) as u32;
    let mut d2 = (6 % p) as u32;
    let six = (6 % p) as u32;
    for slot in row.iter_mut() {
        *slot = g;
        g += d1;
        if g >= pp {
            g -= pp;
        }
        d1 += d2;
        if d1 >= pp {
            d1 -= pp;
        }
        d2 += six;
        if d2 >= pp {
            d2 -= pp;
        }
    }
}

/// Dense table of group orders for every curve over one prime.
///
/// Entry `(s, t)` holds `#E(F_p)` as a `u32`, with `0` marking the `p`
/// singular cells. Row-major in `s`.
#[derive(Debug)]
pub struct OrderTable {
    p: u64,
    orders: Vec<u32>,
}

impl OrderTable {
    /// Build the table with the default memory budget.
    pub fn build(p: u64) -> Result<Self> {
        Self::build_with_budget(p, DEFAULT_TABLE_BUDGET)
    }

    /// Build the table, refusing primes whose `4 p^2` bytes of entries
    /// would exceed `budget_bytes`.
    pub fn build_with_budget(p: u64, budget_bytes: u64) -> Result<Self> {
        validate_char(p)?;
        let required = 4 * p * p;
        if required > budget_bytes {
            return Err(Error::TableBudget { p, required, budget: budget_bytes });
        }
        let pu = p as usize;
        let mut orders = vec![0u32; pu * pu];
        orbit_scan(
            p,
            budget_bytes,
            |_, _, _, _| {},
            |s, t, order| orders[s as usize * pu + t as usize] = order as u32,
        )?;
        Ok(OrderTable { p, orders })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Group order at `(s, t)`, or `None` for a singular cell.
    pub fn order(&self, s: u64, t: u64) -> Option<u64> {
        match self.orders[(s % self.p) as usize * self.p as usize + (t % self.p) as usize] {
            0 => None,
            n => Some(n as u64),
        }
    }

    /// Raw entries, row-major in `s`, `0` = singular.
    pub fn entries(&self) -> &[u32] {
        &self.orders
    }

    /// Serialize as magic `EOT1`, little-endian `u64` prime, then `p^2`
    /// little-endian `u32` entries.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(TABLE_MAGIC)?;
        w.write_all(&self.p.to_le_bytes())?;
        let mut buf = Vec::with_capacity(4 << 16);
        for chunk in self.orders.chunks(1 << 16) {
            buf.clear();
            for &v in chunk {
                buf.extend_from_slice(&v.to_le_bytes());
            }
            w.write_all(&buf)?;
        }
        Ok(())
    }

    /// Parse a table written by [`OrderTable::write_to`], validating the
    /// magic, the prime, and the exact entry count.
    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)
            .map_err(|_| Error::BadTable("missing magic".into()))?;
        if &magic != TABLE_MAGIC {
            return Err(Error::BadTable(format!("bad magic {magic:?}")));
        }
        let mut pbuf = [0u8; 8];
        r.read_exact(&mut pbuf)
            .map_err(|_| Error::BadTable("missing prime header".into()))?;
        let p = u64::from_le_bytes(pbuf);
        if validate_char(p).is_err() {
            return Err(Error::BadTable(format!("invalid prime {p}")));
        }
        let count = (p * p) as usize;
        let mut bytes = vec![0u8; count * 4];
        r.read_exact(&mut bytes)
            .map_err(|_| Error::BadTable("truncated entries".into()))?;
        let mut trailing = [0u8; 1];
        if r.read(&mut trailing)? != 0 {
            return Err(Error::BadTable("trailing data".into()));
        }
        let orders = bytes
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(OrderTable { p, orders })
    }
}

/// One `F_p`-isomorphism class: its first representative in row-major
/// scan order, the automorphism count, the orbit size `(p-1)/aut`, and
/// the common group order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IsoClass {
    pub s: u64,
    pub t: u64,
    pub aut: u32,
    pub class_size: u64,
    pub order: u64,
}

/// All isomorphism classes of curves over `F_p`, in representative scan
/// order. Uses the default scan budget.
pub fn iso_classes(p: u64) -> Result<Vec<IsoClass>> {
    let mut classes = Vec::new();
    orbit_scan(
        p,
        DEFAULT_TABLE_BUDGET,
        |s, t, aut, order| {
            classes.push(IsoClass { s, t, aut, class_size: (p - 1) / aut as u64, order })
        },
        |_, _, _| {},
    )?;
    Ok(classes)
}

/// Sum of `1/aut` over classes with the given group order; the exact
/// class-number side of the census identities. Zero when no class has
/// that order (in particular outside the Hasse interval).
pub fn weighted_count_with_order(p: u64, n: u64) -> Result<Rational> {
    let by_order = weighted_counts_by_order(p)?;
    Ok(by_order.get(&n).cloned().unwrap_or_else(Rational::zero))
}

/// `order -> sum of 1/aut` over every class of `F_p`, one scan for all
/// orders in the Hasse interval.
pub fn weighted_counts_by_order(p: u64) -> Result<BTreeMap<u64, Rational>> {
    let mut map: BTreeMap<u64, Rational> = BTreeMap::new();
    orbit_scan(
        p,
        DEFAULT_TABLE_BUDGET,
        |_, _, aut, order| {
            let w = Rational::new(1.into(), (aut as i64).into());
            map.entry(order)
                .and_modify(|v| *v += w.clone())
                .or_insert(w);
        },
        |_, _, _| {},
    )?;
    Ok(map)
}

/// Census-facing lookup tables restricted to the residues a coefficient
/// box actually hits; same orbit scan, a fraction of the memory once
/// `p` outgrows the box.
pub struct RestrictedTable {
    p: u64,
    a_bound: i64,
    b_bound: i64,
    orders: Vec<u32>,
}

impl RestrictedTable {
    /// Orders for all `(a, b)` with `|a| <= a_bound`, `|b| <= b_bound`,
    /// reduced mod `p`. Entry `0` again marks singular reduction.
    pub fn build(p: u64, a_bound: i64, b_bound: i64, budget_bytes: u64) -> Result<Self> {
        validate_char(p)?;
        assert!(a_bound >= 0 && b_bound >= 0);
        let bw = 2 * b_bound as usize + 1;
        let mut orders = vec![0u32; (2 * a_bound as usize + 1) * bw];
        // Once p outgrows the box each residue matches at most one slot per
        // axis; below that a residue wraps around to several slots.
        let wide = p as i64 > 2 * a_bound.max(b_bound);
        orbit_scan(
            p,
            budget_bytes,
            |_, _, _, _| {},
            |s, t, order| {
                if wide {
                    let a = if s <= a_bound as u64 {
                        s as i64
                    } else if s >= p - a_bound as u64 {
                        s as i64 - p as i64
                    } else {
                        return;
                    };
                    let b = if t <= b_bound as u64 {
                        t as i64
                    } else if t >= p - b_bound as u64 {
                        t as i64 - p as i64
                    } else {
                        return;
                    };
                    orders[(a + a_bound) as usize * bw + (b + b_bound) as usize] = order as u32;
                } else {
                    let mut a = first_congruent(s, p, -a_bound);
                    while a <= a_bound {
                        let mut b = first_congruent(t, p, -b_bound);
                        while b <= b_bound {
                            orders[(a + a_bound) as usize * bw + (b + b_bound) as usize] =
                                order as u32;
                            b += p as i64;
                        }
                        a += p as i64;
                    }
                }
            },
        )?;
        Ok(RestrictedTable { p, a_bound, b_bound, orders })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Group order of the reduction of `y^2 = x^3 + ax + b`, or `None`
    /// for bad reduction at `p`.
    pub fn order(&self, a: i64, b: i64) -> Option<u64> {
        assert!(a.abs() <= self.a_bound && b.abs() <= self.b_bound);
        let bw = 2 * self.b_bound as usize + 1;
        match self.orders[(a + self.a_bound) as usize * bw + (b + self.b_bound) as usize] {
            0 => None,
            n => Some(n as u64),
        }
    }
}

/// Smallest value `>= lo` congruent to `res` mod `p`.
fn first_congruent(res: u64, p: u64, lo: i64) -> i64 {
    lo + (res as i64 - lo).rem_euclid(p as i64)
}

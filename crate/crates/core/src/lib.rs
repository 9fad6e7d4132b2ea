//! Statistics of elliptic-curve group orders over prime fields.
//!
//! The crate computes, exactly where possible and to controlled precision
//! otherwise, three families of objects and the identities connecting them:
//!
//! * censuses of curves `y^2 = x^3 + sx + t` over `F_p` with a prescribed
//!   number of points ([`curves`], [`census`]),
//! * class numbers of imaginary quadratic orders, by reduced-form
//!   enumeration and independently by truncated L-series ([`classnum`]),
//! * Euler products and exact combinatorial coefficients that predict the
//!   census statistics ([`constants`]).
//!
//! [`expsum`] adds complete exponential sums with the square-root
//! cancellation bound, used as a numerical sanity check on the whole
//! character-sum machinery.
//!
//! Integer arithmetic is exact throughout ([`arith`]); floating point is
//! confined to truncated products, L-series tails, and quadrature.

pub mod arith;
pub mod census;
pub mod classnum;
pub mod constants;
pub mod curves;
mod error;
pub mod expsum;

pub use error::{Error, Result};

//! Exact arithmetic kernel: rationals, sparse multivariate polynomials over ℚ,
//! and univariate formal series in `t`.
//!
//! Everything here is immutable after construction and every operation is a
//! pure function, so values can be shared freely across threads.

mod monomial;
mod order;
mod polynomial;
mod rational;
mod series;

pub use monomial::{grevlex_cmp, Monomial};
pub use order::OrderValue;
pub use polynomial::{poly_arith, PolyOp, Polynomial, PolynomialDisplay};
pub use rational::{format_rational, parse_rational, rat, rational_floor, Rational};
pub use series::{series_arith, FormalSeries, SeriesMode, SeriesOp, DEFAULT_PRECISION};

//! Exact sums of arithmetic functions evaluated at floor quotients,
//!
//! ```text
//! S_f(x) = sum_{n <= x} f(floor(x / n))
//! ```
//!
//! together with the machinery needed to study them: sieved and pointwise
//! arithmetic functions, quotient-block decomposition, certified series
//! constants `sum f(n) / (n (n + 1))`, an exact-rational exponent-pair
//! calculus and a set of explicit inequality checkers.
//!
//! The crate is organised bottom-up:
//!
//! * [`arith`]: factorization, point evaluators and sieve tables.
//! * [`floorsum`]: the `O(sqrt x)` block engine, the naive oracle and the
//!   `tau_x` divisor identity.
//! * [`series`]: truncated series constants with rigorous tail bounds.
//! * [`exponent`]: van der Corput A/B processes over exact rationals.
//! * [`analytic`]: sawtooth approximation, twisted exponential sums,
//!   explicit inequalities and residual trend reports.

pub mod analytic;
pub mod arith;
pub mod consts;
mod error;
pub mod exponent;
pub mod floorsum;
pub mod series;
pub mod sum;

pub use arith::{ArithFnSpec, Factorization, FnKind, MemoryBudget, SieveTable, Value, ValueClass};
pub use error::{Error, Result};
pub use exponent::{BoundProfile, ExponentPair};
pub use floorsum::{FloorSumOptions, FloorSumResult, QuotientBlock, SumValue};
pub use series::{GrowthClass, Interval, SeriesConstant};

//! Exact arithmetic for the twisted denominator identities of the fake
//! monster superalgebra: truncated q-series, eta quotients, octonionic spin
//! elements, integral lattices, root multiplicities and lattice-graded
//! product expansions.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod arith;
pub mod denominator;
pub mod eta;
pub mod lattice;
pub mod multiplicity;
pub mod octonion;
pub mod series;

pub use series::{Exponent, QSeries, Rational, SeriesError};

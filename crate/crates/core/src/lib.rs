//! Exact combinatorial model of degree-`d` cycle classes on the moduli
//! space of stable rational curves.
//!
//! The quotient `Q_{d,n}` of the free space on `(d+3)`-block set partitions
//! of `[n]` by four-term relations is paired against the free space on the
//! kappa index set `K^d_n`; the crate computes both sides, the forgetful
//! maps between them, and a suite of exact rank checks relating them.
//!
//! Everything is exact rational arithmetic; the crate is `no_std` and only
//! needs `alloc`.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod chowq;
pub mod env;
pub mod exactlin;
pub mod kappa;
pub mod setcomb;
pub mod strata;
pub mod verify;

mod error;

pub use error::Error;

//! Command-line front end for `kappa-core`: output formats, a thread-safe
//! quotient cache and a parallel runner for the verification suite.

pub mod app;
pub mod io;
pub mod runner;
pub mod shared;

pub use app::run;

//! Goodness-of-fit tests built from m-fold integrated empirical processes:
//! generalized Anderson-Darling, Watson and Cramer-von Mises statistics,
//! their exact asymptotic null laws, and a Monte Carlo power harness.

pub mod cli;
pub mod error;
pub mod gofstats;
pub mod io;
pub mod mcharness;
pub mod nulldist;
pub mod numeric;
pub mod polybasis;
pub mod templates;

pub use error::{Error, Result};
pub use gofstats::{Family, TestSpec, UnitSample};

//! Numerical building blocks shared by the statistics and the null laws.

pub mod quadrature;
pub mod roots;
pub mod special;

pub use quadrature::{integrate, integrate_breaks, Integral};

//! Weight-aspect murmurations of level-1 holomorphic modular forms.
//!
//! The crate computes the averaged Hecke eigenvalue statistic over primes
//! and weights through the Eichler–Selberg trace formula, the limiting
//! measure ν by its rational-atom and Fourier forms, and the supporting
//! arithmetic (class numbers, local averages of quadratic characters, the
//! smooth window and its Fourier transform).

pub mod arith;
pub mod classnum;
pub mod compare;
pub mod error;
pub mod interval;
pub mod murmur;
pub mod nu;
pub mod numeric;
pub mod qexp;
pub mod trace;
pub mod window;

pub use error::{Error, Result};

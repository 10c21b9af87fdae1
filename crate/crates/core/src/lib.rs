pub mod coherent;
pub mod error;
pub mod exact;
pub mod gamma;
pub mod hyper;
pub mod identities;
pub mod numbers;
pub mod quad;
pub mod sampling;
pub mod suites;

pub use error::{Error, Result};
pub use numbers::{BiComplex, HBall, HOrder, Hyperbolic};

//! Hermite-Pade m-systems for germs of algebraic functions at infinity.

pub mod bigc;
pub mod cli;
pub mod coeff;
pub mod curve;
pub mod error;
pub mod expr;
pub mod gauss;
pub mod hp;
pub mod lab;
pub mod linalg;
pub mod monodromy;
pub mod germ;
pub mod poly;
pub mod recon;
pub mod roots;
pub mod series;

pub use bigc::BigComplex;
pub use coeff::{Coeff, Domain};
pub use curve::{AlgebraicCurve, GermSpec};
pub use error::{Error, Result};
pub use gauss::GaussianRational;
pub use series::TruncatedSeries;

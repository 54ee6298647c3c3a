//! Cartan covers, Bernstein exponents, Sylvester resultants and numerical
//! Weierstrass preparation for complex polynomials in one and two variables.

pub mod bernstein;
pub mod cartan;
pub mod cover2d;
pub mod curve;
pub mod error;
pub mod extrema;
pub mod family;
pub mod golden;
pub mod json;
pub mod poly;
pub mod resultant;
pub mod roots;
pub mod sampling;
pub mod svg;
pub mod weierstrass;

pub use error::{Error, Result};
pub use poly::{Ball, BivariatePoly, Disk, Point2, UnivariatePoly, C64};

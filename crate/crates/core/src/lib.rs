//! Exact computations in the (b, w) tilt plane of a polarized surface or
//! threefold: Chern lattices, central charges, walls, BMT-type inequalities,
//! stability-family parameter regions and Hilbert-polynomial invariants.

pub mod bmt;
pub mod charclass;
pub mod error;
pub mod geometry;
pub mod hilb;
pub mod poly;
pub mod quadratic;
pub mod rational;
pub mod stabfamily;
pub mod tiltplane;
pub mod walls;

pub use error::{Result, TiltError};
pub use quadratic::QuadraticNumber;
pub use rational::Rat;

//! Rigorous verification engine for the five-point energy problem on the
//! sphere: interval arithmetic, dyadic boxes, separation bounds, the energy
//! estimator, the eliminators and the depth-first search driver.

#![allow(clippy::needless_range_loop)]

pub mod bounds;
pub mod dyadic;
pub mod eliminators;
pub mod error;
pub mod estimator;
pub mod geometry;
pub mod goodset;
pub mod hexfloat;
pub mod interval;
pub mod scalar;
pub mod search;

pub use error::Fault;
pub use interval::Interval;
pub use scalar::Real;

//! Local rigidity of the triangular bi-pyramid: an interval Hessian at the
//! bi-pyramid with a certified positive-definiteness margin, and explicit
//! bounds on how far the Hessian can drift over a small neighborhood.

#![allow(clippy::needless_range_loop)]

pub mod at_tbp;
pub mod certificate;
pub mod exact;
pub mod jet;
pub mod ldlt;
pub mod poly;
pub mod reference;
pub mod regions;
pub mod variation;

pub use certificate::{certify_local_minimum, certify_with, Certificate};
pub use exact::QSqrt3;
pub use ldlt::{ldlt_certify, Ldlt, SymMatrix7};

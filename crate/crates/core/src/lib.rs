//! Quaternion-valued functions of a quaternionic variable in axial form
//! `f(q) = f1(q) e1 + f0(q) (q2 e2 + q3 e3 + q4 e4)`, numerical checks of
//! their generalized Cauchy-Riemann system and Fueter operators, and
//! validation of four-manifold atlases whose transition maps must be
//! algebraic regular.
//!
//! - [`quat`]: quaternion arithmetic over the basis `e1..e4`.
//! - [`jet`]: forward-mode first derivatives in four variables.
//! - [`axial`]: expression trees closed under sum, scaling, product,
//!   reciprocal and composition, each evaluated through its `(f0, f1)` pair.
//! - [`expr`]: the text syntax for those trees.
//! - [`gcr`]: residuals, Fueter operators, black-box extraction and verdicts.
//! - [`manifold`]: charts, atlases, and the projective line `HP1`.
//! - [`report`]: the JSON and text reports of the `regulus` binary.

// NaN must fail these guards, so they are written as negated comparisons.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::suspicious_arithmetic_impl)]

pub mod axial;
pub mod error;
pub mod expr;
pub mod gcr;
pub mod jet;
pub mod manifold;
pub mod quat;
pub mod report;
pub mod sampling;

pub use axial::{AxialPair, RegularFn};
pub use error::{Error, Result};
pub use jet::Jet4;
pub use quat::Quaternion;

//! Discrete Mayer problems for k-th order convex differential inclusions.
//!
//! The crate transcribes a problem of the form
//!
//! ```text
//! minimize f(x(0), x(T))
//!   x^(k)(t) ∈ F(x(t)),  (x^(j)(0), x^(j)(T)) ∈ S,  x(t) ∈ X(t)
//! ```
//!
//! onto a uniform grid, solves the resulting linear program, evaluates the
//! dual functional on arbitrary adjoint certificates and checks the
//! Euler–Lagrange, argmaximum and transversality conditions node by node.
//!
//! Everything is polyhedral: sets are `{x : Ax <= d}`, objectives are maxima
//! of affine functions and the set-valued maps are either linear-control
//! `F(x) = Ax + BU` or polyhedral `F(x) = {v : Ax - Ev <= d}`. Every support
//! function, conjugate and membership test is therefore an exact LP.

pub mod certify;
pub mod demo;
pub mod error;
pub mod exec;
pub mod ext_real;
pub mod functions;
pub mod geometry;
pub mod linalg;
pub mod lp;
pub mod maps;
pub mod transcription;

pub use error::{Error, Result};
pub use exec::Execution;
pub use ext_real::ExtReal;
pub use linalg::Matrix;

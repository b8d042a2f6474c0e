//! Spectra of Schrodinger operators whose coordinate winds around the
//! origin on several Riemann sheets.
//!
//! Paths live in [`complexpath`], the change of variables that unwinds them in
//! [`xform`], and the shooting and matrix solvers in [`eigensolve`].

// `!(x < y)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asympt;
pub mod complexpath;
pub mod eigensolve;
pub mod error;
pub mod exact;
pub mod exactsolv;
pub mod linalg;
pub mod odeint;
pub mod qmetric;
pub mod scalar;
pub mod susy;
pub mod xform;

pub use error::{Error, Result};

/// Complex scalar used by the f64 layers.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix over f64.
pub type CMatrix = linalg::Mat<f64>;
/// Exact gamma and l values.
pub type Ratio = num_rational::Rational64;

//! Numerical calibration toolkit for nonlocal and local variational problems.
//!
//! The library evaluates three families of energy functionals and their
//! calibrations — auxiliary functionals whose existence certifies that a
//! given extremal is a minimizer:
//!
//! * the fractional (Gagliardo) energy with a semilinear potential, driven
//!   by singular-integral quadrature for the fractional Laplacian
//!   ([`quadrature`], [`nonlocal`]),
//! * the classical local field theory with pluggable Lagrangians ([`local`]),
//! * the kernel-weighted nonlocal perimeter ([`perimeter`]).
//!
//! Extremal fields, leaf-parameter inversion, and admissibility live in
//! [`fields`]; randomized competitor generation and the property suites
//! (contact, lower bound, null-Lagrangian, one-sided) in [`verifier`].
//!
//! All quadratures use fixed-order pairwise reduction, so results are
//! bit-identical across thread counts.

pub mod error;
pub mod fields;
pub mod local;
pub mod nonlocal;
pub mod perimeter;
pub mod quadrature;
pub mod verifier;

pub use error::CalibError;

//! Generators of η-weak-pseudo-Hermitian Hamiltonians.
//!
//! Given an imaginary potential `W(x)`, its antiderivative and two real
//! constants `α`, `β`, the generator produces the real potential `V(x)`
//! and a Hermitian second-order metric `η` with `ηH = H†η` for
//! `H = −∂² + V + iW`. The crate also discretizes `H` and `η`, solves the
//! resulting dense non-Hermitian eigenproblem and ships a catalog of
//! exactly solvable models for comparison.

pub mod catalog;
pub mod eigen;
pub mod error;
pub mod expr;
pub mod generator;
pub mod matrix;
pub mod operators;

pub use catalog::CatalogEntry;
pub use eigen::{eig, eig_with, EigOptions, SpectrumReport};
pub use error::{Error, ErrorKind, Result};
pub use expr::{Expr, ParamEnv};
pub use generator::{derive, DerivedModel, GeneratorConfig, GeneratorSpec};
pub use matrix::CMatrix;
pub use num_complex::Complex64;
pub use operators::{DiscreteOperator, Grid};

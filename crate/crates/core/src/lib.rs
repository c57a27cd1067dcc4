//! Exact computations with curved dg-algebras and their dg-categories of
//! cohesive modules.

pub mod acceptance;
pub mod algebra;
pub mod amatrix;
pub mod cohesive;
pub mod dga;
pub mod error;
pub mod functors;
pub mod hom;
pub mod linalg;
pub mod models;
pub mod random;
pub mod report;
pub mod scalar;
pub mod schema;
pub mod transfer;

pub use algebra::{AElement, BasisKey, Flavor, Kernel, NcTorus, TableAlgebra};
pub use amatrix::AMatrix;
pub use cohesive::CohesiveModule;
pub use dga::{AlgebraMap, CurvedDga, DgaHom};
pub use error::{Error, Result};
pub use hom::{HomComplex, HomMorphism};
pub use linalg::{FiniteComplex, SparseMatrix, Subspace};
pub use report::{Check, ValidationReport};
pub use scalar::Scalar;

//! Nonnegative and compositional matrix factorization.

pub mod align;
pub mod ema;
pub mod error;
pub mod fcm;
pub mod fit;
pub mod geometry;
pub mod ident;
pub mod io;
pub mod lba;
pub mod linalg;
pub mod matrix;
pub mod models;
pub mod nmf;
pub mod plsa;
pub mod simplex;

pub use error::{Error, Result};
pub use fit::{FitFlag, FitResult};
pub use matrix::{CompositionMatrix, JointProbMatrix, Matrix, RowMassVector};
pub use models::{BudgetFactorization, Factorization, LcaFactorization, NmfFactorization, TransformMatrix};

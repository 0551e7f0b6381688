//! Dense exact linear algebra over a prime field.
//!
//! Vectors are rows; a [`Matrix`] with `rows × cols` entries acts on column
//! vectors of length `cols`. A [`Subspace`] keeps its basis in reduced row
//! echelon form so that equal subspaces have identical representations.

mod field;
mod matrix;
mod subspace;

pub use field::{Field, DEFAULT_PRIME};
pub use matrix::{Matrix, Rref};
pub use subspace::{apply_to_subspace, image_basis, kernel_basis, preimage, Subspace};

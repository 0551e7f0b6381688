//! Block decomposition of 3-parameter persistence modules on finite grids.
//!
//! Modules are stored cell-wise over a prime field. The crate decides
//! 3-parameter strong exactness, counts block multiplicities from the
//! image/kernel sections at each block's least point, extracts explicit block
//! submodules and checks that they form a direct sum.

pub mod blocks;
pub mod decomposer;
pub mod error;
pub mod exactness;
pub mod generator;
pub mod grid;
pub mod io;
pub mod linalg;
pub mod module;

pub use blocks::{enumerate_blocks, AxisInterval, Block, BlockClass, Cuboid, PartitionTag};
pub use decomposer::{
    axis_limits, block_sections, counting_dim, decompose, extract_submodule, tilde_module,
    tilde_split_holds, verify_direct_sum, AxisLimits, BlockSections, DecompositionReport, Entry,
    ExactModule, Submodule,
};
pub use error::{Error, Result};
pub use exactness::{
    check_strong_exactness, cube_phi_injective, cube_psi_surjective, slice_strongly_exact,
    square_exact, square_pullback_surjective, square_pushout_injective, CubeDiagram, ExactnessMode,
    ExactnessReport, SquareDiagram,
};
pub use generator::{block_module, counterexample, perturb, random_block_sum, GroundTruth};
pub use grid::{Grid, GridPoint};
pub use linalg::{Field, Matrix, Subspace};
pub use module::{GridModule, SliceModule, ValidationReport};

//! Transverse mode functions sampled on a uniform grid.

mod basis;
pub mod export;
mod grid;
mod hermite;
mod mode;

pub use basis::{
    complete_basis, complete_basis_to, gram_schmidt, gram_schmidt_indexed, BasisCompletion,
    BasisMetadata, ModeBasis, GRAM_SCHMIDT_TOL, ORTHONORMALIZED_TOL,
};
pub use grid::Grid;
pub use hermite::{
    hermite_functions, hermite_gauss_basis, hermite_gauss_orders, HERMITE_ORTHO_TOL,
    MIN_WINDOW_OVER_WAIST,
};
pub use mode::{overlap, SampledMode};

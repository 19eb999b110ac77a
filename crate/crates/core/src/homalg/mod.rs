//! Homological algebra over ℤ.

pub mod bar;
pub mod complex;
pub mod cube;
pub mod homology;
pub mod matrix;
pub mod multi;
pub mod snf;

pub use bar::{BarSystem, RhoReading};
pub use complex::{collect_terms, cone, tensor_d, ChainMap, FreeComplex, Gid, Terms};
pub use cube::Cube;
pub use homology::{
    equal_on_homology, first_non_exact, homology, homology_all, is_acyclic, is_quasi_iso, zigzag_equal_on_homology,
    HomologyRecord, HomologyVerdict, ZigZag,
};
pub use matrix::{SparseMat, SparseVec};
pub use multi::{dtimes, is_signed_permutation, u_coherence, u_iso, Convention, MultiComplex};
pub use snf::{smith, Smith};

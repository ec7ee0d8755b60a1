//! Erasure codes with hierarchical locality: finite fields, coset trees,
//! the all-symbol evaluation construction, pyramid codes, distance analysis
//! and repair.

pub mod analysis;
pub mod code;
pub mod coset_tree;
pub mod gf;
pub mod lrc;
pub mod matrix;
pub mod poly;
pub mod pyramid;
pub mod repair;

pub use code::{ErasureCode, Grouping, LocalityParams};
pub use gf::{Field, FieldConfig, FieldElement};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Field(#[from] gf::GfError),
    #[error(transparent)]
    Tree(#[from] coset_tree::TreeError),
    #[error(transparent)]
    Grouping(#[from] code::GroupingError),
    #[error(transparent)]
    Lrc(#[from] lrc::LrcError),
    #[error(transparent)]
    Pyramid(#[from] pyramid::PyramidError),
    #[error(transparent)]
    Analysis(#[from] analysis::AnalysisError),
    #[error(transparent)]
    Repair(#[from] repair::RepairError),
}

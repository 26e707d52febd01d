//! Fenchel–Nielsen data to holonomy.
//!
//! Each pair of pants gets its own upper half-plane frame; seams become
//! transition matrices between frames. [`assemble_spine`] packages the
//! result as a [`SpineGraph`].

mod mat;
mod pants;
mod spine;

pub use mat::{
    length_from_excess, length_from_trace, translation_length, Dd, DdMatrix, HolonomyMatrix, Isometry, IsometryKind,
    TRACE_TOL,
};
pub use pants::{cuff_distance_cosh, pants_holonomy, PantsFrame};
pub use spine::{assemble_spine, EdgeKind, Precision, SpineEdge, SpineGraph};

#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum HolonomyError {
    #[error("cuff length must be positive, got {0}")]
    NonPositiveLength(f64),
    #[error("expected a hyperbolic element")]
    NotHyperbolic,
    #[error("degenerate pants geometry")]
    Degenerate,
    #[error("surface failed validation: {}", .0.join("; "))]
    InvalidSurface(Vec<String>),
    #[error("seams carry monodromy labels but no group was given")]
    MissingGroup,
    #[error("label {0} is not a group element")]
    LabelOutOfRange(usize),
    #[error("edge {0} does not exist")]
    UnknownEdge(usize),
    #[error("path breaks at position {0}")]
    NotConsecutive(usize),
    #[error("coset space belongs to a different group")]
    GroupMismatch,
}

pub type Result<T, E = HolonomyError> = std::result::Result<T, E>;

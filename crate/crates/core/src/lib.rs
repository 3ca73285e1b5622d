//! Exact computations with generalized flags in V = ⊕_{i≥1} Q·e_i.
//!
//! A generalized flag is a chain of subspaces of V in which every member has
//! an immediate successor and an immediate predecessor, and every nonzero
//! vector of V sits in exactly one successor/predecessor gap.  This crate
//! represents such chains finitely (a finite basis modification of the
//! standard basis plus an eventually-periodic labeling of basis indices) and
//! implements the operations that make the classical theory computable:
//! normalization of chains, commensurability of flags, finite-level
//! truncations and their embeddings, isotropic flags for a symmetric or
//! symplectic form, big-cell coordinates, and Picard-group bookkeeping.
//!
//! All arithmetic is exact over Q; nothing here floats.

pub mod commens;
pub mod fixtures;
pub mod flags;
pub mod isotropic;
pub mod labels;
pub mod linalg;
pub mod picard;
pub mod tower;

pub use commens::{commensurable, commensurable_oracle, flags_equal, CommDecision, CommWitness};
pub use isotropic::{
    embed_step_isotropic, form_eval, isotropic_gram_schmidt, mapping_element_isotropic,
    perp_truncated, truncate_isotropic, validate_isotropic, FormKind, IsoCheck, IsoColoring,
    IsoElement, IsotropicFlagSpec,
};
pub use flags::{
    compatible_basis_finite, dual, flag_of_chain, flag_of_spec_chain, induced_chain, is_flag,
    is_maximal, partition_class, reconstruct_check, validate_spec, BasisSpec, ChainSpec,
    GeneralizedFlagSpec, IndexSet, MembershipProfile, ValidationReport,
};
pub use labels::{calkin_wilf, calkin_wilf_inverse, AffineLabel, Coloring, PositionLabel, TailRule};
pub use linalg::{Matrix, Scalar, Vector};
pub use picard::{
    is_projective, is_projective_isotropic, is_very_ample, kernel_check, kernel_check_isotropic,
    pic_add, pic_presentation, pic_presentation_isotropic, restrict_pic, transition_det,
    validate_pic, very_ample_witness, weight_at, PicElement, PicPresentation, TailWeights,
    WeightRule,
};
pub use tower::{
    big_cell_coords, cell_apply, embed_step, find_covering_cell, lift, mapping_element,
    stabilizer_dim, truncate, CellCoords, CellMap, CellMembership, EmbedReport, FiniteFlag,
    GroupElement,
};

/// Everything that can go wrong below the CLI layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Determinant of a non-square matrix was requested.
    NonSquare { rows: usize, cols: usize },
    /// A basis replacement block is not invertible.
    SingularBasis,
    /// Two tail residue classes of a coloring produce the same label at
    /// distinct indices without being merged constant classes.
    LabelCollision(String),
    /// Chain members are not totally ordered by inclusion (or not distinct).
    NotAChain,
    /// The zero vector was passed where a nonzero one is required.
    ZeroVector,
    /// A family that must be linearly independent is not.
    NotIndependent,
    /// An operation that requires the basis to be untouched got a modified one.
    NontrivialBasis,
    /// A truncation level does not cover the spec's window and basis block.
    LevelTooSmall { required: usize, got: usize },
    /// A finite flag does not have the expected type at the given level.
    TypeMismatch(String),
    /// The two flags are not E-commensurable.
    Incommensurable,
    /// A prefix fed to the isotropic orthogonalization is degenerate for the
    /// form (no partner with nonzero pairing exists).
    DegeneratePrefix,
    /// The requested isotropic normalization needs a square root that does
    /// not exist in Q.
    FieldObstruction,
    /// The cited position is not visible at the given truncation level.
    PositionInvisible,
    /// The orbit of the form-preserving group misses the target flag: every
    /// form-preserving map between the two flags has determinant -1 and the
    /// flags leave no room to correct the sign.
    DeterminantObstruction,
    /// Catch-all for structurally invalid specs (bad modulus, weight rule on
    /// a merged class disagreeing, ...).
    InvalidSpec(String),
}

impl std::fmt::Display for Error {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Error::NonSquare { rows, cols } => {
                write!(f, "determinant of a non-square {rows}x{cols} matrix")
            }
            Error::SingularBasis => write!(f, "basis replacement block is singular"),
            Error::LabelCollision(d) => write!(f, "tail label collision: {d}"),
            Error::NotAChain => write!(f, "members are not a chain under inclusion"),
            Error::ZeroVector => write!(f, "zero vector not allowed here"),
            Error::NotIndependent => write!(f, "family is linearly dependent"),
            Error::NontrivialBasis => write!(f, "operation requires the standard basis"),
            Error::LevelTooSmall { required, got } => {
                write!(f, "level {got} too small, need at least {required}")
            }
            Error::TypeMismatch(d) => write!(f, "finite flag type mismatch: {d}"),
            Error::Incommensurable => write!(f, "flags are not commensurable"),
            Error::DegeneratePrefix => write!(f, "degenerate prefix for the form"),
            Error::FieldObstruction => {
                write!(f, "normalization needs a square root missing from Q")
            }
            Error::PositionInvisible => write!(f, "position not visible at this level"),
            Error::DeterminantObstruction => {
                write!(f, "no determinant-one form-preserving map exists")
            }
            Error::InvalidSpec(d) => write!(f, "invalid spec: {d}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;

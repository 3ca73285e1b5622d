//! Exact linear algebra over Q: arbitrary-precision rationals, finitely
//! supported coordinate vectors indexed by integer slots, and the elimination
//! routines (rank, determinant, span operations, window intersection) that
//! every other module reduces to.

mod elim;
mod matrix;
mod scalar;
mod vector;

pub use elim::{
    express_in, extend_independent, in_span, intersect_slots, intersect_window, rank,
    solve_homogeneous, solve_linear, span_eq, span_intersect, sum_spans, Echelon,
};
pub use matrix::Matrix;
pub use scalar::Scalar;
pub use vector::Vector;

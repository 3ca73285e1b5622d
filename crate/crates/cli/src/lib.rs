//! Command-line front end for genflag-core.
//!
//! Documents live in `.flag` files, one named object per file: a flag, a
//! chain, an isotropic flag, or a Picard element.  Printing a parsed
//! document reproduces the normal form byte for byte, so files are stable
//! under round trips.

pub mod document;
pub mod parser;
pub mod report;

pub use document::{print_spec, SpecDocument};
pub use parser::{parse_spec, parse_vector_expr, CliError};
pub use report::{run, Cli, Command, Failure, Outcome};

//! Graph-structured types and terms: fragment validation, correspondences,
//! the well-formedness criterion, let-binding inlining, equality up to
//! relabeling, type formers, and codecs for common data structures.

pub mod check;
pub mod cograph;
pub mod corpus;
pub mod correspondence;
pub mod diag;
pub mod dot;
pub mod encodings;
pub mod equality;
pub mod error;
pub mod model;
pub mod rewrite;
pub mod textio;
pub mod types;
pub mod validate;
pub mod wellformed;

pub use check::{check, check_bundle, Report, Stage};
pub use diag::{Diagnostic, Rule};
pub use dot::export_dot;
pub use equality::{bare_equal, t_equal, types_isomorphic, Relabeling};
pub use error::{Error, Result};
pub use model::{
    Bundle, Class, ComponentId, Correspondence, FieldDescriptor, Id, Kind, Namespace, Polarity, Relation, TermGraph,
    TermIndex, TypeGraph,
};
pub use rewrite::{inline, list_redexes, normalize, reduce_step, RewriteResult, Strategy, TraceStep};
pub use types::{bowtie, dual, juxtapose, translate, FunctionalType};
pub use wellformed::{build_fw, check_well_formed, FwGraph};

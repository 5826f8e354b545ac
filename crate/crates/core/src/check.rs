//! The full checking pipeline for a bundle: fragment validation, then
//! correspondences and coverage, then well-formedness. A stage runs only when
//! every earlier stage is clean.

use crate::correspondence::{
    check_correspondence, check_external, check_let_correspondences, check_total_coverage, check_wire_labels,
};
use crate::diag::{finish, Diagnostic, Rule};
use crate::model::{Bundle, Correspondence, TermGraph, TypeGraph};
use crate::validate::{validate_term_fragment, validate_type_fragment};
use crate::wellformed::check_well_formed_with_cap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Structure,
    Correspondence,
    WellFormedness,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub diagnostics: Vec<Diagnostic>,
    /// The stage that produced the diagnostics, if any.
    pub failed_at: Option<Stage>,
}

impl Report {
    pub fn is_ok(&self) -> bool {
        self.diagnostics.is_empty()
    }

    pub fn resource_limited(&self) -> bool {
        self.diagnostics.iter().any(|d| d.rule == Rule::ResourceLimit)
    }
}

pub fn check_bundle(ty: &TypeGraph, t: &TermGraph, c: &Correspondence) -> Vec<Diagnostic> {
    run(ty, t, c, crate::wellformed::DEFAULT_STEP_CAP).diagnostics
}

pub fn check(b: &Bundle) -> Report {
    run(&b.ty, &b.term, &b.external, crate::wellformed::DEFAULT_STEP_CAP)
}

pub fn run(ty: &TypeGraph, t: &TermGraph, c: &Correspondence, cap: usize) -> Report {
    let mut diags = validate_type_fragment(ty);
    diags.extend(validate_term_fragment(t));
    if ty.roots().len() != 1 {
        diags.push(Diagnostic::new(Rule::ExternalRoot, ty.roots(), "the type must have exactly one root interface"));
    }
    if !diags.is_empty() {
        return Report { diagnostics: finish(diags), failed_at: Some(Stage::Structure) };
    }
    let mut diags = check_correspondence(c, t, ty);
    diags.extend(check_let_correspondences(t));
    diags.extend(check_external(c, t, ty));
    diags.extend(check_total_coverage(c, t));
    diags.extend(check_wire_labels(c, t, ty));
    if !diags.is_empty() {
        return Report { diagnostics: finish(diags), failed_at: Some(Stage::Correspondence) };
    }
    let diags = check_well_formed_with_cap(ty, t, c, cap);
    let failed_at = (!diags.is_empty()).then_some(Stage::WellFormedness);
    Report { diagnostics: diags, failed_at }
}

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::Id;

/// Every condition the checkers can report, one variant per rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    // fragment graphs
    DuplicateId,
    RelationNamespace,
    ResidenceMissing,
    ResidenceMultiple,
    ResidenceCycle,
    CtorInterfaceNotConstructor,
    CtorInterfaceNotOneToOne,
    CtorInterfaceLevel,
    ConnectivityIrreflexive,
    ConnectivityCrossInterface,
    ConnectivityNotCograph,
    AttachmentMissing,
    AttachmentMultiple,
    AttachmentBox,
    LetPorts,
    ResourceWiringClass,
    ResourceWiringBox,
    ResourceWiringNotBijective,
    CtorWiringClass,
    CtorWiringBox,
    CtorArgumentClass,
    CtorArgumentBox,
    CtorArgumentNotBijective,
    CtorUsageClass,
    CtorUsageMissing,
    CtorUsageMultiple,
    CtorUsageScope,
    NotWireSafe,
    DescentCycle,
    LetTypingNotBijective,
    LetCorrespondenceUnknownLet,
    // correspondences
    CorrNamespace,
    CorrNotFunctional,
    CorrBijection,
    CorrConstructorTarget,
    CorrKind,
    CorrPolarity,
    CorrLetPort,
    LetBodyUncovered,
    LetOccurrenceUncovered,
    LetFragmentOverlap,
    ExternalRoot,
    #[serde(rename = "overlaps-RDC")]
    OverlapsRdc,
    BoxUncovered,
    NodeUncovered,
    PortUncovered,
    CoveredTwice,
    WireLabelMismatch,
    // well-formedness
    MissingField,
    ChordlessCycle,
    ResourceLimit,
}

impl Rule {
    pub fn is_well_formedness(self) -> bool {
        matches!(self, Rule::MissingField | Rule::ChordlessCycle | Rule::ResourceLimit)
    }

    pub fn as_str(self) -> &'static str {
        use Rule::*;
        match self {
            DuplicateId => "duplicate-id",
            RelationNamespace => "relation-namespace",
            ResidenceMissing => "residence-missing",
            ResidenceMultiple => "residence-multiple",
            ResidenceCycle => "residence-cycle",
            CtorInterfaceNotConstructor => "ctor-interface-not-constructor",
            CtorInterfaceNotOneToOne => "ctor-interface-not-one-to-one",
            CtorInterfaceLevel => "ctor-interface-level",
            ConnectivityIrreflexive => "connectivity-irreflexive",
            ConnectivityCrossInterface => "connectivity-cross-interface",
            ConnectivityNotCograph => "connectivity-not-cograph",
            AttachmentMissing => "attachment-missing",
            AttachmentMultiple => "attachment-multiple",
            AttachmentBox => "attachment-box",
            LetPorts => "let-ports",
            ResourceWiringClass => "resource-wiring-class",
            ResourceWiringBox => "resource-wiring-box",
            ResourceWiringNotBijective => "resource-wiring-not-bijective",
            CtorWiringClass => "ctor-wiring-class",
            CtorWiringBox => "ctor-wiring-box",
            CtorArgumentClass => "ctor-argument-class",
            CtorArgumentBox => "ctor-argument-box",
            CtorArgumentNotBijective => "ctor-argument-not-bijective",
            CtorUsageClass => "ctor-usage-class",
            CtorUsageMissing => "ctor-usage-missing",
            CtorUsageMultiple => "ctor-usage-multiple",
            CtorUsageScope => "ctor-usage-scope",
            NotWireSafe => "not-wire-safe",
            DescentCycle => "descent-cycle",
            LetTypingNotBijective => "let-typing-not-bijective",
            LetCorrespondenceUnknownLet => "let-correspondence-unknown-let",
            CorrNamespace => "corr-namespace",
            CorrNotFunctional => "corr-not-functional",
            CorrBijection => "corr-bijection",
            CorrConstructorTarget => "corr-constructor-target",
            CorrKind => "corr-kind",
            CorrPolarity => "corr-polarity",
            CorrLetPort => "corr-let-port",
            LetBodyUncovered => "let-body-uncovered",
            LetOccurrenceUncovered => "let-occurrence-uncovered",
            LetFragmentOverlap => "let-fragment-overlap",
            ExternalRoot => "external-root",
            OverlapsRdc => "overlaps-RDC",
            BoxUncovered => "box-uncovered",
            NodeUncovered => "node-uncovered",
            PortUncovered => "port-uncovered",
            CoveredTwice => "covered-twice",
            WireLabelMismatch => "wire-label-mismatch",
            MissingField => "missing-field",
            ChordlessCycle => "chordless-cycle",
            ResourceLimit => "resource-limit",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub rule: Rule,
    pub components: Vec<Id>,
    pub message: String,
}

impl Diagnostic {
    pub fn new(rule: Rule, components: Vec<Id>, message: impl Into<String>) -> Self {
        Diagnostic { rule, components, message: message.into() }
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({
            "rule": self.rule.as_str(),
            "components": self.components.iter().map(Id::as_str).collect::<Vec<_>>(),
            "message": self.message,
        })
        .to_string()
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.rule, self.message)?;
        if !self.components.is_empty() {
            let names: Vec<&str> = self.components.iter().map(Id::as_str).collect();
            write!(f, " [{}]", names.join(", "))?;
        }
        Ok(())
    }
}

/// Sorts by rule id then component ids and drops exact duplicates.
pub fn finish(mut diags: Vec<Diagnostic>) -> Vec<Diagnostic> {
    diags.sort_by(|a, b| {
        (a.rule.as_str(), &a.components, &a.message).cmp(&(b.rule.as_str(), &b.components, &b.message))
    });
    diags.dedup();
    diags
}

/// Collects diagnostics while a checker runs.
#[derive(Default)]
pub(crate) struct Sink {
    pub diags: Vec<Diagnostic>,
}

impl Sink {
    pub fn push(&mut self, rule: Rule, components: Vec<Id>, message: impl Into<String>) {
        self.diags.push(Diagnostic::new(rule, components, message));
    }

    pub fn finish(self) -> Vec<Diagnostic> {
        finish(self.diags)
    }
}

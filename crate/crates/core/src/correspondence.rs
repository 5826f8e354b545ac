//! Correspondence checks: plain correspondences, the per-let-binding
//! correspondences stored in the term, external correspondences, and the
//! coverage of every term component by `C ∪ R_DC`.

use std::collections::{BTreeMap, BTreeSet};

use crate::diag::{Diagnostic, Rule, Sink};
use crate::model::{Correspondence, Id, Kind, Namespace, TermGraph, TermIndex, TypeGraph};

pub fn check_correspondence(c: &Correspondence, t: &TermGraph, ty: &TypeGraph) -> Vec<Diagnostic> {
    let ix = TermIndex::new(t);
    let mut s = Sink::default();
    correspondence_checks(c, t, &ix, ty, &mut s);
    s.finish()
}

fn correspondence_checks(c: &Correspondence, t: &TermGraph, ix: &TermIndex, ty: &TypeGraph, s: &mut Sink) {
    let mut map: BTreeMap<&Id, &Id> = BTreeMap::new();
    for (x, y) in &c.pairs {
        let ok = match t.namespace_of(x) {
            Some(Namespace::Box | Namespace::Node) => ty.interfaces.contains(y),
            Some(Namespace::Port) => ty.fields.contains_key(y),
            _ => false,
        };
        if !ok {
            s.push(
                Rule::CorrNamespace,
                vec![x.clone(), y.clone()],
                "boxes and nodes map to interfaces, ports to fields",
            );
            continue;
        }
        if let Some(prev) = map.insert(x, y) {
            s.push(
                Rule::CorrNotFunctional,
                vec![x.clone(), prev.clone(), y.clone()],
                format!("{x} corresponds to more than one type component"),
            );
        }
    }

    for (x, y) in &map {
        if t.ports.contains_key(*x) {
            if let Some(o) = ix.owner.get(*x) {
                if t.lets.contains(o) {
                    s.push(
                        Rule::CorrLetPort,
                        vec![(*x).clone()],
                        format!("{x} is attached to let-binding {o} and must not correspond to a field"),
                    );
                }
            }
            continue;
        }
        // (1) bijection between attached ports and the interface's fields
        let fields: BTreeSet<&Id> = ty.fields_of(y).collect();
        let mut hit: BTreeMap<&Id, Vec<&Id>> = BTreeMap::new();
        let mut bad: Vec<Id> = Vec::new();
        for p in ix.attached_to(x) {
            match map.get(p) {
                Some(f) if fields.contains(*f) => hit.entry(*f).or_default().push(p),
                _ => bad.push(p.clone()),
            }
        }
        for (f, ps) in &hit {
            if ps.len() > 1 {
                bad.push((*f).clone());
                bad.extend(ps.iter().map(|p| (*p).clone()));
            }
        }
        for f in &fields {
            if !hit.contains_key(*f) {
                bad.push((*f).clone());
            }
        }
        if !bad.is_empty() {
            bad.sort();
            bad.dedup();
            let mut comps = vec![(*x).clone(), (*y).clone()];
            comps.extend(bad);
            s.push(
                Rule::CorrBijection,
                comps,
                format!("ports attached to {x} do not correspond bijectively to the fields of {y}"),
            );
        }
    }

    for (p, f) in &map {
        let (Some(pc), Some(fd)) = (t.ports.get(*p), ty.fields.get(*f)) else { continue };
        // (3) kinds
        if pc.kind != fd.class.kind {
            s.push(Rule::CorrKind, vec![(*p).clone(), (*f).clone()], "constructor/resource kind mismatch");
        }
        // (4) polarity: same on nodes, flipped on boxes
        if let Some(o) = ix.owner.get(*p) {
            let expected = match t.namespace_of(o) {
                Some(Namespace::Node) => Some(fd.class.polarity),
                Some(Namespace::Box) => Some(fd.class.polarity.flip()),
                _ => None,
            };
            if expected.is_some_and(|e| e != pc.polarity) {
                s.push(
                    Rule::CorrPolarity,
                    vec![(*p).clone(), (*f).clone()],
                    format!("polarity of {p} does not match {f} for a port attached to {o}"),
                );
            }
        }
        // (2) argument boxes and constructed nodes follow the field's interface
        if pc.kind == Kind::Constructor && fd.class.kind == Kind::Constructor {
            let Some(iface) = ty.interface_of_field(f) else { continue };
            let mut related: Vec<&Id> = Vec::new();
            if let Some(b) = ix.arg_box.get(*p) {
                related.push(b);
            }
            related.extend(ix.constructed_by(p));
            for r in related {
                if map.get(r) != Some(&iface) {
                    s.push(
                        Rule::CorrConstructorTarget,
                        vec![(*p).clone(), (*f).clone(), r.clone()],
                        format!("{r} must correspond to {iface}, the interface of {f}"),
                    );
                }
            }
        }
    }
}

pub fn check_let_correspondences(t: &TermGraph) -> Vec<Diagnostic> {
    let ix = TermIndex::new(t);
    let mut s = Sink::default();
    let empty = Correspondence::new();
    let mut owner_of: BTreeMap<&Id, &Id> = BTreeMap::new();
    for d in &t.lets {
        let frag = t.let_correspondence.get(d).unwrap_or(&empty);
        correspondence_checks(frag, t, &ix, &t.internal, &mut s);
        let Some(iface) = ix.let_iface.get(d) else { continue };
        let (recv, prov) = ix.let_ports(t, d);
        if let Some(body) = recv.as_ref().and_then(|r| ix.arg_box.get(r)) {
            if frag.target(body) != Some(iface) {
                s.push(
                    Rule::LetBodyUncovered,
                    vec![d.clone(), body.clone(), iface.clone()],
                    format!("body {body} of {d} must correspond to {iface} in its fragment"),
                );
            }
        }
        if let Some(prov) = prov {
            for n in ix.constructed_by(&prov) {
                if frag.target(n) != Some(iface) {
                    s.push(
                        Rule::LetOccurrenceUncovered,
                        vec![d.clone(), n.clone(), iface.clone()],
                        format!("occurrence {n} of {d} must correspond to {iface} in its fragment"),
                    );
                }
            }
        }
    }
    for (d, frag) in &t.let_correspondence {
        for x in frag.terms() {
            if let Some(prev) = owner_of.insert(x, d) {
                if prev != d {
                    s.push(
                        Rule::LetFragmentOverlap,
                        vec![x.clone(), prev.clone(), d.clone()],
                        format!("{x} is covered by the fragments of both {prev} and {d}"),
                    );
                }
            }
        }
    }
    s.finish()
}

pub fn check_external(c: &Correspondence, t: &TermGraph, ty: &TypeGraph) -> Vec<Diagnostic> {
    let mut s = Sink::default();
    match (t.root_box(), ty.root()) {
        (Some(rb), Some(ri)) => {
            if c.target(&rb) != Some(&ri) {
                s.push(Rule::ExternalRoot, vec![rb.clone(), ri.clone()], format!("{rb} must correspond to {ri}"));
            }
        }
        _ => s.push(Rule::ExternalRoot, vec![], "term and type must each have a single root"),
    }
    let rdc = t.let_correspondence_union();
    let rdc_terms: BTreeSet<&Id> = rdc.terms().collect();
    for x in c.terms() {
        if rdc_terms.contains(x) {
            s.push(Rule::OverlapsRdc, vec![x.clone()], format!("{x} is also covered by a let-binding fragment"));
        }
    }
    s.finish()
}

pub fn check_total_coverage(c: &Correspondence, t: &TermGraph) -> Vec<Diagnostic> {
    let ix = TermIndex::new(t);
    let mut s = Sink::default();
    let mut count: BTreeMap<&Id, usize> = BTreeMap::new();
    for x in c.terms().chain(t.let_correspondence.values().flat_map(|f| f.terms())) {
        *count.entry(x).or_default() += 1;
    }
    let n = |x: &Id| count.get(x).copied().unwrap_or(0);
    for b in &t.boxes {
        match n(b) {
            0 => s.push(Rule::BoxUncovered, vec![b.clone()], format!("box-uncovered: {b}")),
            1 => {}
            _ => s.push(Rule::CoveredTwice, vec![b.clone()], format!("{b} occurs more than once")),
        }
    }
    for x in &t.nodes {
        match n(x) {
            0 => s.push(Rule::NodeUncovered, vec![x.clone()], format!("node-uncovered: {x}")),
            1 => {}
            _ => s.push(Rule::CoveredTwice, vec![x.clone()], format!("{x} occurs more than once")),
        }
    }
    for p in t.ports.keys() {
        let on_let = ix.owner.get(p).is_some_and(|o| t.lets.contains(o));
        match (on_let, n(p)) {
            (true, 0) | (false, 1) => {}
            (true, _) => s.push(Rule::CorrLetPort, vec![p.clone()], format!("{p} is attached to a let-binding")),
            (false, 0) => s.push(Rule::PortUncovered, vec![p.clone()], format!("port-uncovered: {p}")),
            (false, _) => s.push(Rule::CoveredTwice, vec![p.clone()], format!("{p} occurs more than once")),
        }
    }
    s.finish()
}

/// Resource wires must connect ports whose fields carry the same primitive.
pub fn check_wire_labels(c: &Correspondence, t: &TermGraph, ty: &TypeGraph) -> Vec<Diagnostic> {
    let mut s = Sink::default();
    let rdc = t.let_correspondence_union();
    let label = |p: &Id| -> Option<String> {
        if let Some(f) = c.target(p) {
            return ty.fields.get(f).and_then(|d| d.effective_label().map(str::to_owned));
        }
        let f = rdc.target(p)?;
        t.internal.fields.get(f).and_then(|d| d.effective_label().map(str::to_owned))
    };
    for (a, b) in &t.resource_wiring {
        if let (Some(la), Some(lb)) = (label(a), label(b)) {
            if la != lb {
                s.push(
                    Rule::WireLabelMismatch,
                    vec![a.clone(), b.clone()],
                    format!("wire joins a {la} port to a {lb} port"),
                );
            }
        }
    }
    s.finish()
}

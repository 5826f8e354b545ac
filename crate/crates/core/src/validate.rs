//! Structural validation of fragment graphs, the root predicates, and the
//! descent forest.

use std::collections::{BTreeMap, BTreeSet};

use crate::cograph::{find_induced_p4, SmallGraph};
use crate::diag::{Diagnostic, Rule, Sink};
use crate::error::{Error, Result};
use crate::model::{Class, Id, Kind, Namespace, TermGraph, TermIndex, TypeGraph};

pub fn validate_type_fragment(g: &TypeGraph) -> Vec<Diagnostic> {
    let mut sink = Sink::default();
    type_checks(g, &mut sink);
    sink.finish()
}

fn type_checks(g: &TypeGraph, s: &mut Sink) {
    for i in &g.interfaces {
        if g.fields.contains_key(i) {
            s.push(Rule::DuplicateId, vec![i.clone()], "id is both an interface and a field");
        }
    }

    let mut parents: BTreeMap<&Id, Vec<&Id>> = BTreeMap::new();
    for (p, c) in &g.residence {
        if !g.interfaces.contains(p) || !g.contains(c) {
            s.push(
                Rule::RelationNamespace,
                vec![p.clone(), c.clone()],
                "R_R pairs must be (interface, interface-or-field)",
            );
            continue;
        }
        parents.entry(c).or_default().push(p);
    }
    for f in g.fields.keys() {
        match parents.get(f).map_or(0, Vec::len) {
            0 => s.push(Rule::ResidenceMissing, vec![f.clone()], "field resides in no interface"),
            1 => {}
            _ => s.push(Rule::ResidenceMultiple, vec![f.clone()], "field resides in several interfaces"),
        }
    }
    for i in &g.interfaces {
        if parents.get(i).map_or(0, Vec::len) > 1 {
            s.push(Rule::ResidenceMultiple, vec![i.clone()], "interface resides in several interfaces");
        }
    }
    let parent: BTreeMap<&Id, &Id> = parents.iter().map(|(c, ps)| (*c, ps[0])).collect();
    for cycle in parent_cycles(g.interfaces.iter(), &parent) {
        s.push(Rule::ResidenceCycle, cycle, "interface residence is cyclic");
    }

    let mut by_field: BTreeMap<&Id, usize> = BTreeMap::new();
    let mut by_iface: BTreeMap<&Id, usize> = BTreeMap::new();
    for (f, i) in &g.ctor_interface {
        let Some(desc) = g.fields.get(f) else {
            s.push(Rule::RelationNamespace, vec![f.clone(), i.clone()], "R_I pairs must be (field, interface)");
            continue;
        };
        if !g.interfaces.contains(i) {
            s.push(Rule::RelationNamespace, vec![f.clone(), i.clone()], "R_I pairs must be (field, interface)");
            continue;
        }
        if desc.class.kind != Kind::Constructor {
            s.push(
                Rule::CtorInterfaceNotConstructor,
                vec![f.clone(), i.clone()],
                "only constructor fields may be associated with an interface",
            );
        }
        if parent.get(f) != parent.get(i) || !parent.contains_key(i) {
            s.push(
                Rule::CtorInterfaceLevel,
                vec![f.clone(), i.clone()],
                "associated interface must reside directly in the field's interface",
            );
        }
        *by_field.entry(f).or_default() += 1;
        *by_iface.entry(i).or_default() += 1;
    }
    for (f, d) in &g.fields {
        if d.class.kind == Kind::Constructor && by_field.get(f).copied().unwrap_or(0) != 1 {
            s.push(
                Rule::CtorInterfaceNotOneToOne,
                vec![f.clone()],
                "constructor field must be associated with exactly one interface",
            );
        }
    }
    for i in &g.interfaces {
        if parent.contains_key(i) && by_iface.get(i).copied().unwrap_or(0) != 1 {
            s.push(
                Rule::CtorInterfaceNotOneToOne,
                vec![i.clone()],
                "nested interface must be associated with exactly one constructor field",
            );
        }
    }

    let mut per_iface: BTreeMap<&Id, Vec<(&Id, &Id)>> = BTreeMap::new();
    for (a, b) in &g.connectivity {
        if !g.fields.contains_key(a) || !g.fields.contains_key(b) {
            s.push(Rule::RelationNamespace, vec![a.clone(), b.clone()], "R_C relates fields only");
            continue;
        }
        if a == b {
            s.push(Rule::ConnectivityIrreflexive, vec![a.clone()], "connectivity must be irreflexive");
            continue;
        }
        match (parent.get(a), parent.get(b)) {
            (Some(pa), Some(pb)) if pa == pb => per_iface.entry(pa).or_default().push((a, b)),
            _ => s.push(
                Rule::ConnectivityCrossInterface,
                vec![a.clone(), b.clone()],
                "connected fields must reside in the same interface",
            ),
        }
    }
    for (iface, edges) in per_iface {
        let fields: Vec<&Id> = g.fields_of(iface).collect();
        let index: BTreeMap<&Id, usize> = fields.iter().enumerate().map(|(k, f)| (*f, k)).collect();
        let graph = SmallGraph::from_edges(
            fields.len(),
            edges.iter().filter_map(|(a, b)| Some((*index.get(a)?, *index.get(b)?))),
        );
        if let Some(p4) = find_induced_p4(&graph) {
            let mut comps = vec![iface.clone()];
            comps.extend(p4.iter().map(|k| fields[*k].clone()));
            s.push(
                Rule::ConnectivityNotCograph,
                comps,
                format!("connectivity of {iface} contains an induced path on four fields"),
            );
        }
    }
}

/// Finds cycles in a parent map, each reported once as its sorted members.
fn parent_cycles<'a>(starts: impl Iterator<Item = &'a Id>, parent: &BTreeMap<&'a Id, &'a Id>) -> Vec<Vec<Id>> {
    let mut found: BTreeSet<Vec<Id>> = BTreeSet::new();
    let mut done: BTreeSet<&Id> = BTreeSet::new();
    for start in starts {
        let mut path: Vec<&Id> = Vec::new();
        let mut on_path: BTreeSet<&Id> = BTreeSet::new();
        let mut cur = Some(start);
        while let Some(c) = cur {
            if done.contains(c) {
                break;
            }
            if on_path.contains(c) {
                let pos = path.iter().position(|x| *x == c).unwrap();
                let mut cyc: Vec<Id> = path[pos..].iter().map(|x| (*x).clone()).collect();
                cyc.sort();
                found.insert(cyc);
                break;
            }
            on_path.insert(c);
            path.push(c);
            cur = parent.get(c).copied();
        }
        done.extend(path);
    }
    found.into_iter().collect()
}

pub fn validate_term_fragment(t: &TermGraph) -> Vec<Diagnostic> {
    let mut s = Sink::default();
    type_checks(&t.internal, &mut s);
    term_checks(t, &mut s);
    s.finish()
}

fn term_checks(t: &TermGraph, s: &mut Sink) {
    let sets: [(&str, Vec<&Id>); 4] = [
        ("box", t.boxes.iter().collect()),
        ("node", t.nodes.iter().collect()),
        ("port", t.ports.keys().collect()),
        ("let-binding", t.lets.iter().collect()),
    ];
    let mut seen: BTreeMap<&Id, &str> = BTreeMap::new();
    for (name, ids) in &sets {
        for id in ids {
            if let Some(prev) = seen.insert(id, name) {
                s.push(Rule::DuplicateId, vec![(*id).clone()], format!("id is both a {prev} and a {name}"));
            }
        }
    }
    let ns = |id: &Id| t.namespace_of(id);
    let port_class = |id: &Id| t.ports.get(id).copied();

    // residence
    let mut parents: BTreeMap<&Id, Vec<&Id>> = BTreeMap::new();
    for (p, c) in &t.residence {
        if ns(p) != Some(Namespace::Box) || ns(c).is_none() {
            s.push(Rule::RelationNamespace, vec![p.clone(), c.clone()], "R_R pairs must be (box, component)");
            continue;
        }
        parents.entry(c).or_default().push(p);
    }
    for id in t.nodes.iter().chain(t.ports.keys()).chain(t.lets.iter()) {
        match parents.get(id).map_or(0, Vec::len) {
            0 => s.push(Rule::ResidenceMissing, vec![id.clone()], "component resides in no box"),
            1 => {}
            _ => s.push(Rule::ResidenceMultiple, vec![id.clone()], "component resides in several boxes"),
        }
    }
    for b in &t.boxes {
        if parents.get(b).map_or(0, Vec::len) > 1 {
            s.push(Rule::ResidenceMultiple, vec![b.clone()], "box resides in several boxes");
        }
    }
    let parent: BTreeMap<&Id, &Id> = parents.iter().map(|(c, ps)| (*c, ps[0])).collect();
    let box_cycles = parent_cycles(t.boxes.iter(), &parent);
    let cyclic_boxes: BTreeSet<Id> = box_cycles.iter().flatten().cloned().collect();
    for cycle in box_cycles {
        s.push(Rule::ResidenceCycle, cycle, "box residence is cyclic");
    }
    let box_of = |id: &Id| parent.get(id).copied();
    let within = |inner: &Id, outer: &Id| -> bool {
        let mut cur = Some(inner);
        let mut steps = 0;
        while let Some(b) = cur {
            if b == outer {
                return true;
            }
            steps += 1;
            if steps > t.boxes.len() + 1 {
                return false;
            }
            cur = box_of(b);
        }
        false
    };

    // attachment
    let mut owners: BTreeMap<&Id, Vec<&Id>> = BTreeMap::new();
    for (o, p) in &t.attachment {
        let ok_owner = matches!(ns(o), Some(Namespace::Box | Namespace::Node | Namespace::LetBinding));
        if !ok_owner || ns(p) != Some(Namespace::Port) {
            s.push(Rule::RelationNamespace, vec![o.clone(), p.clone()], "R_A pairs must be (box|node|let, port)");
            continue;
        }
        owners.entry(p).or_default().push(o);
        let same_box = if ns(o) == Some(Namespace::Box) {
            box_of(p) == Some(o)
        } else {
            box_of(p).is_some() && box_of(p) == box_of(o)
        };
        if !same_box {
            s.push(
                Rule::AttachmentBox,
                vec![o.clone(), p.clone()],
                "port must reside in the box of its owner (or in the box it is attached to)",
            );
        }
    }
    for p in t.ports.keys() {
        match owners.get(p).map_or(0, Vec::len) {
            0 => s.push(Rule::AttachmentMissing, vec![p.clone()], "port is attached to nothing"),
            1 => {}
            _ => s.push(Rule::AttachmentMultiple, vec![p.clone()], "port is attached to several owners"),
        }
    }
    let mut let_ports: BTreeMap<&Id, Vec<&Id>> = BTreeMap::new();
    for (p, os) in &owners {
        if ns(os[0]) == Some(Namespace::LetBinding) {
            let_ports.entry(os[0]).or_default().push(p);
        }
    }
    for d in &t.lets {
        let ports = let_ports.get(d).cloned().unwrap_or_default();
        let recv = ports.iter().filter(|p| port_class(p) == Some(Class::CTOR_RECEIVER)).count();
        let prov = ports.iter().filter(|p| port_class(p) == Some(Class::CTOR_PROVIDER)).count();
        if ports.len() != 2 || recv != 1 || prov != 1 {
            s.push(
                Rule::LetPorts,
                vec![d.clone()],
                "let-binding must be attached to one constructor receiver and one constructor provider port",
            );
        }
    }

    // resource wiring
    let mut wr_count: BTreeMap<&Id, usize> = BTreeMap::new();
    for (a, b) in &t.resource_wiring {
        if port_class(a) != Some(Class::RES_PROVIDER) || port_class(b) != Some(Class::RES_RECEIVER) {
            s.push(Rule::ResourceWiringClass, vec![a.clone(), b.clone()], "R_WR pairs must be (R+ port, R- port)");
        }
        if box_of(a).is_none() || box_of(a) != box_of(b) {
            s.push(Rule::ResourceWiringBox, vec![a.clone(), b.clone()], "wired ports must reside in the same box");
        }
        *wr_count.entry(a).or_default() += 1;
        *wr_count.entry(b).or_default() += 1;
    }
    for (p, c) in &t.ports {
        if c.kind == Kind::Resource && wr_count.get(p).copied().unwrap_or(0) != 1 {
            s.push(Rule::ResourceWiringNotBijective, vec![p.clone()], "resource port must be wired exactly once");
        }
    }

    // constructor wiring
    for (a, b) in &t.ctor_wiring {
        if port_class(a) != Some(Class::CTOR_PROVIDER) || port_class(b) != Some(Class::CTOR_RECEIVER) {
            s.push(Rule::CtorWiringClass, vec![a.clone(), b.clone()], "R_WC pairs must be (C+ port, C- port)");
        }
        if box_of(a).is_none() || box_of(a) != box_of(b) {
            s.push(Rule::CtorWiringBox, vec![a.clone(), b.clone()], "constructor-wired ports must share a box");
        }
    }

    // constructor arguments
    let mut ca_box: BTreeMap<&Id, usize> = BTreeMap::new();
    let mut ca_port: BTreeMap<&Id, usize> = BTreeMap::new();
    for (b, p) in &t.ctor_argument {
        if ns(b) != Some(Namespace::Box) || port_class(p) != Some(Class::CTOR_RECEIVER) {
            s.push(Rule::CtorArgumentClass, vec![b.clone(), p.clone()], "R_CA pairs must be (box, C- port)");
            continue;
        }
        if box_of(b).is_none() || box_of(b) != box_of(p) {
            s.push(
                Rule::CtorArgumentBox,
                vec![b.clone(), p.clone()],
                "argument box must reside directly in the box of its port",
            );
        }
        *ca_box.entry(b).or_default() += 1;
        *ca_port.entry(p).or_default() += 1;
    }
    for b in &t.boxes {
        if box_of(b).is_some() && ca_box.get(b).copied().unwrap_or(0) != 1 {
            s.push(
                Rule::CtorArgumentNotBijective,
                vec![b.clone()],
                "non-root box must be the argument of exactly one constructor receiver port",
            );
        }
    }
    for (p, c) in &t.ports {
        if *c == Class::CTOR_RECEIVER && ca_port.get(p).copied().unwrap_or(0) != 1 {
            s.push(
                Rule::CtorArgumentNotBijective,
                vec![p.clone()],
                "constructor receiver port must have exactly one argument box",
            );
        }
    }

    // constructor usage and wire-safety
    let mut cu: BTreeMap<&Id, Vec<&Id>> = BTreeMap::new();
    let arg_port: BTreeMap<&Id, &Id> = t.ctor_argument.iter().map(|(b, p)| (b, p)).collect();
    for (n, c) in &t.ctor_usage {
        if ns(n) != Some(Namespace::Node) || port_class(c) != Some(Class::CTOR_PROVIDER) {
            s.push(Rule::CtorUsageClass, vec![n.clone(), c.clone()], "R_CU pairs must be (node, C+ port)");
            continue;
        }
        cu.entry(n).or_default().push(c);
        let (Some(bn), Some(bc)) = (box_of(n), box_of(c)) else { continue };
        if cyclic_boxes.contains(bn) || cyclic_boxes.contains(bc) {
            continue;
        }
        if !within(bn, bc) {
            s.push(
                Rule::CtorUsageScope,
                vec![n.clone(), c.clone()],
                "node must reside in the box of its constructor or below it",
            );
            continue;
        }
        if bn == bc {
            continue;
        }
        // the box directly inside bc on the way down to bn
        let mut step = bn;
        while let Some(up) = box_of(step) {
            if up == bc {
                break;
            }
            step = up;
        }
        if let Some(c2) = arg_port.get(step) {
            if !t.ctor_wiring.contains(&((*c).clone(), (*c2).clone())) {
                s.push(
                    Rule::NotWireSafe,
                    vec![n.clone(), c.clone(), (*c2).clone()],
                    format!("usage of {c} by {n} crosses into {step} without ({c},{c2}) in R_WC"),
                );
            }
        }
    }
    for n in &t.nodes {
        match cu.get(n).map_or(0, Vec::len) {
            0 => s.push(Rule::CtorUsageMissing, vec![n.clone()], "node has no constructor"),
            1 => {}
            _ => s.push(Rule::CtorUsageMultiple, vec![n.clone()], "node has several constructors"),
        }
    }

    // let-binding typing
    let roots: BTreeSet<Id> = t.internal.roots().into_iter().collect();
    let mut di_let: BTreeMap<&Id, usize> = BTreeMap::new();
    let mut di_root: BTreeMap<&Id, usize> = BTreeMap::new();
    for (d, i) in &t.let_typing {
        if ns(d) != Some(Namespace::LetBinding) || !t.internal.interfaces.contains(i) {
            s.push(
                Rule::RelationNamespace,
                vec![d.clone(), i.clone()],
                "R_DI pairs must be (let-binding, internal interface)",
            );
            continue;
        }
        if !roots.contains(i) {
            s.push(
                Rule::LetTypingNotBijective,
                vec![d.clone(), i.clone()],
                "let-binding type must be a root interface",
            );
        }
        *di_let.entry(d).or_default() += 1;
        *di_root.entry(i).or_default() += 1;
    }
    for d in &t.lets {
        if di_let.get(d).copied().unwrap_or(0) != 1 {
            s.push(Rule::LetTypingNotBijective, vec![d.clone()], "let-binding must have exactly one type");
        }
    }
    for r in &roots {
        if di_root.get(r).copied().unwrap_or(0) != 1 {
            s.push(
                Rule::LetTypingNotBijective,
                vec![r.clone()],
                "internal root interface must type exactly one let-binding",
            );
        }
    }
    for d in t.let_correspondence.keys() {
        if !t.lets.contains(d) {
            s.push(Rule::LetCorrespondenceUnknownLet, vec![d.clone()], "R_DC fragment for an unknown let-binding");
        }
    }

    // descent must be a forest
    let mut dparent: BTreeMap<&Id, &Id> = BTreeMap::new();
    for (p, os) in &owners {
        dparent.insert(p, os[0]);
    }
    for (b, p) in &t.ctor_argument {
        dparent.entry(b).or_insert(p);
    }
    for (n, cs) in &cu {
        dparent.entry(n).or_insert(cs[0]);
    }
    for cycle in parent_cycles(t.all_ids(), &dparent) {
        s.push(Rule::DescentCycle, cycle, "descent relation is cyclic");
    }
}

pub fn is_type(g: &TypeGraph) -> Result<bool> {
    let diags = validate_type_fragment(g);
    if !diags.is_empty() {
        return Err(Error::Invalid(diags));
    }
    Ok(g.roots().len() == 1)
}

pub fn is_term(t: &TermGraph) -> Result<bool> {
    let diags = validate_term_fragment(t);
    if !diags.is_empty() {
        return Err(Error::Invalid(diags));
    }
    Ok(t.root_boxes().len() == 1)
}

/// The descent forest: ports are children of their owner, argument boxes of
/// their receiver port, nodes of their constructor.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DescentForest {
    pub parent: BTreeMap<Id, Id>,
    pub roots: Vec<Id>,
}

impl DescentForest {
    /// Path from `id` up to its root, starting with `id` itself.
    pub fn ancestry(&self, id: &Id) -> Vec<Id> {
        let mut out = vec![id.clone()];
        let mut cur = id;
        while let Some(p) = self.parent.get(cur) {
            if out.len() > self.parent.len() + 1 {
                break;
            }
            out.push(p.clone());
            cur = p;
        }
        out
    }

    pub fn children(&self) -> BTreeMap<Id, Vec<Id>> {
        let mut out: BTreeMap<Id, Vec<Id>> = BTreeMap::new();
        for (c, p) in &self.parent {
            out.entry(p.clone()).or_default().push(c.clone());
        }
        out
    }

    /// Every component at or below `id`.
    pub fn descendants(&self, id: &Id) -> BTreeSet<Id> {
        let children = self.children();
        let mut out = BTreeSet::new();
        let mut stack = vec![id.clone()];
        while let Some(c) = stack.pop() {
            if out.insert(c.clone()) {
                if let Some(cs) = children.get(&c) {
                    stack.extend(cs.iter().cloned());
                }
            }
        }
        out
    }

    pub fn root_of(&self, id: &Id) -> Id {
        self.ancestry(id).pop().unwrap_or_else(|| id.clone())
    }
}

pub fn descent_forest(t: &TermGraph) -> DescentForest {
    let ix = TermIndex::new(t);
    let mut parent = BTreeMap::new();
    for (p, o) in &ix.owner {
        parent.insert(p.clone(), o.clone());
    }
    for (p, b) in &ix.arg_box {
        parent.entry(b.clone()).or_insert_with(|| p.clone());
    }
    for (n, p) in &ix.ctor_of {
        parent.entry(n.clone()).or_insert_with(|| p.clone());
    }
    let roots = t.all_ids().filter(|c| !parent.contains_key(*c)).cloned().collect::<BTreeSet<_>>();
    DescentForest { parent, roots: roots.into_iter().collect() }
}

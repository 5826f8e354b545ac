//! Type-fragment and term-fragment graphs.
//!
//! Every relation is stored as an explicit edge set over nominal ids, so two
//! graphs are never compared positionally. The orientation of each pair is
//! fixed and documented on the field; the text format uses the same order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// An opaque component name. Unique within one graph across all of its
/// term namespaces (boxes, nodes, ports, let-bindings) and, separately,
/// across its type namespaces (interfaces, fields).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Id(Arc<str>);

impl Id {
    pub fn new(name: impl AsRef<str>) -> Self {
        Id(Arc::from(name.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Id {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Id {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Id {
    fn from(s: &str) -> Self {
        Id::new(s)
    }
}

impl From<String> for Id {
    fn from(s: String) -> Self {
        Id(Arc::from(s))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Namespace {
    Interface,
    Field,
    Box,
    Node,
    Port,
    LetBinding,
}

/// A component id qualified by its namespace.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ComponentId {
    pub namespace: Namespace,
    pub id: Id,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Kind {
    Constructor,
    Resource,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Polarity {
    Provided,
    Received,
}

impl Polarity {
    pub fn flip(self) -> Self {
        match self {
            Polarity::Provided => Polarity::Received,
            Polarity::Received => Polarity::Provided,
        }
    }
}

/// Kind and polarity of a port or field; the four classes `C+`, `C-`, `R+`, `R-`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Class {
    pub kind: Kind,
    pub polarity: Polarity,
}

impl Class {
    pub const CTOR_PROVIDER: Class = Class { kind: Kind::Constructor, polarity: Polarity::Provided };
    pub const CTOR_RECEIVER: Class = Class { kind: Kind::Constructor, polarity: Polarity::Received };
    pub const RES_PROVIDER: Class = Class { kind: Kind::Resource, polarity: Polarity::Provided };
    pub const RES_RECEIVER: Class = Class { kind: Kind::Resource, polarity: Polarity::Received };

    pub fn flipped(self) -> Class {
        Class { kind: self.kind, polarity: self.polarity.flip() }
    }

    pub fn is_constructor(self) -> bool {
        self.kind == Kind::Constructor
    }

    pub fn is_provider(self) -> bool {
        self.polarity == Polarity::Provided
    }

    /// `C+`, `C-`, `R+` or `R-`.
    pub fn tag(self) -> &'static str {
        match (self.kind, self.polarity) {
            (Kind::Constructor, Polarity::Provided) => "C+",
            (Kind::Constructor, Polarity::Received) => "C-",
            (Kind::Resource, Polarity::Provided) => "R+",
            (Kind::Resource, Polarity::Received) => "R-",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Class> {
        Some(match tag {
            "C+" => Class::CTOR_PROVIDER,
            "C-" => Class::CTOR_RECEIVER,
            "R+" => Class::RES_PROVIDER,
            "R-" => Class::RES_RECEIVER,
            _ => return None,
        })
    }
}

/// The primitive carried by resource fields that were not given one.
pub const DEFAULT_PRIMITIVE: &str = "X";

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub class: Class,
    /// Primitive label; only meaningful on resource fields.
    pub label: Option<String>,
}

impl FieldDescriptor {
    pub fn new(class: Class) -> Self {
        FieldDescriptor { class, label: None }
    }

    pub fn labeled(class: Class, label: impl Into<String>) -> Self {
        FieldDescriptor { class, label: Some(label.into()) }
    }

    /// The label used for comparisons: resource fields default to `X`,
    /// constructor fields have none.
    pub fn effective_label(&self) -> Option<&str> {
        match self.class.kind {
            Kind::Resource => Some(self.label.as_deref().unwrap_or(DEFAULT_PRIMITIVE)),
            Kind::Constructor => None,
        }
    }
}

pub type Relation = BTreeSet<(Id, Id)>;

/// Orders a pair so that symmetric relations have one canonical entry.
pub fn sym(a: Id, b: Id) -> (Id, Id) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeGraph {
    pub interfaces: BTreeSet<Id>,
    pub fields: BTreeMap<Id, FieldDescriptor>,
    /// `(parent interface, child)` where the child is an interface or a field.
    pub residence: Relation,
    /// `(constructor field, interface)`.
    pub ctor_interface: Relation,
    /// Symmetric connectivity; each pair stored once with `a < b`.
    pub connectivity: Relation,
}

/// A partial mapping from term components to type components, stored as
/// `(term component, type component)` pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Correspondence {
    pub pairs: Relation,
}

impl Correspondence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I, A, B>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<Id>,
        B: Into<Id>,
    {
        Correspondence { pairs: pairs.into_iter().map(|(a, b)| (a.into(), b.into())).collect() }
    }

    pub fn insert(&mut self, term: impl Into<Id>, ty: impl Into<Id>) {
        self.pairs.insert((term.into(), ty.into()));
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    /// First type component mapped from `term`, if any.
    pub fn target(&self, term: &Id) -> Option<&Id> {
        self.pairs.range((term.clone(), Id::new(""))..).take_while(|(t, _)| t == term).map(|(_, ty)| ty).next()
    }

    pub fn targets<'a>(&'a self, term: &'a Id) -> impl Iterator<Item = &'a Id> + 'a {
        self.pairs.range((term.clone(), Id::new(""))..).take_while(move |(t, _)| t == term).map(|(_, ty)| ty)
    }

    pub fn contains_term(&self, term: &Id) -> bool {
        self.target(term).is_some()
    }

    pub fn terms(&self) -> impl Iterator<Item = &Id> {
        self.pairs.iter().map(|(t, _)| t)
    }

    pub fn retain_terms(&mut self, mut keep: impl FnMut(&Id) -> bool) {
        self.pairs.retain(|(t, _)| keep(t));
    }

    pub fn union(&self, other: &Correspondence) -> Correspondence {
        Correspondence { pairs: self.pairs.union(&other.pairs).cloned().collect() }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermGraph {
    pub boxes: BTreeSet<Id>,
    pub nodes: BTreeSet<Id>,
    pub ports: BTreeMap<Id, Class>,
    pub lets: BTreeSet<Id>,
    /// Internal type-fragment graph; its interface forest may have many roots.
    pub internal: TypeGraph,
    /// `(parent box, child)` where the child is a box, node, port or let-binding.
    pub residence: Relation,
    /// `(owner, port)` where the owner is a node, let-binding or box.
    pub attachment: Relation,
    /// `(provider, receiver)` resource ports.
    pub resource_wiring: Relation,
    /// `(provider, receiver)` constructor ports.
    pub ctor_wiring: Relation,
    /// `(box, constructor receiver port)`.
    pub ctor_argument: Relation,
    /// `(node, constructor provider port)`.
    pub ctor_usage: Relation,
    /// `(let-binding, root interface of the internal types)`.
    pub let_typing: Relation,
    /// One correspondence fragment per let-binding.
    pub let_correspondence: BTreeMap<Id, Correspondence>,
}

impl TypeGraph {
    pub fn namespace_of(&self, id: &Id) -> Option<Namespace> {
        if self.interfaces.contains(id) {
            Some(Namespace::Interface)
        } else if self.fields.contains_key(id) {
            Some(Namespace::Field)
        } else {
            None
        }
    }

    pub fn contains(&self, id: &Id) -> bool {
        self.namespace_of(id).is_some()
    }

    /// Parent of an interface or owner of a field (first one if the
    /// residence relation is malformed).
    pub fn parent(&self, id: &Id) -> Option<&Id> {
        self.residence.iter().find(|(_, c)| c == id).map(|(p, _)| p)
    }

    pub fn parents(&self) -> BTreeMap<&Id, &Id> {
        self.residence.iter().map(|(p, c)| (c, p)).collect()
    }

    pub fn roots(&self) -> Vec<Id> {
        let parents = self.parents();
        self.interfaces.iter().filter(|i| !parents.contains_key(i)).cloned().collect()
    }

    /// The unique root interface, if there is exactly one.
    pub fn root(&self) -> Option<Id> {
        let roots = self.roots();
        if roots.len() == 1 {
            roots.into_iter().next()
        } else {
            None
        }
    }

    pub fn fields_of<'a>(&'a self, iface: &'a Id) -> impl Iterator<Item = &'a Id> + 'a {
        self.residence
            .range((iface.clone(), Id::new(""))..)
            .take_while(move |(p, _)| p == iface)
            .map(|(_, c)| c)
            .filter(move |c| self.fields.contains_key(*c))
    }

    pub fn children_interfaces_of<'a>(&'a self, iface: &'a Id) -> impl Iterator<Item = &'a Id> + 'a {
        self.residence
            .range((iface.clone(), Id::new(""))..)
            .take_while(move |(p, _)| p == iface)
            .map(|(_, c)| c)
            .filter(move |c| self.interfaces.contains(*c))
    }

    pub fn interface_of_field(&self, field: &Id) -> Option<&Id> {
        self.ctor_interface.iter().find(|(f, _)| f == field).map(|(_, i)| i)
    }

    pub fn connected(&self, a: &Id, b: &Id) -> bool {
        self.connectivity.contains(&sym(a.clone(), b.clone()))
    }

    /// The interface and everything residing below it, as a set of ids.
    pub fn subtree(&self, iface: &Id) -> BTreeSet<Id> {
        let mut out = BTreeSet::new();
        let mut stack = vec![iface.clone()];
        while let Some(i) = stack.pop() {
            if !out.insert(i.clone()) {
                continue;
            }
            for (p, c) in &self.residence {
                if *p == i {
                    stack.push(c.clone());
                }
            }
        }
        out
    }

    /// Drops the given components and every relation pair mentioning them.
    pub fn remove_all(&mut self, ids: &BTreeSet<Id>) {
        self.interfaces.retain(|i| !ids.contains(i));
        self.fields.retain(|f, _| !ids.contains(f));
        for rel in [&mut self.residence, &mut self.ctor_interface, &mut self.connectivity] {
            rel.retain(|(a, b)| !ids.contains(a) && !ids.contains(b));
        }
    }

    pub fn all_ids(&self) -> impl Iterator<Item = &Id> {
        self.interfaces.iter().chain(self.fields.keys())
    }

    pub fn add_interface(&mut self, id: impl Into<Id>, parent: Option<&Id>) -> Id {
        let id = id.into();
        self.interfaces.insert(id.clone());
        if let Some(p) = parent {
            self.residence.insert((p.clone(), id.clone()));
        }
        id
    }

    pub fn add_field(&mut self, id: impl Into<Id>, owner: &Id, desc: FieldDescriptor) -> Id {
        let id = id.into();
        self.fields.insert(id.clone(), desc);
        self.residence.insert((owner.clone(), id.clone()));
        id
    }

    pub fn connect(&mut self, a: &Id, b: &Id) {
        self.connectivity.insert(sym(a.clone(), b.clone()));
    }
}

impl TermGraph {
    pub fn namespace_of(&self, id: &Id) -> Option<Namespace> {
        if self.boxes.contains(id) {
            Some(Namespace::Box)
        } else if self.nodes.contains(id) {
            Some(Namespace::Node)
        } else if self.ports.contains_key(id) {
            Some(Namespace::Port)
        } else if self.lets.contains(id) {
            Some(Namespace::LetBinding)
        } else {
            None
        }
    }

    pub fn contains(&self, id: &Id) -> bool {
        self.namespace_of(id).is_some()
    }

    pub fn all_ids(&self) -> impl Iterator<Item = &Id> {
        self.boxes.iter().chain(self.nodes.iter()).chain(self.ports.keys()).chain(self.lets.iter())
    }

    pub fn root_boxes(&self) -> Vec<Id> {
        let children: BTreeSet<&Id> = self.residence.iter().map(|(_, c)| c).collect();
        self.boxes.iter().filter(|b| !children.contains(b)).cloned().collect()
    }

    pub fn root_box(&self) -> Option<Id> {
        let roots = self.root_boxes();
        if roots.len() == 1 {
            roots.into_iter().next()
        } else {
            None
        }
    }

    /// The correspondence `R_DC` flattened across all let-bindings.
    pub fn let_correspondence_union(&self) -> Correspondence {
        let mut out = Correspondence::new();
        for frag in self.let_correspondence.values() {
            out.pairs.extend(frag.pairs.iter().cloned());
        }
        out
    }

    pub fn add_box(&mut self, id: impl Into<Id>, parent: Option<&Id>) -> Id {
        let id = id.into();
        self.boxes.insert(id.clone());
        if let Some(p) = parent {
            self.residence.insert((p.clone(), id.clone()));
        }
        id
    }

    pub fn add_node(&mut self, id: impl Into<Id>, in_box: &Id) -> Id {
        let id = id.into();
        self.nodes.insert(id.clone());
        self.residence.insert((in_box.clone(), id.clone()));
        id
    }

    pub fn add_let(&mut self, id: impl Into<Id>, in_box: &Id) -> Id {
        let id = id.into();
        self.lets.insert(id.clone());
        self.residence.insert((in_box.clone(), id.clone()));
        id
    }

    /// Adds a port residing in `in_box` and attached to `owner`.
    pub fn add_port(&mut self, id: impl Into<Id>, class: Class, in_box: &Id, owner: &Id) -> Id {
        let id = id.into();
        self.ports.insert(id.clone(), class);
        self.residence.insert((in_box.clone(), id.clone()));
        self.attachment.insert((owner.clone(), id.clone()));
        id
    }

    pub fn wire(&mut self, provider: &Id, receiver: &Id) {
        self.resource_wiring.insert((provider.clone(), receiver.clone()));
    }

    pub fn wire_ctor(&mut self, provider: &Id, receiver: &Id) {
        self.ctor_wiring.insert((provider.clone(), receiver.clone()));
    }
}

/// Lookup tables over a term graph. Functional relations keep their first
/// pair; callers that need strictness validate first.
#[derive(Debug, Default, Clone)]
pub struct TermIndex {
    pub parent_box: BTreeMap<Id, Id>,
    pub owner: BTreeMap<Id, Id>,
    pub attached: BTreeMap<Id, Vec<Id>>,
    pub arg_box: BTreeMap<Id, Id>,
    pub arg_port: BTreeMap<Id, Id>,
    pub ctor_of: BTreeMap<Id, Id>,
    pub constructed: BTreeMap<Id, Vec<Id>>,
    pub wired_to: BTreeMap<Id, Id>,
    pub wired_from: BTreeMap<Id, Id>,
    pub let_iface: BTreeMap<Id, Id>,
    pub contents: BTreeMap<Id, Vec<Id>>,
}

impl TermIndex {
    pub fn new(t: &TermGraph) -> Self {
        let mut ix = TermIndex::default();
        for (p, c) in &t.residence {
            ix.parent_box.entry(c.clone()).or_insert_with(|| p.clone());
            ix.contents.entry(p.clone()).or_default().push(c.clone());
        }
        for (o, p) in &t.attachment {
            ix.owner.entry(p.clone()).or_insert_with(|| o.clone());
            ix.attached.entry(o.clone()).or_default().push(p.clone());
        }
        for (b, p) in &t.ctor_argument {
            ix.arg_box.entry(p.clone()).or_insert_with(|| b.clone());
            ix.arg_port.entry(b.clone()).or_insert_with(|| p.clone());
        }
        for (n, p) in &t.ctor_usage {
            ix.ctor_of.entry(n.clone()).or_insert_with(|| p.clone());
            ix.constructed.entry(p.clone()).or_default().push(n.clone());
        }
        for (a, b) in &t.resource_wiring {
            ix.wired_to.entry(a.clone()).or_insert_with(|| b.clone());
            ix.wired_from.entry(b.clone()).or_insert_with(|| a.clone());
        }
        for (d, i) in &t.let_typing {
            ix.let_iface.entry(d.clone()).or_insert_with(|| i.clone());
        }
        ix
    }

    pub fn attached_to(&self, owner: &Id) -> &[Id] {
        self.attached.get(owner).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn constructed_by(&self, port: &Id) -> &[Id] {
        self.constructed.get(port).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn contents_of(&self, b: &Id) -> &[Id] {
        self.contents.get(b).map(Vec::as_slice).unwrap_or(&[])
    }

    /// True when `inner` is `outer` or resides (transitively) inside it.
    pub fn box_within(&self, inner: &Id, outer: &Id) -> bool {
        let mut cur = Some(inner);
        let mut guard = 0usize;
        while let Some(b) = cur {
            if b == outer {
                return true;
            }
            guard += 1;
            if guard > self.parent_box.len() + 1 {
                return false;
            }
            cur = self.parent_box.get(b);
        }
        false
    }

    /// The receiver and provider ports attached to a let-binding.
    pub fn let_ports(&self, t: &TermGraph, d: &Id) -> (Option<Id>, Option<Id>) {
        let mut recv = None;
        let mut prov = None;
        for p in self.attached_to(d) {
            match t.ports.get(p) {
                Some(c) if *c == Class::CTOR_RECEIVER => recv = Some(p.clone()),
                Some(c) if *c == Class::CTOR_PROVIDER => prov = Some(p.clone()),
                _ => {}
            }
        }
        (recv, prov)
    }
}

/// A type, a term, and an external correspondence between them.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bundle {
    pub ty: TypeGraph,
    pub term: TermGraph,
    pub external: Correspondence,
}

impl Bundle {
    pub fn new(ty: TypeGraph, term: TermGraph, external: Correspondence) -> Self {
        Bundle { ty, term, external }
    }
}

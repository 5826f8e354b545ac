//! Codecs between plain data structures and terms, plus a few functions
//! over the encoded structures.

mod bintree;
mod functions;
mod lambda;
mod multigraph;

use std::collections::{BTreeMap, BTreeSet};

pub use bintree::{binary_tree_type, decode_bintree, encode_bintree, BinTree};
pub use functions::{apply_to, edge_doubler, function_type, identity};
pub use lambda::{decode_lambda, encode_lambda, lambda_type, lambda_type_variant, LambdaTerm};
pub use multigraph::{decode_multigraph, encode_multigraph, multigraph_type, Multigraph};

use crate::check::check_bundle;
use crate::equality::{types_isomorphic, Relabeling};
use crate::error::{Error, Result};
use crate::model::{sym, Bundle, Class, Correspondence, Id, Kind, Namespace, TermGraph, TermIndex, TypeGraph};

/// Where a component's correspondence lives: the external correspondence
/// (against the bundle's type) or the fragment of a let-binding (against
/// the internal types).
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Scope {
    External,
    Let(Id),
}

pub(crate) struct Builder {
    pub ty: TypeGraph,
    pub t: TermGraph,
    pub c: Correspondence,
    used: BTreeSet<Id>,
    counters: BTreeMap<String, usize>,
}

/// Ports of a freshly built box or node, keyed by the field they map to.
pub(crate) type Ports = BTreeMap<Id, Id>;

impl Builder {
    pub fn new(ty: TypeGraph) -> Self {
        let used = ty.all_ids().cloned().collect();
        Builder { ty, t: TermGraph::default(), c: Correspondence::new(), used, counters: BTreeMap::new() }
    }

    pub fn fresh(&mut self, prefix: &str) -> Id {
        loop {
            let k = self.counters.entry(prefix.to_string()).or_default();
            *k += 1;
            let id = Id::new(format!("{prefix}{k}"));
            if self.used.insert(id.clone()) {
                return id;
            }
        }
    }

    /// Reserves `id`, or a primed variant of it when taken.
    pub fn fresh_like(&mut self, id: &Id) -> Id {
        if self.used.insert(id.clone()) {
            return id.clone();
        }
        let base = id.as_str().split('\'').next().unwrap_or(id.as_str()).to_string();
        self.fresh(&format!("{base}'"))
    }

    pub fn types(&self, s: &Scope) -> &TypeGraph {
        match s {
            Scope::External => &self.ty,
            Scope::Let(_) => &self.t.internal,
        }
    }

    pub fn record(&mut self, s: &Scope, x: &Id, y: &Id) {
        match s {
            Scope::External => self.c.insert(x.clone(), y.clone()),
            Scope::Let(d) => self.t.let_correspondence.entry(d.clone()).or_default().insert(x.clone(), y.clone()),
        }
    }

    fn fields(&self, s: &Scope, iface: &Id) -> Vec<(Id, Class)> {
        let g = self.types(s);
        g.fields_of(iface).map(|f| (f.clone(), g.fields[f].class)).collect()
    }

    /// Ports for every field of `iface`, attached to `owner`; classes are
    /// flipped when the owner is a box.
    fn ports(&mut self, owner: &Id, in_box: &Id, iface: &Id, s: &Scope, flip: bool) -> Ports {
        let mut out = Ports::new();
        for (f, class) in self.fields(s, iface) {
            let p = self.fresh("p");
            let class = if flip { class.flipped() } else { class };
            self.t.add_port(p.clone(), class, in_box, owner);
            self.record(s, &p, &f);
            out.insert(f, p);
        }
        out
    }

    /// The root box, corresponding to the root of the external type.
    pub fn root_box(&mut self) -> Result<(Id, Ports)> {
        let root = self.ty.root().ok_or_else(|| Error::Type("type has no single root interface".into()))?;
        let b = self.fresh("b");
        self.t.add_box(b.clone(), None);
        self.record(&Scope::External, &b, &root);
        let ports = self.ports(&b, &b, &root, &Scope::External, true);
        Ok((b, ports))
    }

    /// A node in `in_box` constructed by `ctor`, corresponding to `iface`.
    pub fn node(&mut self, in_box: &Id, ctor: &Id, iface: &Id, s: &Scope) -> (Id, Ports) {
        let n = self.fresh("n");
        self.t.add_node(n.clone(), in_box);
        self.t.ctor_usage.insert((n.clone(), ctor.clone()));
        self.record(s, &n, iface);
        let ports = self.ports(&n, in_box, iface, s, false);
        (n, ports)
    }

    /// The argument box of the receiver port `recv`, corresponding to `iface`.
    pub fn arg_box(&mut self, in_box: &Id, recv: &Id, iface: &Id, s: &Scope) -> (Id, Ports) {
        let b = self.fresh("b");
        self.t.add_box(b.clone(), Some(in_box));
        self.t.ctor_argument.insert((b.clone(), recv.clone()));
        self.record(s, &b, iface);
        let ports = self.ports(&b, &b, iface, s, true);
        (b, ports)
    }

    /// The interface constructed through constructor field `f`.
    pub fn iface_of(&self, s: &Scope, f: &Id) -> Result<Id> {
        self.types(s)
            .interface_of_field(f)
            .cloned()
            .ok_or_else(|| Error::Type(format!("constructor field {f} has no interface")))
    }

    /// Connects two ports of opposite classes residing in `in_box`: resource
    /// ports get a wire, constructor ports an eta-expanded argument.
    pub fn join(&mut self, in_box: &Id, a: (&Id, &Id, &Scope), b: (&Id, &Id, &Scope)) -> Result<()> {
        let ca = self.t.ports[a.0];
        let (prov, recv) = if ca.is_provider() { (a, b) } else { (b, a) };
        match ca.kind {
            Kind::Resource => {
                self.t.wire(prov.0, recv.0);
                Ok(())
            }
            Kind::Constructor => {
                let ci = self.iface_of(prov.2, prov.1)?;
                let ri = self.iface_of(recv.2, recv.1)?;
                self.eta(in_box, (prov.0, &ci, prov.2), (recv.0, &ri, recv.2))
            }
        }
    }

    /// Passes the constructor `c` (building `c_iface`) to the receiver port
    /// `r` (expecting `r_iface`): the argument box of `r` holds one node
    /// built by `c` whose ports are joined to the box's own ports.
    pub fn eta(&mut self, in_box: &Id, c: (&Id, &Id, &Scope), r: (&Id, &Id, &Scope)) -> Result<()> {
        let (c_port, c_iface, cs) = c;
        let (r_port, r_iface, rs) = r;
        let pairing = match_interfaces(self.types(rs), r_iface, self.types(cs), c_iface)?;
        self.t.wire_ctor(c_port, r_port);
        let (b, box_ports) = self.arg_box(in_box, r_port, r_iface, rs);
        let (_, node_ports) = self.node(&b, c_port, c_iface, cs);
        for (fc, fr) in pairing {
            let pn = node_ports[&fc].clone();
            let pb = box_ports[&fr].clone();
            self.join(&b, (&pn, &fc, cs), (&pb, &fr, rs))?;
        }
        Ok(())
    }

    /// Adds a let-binding in `in_box` typed by a fresh internal copy of
    /// `ty`, returning the binding, its receiver and provider ports, and
    /// the id map of the copy.
    pub fn let_binding_named(
        &mut self,
        in_box: &Id,
        ty: &TypeGraph,
        name: &str,
    ) -> Result<(Id, Id, Id, BTreeMap<Id, Id>)> {
        let root = ty.root().ok_or_else(|| Error::Type("let-binding type has no single root".into()))?;
        let map = self.copy_internal(ty);
        let d = self.fresh_like(&Id::new(name));
        self.t.add_let(d.clone(), in_box);
        let recv = self.fresh("p");
        let prov = self.fresh("p");
        self.t.add_port(recv.clone(), Class::CTOR_RECEIVER, in_box, &d);
        self.t.add_port(prov.clone(), Class::CTOR_PROVIDER, in_box, &d);
        self.t.let_typing.insert((d.clone(), map[&root].clone()));
        self.t.let_correspondence.entry(d.clone()).or_default();
        Ok((d, recv, prov, map))
    }

    fn copy_internal(&mut self, ty: &TypeGraph) -> BTreeMap<Id, Id> {
        let map: BTreeMap<Id, Id> = ty.all_ids().map(|i| (i.clone(), self.fresh_like(i))).collect();
        let g = &mut self.t.internal;
        for i in &ty.interfaces {
            g.interfaces.insert(map[i].clone());
        }
        for (f, fd) in &ty.fields {
            g.fields.insert(map[f].clone(), fd.clone());
        }
        for (a, b) in &ty.residence {
            g.residence.insert((map[a].clone(), map[b].clone()));
        }
        for (a, b) in &ty.ctor_interface {
            g.ctor_interface.insert((map[a].clone(), map[b].clone()));
        }
        for (a, b) in &ty.connectivity {
            g.connectivity.insert(sym(map[a].clone(), map[b].clone()));
        }
        map
    }

    /// Copies a whole bundle's term into `body` (which takes the place of
    /// its root box); its external correspondence becomes the fragment of
    /// `d`, with targets renamed by `tmap`.
    pub fn embed_body(&mut self, src: &Bundle, body: &Id, d: &Id, tmap: &BTreeMap<Id, Id>) -> Result<()> {
        let t = &src.term;
        let root = t.root_box().ok_or_else(|| Error::Precondition("embedded term has no single root box".into()))?;
        let mut m: BTreeMap<Id, Id> = BTreeMap::new();
        for x in t.all_ids() {
            let y = if *x == root { body.clone() } else { self.fresh_like(x) };
            m.insert(x.clone(), y);
        }
        let imap = self.copy_internal(&t.internal);
        let g = &mut self.t;
        for x in &t.boxes {
            g.boxes.insert(m[x].clone());
        }
        for x in &t.nodes {
            g.nodes.insert(m[x].clone());
        }
        for (x, c) in &t.ports {
            g.ports.insert(m[x].clone(), *c);
        }
        for x in &t.lets {
            g.lets.insert(m[x].clone());
        }
        for (rel_in, rel_out) in [
            (&t.residence, &mut g.residence),
            (&t.attachment, &mut g.attachment),
            (&t.resource_wiring, &mut g.resource_wiring),
            (&t.ctor_wiring, &mut g.ctor_wiring),
            (&t.ctor_argument, &mut g.ctor_argument),
            (&t.ctor_usage, &mut g.ctor_usage),
        ] {
            for (a, b) in rel_in {
                rel_out.insert((m[a].clone(), m[b].clone()));
            }
        }
        for (e, i) in &t.let_typing {
            g.let_typing.insert((m[e].clone(), imap[i].clone()));
        }
        for (e, frag) in &t.let_correspondence {
            let dest = g.let_correspondence.entry(m[e].clone()).or_default();
            for (x, y) in &frag.pairs {
                dest.insert(m[x].clone(), imap[y].clone());
            }
        }
        let dest = g.let_correspondence.entry(d.clone()).or_default();
        for (x, y) in &src.external.pairs {
            let y = tmap.get(y).ok_or_else(|| Error::Precondition(format!("{y} is not part of the embedded type")))?;
            dest.insert(m[x].clone(), y.clone());
        }
        Ok(())
    }

    pub fn finish(self) -> Bundle {
        Bundle { ty: self.ty, term: self.t, external: self.c }
    }
}

/// The subtree of `iface` as a type of its own.
pub fn extract_interface(g: &TypeGraph, iface: &Id) -> TypeGraph {
    let ids = g.subtree(iface);
    let keep = |a: &Id, b: &Id| ids.contains(a) && ids.contains(b);
    TypeGraph {
        interfaces: g.interfaces.iter().filter(|i| ids.contains(*i)).cloned().collect(),
        fields: g.fields.iter().filter(|(f, _)| ids.contains(*f)).map(|(f, d)| (f.clone(), d.clone())).collect(),
        residence: g.residence.iter().filter(|(a, b)| keep(a, b)).cloned().collect(),
        ctor_interface: g.ctor_interface.iter().filter(|(a, b)| keep(a, b)).cloned().collect(),
        connectivity: g.connectivity.iter().filter(|(a, b)| keep(a, b)).cloned().collect(),
    }
}

fn base(id: &Id) -> &str {
    id.as_str().split('\'').next().unwrap_or(id.as_str())
}

/// An isomorphism `b -> a` that pairs ids with equal base names (the part
/// before any `'`), if that happens to be one.
fn by_name(a: &TypeGraph, b: &TypeGraph) -> Option<Relabeling> {
    let mut r = Relabeling::default();
    for (ns, ids_a, ids_b) in [
        (Namespace::Interface, a.interfaces.iter().collect::<Vec<_>>(), b.interfaces.iter().collect::<Vec<_>>()),
        (Namespace::Field, a.fields.keys().collect(), b.fields.keys().collect()),
    ] {
        let mut index: BTreeMap<&str, Vec<&Id>> = BTreeMap::new();
        for x in ids_a {
            index.entry(base(x)).or_default().push(x);
        }
        let m = r.maps.entry(ns).or_default();
        for y in ids_b {
            match index.get(base(y)).map(Vec::as_slice) {
                Some([x]) => {
                    m.insert(y.clone(), (*x).clone());
                }
                _ => return None,
            }
        }
    }
    (r.apply_type(b) == *a).then_some(r)
}

/// Type isomorphism `b -> a`, preferring the pairing by base name.
pub fn type_matching(a: &TypeGraph, b: &TypeGraph) -> Option<Relabeling> {
    by_name(a, b).or_else(|| types_isomorphic(a, b))
}

/// Pairs the fields of `ib` (in `gb`) with those of `ia` (in `ga`), as
/// `(field of ib, field of ia)`.
pub fn match_interfaces(ga: &TypeGraph, ia: &Id, gb: &TypeGraph, ib: &Id) -> Result<Vec<(Id, Id)>> {
    let sa = extract_interface(ga, ia);
    let sb = extract_interface(gb, ib);
    let h = type_matching(&sa, &sb).ok_or_else(|| Error::Type(format!("interfaces {ia} and {ib} do not match")))?;
    Ok(gb.fields_of(ib).map(|f| (f.clone(), h.type_id(f))).collect())
}

/// Checks a bundle and relates its type to `expected`, returning a map
/// from the bundle's type ids to the expected ones.
pub(crate) fn prepare_decode(b: &Bundle, expected: &TypeGraph) -> Result<Relabeling> {
    let diags = check_bundle(&b.ty, &b.term, &b.external);
    if !diags.is_empty() {
        return Err(Error::Invalid(diags));
    }
    type_matching(expected, &b.ty).ok_or_else(|| Error::decode("type", "not the expected type"))
}

/// Term-side lookups used by the decoders.
pub(crate) struct View<'a> {
    pub b: &'a Bundle,
    pub ix: TermIndex,
    pub roles: Relabeling,
}

impl<'a> View<'a> {
    pub fn new(b: &'a Bundle, roles: Relabeling) -> Self {
        View { b, ix: TermIndex::new(&b.term), roles }
    }

    /// The expected-type field a port of the root scope corresponds to.
    pub fn role(&self, x: &Id) -> Option<Id> {
        self.b.external.target(x).map(|y| self.roles.type_id(y))
    }

    pub fn root(&self) -> Result<Id> {
        self.b.term.root_box().ok_or_else(|| Error::decode("term", "no single root box"))
    }

    /// The port attached to `owner` with role `field`.
    pub fn port(&self, owner: &Id, field: &str) -> Result<Id> {
        self.ix
            .attached_to(owner)
            .iter()
            .find(|p| self.role(p).is_some_and(|f| f.as_str() == field))
            .cloned()
            .ok_or_else(|| Error::decode(owner, format!("no port for {field}")))
    }

    /// The owner of the provider wired into receiver `p`.
    pub fn wired_owner(&self, p: &Id) -> Result<(Id, Id)> {
        let q = self.ix.wired_from.get(p).ok_or_else(|| Error::decode(p, "receiver is not wired"))?;
        let o = self.ix.owner.get(q).ok_or_else(|| Error::decode(q, "port has no owner"))?;
        Ok((q.clone(), o.clone()))
    }

    pub fn no_lets(&self) -> Result<()> {
        match self.b.term.lets.iter().next() {
            Some(d) => Err(Error::decode(d, "let-bindings are not part of a value")),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::parse_and_translate;

    #[test]
    fn name_matching_prefers_primed_copies() {
        let a = parse_and_translate("X -o X").unwrap();
        let mut b = Builder::new(TypeGraph::default());
        b.used.extend(a.all_ids().cloned());
        let m = b.copy_internal(&a);
        assert!(m.values().all(|v| v.as_str().contains('\'')));
        let copy = b.t.internal.clone();
        let h = type_matching(&a, &copy).unwrap();
        for (x, y) in &m {
            assert_eq!(&h.type_id(y), x);
        }
    }
}

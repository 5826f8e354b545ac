//! Equality of terms (and of types) up to relabeling.
//!
//! Both sides are encoded as vertex-coloured, edge-labelled digraphs and a
//! bijection is searched for with colour refinement plus individualisation.
//! Every candidate found at a leaf is verified against the edge sets before
//! it is accepted, and the final witness is re-applied to the original
//! structures.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::check::check_bundle;
use crate::error::{Error, Result};
use crate::model::{Correspondence, Id, Namespace, TermGraph, TypeGraph};

/// Per-namespace bijections from the second structure's ids to the first's.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relabeling {
    pub maps: BTreeMap<Namespace, BTreeMap<Id, Id>>,
}

const TERM_NS: [Namespace; 4] = [Namespace::Box, Namespace::Node, Namespace::Port, Namespace::LetBinding];
const TYPE_NS: [Namespace; 2] = [Namespace::Interface, Namespace::Field];

impl Relabeling {
    fn lookup(&self, spaces: &[Namespace], id: &Id) -> Id {
        spaces.iter().find_map(|ns| self.maps.get(ns).and_then(|m| m.get(id))).cloned().unwrap_or_else(|| id.clone())
    }

    pub fn term_id(&self, id: &Id) -> Id {
        self.lookup(&TERM_NS, id)
    }

    pub fn type_id(&self, id: &Id) -> Id {
        self.lookup(&TYPE_NS, id)
    }

    pub fn is_identity(&self) -> bool {
        self.maps.values().all(|m| m.iter().all(|(a, b)| a == b))
    }

    pub fn inverse(&self) -> Relabeling {
        let maps =
            self.maps.iter().map(|(ns, m)| (*ns, m.iter().map(|(a, b)| (b.clone(), a.clone())).collect())).collect();
        Relabeling { maps }
    }

    /// `self` applied after `first`.
    pub fn after(&self, first: &Relabeling) -> Relabeling {
        let mut maps: BTreeMap<Namespace, BTreeMap<Id, Id>> = BTreeMap::new();
        for (ns, m) in &first.maps {
            let out = maps.entry(*ns).or_default();
            for (a, b) in m {
                let c = self.maps.get(ns).and_then(|m2| m2.get(b)).cloned().unwrap_or_else(|| b.clone());
                out.insert(a.clone(), c);
            }
        }
        Relabeling { maps }
    }

    pub fn apply_type(&self, g: &TypeGraph) -> TypeGraph {
        let f = |x: &Id| self.type_id(x);
        let rel = |r: &crate::model::Relation| r.iter().map(|(a, b)| (f(a), f(b))).collect();
        TypeGraph {
            interfaces: g.interfaces.iter().map(f).collect(),
            fields: g.fields.iter().map(|(k, v)| (f(k), v.clone())).collect(),
            residence: rel(&g.residence),
            ctor_interface: rel(&g.ctor_interface),
            connectivity: g.connectivity.iter().map(|(a, b)| crate::model::sym(f(a), f(b))).collect(),
        }
    }

    pub fn apply_term(&self, t: &TermGraph) -> TermGraph {
        let f = |x: &Id| self.term_id(x);
        let rel = |r: &crate::model::Relation| r.iter().map(|(a, b)| (f(a), f(b))).collect();
        TermGraph {
            boxes: t.boxes.iter().map(f).collect(),
            nodes: t.nodes.iter().map(f).collect(),
            ports: t.ports.iter().map(|(k, v)| (f(k), *v)).collect(),
            lets: t.lets.iter().map(f).collect(),
            internal: self.apply_type(&t.internal),
            residence: rel(&t.residence),
            attachment: rel(&t.attachment),
            resource_wiring: rel(&t.resource_wiring),
            ctor_wiring: rel(&t.ctor_wiring),
            ctor_argument: rel(&t.ctor_argument),
            ctor_usage: rel(&t.ctor_usage),
            let_typing: t.let_typing.iter().map(|(d, i)| (f(d), self.type_id(i))).collect(),
            let_correspondence: t
                .let_correspondence
                .iter()
                .map(|(d, frag)| (f(d), self.apply_correspondence(frag, true)))
                .collect(),
        }
    }

    /// Relabels the term side; the type side too when `internal_targets`.
    pub fn apply_correspondence(&self, c: &Correspondence, internal_targets: bool) -> Correspondence {
        Correspondence {
            pairs: c
                .pairs
                .iter()
                .map(|(x, y)| (self.term_id(x), if internal_targets { self.type_id(y) } else { y.clone() }))
                .collect(),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum Side {
    Term,
    Type,
}

/// A coloured, labelled digraph built from a term or type.
#[derive(Default, Debug)]
pub struct Encoded {
    index: BTreeMap<(Side, Id), usize>,
    ids: Vec<(Side, Id)>,
    ns: Vec<Option<Namespace>>,
    colors: Vec<String>,
    edges: BTreeSet<(usize, u8, usize)>,
}

impl Encoded {
    fn vertex(&mut self, side: Side, id: &Id, ns: Option<Namespace>, color: String) -> usize {
        if let Some(&v) = self.index.get(&(side, id.clone())) {
            return v;
        }
        let v = self.ids.len();
        self.index.insert((side, id.clone()), v);
        self.ids.push((side, id.clone()));
        self.ns.push(ns);
        self.colors.push(color);
        v
    }

    fn get(&mut self, side: Side, id: &Id) -> usize {
        self.vertex(side, id, None, "?".to_string())
    }

    fn edge(&mut self, a: (Side, &Id), label: u8, b: (Side, &Id)) {
        let x = self.get(a.0, a.1);
        let y = self.get(b.0, b.1);
        self.edges.insert((x, label, y));
    }

    fn add_type(&mut self, side: Side, g: &TypeGraph, base: u8) {
        for i in &g.interfaces {
            self.vertex(side, i, Some(Namespace::Interface), "I".into());
        }
        for (f, fd) in &g.fields {
            let color = format!("F:{}:{}", fd.class.tag(), fd.label.as_deref().unwrap_or("-"));
            self.vertex(side, f, Some(Namespace::Field), color);
        }
        for (a, b) in &g.residence {
            self.edge((side, a), base, (side, b));
        }
        for (a, b) in &g.ctor_interface {
            self.edge((side, a), base + 1, (side, b));
        }
        for (a, b) in &g.connectivity {
            self.edge((side, a), base + 2, (side, b));
            self.edge((side, b), base + 2, (side, a));
        }
    }

    pub fn from_type(g: &TypeGraph) -> Self {
        let mut e = Encoded::default();
        e.add_type(Side::Type, g, 0);
        e
    }

    /// Encodes a term; when `external` is given, each term component is
    /// additionally coloured by the (fixed) type components it maps to.
    pub fn from_term(t: &TermGraph, external: Option<&Correspondence>) -> Self {
        let mut e = Encoded::default();
        let mut pinned: BTreeMap<&Id, Vec<&str>> = BTreeMap::new();
        if let Some(c) = external {
            for (x, y) in &c.pairs {
                pinned.entry(x).or_default().push(y.as_str());
            }
        }
        let pin = |x: &Id| pinned.get(x).map(|ys| format!("@{}", ys.join("|"))).unwrap_or_default();
        for b in &t.boxes {
            e.vertex(Side::Term, b, Some(Namespace::Box), format!("B{}", pin(b)));
        }
        for n in &t.nodes {
            e.vertex(Side::Term, n, Some(Namespace::Node), format!("N{}", pin(n)));
        }
        for (p, c) in &t.ports {
            e.vertex(Side::Term, p, Some(Namespace::Port), format!("P:{}{}", c.tag(), pin(p)));
        }
        for d in &t.lets {
            e.vertex(Side::Term, d, Some(Namespace::LetBinding), format!("D{}", pin(d)));
        }
        // external pairs naming unknown components still have to match
        for x in pinned.keys() {
            if !t.contains(x) {
                e.vertex(Side::Term, x, None, format!("?{}", pin(x)));
            }
        }
        e.add_type(Side::Type, &t.internal, 20);
        let term_rels =
            [&t.residence, &t.attachment, &t.resource_wiring, &t.ctor_wiring, &t.ctor_argument, &t.ctor_usage];
        for (k, rel) in term_rels.into_iter().enumerate() {
            for (a, b) in rel {
                e.edge((Side::Term, a), k as u8, (Side::Term, b));
            }
        }
        for (d, i) in &t.let_typing {
            e.edge((Side::Term, d), 10, (Side::Type, i));
        }
        for (d, frag) in &t.let_correspondence {
            e.get(Side::Term, d);
            for (x, y) in &frag.pairs {
                e.edge((Side::Term, x), 11, (Side::Type, y));
                e.edge((Side::Term, d), 12, (Side::Term, x));
            }
        }
        e
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// A colour and its sorted neighbourhood `(label, direction, colour)`.
type Signature = (u32, Vec<(u8, bool, u32)>);

struct Joint<'a> {
    g1: &'a Encoded,
    g2: &'a Encoded,
    n1: usize,
    adj: Vec<Vec<(u8, bool, usize)>>,
}

impl Joint<'_> {
    fn refine(&self, colors: &mut Vec<u32>) {
        let mut classes = colors.iter().collect::<BTreeSet<_>>().len();
        loop {
            let sigs: Vec<Signature> = (0..colors.len())
                .map(|v| {
                    let mut ns: Vec<(u8, bool, u32)> = self.adj[v].iter().map(|&(l, d, w)| (l, d, colors[w])).collect();
                    ns.sort_unstable();
                    (colors[v], ns)
                })
                .collect();
            let distinct: BTreeSet<&Signature> = sigs.iter().collect();
            let ids: BTreeMap<&Signature, u32> = distinct.iter().enumerate().map(|(k, s)| (*s, k as u32)).collect();
            let next: Vec<u32> = sigs.iter().map(|s| ids[s]).collect();
            *colors = next;
            if distinct.len() == classes {
                return;
            }
            classes = distinct.len();
        }
    }

    fn balanced(&self, colors: &[u32]) -> bool {
        let mut count: BTreeMap<u32, i64> = BTreeMap::new();
        for (v, c) in colors.iter().enumerate() {
            *count.entry(*c).or_default() += if v < self.n1 { 1 } else { -1 };
        }
        count.values().all(|&k| k == 0)
    }

    fn verify(&self, map: &[usize]) -> bool {
        // map: g2 vertex -> g1 vertex
        if (0..map.len()).any(|v| self.g2.colors[v] != self.g1.colors[map[v]]) {
            return false;
        }
        let mapped: BTreeSet<(usize, u8, usize)> = self.g2.edges.iter().map(|&(a, l, b)| (map[a], l, map[b])).collect();
        mapped == self.g1.edges
    }

    fn search(&self, mut colors: Vec<u32>) -> Option<Vec<usize>> {
        self.refine(&mut colors);
        if !self.balanced(&colors) {
            return None;
        }
        let mut cells: BTreeMap<u32, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
        for (v, c) in colors.iter().enumerate() {
            let cell = cells.entry(*c).or_default();
            if v < self.n1 {
                cell.0.push(v);
            } else {
                cell.1.push(v - self.n1);
            }
        }
        let target = cells.iter().filter(|(_, (a, _))| a.len() > 1).min_by_key(|(c, (a, _))| (a.len(), **c));
        let Some((_, (left, right))) = target else {
            let mut map = vec![0; self.g2.len()];
            for (a, b) in cells.values() {
                map[b[0]] = a[0];
            }
            return self.verify(&map).then_some(map);
        };
        let fresh = colors.iter().max().copied().unwrap_or(0) + 1;
        let v = left[0];
        for &w in right {
            let mut next = colors.clone();
            next[v] = fresh;
            next[self.n1 + w] = fresh;
            if let Some(m) = self.search(next) {
                return Some(m);
            }
        }
        None
    }
}

/// A bijection `g2 -> g1` preserving colours and labelled edges, if any.
pub fn search_relabeling(g1: &Encoded, g2: &Encoded) -> Option<Vec<usize>> {
    if g1.len() != g2.len() || g1.edges.len() != g2.edges.len() {
        return None;
    }
    let n1 = g1.len();
    let palette: BTreeSet<&str> = g1.colors.iter().chain(g2.colors.iter()).map(String::as_str).collect();
    let sorted: BTreeMap<&str, u32> = palette.into_iter().enumerate().map(|(k, c)| (c, k as u32)).collect();
    let colors: Vec<u32> = g1.colors.iter().chain(g2.colors.iter()).map(|c| sorted[c.as_str()]).collect();
    let mut adj = vec![Vec::new(); n1 + g2.len()];
    for (off, g) in [(0, g1), (n1, g2)] {
        for &(a, l, b) in &g.edges {
            adj[off + a].push((l, true, off + b));
            adj[off + b].push((l, false, off + a));
        }
    }
    Joint { g1, g2, n1, adj }.search(colors)
}

fn to_relabeling(g1: &Encoded, g2: &Encoded, map: &[usize]) -> Relabeling {
    let mut r = Relabeling::default();
    for (v, &w) in map.iter().enumerate() {
        let (_, from) = &g2.ids[v];
        let (_, to) = &g1.ids[w];
        let ns = g2.ns[v].or(g1.ns[w]).unwrap_or(Namespace::Port);
        r.maps.entry(ns).or_default().insert(from.clone(), to.clone());
    }
    r
}

/// Relabeling search without validating either side; `c1`/`c2` pin term
/// components to fixed external type components when given.
pub fn find_relabeling(
    t1: &TermGraph,
    c1: Option<&Correspondence>,
    t2: &TermGraph,
    c2: Option<&Correspondence>,
) -> Option<Relabeling> {
    let g1 = Encoded::from_term(t1, c1);
    let g2 = Encoded::from_term(t2, c2);
    let map = search_relabeling(&g1, &g2)?;
    let h = to_relabeling(&g1, &g2, &map);
    let same_term = h.apply_term(t2) == *t1;
    let same_corr = match (c1, c2) {
        (Some(a), Some(b)) => h.apply_correspondence(b, false) == *a,
        (None, None) => true,
        _ => false,
    };
    (same_term && same_corr).then_some(h)
}

/// Equality of `(t1, C1)` and `(t2, C2)` at type `ty`, with a witness.
pub fn t_equal(
    ty: &TypeGraph,
    t1: &TermGraph,
    c1: &Correspondence,
    t2: &TermGraph,
    c2: &Correspondence,
) -> Result<Option<Relabeling>> {
    for (t, c) in [(t1, c1), (t2, c2)] {
        let diags = check_bundle(ty, t, c);
        if !diags.is_empty() {
            return Err(Error::Invalid(diags));
        }
    }
    Ok(find_relabeling(t1, Some(c1), t2, Some(c2)))
}

/// Equality of terms alone; let-binding correspondences take part, the
/// external correspondence does not.
pub fn bare_equal(t1: &TermGraph, t2: &TermGraph) -> Option<Relabeling> {
    find_relabeling(t1, None, t2, None)
}

pub fn types_isomorphic(a: &TypeGraph, b: &TypeGraph) -> Option<Relabeling> {
    let g1 = Encoded::from_type(a);
    let g2 = Encoded::from_type(b);
    let map = search_relabeling(&g1, &g2)?;
    let h = to_relabeling(&g1, &g2, &map);
    (h.apply_type(b) == *a).then_some(h)
}

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{prepare_decode, Builder, Scope, View};
use crate::error::{Error, Result};
use crate::model::{Bundle, Class, FieldDescriptor, Id, TypeGraph};

/// A directed multigraph on vertices `0..vertex_count`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Multigraph {
    pub vertex_count: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Multigraph {
    pub fn new(vertex_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let edges: Vec<(usize, usize)> = edges.into_iter().collect();
        if let Some(&(s, t)) = edges.iter().find(|(s, t)| *s >= vertex_count || *t >= vertex_count) {
            return Err(Error::Type(format!("edge {s}->{t} leaves the {vertex_count} vertices")));
        }
        Ok(Multigraph { vertex_count, edges })
    }

    /// Every edge duplicated.
    pub fn doubled(&self) -> Multigraph {
        let edges = self.edges.iter().flat_map(|&e| [e, e]).collect();
        Multigraph { vertex_count: self.vertex_count, edges }
    }

    /// Edges as a sorted multiset.
    pub fn edge_multiset(&self) -> Vec<(usize, usize)> {
        let mut e = self.edges.clone();
        e.sort_unstable();
        e
    }
}

/// `n=3; 0->1 1->2 2->0`
impl fmt::Display for Multigraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={};", self.vertex_count)?;
        for (s, t) in &self.edges {
            write!(f, " {s}->{t}")?;
        }
        Ok(())
    }
}

impl FromStr for Multigraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, rest) = s.split_once(';').unwrap_or((s, ""));
        let n = head
            .trim()
            .strip_prefix("n=")
            .and_then(|x| x.trim().parse::<usize>().ok())
            .ok_or_else(|| Error::Type(format!("expected `n=<count>` in `{}`", head.trim())))?;
        let mut edges = Vec::new();
        for tok in rest.split_whitespace() {
            let (a, b) = tok.split_once("->").ok_or_else(|| Error::Type(format!("expected `a->b`, got `{tok}`")))?;
            let a = a.parse::<usize>().map_err(|_| Error::Type(format!("bad vertex `{a}`")))?;
            let b = b.parse::<usize>().map_err(|_| Error::Type(format!("bad vertex `{b}`")))?;
            edges.push((a, b));
        }
        Multigraph::new(n, edges)
    }
}

pub fn multigraph_type() -> TypeGraph {
    let mut g = TypeGraph::default();
    let r = g.add_interface("Graph", None);
    let vertex = g.add_field("vertex", &r, FieldDescriptor::new(Class::CTOR_RECEIVER));
    let edge = g.add_field("edge", &r, FieldDescriptor::new(Class::CTOR_RECEIVER));
    g.connect(&vertex, &edge);

    let v = g.add_interface("Vertex", Some(&r));
    g.ctor_interface.insert((vertex, v.clone()));
    let vref = g.add_field("vref", &v, FieldDescriptor::new(Class::CTOR_PROVIDER));
    let rf = g.add_interface("Ref", Some(&v));
    g.ctor_interface.insert((vref, rf));

    let e = g.add_interface("Edge", Some(&r));
    g.ctor_interface.insert((edge, e.clone()));
    let src = g.add_field("src", &e, FieldDescriptor::new(Class::CTOR_RECEIVER));
    let tgt = g.add_field("tgt", &e, FieldDescriptor::new(Class::CTOR_RECEIVER));
    g.connect(&src, &tgt);
    let si = g.add_interface("Src", Some(&e));
    let ti = g.add_interface("Tgt", Some(&e));
    g.ctor_interface.insert((src, si));
    g.ctor_interface.insert((tgt, ti));
    g
}

pub fn encode_multigraph(m: &Multigraph) -> Result<Bundle> {
    let m = Multigraph::new(m.vertex_count, m.edges.iter().copied())?;
    let mut b = Builder::new(multigraph_type());
    let (root, ports) = b.root_box()?;
    let (vp, ep) = (ports[&Id::new("vertex")].clone(), ports[&Id::new("edge")].clone());
    let ext = Scope::External;
    let (vi, ei, ri) = (Id::new("Vertex"), Id::new("Edge"), Id::new("Ref"));
    let refs: Vec<Id> = (0..m.vertex_count)
        .map(|_| {
            let (_, ps) = b.node(&root, &vp, &vi, &ext);
            ps[&Id::new("vref")].clone()
        })
        .collect();
    for &(s, t) in &m.edges {
        let (_, ps) = b.node(&root, &ep, &ei, &ext);
        for (end, field, iface) in [(s, "src", "Src"), (t, "tgt", "Tgt")] {
            let recv = ps[&Id::new(field)].clone();
            b.eta(&root, (&refs[end], &ri, &ext), (&recv, &Id::new(iface), &ext))?;
        }
    }
    Ok(b.finish())
}

/// Vertices are numbered in the order of their node ids.
pub fn decode_multigraph(bundle: &Bundle) -> Result<Multigraph> {
    let roles = prepare_decode(bundle, &multigraph_type())?;
    let v = View::new(bundle, roles);
    v.no_lets()?;
    let root = v.root()?;
    let vertex = v.port(&root, "vertex")?;
    let edge = v.port(&root, "edge")?;
    let t = &bundle.term;

    let mut index: BTreeMap<Id, usize> = BTreeMap::new();
    let mut vertices: Vec<&Id> = v.ix.constructed_by(&vertex).iter().collect();
    vertices.sort();
    for (k, n) in vertices.iter().enumerate() {
        if v.ix.parent_box.get(*n) != Some(&root) {
            return Err(Error::decode(n, "vertex outside the root box"));
        }
        index.insert(v.port(n, "vref")?, k);
    }
    let mut seen: BTreeSet<&Id> = vertices.iter().copied().collect();
    let mut edge_nodes: Vec<&Id> = v.ix.constructed_by(&edge).iter().collect();
    edge_nodes.sort();
    let mut boxes: BTreeSet<&Id> = BTreeSet::new();
    let mut edges = Vec::new();
    for n in edge_nodes {
        if v.ix.parent_box.get(n) != Some(&root) {
            return Err(Error::decode(n, "edge outside the root box"));
        }
        seen.insert(n);
        let mut ends = [0usize; 2];
        for (k, field) in ["src", "tgt"].into_iter().enumerate() {
            let p = v.port(n, field)?;
            let b = v.ix.arg_box.get(&p).ok_or_else(|| Error::decode(&p, "endpoint has no argument box"))?;
            boxes.insert(b);
            let inside = v.ix.contents_of(b);
            let [only] = inside else {
                return Err(Error::decode(b, "endpoint box must hold exactly one node"));
            };
            let c = v.ix.ctor_of.get(only).ok_or_else(|| Error::decode(only, "not a constructed node"))?;
            ends[k] = *index.get(c).ok_or_else(|| Error::decode(only, "endpoint does not refer to a vertex"))?;
            seen.insert(only);
        }
        edges.push((ends[0], ends[1]));
    }
    if let Some(n) = t.nodes.iter().find(|n| !seen.contains(n)) {
        return Err(Error::decode(n, "node is neither a vertex, an edge nor an endpoint"));
    }
    if let Some(x) = t.boxes.iter().find(|x| **x != root && !boxes.contains(x)) {
        return Err(Error::decode(x, "unexpected box"));
    }
    edges.sort_unstable();
    Multigraph::new(vertices.len(), edges)
}

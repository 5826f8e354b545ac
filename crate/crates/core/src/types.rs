//! Type formers over type graphs and the translation of functional types.
//!
//! The top level of a type is the set of fields residing in its root
//! interface. `dual` flips their polarity and complements their
//! connectivity; `juxtapose` and `bowtie` place two types side by side
//! under one root, the latter connecting every top-level field of one side
//! with every top-level field of the other.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{sym, Class, FieldDescriptor, Id, TypeGraph, DEFAULT_PRIMITIVE};

/// A simple linear functional type.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FunctionalType {
    Primitive(String),
    /// The empty product.
    Unit,
    Product(Box<FunctionalType>, Box<FunctionalType>),
    Lolli(Box<FunctionalType>, Box<FunctionalType>),
    Bang(Box<FunctionalType>),
}

impl FunctionalType {
    pub fn prim(label: impl Into<String>) -> Self {
        FunctionalType::Primitive(label.into())
    }

    pub fn product(a: FunctionalType, b: FunctionalType) -> Self {
        FunctionalType::Product(Box::new(a), Box::new(b))
    }

    pub fn lolli(a: FunctionalType, b: FunctionalType) -> Self {
        FunctionalType::Lolli(Box::new(a), Box::new(b))
    }

    pub fn bang(a: FunctionalType) -> Self {
        FunctionalType::Bang(Box::new(a))
    }

    pub fn primitives(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            match t {
                FunctionalType::Primitive(l) => {
                    out.insert(l.as_str());
                }
                FunctionalType::Unit => {}
                FunctionalType::Product(a, b) | FunctionalType::Lolli(a, b) => {
                    stack.push(a);
                    stack.push(b);
                }
                FunctionalType::Bang(a) => stack.push(a),
            }
        }
        out
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        match self {
            FunctionalType::Primitive(l) => f.write_str(l),
            FunctionalType::Unit => f.write_str("1"),
            FunctionalType::Bang(a) => {
                f.write_str("!")?;
                a.fmt_prec(f, 2)
            }
            FunctionalType::Product(a, b) => {
                if prec > 1 {
                    f.write_str("(")?;
                }
                a.fmt_prec(f, 1)?;
                f.write_str(" * ")?;
                b.fmt_prec(f, 2)?;
                if prec > 1 {
                    f.write_str(")")?;
                }
                Ok(())
            }
            FunctionalType::Lolli(a, b) => {
                if prec > 0 {
                    f.write_str("(")?;
                }
                a.fmt_prec(f, 1)?;
                f.write_str(" -o ")?;
                b.fmt_prec(f, 0)?;
                if prec > 0 {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for FunctionalType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    One,
    Star,
    Lolli,
    Bang,
    Open,
    Close,
}

fn lex(s: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let cs: Vec<(usize, char)> = s.char_indices().collect();
    let mut k = 0;
    while k < cs.len() {
        let (pos, c) = cs[k];
        match c {
            c if c.is_whitespace() => {}
            '*' => out.push((pos, Tok::Star)),
            '!' => out.push((pos, Tok::Bang)),
            '(' => out.push((pos, Tok::Open)),
            ')' => out.push((pos, Tok::Close)),
            '1' => out.push((pos, Tok::One)),
            '-' if cs.get(k + 1).map(|x| x.1) == Some('o') => {
                out.push((pos, Tok::Lolli));
                k += 1;
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = k;
                while k + 1 < cs.len() && (cs[k + 1].1.is_alphanumeric() || cs[k + 1].1 == '_') {
                    k += 1;
                }
                let word: String = cs[start..=k].iter().map(|x| x.1).collect();
                out.push((pos, Tok::Ident(word)));
            }
            _ => return Err(Error::Type(format!("unexpected `{c}` at column {}", pos + 1))),
        }
        k += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.1)
    }

    fn column(&self) -> usize {
        self.toks.get(self.at).map_or(self.len, |t| t.0) + 1
    }

    fn lolli(&mut self) -> Result<FunctionalType> {
        let a = self.product()?;
        if self.peek() == Some(&Tok::Lolli) {
            self.at += 1;
            let b = self.lolli()?;
            return Ok(FunctionalType::lolli(a, b));
        }
        Ok(a)
    }

    fn product(&mut self) -> Result<FunctionalType> {
        let mut a = self.unary()?;
        while self.peek() == Some(&Tok::Star) {
            self.at += 1;
            let b = self.unary()?;
            a = FunctionalType::product(a, b);
        }
        Ok(a)
    }

    fn unary(&mut self) -> Result<FunctionalType> {
        let col = self.column();
        match self.toks.get(self.at).map(|t| t.1.clone()) {
            Some(Tok::Bang) => {
                self.at += 1;
                Ok(FunctionalType::bang(self.unary()?))
            }
            Some(Tok::One) => {
                self.at += 1;
                Ok(FunctionalType::Unit)
            }
            Some(Tok::Ident(l)) => {
                self.at += 1;
                Ok(FunctionalType::Primitive(l))
            }
            Some(Tok::Open) => {
                self.at += 1;
                let t = self.lolli()?;
                if self.peek() != Some(&Tok::Close) {
                    return Err(Error::Type(format!("expected `)` at column {}", self.column())));
                }
                self.at += 1;
                Ok(t)
            }
            Some(t) => Err(Error::Type(format!("unexpected {t:?} at column {col}"))),
            None => Err(Error::Type(format!("unexpected end of type at column {col}"))),
        }
    }
}

impl FromStr for FunctionalType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser { toks: lex(s)?, at: 0, len: s.len() };
        let t = p.lolli()?;
        if p.at != p.toks.len() {
            return Err(Error::Type(format!("trailing input at column {}", p.column())));
        }
        Ok(t)
    }
}

/// Fields residing directly in the root interface.
pub fn top_fields(t: &TypeGraph) -> Vec<Id> {
    match t.root() {
        Some(r) => t.fields_of(&r).cloned().collect(),
        None => Vec::new(),
    }
}

pub fn dual(t: &TypeGraph) -> TypeGraph {
    let mut out = t.clone();
    let top = top_fields(t);
    for f in &top {
        if let Some(fd) = out.fields.get_mut(f) {
            fd.class = fd.class.flipped();
        }
    }
    let top_set: BTreeSet<&Id> = top.iter().collect();
    out.connectivity.retain(|(a, b)| !(top_set.contains(a) && top_set.contains(b)));
    for (k, a) in top.iter().enumerate() {
        for b in &top[k + 1..] {
            if !t.connected(a, b) {
                out.connect(a, b);
            }
        }
    }
    out
}

fn fresh_like(used: &mut BTreeSet<Id>, id: &Id) -> Id {
    if used.insert(id.clone()) {
        return id.clone();
    }
    let base = id.as_str().split('\'').next().unwrap_or(id.as_str());
    let mut k = 1usize;
    loop {
        let cand = Id::new(format!("{base}'{k}"));
        if used.insert(cand.clone()) {
            return cand;
        }
        k += 1;
    }
}

/// Copies everything of `src` except its root into `dst`, hanging the
/// root's children below `parent`. Clashing ids are renamed.
fn embed(dst: &mut TypeGraph, src: &TypeGraph, parent: &Id) -> BTreeMap<Id, Id> {
    let mut used: BTreeSet<Id> = dst.all_ids().cloned().collect();
    let src_root = src.root();
    let mut map: BTreeMap<Id, Id> = BTreeMap::new();
    for id in src.all_ids() {
        if Some(id) == src_root.as_ref() {
            map.insert(id.clone(), parent.clone());
        } else {
            map.insert(id.clone(), fresh_like(&mut used, id));
        }
    }
    for i in &src.interfaces {
        dst.interfaces.insert(map[i].clone());
    }
    for (f, fd) in &src.fields {
        dst.fields.insert(map[f].clone(), fd.clone());
    }
    for (a, b) in &src.residence {
        dst.residence.insert((map[a].clone(), map[b].clone()));
    }
    for (a, b) in &src.ctor_interface {
        dst.ctor_interface.insert((map[a].clone(), map[b].clone()));
    }
    for (a, b) in &src.connectivity {
        dst.connectivity.insert(sym(map[a].clone(), map[b].clone()));
    }
    map
}

fn with_root(t: &TypeGraph) -> TypeGraph {
    let mut out = t.clone();
    if out.root().is_none() && out.interfaces.is_empty() {
        out.add_interface("I", None);
    }
    out
}

/// Disjoint union under a single root (the root of `t`).
pub fn juxtapose(t: &TypeGraph, s: &TypeGraph) -> TypeGraph {
    let mut out = with_root(t);
    let root = out.root().unwrap_or_else(|| Id::new("I"));
    embed(&mut out, s, &root);
    out
}

pub fn bowtie(t: &TypeGraph, s: &TypeGraph) -> TypeGraph {
    bowtie_with_map(t, s).0
}

/// `bowtie`, also returning where each id of `s` ended up.
pub fn bowtie_with_map(t: &TypeGraph, s: &TypeGraph) -> (TypeGraph, BTreeMap<Id, Id>) {
    let mut out = with_root(t);
    let root = out.root().unwrap_or_else(|| Id::new("I"));
    let left = top_fields(&out);
    let map = embed(&mut out, s, &root);
    for a in &left {
        for f in top_fields(s) {
            out.connect(a, &map[&f]);
        }
    }
    (out, map)
}

/// Mints globally unique names while translating.
#[derive(Default)]
struct Namer {
    next: usize,
}

impl Namer {
    fn iface(&mut self) -> Id {
        self.next += 1;
        Id::new(format!("I{}", self.next))
    }

    fn field(&mut self) -> Id {
        self.next += 1;
        Id::new(format!("f{}", self.next))
    }
}

/// Translates with the single primitive `X`.
pub fn translate(ft: &FunctionalType) -> Result<TypeGraph> {
    translate_with(ft, &[DEFAULT_PRIMITIVE])
}

pub fn translate_with(ft: &FunctionalType, primitives: &[&str]) -> Result<TypeGraph> {
    if let Some(bad) = ft.primitives().into_iter().find(|p| !primitives.contains(p)) {
        return Err(Error::Type(format!("unknown primitive `{bad}`")));
    }
    Ok(tr(ft, &mut Namer::default()))
}

fn tr(ft: &FunctionalType, n: &mut Namer) -> TypeGraph {
    match ft {
        FunctionalType::Primitive(l) => {
            let mut g = TypeGraph::default();
            let r = g.add_interface(n.iface(), None);
            g.add_field(n.field(), &r, FieldDescriptor::labeled(Class::RES_PROVIDER, l.clone()));
            g
        }
        FunctionalType::Unit => {
            let mut g = TypeGraph::default();
            g.add_interface(n.iface(), None);
            g
        }
        FunctionalType::Product(a, b) => juxtapose(&tr(a, n), &tr(b, n)),
        FunctionalType::Lolli(a, b) => bowtie(&dual(&tr(a, n)), &tr(b, n)),
        FunctionalType::Bang(a) => {
            let inner = tr(a, n);
            let mut g = TypeGraph::default();
            let r = g.add_interface(n.iface(), None);
            let f = g.add_field(n.field(), &r, FieldDescriptor::new(Class::CTOR_PROVIDER));
            let j = g.add_interface(n.iface(), Some(&r));
            g.ctor_interface.insert((f, j.clone()));
            embed(&mut g, &inner, &j);
            g
        }
    }
}

pub fn parse_and_translate(s: &str) -> Result<TypeGraph> {
    translate(&s.parse()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equality::types_isomorphic;
    use crate::validate::validate_type_fragment;

    fn ty(s: &str) -> TypeGraph {
        parse_and_translate(s).unwrap()
    }

    #[test]
    fn parse_precedence() {
        let t: FunctionalType = "!(X -o X) -o X * X -o X".parse().unwrap();
        assert_eq!(t.to_string(), "!(X -o X) -o X * X -o X");
        let u: FunctionalType = "(X -o X) * !1".parse().unwrap();
        assert_eq!(u.to_string(), "(X -o X) * !1");
        assert!("X -o".parse::<FunctionalType>().is_err());
        assert!("X )".parse::<FunctionalType>().is_err());
    }

    #[test]
    fn primitive_is_one_provided_field() {
        let g = ty("X");
        assert_eq!(g.fields.len(), 1);
        assert_eq!(g.fields.values().next().unwrap().class, Class::RES_PROVIDER);
        assert!(matches!(parse_and_translate("Y"), Err(Error::Type(_))));
        assert!(translate_with(&"Y".parse().unwrap(), &["X", "Y"]).is_ok());
    }

    #[test]
    fn function_connects_input_and_output() {
        let g = ty("X -o X");
        let top = top_fields(&g);
        assert_eq!(top.len(), 2);
        assert!(g.connected(&top[0], &top[1]));
        let classes: BTreeSet<Class> = g.fields.values().map(|f| f.class).collect();
        assert_eq!(classes, [Class::RES_PROVIDER, Class::RES_RECEIVER].into());
    }

    #[test]
    fn outputs_are_valid_types() {
        for s in ["X", "1", "X * X", "!(X -o X) -o X -o X", "!(!(X -o X) -o X) -o !1 * X", "(X -o X) -o X"] {
            let g = ty(s);
            assert!(validate_type_fragment(&g).is_empty(), "{s}");
            assert!(validate_type_fragment(&dual(&g)).is_empty(), "{s}");
        }
    }

    #[test]
    fn bang_nests_the_inner_type() {
        let g = ty("!(X -o X)");
        let top = top_fields(&g);
        assert_eq!(top.len(), 1);
        let j = g.interface_of_field(&top[0]).unwrap();
        assert_eq!(g.fields_of(j).count(), 2);
        // nested content is untouched by dual
        let d = dual(&g);
        assert_eq!(d.fields[&top[0]].class, Class::CTOR_RECEIVER);
        assert!(types_isomorphic(&dual(&d), &g).is_some());
    }
}

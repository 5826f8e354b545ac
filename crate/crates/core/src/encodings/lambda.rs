use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{prepare_decode, Builder, Scope, View};
use crate::error::{Error, Result};
use crate::model::{Bundle, Class, FieldDescriptor, Id, TypeGraph};

/// A lambda term with de Bruijn indices (`Var(0)` is the nearest binder).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LambdaTerm {
    Var(usize),
    App(Box<LambdaTerm>, Box<LambdaTerm>),
    Abs(Box<LambdaTerm>),
}

impl LambdaTerm {
    pub fn app(f: LambdaTerm, a: LambdaTerm) -> Self {
        LambdaTerm::App(Box::new(f), Box::new(a))
    }

    pub fn abs(body: LambdaTerm) -> Self {
        LambdaTerm::Abs(Box::new(body))
    }

    /// True when every variable refers to an enclosing abstraction.
    pub fn is_closed(&self) -> bool {
        fn go(t: &LambdaTerm, depth: usize) -> bool {
            match t {
                LambdaTerm::Var(k) => *k < depth,
                LambdaTerm::App(f, a) => go(f, depth) && go(a, depth),
                LambdaTerm::Abs(b) => go(b, depth + 1),
            }
        }
        go(self, 0)
    }

    pub fn depth(&self) -> usize {
        match self {
            LambdaTerm::Var(_) => 1,
            LambdaTerm::App(f, a) => 1 + f.depth().max(a.depth()),
            LambdaTerm::Abs(b) => 1 + b.depth(),
        }
    }

    fn fmt_named(&self, f: &mut fmt::Formatter<'_>, names: &mut Vec<String>, ctx: u8) -> fmt::Result {
        match self {
            LambdaTerm::Var(k) => match names.len().checked_sub(k + 1).and_then(|i| names.get(i)) {
                Some(n) => f.write_str(n),
                None => write!(f, "#{k}"),
            },
            LambdaTerm::Abs(b) => {
                if ctx > 0 {
                    f.write_str("(")?;
                }
                let name = var_name(names.len());
                write!(f, "\\{name}. ")?;
                names.push(name);
                b.fmt_named(f, names, 0)?;
                names.pop();
                if ctx > 0 {
                    f.write_str(")")?;
                }
                Ok(())
            }
            LambdaTerm::App(g, a) => {
                if ctx > 1 {
                    f.write_str("(")?;
                }
                g.fmt_named(f, names, 1)?;
                f.write_str(" ")?;
                a.fmt_named(f, names, 2)?;
                if ctx > 1 {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

fn var_name(k: usize) -> String {
    const LETTERS: &[u8] = b"xyzwuvabcdefghijklmnopqrst";
    let c = LETTERS[k % LETTERS.len()] as char;
    if k < LETTERS.len() {
        c.to_string()
    } else {
        format!("{c}{}", k / LETTERS.len())
    }
}

/// Named form with binders `x`, `y`, `z`, ... by depth.
impl fmt::Display for LambdaTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_named(f, &mut Vec::new(), 0)
    }
}

struct LamParser<'a> {
    toks: Vec<(usize, &'a str)>,
    at: usize,
    scope: Vec<&'a str>,
}

fn lex_lambda(s: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, c) in s.char_indices() {
        let word = c.is_alphanumeric() || c == '_' || c == '\'';
        if word {
            start.get_or_insert(i);
            continue;
        }
        if let Some(st) = start.take() {
            out.push((st, &s[st..i]));
        }
        if !c.is_whitespace() {
            out.push((i, &s[i..i + c.len_utf8()]));
        }
    }
    if let Some(st) = start {
        out.push((st, &s[st..]));
    }
    out
}

impl<'a> LamParser<'a> {
    fn peek(&self) -> Option<&'a str> {
        self.toks.get(self.at).map(|t| t.1)
    }

    fn err(&self, what: &str) -> Error {
        let col = self.toks.get(self.at).map_or(0, |t| t.0) + 1;
        Error::Type(format!("{what} at column {col}"))
    }

    fn term(&mut self) -> Result<LambdaTerm> {
        let mut acc: Option<LambdaTerm> = None;
        loop {
            let next = match self.peek() {
                Some("\\") | Some("λ") => self.abs()?,
                Some("(") => {
                    self.at += 1;
                    let t = self.term()?;
                    if self.peek() != Some(")") {
                        return Err(self.err("expected `)`"));
                    }
                    self.at += 1;
                    t
                }
                Some(w) if w.chars().next().is_some_and(|c| c.is_alphanumeric() || c == '_') => {
                    self.at += 1;
                    let k = self.scope.iter().rev().position(|n| *n == w);
                    match k {
                        Some(k) => LambdaTerm::Var(k),
                        None => {
                            self.at -= 1;
                            return Err(self.err(&format!("unbound variable `{w}`")));
                        }
                    }
                }
                _ => break,
            };
            acc = Some(match acc {
                None => next,
                Some(f) => LambdaTerm::app(f, next),
            });
        }
        acc.ok_or_else(|| self.err("expected a term"))
    }

    fn abs(&mut self) -> Result<LambdaTerm> {
        self.at += 1;
        let name = match self.peek() {
            Some(w) if w.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_') => w,
            _ => return Err(self.err("expected a binder name")),
        };
        self.at += 1;
        if self.peek() != Some(".") {
            return Err(self.err("expected `.`"));
        }
        self.at += 1;
        self.scope.push(name);
        let body = self.term();
        self.scope.pop();
        Ok(LambdaTerm::abs(body?))
    }
}

/// Parses `\x. \y. y x`; only closed terms are accepted.
impl FromStr for LambdaTerm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = LamParser { toks: lex_lambda(s), at: 0, scope: Vec::new() };
        let t = p.term()?;
        if p.at != p.toks.len() {
            return Err(p.err("trailing input"));
        }
        Ok(t)
    }
}

fn build_type(var_parent_edge: bool) -> TypeGraph {
    let mut g = TypeGraph::default();
    let r = g.add_interface("Lam", None);
    let out = g.add_field("out", &r, FieldDescriptor::labeled(Class::RES_PROVIDER, "X"));
    let abs = g.add_field("abs", &r, FieldDescriptor::new(Class::CTOR_RECEIVER));
    let app = g.add_field("app", &r, FieldDescriptor::new(Class::CTOR_RECEIVER));
    g.connect(&out, &abs);
    g.connect(&out, &app);
    g.connect(&abs, &app);

    let ai = g.add_interface("Abs", Some(&r));
    g.ctor_interface.insert((abs, ai.clone()));
    let parent = g.add_field("abs_parent", &ai, FieldDescriptor::labeled(Class::RES_PROVIDER, "X"));
    let body = g.add_field("body", &ai, FieldDescriptor::labeled(Class::RES_RECEIVER, "X"));
    let var = g.add_field("var", &ai, FieldDescriptor::new(Class::CTOR_PROVIDER));
    g.connect(&parent, &body);
    if var_parent_edge {
        g.connect(&var, &parent);
    }
    let vi = g.add_interface("Var", Some(&ai));
    g.ctor_interface.insert((var, vi.clone()));
    g.add_field("var_parent", &vi, FieldDescriptor::labeled(Class::RES_PROVIDER, "X"));

    let pi = g.add_interface("App", Some(&r));
    g.ctor_interface.insert((app, pi.clone()));
    let ap = g.add_field("app_parent", &pi, FieldDescriptor::labeled(Class::RES_PROVIDER, "X"));
    let fun = g.add_field("fun", &pi, FieldDescriptor::labeled(Class::RES_RECEIVER, "X"));
    let arg = g.add_field("arg", &pi, FieldDescriptor::labeled(Class::RES_RECEIVER, "X"));
    g.connect(&ap, &fun);
    g.connect(&ap, &arg);
    g.connect(&fun, &arg);
    g
}

pub fn lambda_type() -> TypeGraph {
    build_type(true)
}

/// The same type without the edge between a variable constructor and the
/// parent of its abstraction, which admits variables above their binder.
pub fn lambda_type_variant() -> TypeGraph {
    build_type(false)
}

pub fn encode_lambda(term: &LambdaTerm) -> Result<Bundle> {
    if !term.is_closed() {
        return Err(Error::Type("cannot encode an open term".into()));
    }
    let mut b = Builder::new(lambda_type());
    let (root, ports) = b.root_box()?;
    let (absp, appp) = (ports[&Id::new("abs")].clone(), ports[&Id::new("app")].clone());
    let ext = Scope::External;
    let f = Id::new;

    enum Job<'a> {
        Visit(&'a LambdaTerm),
        Close { body: Id, parent: Id },
        App { fun: Id, arg: Id, parent: Id },
    }
    let mut binders: Vec<Id> = Vec::new();
    let mut jobs = vec![Job::Visit(term)];
    let mut done: Vec<Id> = Vec::new();
    while let Some(job) = jobs.pop() {
        match job {
            Job::Visit(LambdaTerm::Var(k)) => {
                let ctor = binders[binders.len() - 1 - k].clone();
                let (_, ps) = b.node(&root, &ctor, &f("Var"), &ext);
                done.push(ps[&f("var_parent")].clone());
            }
            Job::Visit(LambdaTerm::Abs(body)) => {
                let (_, ps) = b.node(&root, &absp, &f("Abs"), &ext);
                binders.push(ps[&f("var")].clone());
                jobs.push(Job::Close { body: ps[&f("body")].clone(), parent: ps[&f("abs_parent")].clone() });
                jobs.push(Job::Visit(body));
            }
            Job::Visit(LambdaTerm::App(g, a)) => {
                let (_, ps) = b.node(&root, &appp, &f("App"), &ext);
                jobs.push(Job::App {
                    fun: ps[&f("fun")].clone(),
                    arg: ps[&f("arg")].clone(),
                    parent: ps[&f("app_parent")].clone(),
                });
                jobs.push(Job::Visit(a));
                jobs.push(Job::Visit(g));
            }
            Job::Close { body, parent } => {
                binders.pop();
                let p = done.pop().expect("body");
                b.t.wire(&p, &body);
                done.push(parent);
            }
            Job::App { fun, arg, parent } => {
                let a = done.pop().expect("argument");
                let g = done.pop().expect("function");
                b.t.wire(&g, &fun);
                b.t.wire(&a, &arg);
                done.push(parent);
            }
        }
    }
    let top = done.pop().expect("term");
    b.t.wire(&top, &ports[&f("out")]);
    Ok(b.finish())
}

/// Decodes against either lambda type.
pub fn decode_lambda(bundle: &Bundle) -> Result<LambdaTerm> {
    let roles = prepare_decode(bundle, &lambda_type()).or_else(|_| prepare_decode(bundle, &lambda_type_variant()))?;
    let v = View::new(bundle, roles);
    v.no_lets()?;
    let root = v.root()?;
    if let Some(extra) = bundle.term.boxes.iter().find(|x| **x != root) {
        return Err(Error::decode(extra, "a lambda term has no nested boxes"));
    }
    let absp = v.port(&root, "abs")?;
    let appp = v.port(&root, "app")?;
    let mut seen: BTreeSet<Id> = BTreeSet::new();
    // binder port -> depth at which it was introduced
    let mut binder_depth: BTreeMap<Id, usize> = BTreeMap::new();

    enum Job {
        Visit(Id, usize),
        Abs(Id),
        App,
    }
    let mut jobs = vec![Job::Visit(v.port(&root, "out")?, 0)];
    let mut done: Vec<LambdaTerm> = Vec::new();
    while let Some(job) = jobs.pop() {
        match job {
            Job::Visit(recv, depth) => {
                let (_, n) = v.wired_owner(&recv)?;
                if !seen.insert(n.clone()) {
                    return Err(Error::decode(&n, "node reached twice"));
                }
                let ctor = v.ix.ctor_of.get(&n).ok_or_else(|| Error::decode(&n, "not a constructed node"))?.clone();
                if ctor == absp {
                    let var = v.port(&n, "var")?;
                    binder_depth.insert(var.clone(), depth);
                    jobs.push(Job::Abs(var));
                    jobs.push(Job::Visit(v.port(&n, "body")?, depth + 1));
                } else if ctor == appp {
                    jobs.push(Job::App);
                    jobs.push(Job::Visit(v.port(&n, "arg")?, depth));
                    jobs.push(Job::Visit(v.port(&n, "fun")?, depth));
                } else if let Some(&d) = binder_depth.get(&ctor) {
                    if d >= depth {
                        return Err(Error::decode(&n, "variable outside the scope of its binder"));
                    }
                    done.push(LambdaTerm::Var(depth - d - 1));
                } else {
                    return Err(Error::decode(&n, "variable outside the scope of its binder"));
                }
            }
            Job::Abs(var) => {
                binder_depth.remove(&var);
                let body = done.pop().expect("body");
                done.push(LambdaTerm::abs(body));
            }
            Job::App => {
                let a = done.pop().expect("argument");
                let g = done.pop().expect("function");
                done.push(LambdaTerm::app(g, a));
            }
        }
    }
    if let Some(n) = bundle.term.nodes.iter().find(|n| !seen.contains(*n)) {
        return Err(Error::decode(n, "node is not part of the term"));
    }
    Ok(done.pop().expect("term"))
}

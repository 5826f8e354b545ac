use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{prepare_decode, Builder, Scope, View};
use crate::error::{Error, Result};
use crate::model::{Bundle, Class, FieldDescriptor, Id, TypeGraph};

/// An unlabeled binary tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BinTree {
    Leaf,
    Branch(Box<BinTree>, Box<BinTree>),
}

impl BinTree {
    pub fn branch(l: BinTree, r: BinTree) -> Self {
        BinTree::Branch(Box::new(l), Box::new(r))
    }

    pub fn size(&self) -> usize {
        match self {
            BinTree::Leaf => 1,
            BinTree::Branch(l, r) => 1 + l.size() + r.size(),
        }
    }

    pub fn leaves(&self) -> usize {
        match self {
            BinTree::Leaf => 1,
            BinTree::Branch(l, r) => l.leaves() + r.leaves(),
        }
    }
}

/// `()` is a leaf, `(l r)` a branch.
impl fmt::Display for BinTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BinTree::Leaf => f.write_str("()"),
            BinTree::Branch(l, r) => write!(f, "({l} {r})"),
        }
    }
}

impl FromStr for BinTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let cs: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        fn go(cs: &[char], at: &mut usize) -> Result<BinTree> {
            if cs.get(*at) != Some(&'(') {
                return Err(Error::Type(format!("expected `(` at position {}", *at + 1)));
            }
            *at += 1;
            if cs.get(*at) == Some(&')') {
                *at += 1;
                return Ok(BinTree::Leaf);
            }
            let l = go(cs, at)?;
            let r = go(cs, at)?;
            if cs.get(*at) != Some(&')') {
                return Err(Error::Type(format!("expected `)` at position {}", *at + 1)));
            }
            *at += 1;
            Ok(BinTree::branch(l, r))
        }
        let mut at = 0;
        let t = go(&cs, &mut at)?;
        if at != cs.len() {
            return Err(Error::Type(format!("trailing input at position {}", at + 1)));
        }
        Ok(t)
    }
}

pub fn binary_tree_type() -> TypeGraph {
    let mut g = TypeGraph::default();
    let r = g.add_interface("Tree", None);
    let root = g.add_field("root", &r, FieldDescriptor::labeled(Class::RES_PROVIDER, "X"));
    let branch = g.add_field("branch", &r, FieldDescriptor::new(Class::CTOR_RECEIVER));
    let leaf = g.add_field("leaf", &r, FieldDescriptor::new(Class::CTOR_RECEIVER));
    g.connect(&root, &branch);
    g.connect(&root, &leaf);
    g.connect(&branch, &leaf);

    let b = g.add_interface("Branch", Some(&r));
    g.ctor_interface.insert((branch, b.clone()));
    let parent = g.add_field("parent", &b, FieldDescriptor::labeled(Class::RES_PROVIDER, "X"));
    let left = g.add_field("left", &b, FieldDescriptor::labeled(Class::RES_RECEIVER, "X"));
    let right = g.add_field("right", &b, FieldDescriptor::labeled(Class::RES_RECEIVER, "X"));
    g.connect(&parent, &left);
    g.connect(&parent, &right);
    g.connect(&left, &right);

    let l = g.add_interface("Leaf", Some(&r));
    g.ctor_interface.insert((leaf, l.clone()));
    g.add_field("leaf_parent", &l, FieldDescriptor::labeled(Class::RES_PROVIDER, "X"));
    g
}

pub fn encode_bintree(tree: &BinTree) -> Result<Bundle> {
    let mut b = Builder::new(binary_tree_type());
    let (root, ports) = b.root_box()?;
    let (bp, lp) = (ports[&Id::new("branch")].clone(), ports[&Id::new("leaf")].clone());
    let (bi, li) = (Id::new("Branch"), Id::new("Leaf"));
    // iterative post-order so deep trees do not exhaust the stack
    enum Job<'a> {
        Visit(&'a BinTree),
        Join,
    }
    let mut jobs = vec![Job::Visit(tree)];
    let mut done: Vec<Id> = Vec::new();
    while let Some(job) = jobs.pop() {
        match job {
            Job::Visit(BinTree::Leaf) => {
                let (_, ps) = b.node(&root, &lp, &li, &Scope::External);
                done.push(ps[&Id::new("leaf_parent")].clone());
            }
            Job::Visit(BinTree::Branch(l, r)) => {
                jobs.push(Job::Join);
                jobs.push(Job::Visit(r));
                jobs.push(Job::Visit(l));
            }
            Job::Join => {
                let right = done.pop().expect("right subtree");
                let left = done.pop().expect("left subtree");
                let (_, ps) = b.node(&root, &bp, &bi, &Scope::External);
                b.t.wire(&left, &ps[&Id::new("left")]);
                b.t.wire(&right, &ps[&Id::new("right")]);
                done.push(ps[&Id::new("parent")].clone());
            }
        }
    }
    let top = done.pop().expect("root subtree");
    b.t.wire(&top, &ports[&Id::new("root")]);
    Ok(b.finish())
}

pub fn decode_bintree(bundle: &Bundle) -> Result<BinTree> {
    let roles = prepare_decode(bundle, &binary_tree_type())?;
    let v = View::new(bundle, roles);
    v.no_lets()?;
    let root = v.root()?;
    if let Some(extra) = bundle.term.boxes.iter().find(|x| **x != root) {
        return Err(Error::decode(extra, "a tree has no nested boxes"));
    }
    let branch = v.port(&root, "branch")?;
    let leaf = v.port(&root, "leaf")?;
    let mut seen: BTreeSet<Id> = BTreeSet::new();

    enum Job {
        Visit(Id),
        Join,
    }
    let mut jobs = vec![Job::Visit(v.port(&root, "root")?)];
    let mut done: Vec<BinTree> = Vec::new();
    while let Some(job) = jobs.pop() {
        match job {
            Job::Visit(recv) => {
                let (_, n) = v.wired_owner(&recv)?;
                if !seen.insert(n.clone()) {
                    return Err(Error::decode(&n, "node reached twice"));
                }
                let ctor = v.ix.ctor_of.get(&n).ok_or_else(|| Error::decode(&n, "not a constructed node"))?;
                if *ctor == leaf {
                    done.push(BinTree::Leaf);
                } else if *ctor == branch {
                    jobs.push(Job::Join);
                    jobs.push(Job::Visit(v.port(&n, "right")?));
                    jobs.push(Job::Visit(v.port(&n, "left")?));
                } else {
                    return Err(Error::decode(&n, "constructed by neither branch nor leaf"));
                }
            }
            Job::Join => {
                let r = done.pop().expect("right");
                let l = done.pop().expect("left");
                done.push(BinTree::branch(l, r));
            }
        }
    }
    if let Some(n) = bundle.term.nodes.iter().find(|n| !seen.contains(*n)) {
        return Err(Error::decode(n, "node is not part of the tree"));
    }
    Ok(done.pop().expect("tree"))
}

//! Substitution, let-binding inlining and normalization.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::check::check_bundle;
use crate::error::{Error, Result};
use crate::model::{Correspondence, Id, Kind, TermGraph, TermIndex, TypeGraph};
use crate::validate::descent_forest;

/// One inlined binding and the fresh ids minted while inlining it, each
/// mapped back to the component it copies.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub binding: Id,
    pub fresh: BTreeMap<Id, Id>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewriteResult {
    pub term: TermGraph,
    pub external: Correspondence,
    pub trace: Vec<TraceStep>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    OutermostFirst,
    InnermostFirst,
    IdOrder,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::OutermostFirst, Strategy::InnermostFirst, Strategy::IdOrder];
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "outermost-first" => Ok(Strategy::OutermostFirst),
            "innermost-first" => Ok(Strategy::InnermostFirst),
            "id-order" => Ok(Strategy::IdOrder),
            _ => Err(format!("unknown strategy `{s}`")),
        }
    }
}

/// Mints ids of the form `base'k` that are unused anywhere in the term,
/// including its internal types.
struct Fresh {
    used: BTreeSet<Id>,
    counter: usize,
    minted: BTreeMap<Id, Id>,
}

impl Fresh {
    fn new(t: &TermGraph) -> Self {
        let used = t.all_ids().chain(t.internal.all_ids()).cloned().collect();
        Fresh { used, counter: 0, minted: BTreeMap::new() }
    }

    fn mint(&mut self, original: &Id) -> Id {
        let base = match original.as_str().split_once('\'') {
            Some((b, _)) if !b.is_empty() => b,
            _ => original.as_str(),
        };
        loop {
            self.counter += 1;
            let id = Id::new(format!("{base}'{}", self.counter));
            if self.used.insert(id.clone()) {
                self.minted.insert(id.clone(), original.clone());
                return id;
            }
        }
    }
}

struct Work {
    t: TermGraph,
    c: Correspondence,
    fresh: Fresh,
}

impl Work {
    /// Which let fragment (if any) maps `x`.
    fn fragment_of(&self, x: &Id) -> Option<Id> {
        self.t.let_correspondence.iter().find(|(_, f)| f.contains_term(x)).map(|(d, _)| d.clone())
    }

    /// Residents of `b`, transitively, not including `b`.
    fn residents(&self, b: &Id) -> BTreeSet<Id> {
        let mut children: BTreeMap<&Id, Vec<&Id>> = BTreeMap::new();
        for (p, c) in &self.t.residence {
            children.entry(p).or_default().push(c);
        }
        let mut out = BTreeSet::new();
        let mut stack: Vec<&Id> = children.get(b).cloned().unwrap_or_default();
        while let Some(c) = stack.pop() {
            if out.insert(c.clone()) {
                if let Some(cs) = children.get(c) {
                    stack.extend(cs.iter().copied());
                }
            }
        }
        out
    }

    /// Deep copy of an internal interface subtree as a new root.
    fn copy_internal_subtree(&mut self, iface: &Id) -> (Id, BTreeMap<Id, Id>) {
        let ty = &self.t.internal;
        let ids = ty.subtree(iface);
        let mut map = BTreeMap::new();
        for i in &ids {
            map.insert(i.clone(), self.fresh.mint(i));
        }
        let ty = &mut self.t.internal;
        let snapshot = ty.clone();
        for i in &ids {
            if snapshot.interfaces.contains(i) {
                ty.interfaces.insert(map[i].clone());
            }
            if let Some(fd) = snapshot.fields.get(i) {
                ty.fields.insert(map[i].clone(), fd.clone());
            }
        }
        for (a, b) in &snapshot.residence {
            if ids.contains(a) && ids.contains(b) {
                ty.residence.insert((map[a].clone(), map[b].clone()));
            }
        }
        for (a, b) in &snapshot.ctor_interface {
            if ids.contains(a) && ids.contains(b) {
                ty.ctor_interface.insert((map[a].clone(), map[b].clone()));
            }
        }
        for (a, b) in &snapshot.connectivity {
            if ids.contains(a) && ids.contains(b) {
                ty.connect(&map[a], &map[b]);
            }
        }
        (map[iface].clone(), map)
    }

    fn descendants(&self, root: &Id) -> BTreeSet<Id> {
        let mut d = descent_forest(&self.t).descendants(root);
        d.remove(root);
        d
    }

    fn remove_components(&mut self, ids: &BTreeSet<Id>) {
        let t = &mut self.t;
        let dead_roots: BTreeSet<Id> =
            t.let_typing.iter().filter(|(d, _)| ids.contains(d)).map(|(_, i)| i.clone()).collect();
        for r in &dead_roots {
            let sub = t.internal.subtree(r);
            t.internal.remove_all(&sub);
        }
        t.boxes.retain(|x| !ids.contains(x));
        t.nodes.retain(|x| !ids.contains(x));
        t.ports.retain(|x, _| !ids.contains(x));
        t.lets.retain(|x| !ids.contains(x));
        for rel in [
            &mut t.residence,
            &mut t.attachment,
            &mut t.resource_wiring,
            &mut t.ctor_wiring,
            &mut t.ctor_argument,
            &mut t.ctor_usage,
            &mut t.let_typing,
        ] {
            rel.retain(|(a, b)| !ids.contains(a) && !ids.contains(b));
        }
        t.let_correspondence.retain(|d, _| !ids.contains(d));
        for frag in t.let_correspondence.values_mut() {
            frag.retain_terms(|x| !ids.contains(x));
        }
        self.c.retain_terms(|x| !ids.contains(x));
    }

    /// Moves the correspondence entry of `x` in fragment `from` to fragment
    /// `to`, remapping its target.
    fn move_entry(&mut self, x: &Id, from: &Id, to: &Id, targets: &BTreeMap<Id, Id>) {
        let Some(frag) = self.t.let_correspondence.get_mut(from) else { return };
        let moved: Vec<Id> = frag.targets(x).cloned().collect();
        frag.retain_terms(|y| y != x);
        let dest = self.t.let_correspondence.entry(to.clone()).or_default();
        for ty in moved {
            let ty = targets.get(&ty).cloned().unwrap_or(ty);
            dest.insert(x.clone(), ty);
        }
    }

    fn frag_target(&self, d: &Id, x: &Id) -> Option<Id> {
        self.t.let_correspondence.get(d).and_then(|f| f.target(x)).cloned()
    }

    fn substitute(&mut self, d: &Id, b: &Id, n: &Id, iface: &Id) -> Result<()> {
        let ix = TermIndex::new(&self.t);
        let bn = ix.parent_box.get(n).cloned().ok_or_else(|| Error::Precondition(format!("{n} has no box")))?;
        let b_ports: Vec<Id> = ix.attached_to(b).to_vec();
        let n_ports: Vec<Id> = ix.attached_to(n).to_vec();

        // (1) delete n
        self.t.nodes.remove(n);
        self.t.residence.retain(|(_, c)| c != n);
        self.t.ctor_usage.retain(|(x, _)| x != n);
        self.t.attachment.retain(|(o, _)| o != n);
        if let Some(f) = self.t.let_correspondence.get_mut(d) {
            f.retain_terms(|x| x != n);
        }

        // (2) copy everything residing in b into bn
        let inside = self.residents(b);
        let mut m: BTreeMap<Id, Id> = BTreeMap::new();
        for x in &inside {
            m.insert(x.clone(), self.fresh.mint(x));
        }
        let snap = self.t.clone();
        for x in &inside {
            let y = m[x].clone();
            if snap.boxes.contains(x) {
                self.t.boxes.insert(y);
            } else if snap.nodes.contains(x) {
                self.t.nodes.insert(y);
            } else if let Some(cl) = snap.ports.get(x) {
                self.t.ports.insert(y, *cl);
            } else if snap.lets.contains(x) {
                self.t.lets.insert(y);
            }
        }
        let map = |x: &Id| m.get(x).cloned();
        for (p, c) in &snap.residence {
            if let Some(c2) = map(c) {
                let p2 = if p == b { Some(bn.clone()) } else { map(p) };
                if let Some(p2) = p2 {
                    self.t.residence.insert((p2, c2));
                }
            }
        }
        for (o, p) in &snap.attachment {
            if let (Some(o2), Some(p2)) = (map(o), map(p)) {
                self.t.attachment.insert((o2, p2));
            }
        }
        for (rel_in, which) in
            [(&snap.resource_wiring, 0), (&snap.ctor_wiring, 1), (&snap.ctor_argument, 2), (&snap.ctor_usage, 3)]
        {
            for (a, c) in rel_in {
                let (a2, c2) = match which {
                    // wiring and usages of constructors from outside b keep their provider
                    1 => (map(a).or_else(|| map(c).map(|_| a.clone())), map(c)),
                    3 => (map(a), map(c).or_else(|| map(a).map(|_| c.clone()))),
                    _ => (map(a), map(c)),
                };
                if let (Some(a2), Some(c2)) = (a2, c2) {
                    let rel = match which {
                        0 => &mut self.t.resource_wiring,
                        1 => &mut self.t.ctor_wiring,
                        2 => &mut self.t.ctor_argument,
                        _ => &mut self.t.ctor_usage,
                    };
                    rel.insert((a2, c2));
                }
            }
        }
        // nested let-bindings get their own copy of their internal type
        let mut nested_targets: BTreeMap<Id, BTreeMap<Id, Id>> = BTreeMap::new();
        for (e, i) in &snap.let_typing {
            if let Some(e2) = map(e) {
                let (root, tmap) = self.copy_internal_subtree(i);
                self.t.let_typing.insert((e2.clone(), root));
                nested_targets.insert(e.clone(), tmap);
            }
        }
        for (e, frag) in &snap.let_correspondence {
            let (dest, tmap) = match (map(e), nested_targets.get(e)) {
                (Some(e2), Some(tm)) => (e2, Some(tm)),
                _ => (e.clone(), None),
            };
            for (x, ty) in &frag.pairs {
                if let Some(x2) = map(x) {
                    let ty2 = tmap.and_then(|tm| tm.get(ty).cloned()).unwrap_or_else(|| ty.clone());
                    self.t.let_correspondence.entry(dest.clone()).or_default().insert(x2, ty2);
                }
            }
        }
        let ext: Vec<(Id, Id)> = self.c.pairs.iter().filter_map(|(x, ty)| map(x).map(|x2| (x2, ty.clone()))).collect();
        self.c.pairs.extend(ext);

        // (3)-(5) pair the copied box ports with n's ports field by field
        let mut by_field: BTreeMap<Id, (Option<Id>, Option<Id>)> = BTreeMap::new();
        for p in &b_ports {
            if let Some(f) = self.frag_target(d, p) {
                by_field.entry(f).or_default().0 = map(p);
            }
        }
        for p in &n_ports {
            if let Some(f) = self.frag_target(d, p) {
                by_field.entry(f).or_default().1 = Some(p.clone());
            }
        }
        let fields: Vec<Id> = self.t.internal.fields_of(iface).cloned().collect();
        for f in &fields {
            let (Some(pb), Some(pn)) = by_field.get(f).cloned().unwrap_or_default() else {
                return Err(Error::Precondition(format!("field {f} of {iface} is not matched on both sides")));
            };
            let kind = self.t.internal.fields[f].class.kind;
            match kind {
                Kind::Resource => self.splice(&pb, &pn),
                Kind::Constructor => self.bind_constructor(d, f, &bn, &pb, &pn)?,
            }
        }
        Ok(())
    }

    /// Replaces the two wires through `pb` and `pn` with one wire.
    fn splice(&mut self, pb: &Id, pn: &Id) {
        let other = |t: &TermGraph, p: &Id| -> Option<(Id, bool)> {
            t.resource_wiring.iter().find_map(|(a, c)| {
                if a == p {
                    Some((c.clone(), false))
                } else if c == p {
                    Some((a.clone(), true))
                } else {
                    None
                }
            })
        };
        let ob = other(&self.t, pb);
        let on = other(&self.t, pn);
        let erase: BTreeSet<Id> = [pb.clone(), pn.clone()].into();
        self.remove_components(&erase);
        if let (Some((xb, xb_provides)), Some((xn, _))) = (ob, on) {
            if xb_provides {
                self.t.resource_wiring.insert((xb, xn));
            } else {
                self.t.resource_wiring.insert((xn, xb));
            }
        }
    }

    fn bind_constructor(&mut self, d: &Id, f: &Id, bn: &Id, pb: &Id, pn: &Id) -> Result<()> {
        let sub = self
            .t
            .internal
            .interface_of_field(f)
            .cloned()
            .ok_or_else(|| Error::Precondition(format!("constructor field {f} has no interface")))?;
        let new_let = self.fresh.mint(&Id::new("d"));
        self.t.lets.insert(new_let.clone());
        self.t.residence.insert((bn.clone(), new_let.clone()));
        self.t.attachment.retain(|(_, p)| p != pb && p != pn);
        self.t.attachment.insert((new_let.clone(), pb.clone()));
        self.t.attachment.insert((new_let.clone(), pn.clone()));
        let (root, tmap) = self.copy_internal_subtree(&sub);
        self.t.let_typing.insert((new_let.clone(), root));
        self.t.let_correspondence.entry(new_let.clone()).or_default();
        let mut below = self.descendants(pb);
        below.extend(self.descendants(pn));
        for x in &below {
            if let Some(from) = self.fragment_of(x) {
                if &from == d {
                    self.move_entry(x, d, &new_let, &tmap);
                }
            }
        }
        if let Some(frag) = self.t.let_correspondence.get_mut(d) {
            frag.retain_terms(|x| x != pb && x != pn);
        }
        Ok(())
    }
}

/// Inlines let-binding `d`: its body replaces every occurrence, then the
/// binding, its ports, its interface and its body are deleted.
pub fn inline(t: &TermGraph, c: &Correspondence, d: &Id) -> Result<RewriteResult> {
    if !t.lets.contains(d) {
        return Err(Error::UnknownLet(d.clone()));
    }
    let ix = TermIndex::new(t);
    let iface = ix.let_iface.get(d).cloned().ok_or_else(|| Error::Precondition(format!("{d} has no interface")))?;
    let (recv, prov) = ix.let_ports(t, d);
    let (Some(recv), Some(prov)) = (recv, prov) else {
        return Err(Error::Precondition(format!("{d} must have one receiver and one provider port")));
    };
    let body = ix.arg_box.get(&recv).cloned().ok_or_else(|| Error::Precondition(format!("{d} has no body")))?;
    let occurrences: Vec<Id> = ix.constructed_by(&prov).to_vec();
    let empty = Correspondence::new();
    let frag = t.let_correspondence.get(d).unwrap_or(&empty);
    if frag.target(&body) != Some(&iface) {
        return Err(Error::Precondition(format!("body {body} of {d} is not covered at {iface}")));
    }
    for n in &occurrences {
        if frag.target(n) != Some(&iface) {
            return Err(Error::Precondition(format!("occurrence {n} of {d} is not covered at {iface}")));
        }
        if ix.box_within(ix.parent_box.get(n).unwrap_or(n), &body) {
            return Err(Error::Precondition(format!("occurrence {n} of {d} lies inside its own body")));
        }
    }

    let mut w = Work { t: t.clone(), c: c.clone(), fresh: Fresh::new(t) };
    for n in &occurrences {
        w.substitute(d, &body, n, &iface)?;
    }
    // constructors licensed into the body stay licensed wherever it lands
    let into: Vec<Id> = t.ctor_wiring.iter().filter(|(_, r)| *r == recv).map(|(c, _)| c.clone()).collect();
    let onward: Vec<Id> = t.ctor_wiring.iter().filter(|(c, _)| *c == prov).map(|(_, r)| r.clone()).collect();
    for c in &into {
        for r in &onward {
            if w.t.ports.contains_key(c) && w.t.ports.contains_key(r) {
                w.t.ctor_wiring.insert((c.clone(), r.clone()));
            }
        }
    }
    let mut dead = w.residents(&body);
    dead.extend([d.clone(), recv, prov, body]);
    w.remove_components(&dead);
    let sub = w.t.internal.subtree(&iface);
    w.t.internal.remove_all(&sub);
    w.t.let_typing.retain(|(x, _)| x != d);
    w.t.let_correspondence.remove(d);

    let step = TraceStep { binding: d.clone(), fresh: w.fresh.minted };
    Ok(RewriteResult { term: w.t, external: w.c, trace: vec![step] })
}

/// Inlines `d` and checks that the result still passes every check.
pub fn reduce_step(ty: &TypeGraph, t: &TermGraph, c: &Correspondence, d: &Id) -> Result<RewriteResult> {
    let r = inline(t, c, d)?;
    let diags = check_bundle(ty, &r.term, &r.external);
    if !diags.is_empty() {
        return Err(Error::Invalid(diags));
    }
    Ok(r)
}

pub fn list_redexes(t: &TermGraph) -> Vec<Id> {
    t.lets.iter().cloned().collect()
}

fn residence_depth(t: &TermGraph, x: &Id) -> usize {
    let ix = TermIndex::new(t);
    let mut depth = 0;
    let mut cur = x;
    while let Some(p) = ix.parent_box.get(cur) {
        depth += 1;
        cur = p;
        if depth > t.boxes.len() + 1 {
            break;
        }
    }
    depth
}

pub fn pick_redex(t: &TermGraph, strategy: Strategy) -> Option<Id> {
    let redexes = list_redexes(t);
    match strategy {
        Strategy::IdOrder => redexes.into_iter().next(),
        Strategy::OutermostFirst => redexes.into_iter().min_by_key(|d| (residence_depth(t, d), d.clone())),
        Strategy::InnermostFirst => {
            redexes.into_iter().min_by_key(|d| (std::cmp::Reverse(residence_depth(t, d)), d.clone()))
        }
    }
}

/// Inlines let-bindings until none remain.
pub fn normalize(t: &TermGraph, c: &Correspondence, strategy: Strategy, max_steps: usize) -> Result<RewriteResult> {
    let mut cur = RewriteResult { term: t.clone(), external: c.clone(), trace: Vec::new() };
    while let Some(d) = pick_redex(&cur.term, strategy) {
        if cur.trace.len() >= max_steps {
            return Err(Error::StepLimit { limit: max_steps, partial: Box::new(cur) });
        }
        let step = inline(&cur.term, &cur.external, &d)?;
        cur.term = step.term;
        cur.external = step.external;
        cur.trace.extend(step.trace);
    }
    Ok(cur)
}

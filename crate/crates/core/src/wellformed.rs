//! The well-formedness criterion: every cycle alternating between
//! connectivity-derived edges (F) and wires (W) must have an F chord.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::diag::{Diagnostic, Rule};
use crate::error::{Error, Result};
use crate::model::{sym, Correspondence, Id, Namespace, TermGraph, TermIndex, TypeGraph};
use crate::validate::descent_forest;

/// Default cap on DFS extensions during cycle enumeration.
pub const DEFAULT_STEP_CAP: usize = 1_000_000;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FwGraph {
    pub ports: Vec<Id>,
    /// Symmetric, stored with `a < b`.
    pub f_edges: BTreeSet<(Id, Id)>,
    /// Symmetric, stored with `a < b`.
    pub w_edges: BTreeSet<(Id, Id)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EdgeKind {
    F,
    W,
}

impl EdgeKind {
    fn other(self) -> EdgeKind {
        match self {
            EdgeKind::F => EdgeKind::W,
            EdgeKind::W => EdgeKind::F,
        }
    }
}

/// `ports[i]` is joined to `ports[(i + 1) % len]` by an edge of `kinds[i]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AlternatingCycle {
    pub ports: Vec<Id>,
    pub kinds: Vec<EdgeKind>,
}

pub fn build_fw(ty: &TypeGraph, t: &TermGraph, c: &Correspondence) -> Result<FwGraph> {
    let forest = descent_forest(t);
    let ix = TermIndex::new(t);
    let rdc = t.let_correspondence_union();
    let field_of = |p: &Id| -> Option<(&Id, &TypeGraph)> {
        if let Some(f) = c.target(p) {
            if ty.fields.contains_key(f) {
                return Some((f, ty));
            }
        }
        rdc.target(p).filter(|f| t.internal.fields.contains_key(*f)).map(|f| (f, &t.internal))
    };

    let ports: Vec<Id> = t.ports.keys().cloned().collect();
    let ancestry: Vec<Vec<Id>> = ports.iter().map(|p| forest.ancestry(p)).collect();
    let mut f_edges = BTreeSet::new();
    for i in 0..ports.len() {
        let pos_i: BTreeMap<&Id, usize> = ancestry[i].iter().enumerate().map(|(k, a)| (a, k)).collect();
        for j in (i + 1)..ports.len() {
            let (p1, p2) = (&ports[i], &ports[j]);
            let o1 = ix.owner.get(p1);
            if o1.is_some() && o1 == ix.owner.get(p2) && t.lets.contains(o1.unwrap()) {
                f_edges.insert(sym(p1.clone(), p2.clone()));
                continue;
            }
            let Some((k2, k1)) = ancestry[j].iter().enumerate().find_map(|(k, a)| pos_i.get(a).map(|k1| (k, *k1)))
            else {
                continue;
            };
            let common = &ancestry[j][k2];
            let is_node = match t.namespace_of(common) {
                Some(Namespace::Node) => true,
                Some(Namespace::Box) => false,
                _ => continue,
            };
            let a1 = &ancestry[i][k1 - 1];
            let a2 = &ancestry[j][k2 - 1];
            let (f1, g1) = field_of(a1).ok_or_else(|| Error::MissingField(a1.clone()))?;
            let (f2, _) = field_of(a2).ok_or_else(|| Error::MissingField(a2.clone()))?;
            if g1.connected(f1, f2) == is_node {
                f_edges.insert(sym(p1.clone(), p2.clone()));
            }
        }
    }
    let w_edges = t
        .resource_wiring
        .iter()
        .chain(t.ctor_wiring.iter())
        .filter(|(a, b)| a != b)
        .map(|(a, b)| sym(a.clone(), b.clone()))
        .collect();
    Ok(FwGraph { ports, f_edges, w_edges })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepLimitExceeded {
    pub found: Vec<AlternatingCycle>,
}

struct Search<'a> {
    fadj: Vec<Vec<usize>>,
    wadj: Vec<Vec<usize>>,
    fset: BTreeSet<(usize, usize)>,
    ports: &'a [Id],
    cap: usize,
    steps: usize,
    found: BTreeSet<(Vec<usize>, Vec<EdgeKind>)>,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl Search<'_> {
    fn has_f(&self, a: usize, b: usize) -> bool {
        self.fset.contains(&key(a, b))
    }

    fn adj(&self, v: usize, k: EdgeKind) -> &[usize] {
        match k {
            EdgeKind::F => &self.fadj[v],
            EdgeKind::W => &self.wadj[v],
        }
    }

    fn dfs(
        &mut self,
        path: &mut Vec<usize>,
        kinds: &mut Vec<EdgeKind>,
        on_path: &mut [bool],
    ) -> std::result::Result<(), ()> {
        let s = path[0];
        let v = *path.last().unwrap();
        let next = kinds.last().unwrap().other();
        let first = kinds[0];
        let neighbours: Vec<usize> = self.adj(v, next).to_vec();
        for u in neighbours {
            self.steps += 1;
            if self.steps > self.cap {
                return Err(());
            }
            if u == s {
                if path.len() >= 2 && next != first {
                    let mut ks = kinds.clone();
                    ks.push(next);
                    if !self.has_chord(path, &ks) {
                        let canon = canonical(path, &ks);
                        self.found.insert(canon);
                    }
                }
                continue;
            }
            if u < s || on_path[u] {
                continue;
            }
            // An F pair between u and an earlier path vertex that cannot become
            // a cycle edge is a chord of every completion.
            let doomed = path.iter().any(|&w| {
                if !self.has_f(u, w) {
                    return false;
                }
                let via_edge = w == v && next == EdgeKind::F;
                let closing = w == s && next == EdgeKind::W && first == EdgeKind::W;
                !(via_edge || closing)
            });
            if doomed {
                continue;
            }
            path.push(u);
            kinds.push(next);
            on_path[u] = true;
            let r = self.dfs(path, kinds, on_path);
            on_path[u] = false;
            path.pop();
            kinds.pop();
            r?;
        }
        Ok(())
    }

    fn has_chord(&self, path: &[usize], kinds: &[EdgeKind]) -> bool {
        let k = path.len();
        let mut cycle_f: BTreeSet<(usize, usize)> = BTreeSet::new();
        for i in 0..k {
            if kinds[i] == EdgeKind::F {
                cycle_f.insert(key(path[i], path[(i + 1) % k]));
            }
        }
        for i in 0..k {
            for j in (i + 1)..k {
                let e = key(path[i], path[j]);
                if self.fset.contains(&e) && !cycle_f.contains(&e) {
                    return true;
                }
            }
        }
        false
    }

    fn to_cycle(&self, (vs, ks): &(Vec<usize>, Vec<EdgeKind>)) -> AlternatingCycle {
        AlternatingCycle { ports: vs.iter().map(|&v| self.ports[v].clone()).collect(), kinds: ks.clone() }
    }
}

/// Minimum of the two traversal directions starting from the smallest vertex.
fn canonical(path: &[usize], kinds: &[EdgeKind]) -> (Vec<usize>, Vec<EdgeKind>) {
    let k = path.len();
    let forward = (path.to_vec(), kinds.to_vec());
    let mut rv = vec![path[0]];
    let mut rk = Vec::with_capacity(k);
    for i in (1..k).rev() {
        rv.push(path[i]);
    }
    for i in (0..k).rev() {
        rk.push(kinds[i]);
    }
    forward.min((rv, rk))
}

/// Enumerates every elementary alternating cycle without a chord.
pub fn chordless_cycles(fw: &FwGraph, cap: usize) -> std::result::Result<Vec<AlternatingCycle>, StepLimitExceeded> {
    let index: BTreeMap<&Id, usize> = fw.ports.iter().enumerate().map(|(k, p)| (p, k)).collect();
    let n = fw.ports.len();
    let mut fadj = vec![Vec::new(); n];
    let mut wadj = vec![Vec::new(); n];
    let mut fset = BTreeSet::new();
    for (a, b) in &fw.f_edges {
        let (Some(&i), Some(&j)) = (index.get(a), index.get(b)) else { continue };
        fadj[i].push(j);
        fadj[j].push(i);
        fset.insert(key(i, j));
    }
    for (a, b) in &fw.w_edges {
        let (Some(&i), Some(&j)) = (index.get(a), index.get(b)) else { continue };
        wadj[i].push(j);
        wadj[j].push(i);
    }
    for list in fadj.iter_mut().chain(wadj.iter_mut()) {
        list.sort_unstable();
        list.dedup();
    }
    let mut search = Search { fadj, wadj, fset, ports: &fw.ports, cap, steps: 0, found: BTreeSet::new() };
    let mut on_path = vec![false; n];
    let mut exceeded = false;
    'outer: for s in 0..n {
        for first in [EdgeKind::F, EdgeKind::W] {
            let neighbours: Vec<usize> = search.adj(s, first).to_vec();
            for u in neighbours {
                if u < s {
                    continue;
                }
                if first == EdgeKind::W && search.has_f(s, u) {
                    // a W step doubled by an F edge is a chord unless the cycle
                    // closes through that F edge, which the F-first pass covers
                    // as the same 2-cycle.
                    let mut path = vec![s, u];
                    let kinds = vec![EdgeKind::W, EdgeKind::F];
                    if !search.has_chord(&path, &kinds) {
                        search.found.insert(canonical(&path, &kinds));
                    }
                    path.clear();
                    continue;
                }
                let mut path = vec![s, u];
                let mut kinds = vec![first];
                on_path[s] = true;
                on_path[u] = true;
                let r = search.dfs(&mut path, &mut kinds, &mut on_path);
                on_path[s] = false;
                on_path[u] = false;
                if r.is_err() {
                    exceeded = true;
                    break 'outer;
                }
            }
        }
    }
    let cycles: Vec<AlternatingCycle> = search.found.iter().map(|c| search.to_cycle(c)).collect();
    if exceeded {
        Err(StepLimitExceeded { found: cycles })
    } else {
        Ok(cycles)
    }
}

pub fn check_well_formed(ty: &TypeGraph, t: &TermGraph, c: &Correspondence) -> Vec<Diagnostic> {
    check_well_formed_with_cap(ty, t, c, DEFAULT_STEP_CAP)
}

pub fn check_well_formed_with_cap(ty: &TypeGraph, t: &TermGraph, c: &Correspondence, cap: usize) -> Vec<Diagnostic> {
    let fw = match build_fw(ty, t, c) {
        Ok(fw) => fw,
        Err(Error::MissingField(p)) => {
            return vec![Diagnostic::new(Rule::MissingField, vec![p.clone()], format!("port {p} has no field"))]
        }
        Err(e) => return vec![Diagnostic::new(Rule::MissingField, vec![], e.to_string())],
    };
    let (cycles, limit) = match chordless_cycles(&fw, cap) {
        Ok(cs) => (cs, false),
        Err(StepLimitExceeded { found }) => (found, true),
    };
    let mut diags: Vec<Diagnostic> = cycles
        .into_iter()
        .map(|c| {
            let text: Vec<String> = c
                .ports
                .iter()
                .zip(&c.kinds)
                .map(|(p, k)| format!("{p} -{}-", if *k == EdgeKind::F { "F" } else { "W" }))
                .collect();
            Diagnostic::new(
                Rule::ChordlessCycle,
                c.ports.clone(),
                format!("alternating cycle without chord: {} {}", text.join(" "), c.ports[0]),
            )
        })
        .collect();
    if limit {
        diags.push(Diagnostic::new(
            Rule::ResourceLimit,
            vec![],
            format!("cycle enumeration stopped after {cap} steps"),
        ));
    }
    crate::diag::finish(diags)
}

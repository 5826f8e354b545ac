#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use ideograph::cograph::SmallGraph;
use ideograph::encodings::{BinTree, LambdaTerm, Multigraph};
use ideograph::model::{Bundle, Correspondence, Id, Namespace, TermGraph};
use ideograph::wellformed::FwGraph;
use ideograph::Relabeling;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

// ---------------------------------------------------------------- generators

pub fn random_graph(rng: &mut ChaCha8Rng, max_n: usize) -> SmallGraph {
    let n = rng.gen_range(0..=max_n);
    let p: f64 = rng.gen_range(0.1..0.9);
    let mut g = SmallGraph::new(n);
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(a, b);
            }
        }
    }
    g
}

pub fn random_tree(rng: &mut ChaCha8Rng, max_leaves: usize) -> BinTree {
    fn go(rng: &mut ChaCha8Rng, leaves: usize) -> BinTree {
        if leaves == 1 {
            return BinTree::Leaf;
        }
        let left = rng.gen_range(1..leaves);
        BinTree::branch(go(rng, left), go(rng, leaves - left))
    }
    let n = rng.gen_range(1..=max_leaves);
    go(rng, n)
}

pub fn random_multigraph(rng: &mut ChaCha8Rng, max_vertices: usize, max_edges: usize) -> Multigraph {
    let n = rng.gen_range(0..=max_vertices);
    let m = if n == 0 { 0 } else { rng.gen_range(0..=max_edges) };
    let edges = (0..m).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect::<Vec<_>>();
    Multigraph::new(n, edges).unwrap()
}

/// A closed term whose depth is at most `max_depth`.
pub fn random_lambda(rng: &mut ChaCha8Rng, max_depth: usize) -> LambdaTerm {
    fn go(rng: &mut ChaCha8Rng, bound: usize, depth: usize) -> LambdaTerm {
        let can_var = bound > 0;
        if depth == 1 {
            return LambdaTerm::Var(rng.gen_range(0..bound));
        }
        let pick = rng.gen_range(0..if can_var { 3 } else { 1 });
        match pick {
            0 => LambdaTerm::abs(go(rng, bound + 1, depth - 1)),
            1 => LambdaTerm::app(go(rng, bound, depth - 1), go(rng, bound, depth - 1)),
            _ => LambdaTerm::Var(rng.gen_range(0..bound)),
        }
    }
    let d = rng.gen_range(2..=max_depth.max(2));
    go(rng, 0, d)
}

/// Renames every term component and internal type component of `b` to a
/// fresh name, in a random order.
pub fn shuffle_names(b: &Bundle, rng: &mut ChaCha8Rng) -> Bundle {
    let t = &b.term;
    let mut maps: BTreeMap<Namespace, BTreeMap<Id, Id>> = BTreeMap::new();
    let groups: Vec<(Namespace, Vec<Id>)> = vec![
        (Namespace::Box, t.boxes.iter().cloned().collect()),
        (Namespace::Node, t.nodes.iter().cloned().collect()),
        (Namespace::Port, t.ports.keys().cloned().collect()),
        (Namespace::LetBinding, t.lets.iter().cloned().collect()),
        (Namespace::Interface, t.internal.interfaces.iter().cloned().collect()),
        (Namespace::Field, t.internal.fields.keys().cloned().collect()),
    ];
    let total: usize = groups.iter().map(|(_, v)| v.len()).sum();
    let mut names: Vec<usize> = (0..total).collect();
    names.shuffle(rng);
    let mut k = 0;
    for (ns, ids) in groups {
        let m = maps.entry(ns).or_default();
        for id in ids {
            m.insert(Id::new(format!("~{}", names[k])), id);
            k += 1;
        }
    }
    // maps go from new names to old; apply the inverse
    let h = Relabeling { maps }.inverse();
    Bundle { ty: b.ty.clone(), term: h.apply_term(t), external: h.apply_correspondence(&b.external, false) }
}

/// Component counts per namespace, internal types included.
pub fn namespace_sizes(t: &TermGraph) -> [usize; 6] {
    [t.boxes.len(), t.nodes.len(), t.ports.len(), t.lets.len(), t.internal.interfaces.len(), t.internal.fields.len()]
}

/// Swaps the receivers of two resource wires in the same box whose
/// receivers carry the same class, when such a pair exists.
pub fn swap_two_wires(b: &Bundle, rng: &mut ChaCha8Rng) -> Option<Bundle> {
    let t = &b.term;
    let home: BTreeMap<&Id, &Id> = t.residence.iter().map(|(p, c)| (c, p)).collect();
    let wires: Vec<(Id, Id)> = t.resource_wiring.iter().cloned().collect();
    let mut pairs = Vec::new();
    for i in 0..wires.len() {
        for j in i + 1..wires.len() {
            let (a, b2) = (&wires[i], &wires[j]);
            if home.get(&a.1) == home.get(&b2.1) && t.ports[&a.0] == t.ports[&b2.0] {
                pairs.push((i, j));
            }
        }
    }
    let &(i, j) = pairs.choose(rng)?;
    let mut out = b.clone();
    let (a, c) = (wires[i].clone(), wires[j].clone());
    out.term.resource_wiring.remove(&a);
    out.term.resource_wiring.remove(&c);
    out.term.resource_wiring.insert((a.0.clone(), c.1.clone()));
    out.term.resource_wiring.insert((c.0.clone(), a.1.clone()));
    Some(out)
}

// ------------------------------------------------------------------- oracles

/// Looks for an induced path on four vertices by trying every ordered
/// quadruple.
pub fn has_p4_brute(g: &SmallGraph) -> bool {
    let n = g.len();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let vs = [a, b, c, d];
                    let distinct = (0..4).all(|i| (i + 1..4).all(|j| vs[i] != vs[j]));
                    if !distinct {
                        continue;
                    }
                    let e = |x, y| g.has_edge(x, y);
                    if e(a, b) && e(b, c) && e(c, d) && !e(a, c) && !e(a, d) && !e(b, d) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

/// A term flattened into labelled vertices and named edge sets.
struct Flat {
    verts: Vec<(Id, String)>,
    rels: BTreeMap<&'static str, BTreeSet<(Id, Id)>>,
}

fn flatten(t: &TermGraph, c: &Correspondence) -> Flat {
    let mut verts = Vec::new();
    let ext = |x: &Id| -> String {
        let ts: Vec<&str> = c.pairs.iter().filter(|(a, _)| a == x).map(|(_, b)| b.as_str()).collect();
        ts.join(",")
    };
    for b in &t.boxes {
        verts.push((b.clone(), format!("box|{}", ext(b))));
    }
    for n in &t.nodes {
        verts.push((n.clone(), format!("node|{}", ext(n))));
    }
    for d in &t.lets {
        verts.push((d.clone(), "let".to_owned()));
    }
    for (p, class) in &t.ports {
        verts.push((p.clone(), format!("port {class:?}|{}", ext(p))));
    }
    for i in &t.internal.interfaces {
        verts.push((i.clone(), "iface".to_owned()));
    }
    for (f, desc) in &t.internal.fields {
        verts.push((f.clone(), format!("field {desc:?}")));
    }
    let mut rels: BTreeMap<&'static str, BTreeSet<(Id, Id)>> = BTreeMap::new();
    let mut put = |name, r: &BTreeSet<(Id, Id)>| {
        rels.insert(name, r.clone());
    };
    put("R", &t.residence);
    put("A", &t.attachment);
    put("WR", &t.resource_wiring);
    put("WC", &t.ctor_wiring);
    put("CA", &t.ctor_argument);
    put("CU", &t.ctor_usage);
    put("DI", &t.let_typing);
    put("iR", &t.internal.residence);
    put("iI", &t.internal.ctor_interface);
    let both: BTreeSet<(Id, Id)> =
        t.internal.connectivity.iter().flat_map(|(a, b)| [(a.clone(), b.clone()), (b.clone(), a.clone())]).collect();
    put("iC", &both);
    let mut dc = BTreeSet::new();
    let mut owner = BTreeSet::new();
    for (d, frag) in &t.let_correspondence {
        for (x, f) in &frag.pairs {
            dc.insert((x.clone(), f.clone()));
            owner.insert((d.clone(), x.clone()));
        }
    }
    put("DC", &dc);
    put("DCo", &owner);
    Flat { verts, rels }
}

/// Whether a label-preserving bijection maps `(t2, c2)` exactly onto
/// `(t1, c1)`, found by trying assignments one vertex at a time and
/// dropping any partial assignment that already breaks an edge.
pub fn equal_brute(t1: &TermGraph, c1: &Correspondence, t2: &TermGraph, c2: &Correspondence) -> bool {
    let (f1, f2) = (flatten(t1, c1), flatten(t2, c2));
    if f1.verts.len() != f2.verts.len() || f1.rels.iter().zip(&f2.rels).any(|((_, a), (_, b))| a.len() != b.len()) {
        return false;
    }
    let mut labels1: Vec<&String> = f1.verts.iter().map(|(_, l)| l).collect();
    let mut labels2: Vec<&String> = f2.verts.iter().map(|(_, l)| l).collect();
    labels1.sort();
    labels2.sort();
    if labels1 != labels2 || c1.pairs.len() != c2.pairs.len() {
        return false;
    }
    struct S<'a> {
        f1: &'a Flat,
        f2: &'a Flat,
        h: BTreeMap<Id, Id>,
        used: BTreeSet<Id>,
    }
    fn consistent(s: &S, v: &Id) -> bool {
        s.f2.rels.iter().all(|(name, r2)| {
            r2.iter().filter(|(a, b)| a == v || b == v).all(|(a, b)| match (s.h.get(a), s.h.get(b)) {
                (Some(x), Some(y)) => s.f1.rels[name].contains(&(x.clone(), y.clone())),
                _ => true,
            })
        })
    }
    fn go(s: &mut S, k: usize) -> bool {
        let Some((v, label)) = s.f2.verts.get(k) else { return true };
        for (w, l1) in &s.f1.verts {
            if l1 != label || s.used.contains(w) {
                continue;
            }
            s.h.insert(v.clone(), w.clone());
            s.used.insert(w.clone());
            if consistent(s, v) && go(s, k + 1) {
                return true;
            }
            s.h.remove(v);
            s.used.remove(w);
        }
        false
    }
    let mut s = S { f1: &f1, f2: &f2, h: BTreeMap::new(), used: BTreeSet::new() };
    go(&mut s, 0)
}

/// Every chordless alternating cycle, as sorted port lists, found by
/// walking all simple alternating paths; `None` past `budget` steps.
pub fn chordless_cycles_brute(fw: &FwGraph, budget: usize) -> Option<BTreeSet<Vec<Id>>> {
    let n = fw.ports.len();
    let ix: BTreeMap<&Id, usize> = fw.ports.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let mut f = vec![vec![false; n]; n];
    let mut w = vec![vec![false; n]; n];
    for (set, m) in [(&fw.f_edges, &mut f), (&fw.w_edges, &mut w)] {
        for (a, b) in set {
            let (i, j) = (ix[a], ix[b]);
            m[i][j] = true;
            m[j][i] = true;
        }
    }
    struct Walk<'a> {
        f: &'a [Vec<bool>],
        w: &'a [Vec<bool>],
        path: Vec<usize>,
        kinds: Vec<bool>,
        on: Vec<bool>,
        found: BTreeSet<Vec<usize>>,
        steps: usize,
        budget: usize,
    }
    impl Walk<'_> {
        fn adj(&self, is_f: bool, a: usize, b: usize) -> bool {
            if is_f {
                self.f[a][b]
            } else {
                self.w[a][b]
            }
        }
        fn record(&mut self) {
            // kinds[i] joins path[i] and path[i+1 mod len]; true is F
            let len = self.path.len();
            let mut on_cycle_f = BTreeSet::new();
            for i in 0..len {
                if self.kinds[i] {
                    let (a, b) = (self.path[i], self.path[(i + 1) % len]);
                    on_cycle_f.insert((a.min(b), a.max(b)));
                }
            }
            for i in 0..len {
                for j in i + 1..len {
                    let (a, b) = (self.path[i], self.path[j]);
                    if self.f[a][b] && !on_cycle_f.contains(&(a.min(b), a.max(b))) {
                        return;
                    }
                }
            }
            let mut key = self.path.clone();
            key.sort_unstable();
            self.found.insert(key);
        }
        fn extend(&mut self, start: usize) -> bool {
            self.steps += 1;
            if self.steps > self.budget {
                return false;
            }
            let last = *self.path.last().unwrap();
            let next_f = !*self.kinds.last().unwrap();
            let first_f = self.kinds[0];
            // close when the closing edge keeps the alternation
            if self.path.len() >= 2 && next_f != first_f && self.adj(next_f, last, start) {
                self.kinds.push(next_f);
                self.record();
                self.kinds.pop();
            }
            for v in start + 1..self.f.len() {
                if self.on[v] || !self.adj(next_f, last, v) {
                    continue;
                }
                self.path.push(v);
                self.kinds.push(next_f);
                self.on[v] = true;
                let ok = self.extend(start);
                self.on[v] = false;
                self.kinds.pop();
                self.path.pop();
                if !ok {
                    return false;
                }
            }
            true
        }
    }
    let mut walk = Walk {
        f: &f,
        w: &w,
        path: Vec::new(),
        kinds: Vec::new(),
        on: vec![false; n],
        found: BTreeSet::new(),
        steps: 0,
        budget,
    };
    for s in 0..n {
        for first_f in [true, false] {
            for v in s + 1..n {
                if !walk.adj(first_f, s, v) {
                    continue;
                }
                walk.path = vec![s, v];
                walk.kinds = vec![first_f];
                walk.on[s] = true;
                walk.on[v] = true;
                let ok = walk.extend(s);
                walk.on[s] = false;
                walk.on[v] = false;
                if !ok {
                    return None;
                }
            }
        }
    }
    Some(walk.found.into_iter().map(|c| c.into_iter().map(|i| fw.ports[i].clone()).collect()).collect())
}
pub mod suites;

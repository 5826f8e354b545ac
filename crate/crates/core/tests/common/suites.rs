//! Criterion runners shared by the property tests and the acceptance target.
//! Each returns a tally of checked instances and the failures seen.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use ideograph::check::check;
use ideograph::cograph::is_cograph;
use ideograph::corpus::{self, graph_three, meets_expectation, Expect};
use ideograph::encodings::{
    apply_to, decode_bintree, decode_lambda, decode_multigraph, edge_doubler, encode_bintree, encode_lambda,
    encode_multigraph, identity, Multigraph,
};
use ideograph::equality::{bare_equal, t_equal};
use ideograph::rewrite::{list_redexes, normalize, reduce_step, Strategy};
use ideograph::textio::{parse_bundle, print_bundle};
use ideograph::validate::descent_forest;
use ideograph::wellformed::{build_fw, check_well_formed};
use ideograph::{Bundle, Id, Rule, TermGraph};
use rand::seq::SliceRandom;
use rand::Rng;

use super::*;

#[derive(Debug, Default)]
pub struct Tally {
    pub checked: usize,
    pub failures: Vec<String>,
    pub note: String,
}

impl Tally {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    fn fail(&mut self, what: impl Into<String>) {
        self.failures.push(what.into());
    }

    pub fn summary(&self) -> String {
        let note = if self.note.is_empty() { String::new() } else { format!(" ({})", self.note) };
        match self.failures.first() {
            None => format!("{} checked{note}, 0 failures", self.checked),
            Some(f) => format!("{} checked{note}, {} failures; first: {f}", self.checked, self.failures.len()),
        }
    }
}

fn valid(b: &Bundle) -> bool {
    check(b).is_ok()
}

// ------------------------------------------------------------ corpus replay

pub const MUST_PASS: &[&str] = &[
    "pass_identity",
    "let_higher",
    "let_twice",
    "tree_small",
    "graph_three",
    "graph_three_doubled",
    "lambda_xy_yx",
    "lambda_escaped_variant",
    "edge_doubler",
    "doubler_applied",
    "doubler_inlined",
];
pub const MUST_FAIL: &[&str] = &["tree_cyclic", "lambda_escaped"];

pub fn example_corpus() -> (Tally, Duration) {
    let start = Instant::now();
    let mut t = Tally::default();
    let entries = corpus::all().unwrap();
    let find = |n: &str| entries.iter().find(|e| e.name == n).unwrap_or_else(|| panic!("no entry {n}"));
    for n in MUST_PASS {
        t.checked += 1;
        let r = check(&find(n).bundle);
        if !r.is_ok() {
            t.fail(format!("{n}: {}", r.diagnostics[0]));
        }
    }
    let applied = &find("doubler_applied").bundle;
    t.checked += 1;
    match normalize(&applied.term, &applied.external, Strategy::OutermostFirst, 10_000) {
        Ok(r) => {
            let nf = Bundle { ty: applied.ty.clone(), term: r.term, external: r.external };
            if !check(&nf).is_ok() {
                t.fail("normal form of doubler_applied does not check");
            }
        }
        Err(e) => t.fail(format!("normalizing doubler_applied: {e}")),
    }
    for n in MUST_FAIL {
        t.checked += 1;
        let r = check(&find(n).bundle);
        if r.is_ok() || !r.diagnostics.iter().all(|d| d.rule == Rule::ChordlessCycle) {
            t.fail(format!("{n}: expected only well-formedness diagnostics, got {:?}", r.diagnostics));
        }
    }
    for e in &entries {
        t.checked += 1;
        if !meets_expectation(e) {
            t.fail(format!("{} does not meet its expectation", e.name));
        }
    }
    (t, start.elapsed())
}

// ------------------------------------------------------------------ replay

pub fn replay_higher_let() -> (Tally, usize) {
    let mut t = Tally::default();
    let higher = corpus::get("let_higher").unwrap();
    let four = corpus::get("call_four_times").unwrap();
    t.checked += 1;
    let r = normalize(&higher.term, &higher.external, Strategy::OutermostFirst, 100).unwrap();
    let steps = r.trace.len();
    if steps != 2 {
        t.fail(format!("took {steps} steps"));
    }
    match t_equal(&higher.ty, &r.term, &r.external, &four.term, &four.external) {
        Ok(Some(h)) if h.apply_term(&four.term) == r.term => {}
        other => t.fail(format!("normal form is not T-equal to call_four_times: {other:?}")),
    }
    (t, steps)
}

pub fn replay_doubler() -> (Tally, Vec<(Strategy, usize)>) {
    let mut t = Tally::default();
    let applied = corpus::get("doubler_applied").unwrap();
    let target = encode_multigraph(&graph_three().doubled()).unwrap();
    let mut counts = Vec::new();
    for s in Strategy::ALL {
        t.checked += 1;
        let r = normalize(&applied.term, &applied.external, s, 10_000).unwrap();
        counts.push((s, r.trace.len()));
        match bare_equal(&r.term, &target.term) {
            Some(h) if h.apply_term(&target.term) == r.term => {}
            _ => t.fail(format!("{s:?}: normal form is not bare-equal to the doubled graph")),
        }
        if r.trace.len() != 4 {
            t.fail(format!("{s:?}: {} steps, expected 4", r.trace.len()));
        }
    }
    (t, counts)
}

// -------------------------------------------------------------- canonicity

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

pub fn canonicity() -> Tally {
    let mut t = Tally::default();
    let (a, b) = (corpus::get("pair_id").unwrap(), corpus::get("pair_swap").unwrap());
    t.checked += 1;
    if bare_equal(&a.term, &b.term).is_none() {
        t.fail("pair_id and pair_swap are not bare-equal");
    }
    t.checked += 1;
    if !matches!(t_equal(&a.ty, &a.term, &a.external, &b.term, &b.external), Ok(None)) {
        t.fail("pair_id and pair_swap are equal with their external correspondences");
    }
    let g = graph_three();
    let base = encode_multigraph(&g).unwrap();
    for vp in permutations(g.vertex_count) {
        for ep in permutations(g.edges.len()) {
            t.checked += 1;
            let edges = ep.iter().map(|&k| (vp[g.edges[k].0], vp[g.edges[k].1]));
            let m = Multigraph::new(g.vertex_count, edges).unwrap();
            let e = encode_multigraph(&m).unwrap();
            if bare_equal(&base.term, &e.term).is_none() {
                t.fail(format!("{m} is not bare-equal to {g}"));
            }
        }
    }
    t
}

// ----------------------------------------------------------------- oracles

pub fn cograph_agreement(seed: u64, count: usize) -> Tally {
    let mut t = Tally::default();
    let mut r = rng(seed);
    for _ in 0..count {
        let g = random_graph(&mut r, 10);
        t.checked += 1;
        if is_cograph(&g) == has_p4_brute(&g) {
            t.fail(format!("disagreement on {g:?}"));
        }
    }
    t
}

/// Small valid bundles, at most eight components in each namespace.
pub fn small_pool() -> Vec<Bundle> {
    let mut pool: Vec<Bundle> =
        corpus::all().unwrap().into_iter().filter(|e| e.expect == Expect::Valid).map(|e| e.bundle).collect();
    for s in ["()", "(() ())", "(() (() ()))", "((() ()) ())"] {
        pool.push(encode_bintree(&s.parse().unwrap()).unwrap());
    }
    for s in ["n=0;", "n=1;", "n=2;", "n=1; 0->0", "n=2; 0->1", "n=2; 1->0", "n=2; 0->1 0->1", "n=2; 0->1 1->0"] {
        pool.push(encode_multigraph(&s.parse().unwrap()).unwrap());
    }
    for s in [r"\x. x", r"\x. \y. x", r"\x. \y. y", r"\x. x x", r"\x. \y. x y", r"\x. \y. y x"] {
        pool.push(encode_lambda(&s.parse().unwrap()).unwrap());
    }
    let bt = encode_bintree(&"()".parse().unwrap()).unwrap();
    pool.push(identity(&bt.ty).unwrap());
    pool.retain(|b| namespace_sizes(&b.term).iter().all(|&n| n <= 8) && valid(b));
    pool
}

pub fn equality_agreement(seed: u64, count: usize) -> Tally {
    let mut t = Tally::default();
    let mut r = rng(seed);
    let pool = small_pool();
    let mut by_type: Vec<Vec<&Bundle>> = Vec::new();
    for b in &pool {
        match by_type.iter_mut().find(|g| g[0].ty == b.ty) {
            Some(g) => g.push(b),
            None => by_type.push(vec![b]),
        }
    }
    let mut equal = 0;
    let mixed: Vec<&Vec<&Bundle>> = by_type.iter().filter(|g| g.len() > 1).collect();
    for k in 0..count {
        // alternate between a copy of one bundle and two bundles of one type
        let (x, y) = if k % 2 == 0 {
            let b = pool.choose(&mut r).unwrap();
            (b, b)
        } else {
            let g = mixed.choose(&mut r).unwrap();
            (*g.choose(&mut r).unwrap(), *g.choose(&mut r).unwrap())
        };
        let (x, y) = (shuffle_names(x, &mut r), shuffle_names(y, &mut r));
        t.checked += 1;
        let fast = match t_equal(&x.ty, &x.term, &x.external, &y.term, &y.external) {
            Ok(w) => w,
            Err(e) => {
                t.fail(format!("t_equal rejected a valid pair: {e}"));
                continue;
            }
        };
        if let Some(h) = &fast {
            if h.apply_term(&y.term) != x.term || h.apply_correspondence(&y.external, false) != x.external {
                t.fail("witness does not map the second term onto the first");
            }
        }
        let slow = equal_brute(&x.term, &x.external, &y.term, &y.external);
        equal += usize::from(slow);
        if fast.is_some() != slow {
            t.fail(format!("t_equal says {}, brute force says {slow}", fast.is_some()));
        }
    }
    t.note = format!("{equal} equal pairs from a pool of {}", pool.len());
    t
}

/// Valid-up-to-well-formedness bundles with at most 24 ports.
pub fn wiring_instance(r: &mut rand_chacha::ChaCha8Rng) -> Bundle {
    loop {
        let b = match r.gen_range(0..4) {
            0 => encode_bintree(&random_tree(r, 4)).unwrap(),
            1 => encode_multigraph(&random_multigraph(r, 3, 3)).unwrap(),
            2 => encode_lambda(&random_lambda(r, 4)).unwrap(),
            _ => corpus::all().unwrap().choose(r).unwrap().bundle.clone(),
        };
        let b = if r.gen_bool(0.6) { swap_two_wires(&b, r).unwrap_or(b) } else { b };
        if b.term.ports.len() > 24 {
            continue;
        }
        let report = check(&b);
        if report.is_ok() || report.diagnostics.iter().all(|d| d.rule.is_well_formedness()) {
            return b;
        }
    }
}

pub fn wellformed_agreement(seed: u64, count: usize) -> Tally {
    let mut t = Tally::default();
    let mut r = rng(seed);
    let mut ill = 0;
    while t.checked < count {
        let b = wiring_instance(&mut r);
        let fw = build_fw(&b.ty, &b.term, &b.external).unwrap();
        let Some(slow) = chordless_cycles_brute(&fw, 5_000_000) else { continue };
        t.checked += 1;
        let diags = check_well_formed(&b.ty, &b.term, &b.external);
        if diags.iter().any(|d| d.rule != Rule::ChordlessCycle) {
            t.fail(format!("unexpected diagnostics {diags:?}"));
            continue;
        }
        let fast: BTreeSet<Vec<Id>> = diags
            .iter()
            .map(|d| {
                let mut ps = d.components.clone();
                ps.sort();
                ps
            })
            .collect();
        if !slow.is_empty() {
            ill += 1;
        }
        if fast != slow {
            t.fail(format!("checker found {fast:?}, enumeration found {slow:?}"));
        }
    }
    t.note = format!("{ill} ill-formed");
    if ill == 0 || ill == count {
        t.fail(format!("degenerate sample: {ill} of {count} ill-formed"));
    }
    t
}

// -------------------------------------------------------------- reduction

fn bundle_with(b: &Bundle, term: TermGraph, external: ideograph::Correspondence) -> Bundle {
    Bundle { ty: b.ty.clone(), term, external }
}

pub fn subject_reduction_corpus() -> Tally {
    let mut t = Tally::default();
    for e in corpus::all().unwrap() {
        if e.expect != Expect::Valid || e.bundle.term.lets.is_empty() {
            continue;
        }
        let b = &e.bundle;
        let mut cur = b.clone();
        // follow the outermost path, trying every redex on the way
        while !cur.term.lets.is_empty() {
            let redexes = list_redexes(&cur.term);
            let mut next = None;
            for d in &redexes {
                t.checked += 1;
                match reduce_step(&cur.ty, &cur.term, &cur.external, d) {
                    Ok(r) => {
                        let out = bundle_with(b, r.term, r.external);
                        let rep = check(&out);
                        if !rep.is_ok() {
                            t.fail(format!("{}: inlining {d} gives {}", e.name, rep.diagnostics[0]));
                        }
                        if Some(d) == ideograph::rewrite::pick_redex(&cur.term, Strategy::OutermostFirst).as_ref() {
                            next = Some(out);
                        }
                    }
                    Err(err) => t.fail(format!("{}: inlining {d} failed: {err}", e.name)),
                }
            }
            match next {
                Some(n) => cur = n,
                None => break,
            }
        }
    }
    t
}

/// Components below some let-binding in the descent forest, the bindings
/// included.
pub fn let_descendants(t: &TermGraph) -> usize {
    let forest = descent_forest(t);
    t.all_ids()
        .filter(|c| {
            let mut cur = Some(*c);
            while let Some(x) = cur {
                if t.lets.contains(x) {
                    return true;
                }
                cur = forest.parent.get(x);
            }
            false
        })
        .count()
}

pub fn termination(seed: u64, count: usize) -> Tally {
    let mut t = Tally::default();
    let mut r = rng(seed);
    let doubler = edge_doubler().unwrap();
    for k in 0..count {
        let x = match k % 3 {
            0 => encode_bintree(&random_tree(&mut r, 4)).unwrap(),
            1 => encode_multigraph(&random_multigraph(&mut r, 3, 3)).unwrap(),
            _ => encode_lambda(&random_lambda(&mut r, 4)).unwrap(),
        };
        let f = if k % 3 == 1 && r.gen_bool(0.5) { doubler.clone() } else { identity(&x.ty).unwrap() };
        let app = apply_to(&f, &x).unwrap();
        let budget = 10 * let_descendants(&app.term);
        t.checked += 1;
        match normalize(&app.term, &app.external, Strategy::ALL[k % 3], budget) {
            Ok(nf) if nf.term.lets.is_empty() => {}
            Ok(_) => t.fail("normal form still has let-bindings"),
            Err(e) => t.fail(format!("{e} on an application of size {}", app.term.ports.len())),
        }
    }
    t
}

pub fn confluence_corpus() -> Tally {
    let mut t = Tally::default();
    for e in corpus::all().unwrap() {
        if e.expect != Expect::Valid || e.bundle.term.lets.is_empty() {
            continue;
        }
        let b = &e.bundle;
        let forms: Vec<_> =
            Strategy::ALL.iter().map(|s| normalize(&b.term, &b.external, *s, 10_000).unwrap()).collect();
        for i in 0..forms.len() {
            for j in i + 1..forms.len() {
                t.checked += 1;
                let eq = t_equal(&b.ty, &forms[i].term, &forms[i].external, &forms[j].term, &forms[j].external);
                if !matches!(eq, Ok(Some(_))) {
                    t.fail(format!("{}: {:?} and {:?} disagree", e.name, Strategy::ALL[i], Strategy::ALL[j]));
                }
            }
        }
    }
    t
}

// ------------------------------------------------------------- round trips

pub fn same_up_to_renumbering(a: &Multigraph, b: &Multigraph) -> bool {
    if a.vertex_count != b.vertex_count || a.edges.len() != b.edges.len() {
        return false;
    }
    let target = b.edge_multiset();
    permutations(a.vertex_count).into_iter().any(|p| {
        let mut e: Vec<(usize, usize)> = a.edges.iter().map(|&(s, d)| (p[s], p[d])).collect();
        e.sort_unstable();
        e == target
    })
}

pub fn tree_round_trips(seed: u64, count: usize) -> Tally {
    let mut t = Tally::default();
    let mut r = rng(seed);
    for _ in 0..count {
        let x = random_tree(&mut r, 8);
        t.checked += 1;
        match decode_bintree(&encode_bintree(&x).unwrap()) {
            Ok(y) if y == x => {}
            other => t.fail(format!("{x} came back as {other:?}")),
        }
    }
    t
}

pub fn multigraph_round_trips(seed: u64, count: usize) -> Tally {
    let mut t = Tally::default();
    let mut r = rng(seed);
    for _ in 0..count {
        let x = random_multigraph(&mut r, 5, 7);
        t.checked += 1;
        match decode_multigraph(&encode_multigraph(&x).unwrap()) {
            Ok(y) if same_up_to_renumbering(&x, &y) => {}
            other => t.fail(format!("{x} came back as {other:?}")),
        }
    }
    t
}

pub fn lambda_round_trips(seed: u64, count: usize) -> Tally {
    let mut t = Tally::default();
    let mut r = rng(seed);
    for _ in 0..count {
        let x = random_lambda(&mut r, 6);
        t.checked += 1;
        // de Bruijn terms are equal exactly when alpha-equivalent
        match decode_lambda(&encode_lambda(&x).unwrap()) {
            Ok(y) if y == x => {}
            other => t.fail(format!("{x} came back as {other:?}")),
        }
    }
    t
}

pub fn corpus_text_round_trips() -> Tally {
    let mut t = Tally::default();
    for e in corpus::all().unwrap() {
        t.checked += 1;
        let text = print_bundle(&e.bundle);
        match parse_bundle(&text) {
            Ok(b) if b == e.bundle && print_bundle(&b) == text => {}
            _ => t.fail(format!("{} does not survive print then parse", e.name)),
        }
    }
    t
}

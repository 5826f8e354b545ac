mod common;

use std::collections::BTreeSet;

use common::suites::*;
use common::*;
use ideograph::check::check;
use ideograph::corpus::{self, Expect};
use ideograph::encodings::{
    apply_to, decode_multigraph, edge_doubler, encode_bintree, encode_multigraph, identity, Multigraph,
};
use ideograph::equality::bare_equal;
use ideograph::rewrite::{normalize, pick_redex, reduce_step, Strategy};
use ideograph::wellformed::{build_fw, chordless_cycles, DEFAULT_STEP_CAP};
use ideograph::{Bundle, Id, TermGraph};
use proptest::prelude::*;

fn resource_wiring_is_a_bijection(t: &TermGraph) -> bool {
    let providers: BTreeSet<&Id> = t.resource_wiring.iter().map(|(p, _)| p).collect();
    let receivers: BTreeSet<&Id> = t.resource_wiring.iter().map(|(_, r)| r).collect();
    providers.len() == t.resource_wiring.len() && receivers.len() == t.resource_wiring.len()
}

#[test]
fn every_corpus_step_preserves_validity() {
    let t = subject_reduction_corpus();
    assert!(t.ok(), "{}", t.summary());
}

#[test]
fn strategies_agree_on_the_corpus() {
    let t = confluence_corpus();
    assert!(t.ok(), "{}", t.summary());
}

#[test]
fn random_applications_terminate() {
    let t = termination(104, 120);
    assert!(t.ok(), "{}", t.summary());
}

#[test]
fn wiring_stays_bijective_along_each_path() {
    for e in corpus::all().unwrap() {
        if e.expect != Expect::Valid {
            continue;
        }
        for s in Strategy::ALL {
            let mut cur = e.bundle.clone();
            while let Some(d) = pick_redex(&cur.term, s) {
                let r = reduce_step(&cur.ty, &cur.term, &cur.external, &d).unwrap();
                assert!(resource_wiring_is_a_bijection(&r.term), "{} after {d}", e.name);
                cur = Bundle { ty: cur.ty.clone(), term: r.term, external: r.external };
            }
        }
    }
}

#[test]
fn unknown_binding_is_an_error() {
    let b = corpus::get("let_twice").unwrap();
    assert!(reduce_step(&b.ty, &b.term, &b.external, &Id::new("nope")).is_err());
}

#[test]
fn step_limit_returns_the_partial_result() {
    let b = corpus::get("let_higher").unwrap();
    match normalize(&b.term, &b.external, Strategy::OutermostFirst, 1) {
        Err(ideograph::Error::StepLimit { limit, partial }) => {
            assert_eq!(limit, 1);
            assert_eq!(partial.trace.len(), 1);
        }
        other => panic!("expected a step limit, got {other:?}"),
    }
}

#[test]
fn doubling_nothing_gives_nothing() {
    let empty = Multigraph::default();
    let app = apply_to(&edge_doubler().unwrap(), &encode_multigraph(&empty).unwrap()).unwrap();
    let nf = normalize(&app.term, &app.external, Strategy::OutermostFirst, 10_000).unwrap();
    let out = Bundle { ty: app.ty.clone(), term: nf.term, external: nf.external };
    assert!(check(&out).is_ok());
    assert_eq!(decode_multigraph(&out).unwrap(), empty);
}

#[test]
fn identity_returns_its_argument() {
    let x = encode_bintree(&"(() (() ()))".parse().unwrap()).unwrap();
    let app = apply_to(&identity(&x.ty).unwrap(), &x).unwrap();
    let nf = normalize(&app.term, &app.external, Strategy::InnermostFirst, 10_000).unwrap();
    assert!(bare_equal(&nf.term, &x.term).is_some());
}

/// Chordless cycles as sorted port sets.
fn cycle_sets(b: &Bundle) -> Vec<BTreeSet<Id>> {
    let fw = build_fw(&b.ty, &b.term, &b.external).unwrap();
    chordless_cycles(&fw, DEFAULT_STEP_CAP).unwrap().into_iter().map(|c| c.ports.into_iter().collect()).collect()
}

#[test]
fn deleting_a_wire_adds_no_unrelated_cycle() {
    for e in corpus::all().unwrap() {
        if e.expect != Expect::IllFormed {
            continue;
        }
        let before = cycle_sets(&e.bundle);
        let wires: Vec<(Id, Id)> =
            e.bundle.term.resource_wiring.iter().chain(&e.bundle.term.ctor_wiring).cloned().collect();
        for w in wires {
            let mut fw = build_fw(&e.bundle.ty, &e.bundle.term, &e.bundle.external).unwrap();
            let key = if w.0 < w.1 { w.clone() } else { (w.1.clone(), w.0.clone()) };
            fw.w_edges.remove(&key);
            let after = chordless_cycles(&fw, DEFAULT_STEP_CAP).unwrap();
            for c in after {
                let ports: BTreeSet<Id> = c.ports.into_iter().collect();
                assert!(before.iter().any(|old| !old.is_disjoint(&ports)), "{}: new cycle {ports:?}", e.name);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn doubling_doubles_every_edge(seed in any::<u64>()) {
        let m = random_multigraph(&mut rng(seed), 5, 6);
        let app = apply_to(&edge_doubler().unwrap(), &encode_multigraph(&m).unwrap()).unwrap();
        let nf = normalize(&app.term, &app.external, Strategy::IdOrder, 10_000).unwrap();
        let out = Bundle { ty: app.ty.clone(), term: nf.term, external: nf.external };
        prop_assert!(check(&out).is_ok());
        let got = decode_multigraph(&out).unwrap();
        prop_assert!(same_up_to_renumbering(&m.doubled(), &got), "{} gave {}", m, got);
    }
}

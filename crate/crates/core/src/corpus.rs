//! A fixed set of example bundles: small hand-written terms plus the
//! multigraph doubling pipeline built from the codecs.

use crate::check::check_bundle;
use crate::encodings::{apply_to, edge_doubler, encode_multigraph, Multigraph};
use crate::error::{Error, Result};
use crate::model::{Bundle, Id};
use crate::rewrite::inline;
use crate::textio::parse_bundle;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expect {
    Valid,
    /// Passes every check except well-formedness.
    IllFormed,
}

#[derive(Clone, Debug)]
pub struct Entry {
    pub name: &'static str,
    pub bundle: Bundle,
    pub expect: Expect,
}

macro_rules! source {
    ($name:literal, $expect:ident) => {
        ($name, include_str!(concat!("../corpus/", $name, ".idg")), Expect::$expect)
    };
}

/// Hand-written bundles in the text format.
pub const SOURCES: &[(&str, &str, Expect)] = &[
    source!("identity", Valid),
    source!("pair_id", Valid),
    source!("pair_swap", Valid),
    source!("unused_ctor", Valid),
    source!("call_once", Valid),
    source!("call_twice", Valid),
    source!("call_four_times", Valid),
    source!("call_feedback", IllFormed),
    source!("pass_identity", Valid),
    source!("return_function", Valid),
    source!("let_twice", Valid),
    source!("let_higher", Valid),
    source!("discard", Valid),
    source!("pair_separate", Valid),
    source!("pair_feed", Valid),
    source!("pair_build", Valid),
    source!("pair_leak", IllFormed),
    source!("tree_small", Valid),
    source!("tree_cyclic", IllFormed),
    source!("graph_three", Valid),
    source!("lambda_xy_yx", Valid),
    source!("lambda_escaped", IllFormed),
    source!("lambda_escaped_variant", Valid),
];

/// The multigraph stored in `graph_three`.
pub fn graph_three() -> Multigraph {
    Multigraph { vertex_count: 3, edges: vec![(0, 1), (1, 2), (0, 2)] }
}

pub fn hand_written() -> Result<Vec<Entry>> {
    SOURCES.iter().map(|&(name, text, expect)| Ok(Entry { name, bundle: parse_bundle(text)?, expect })).collect()
}

fn inline_named(b: &Bundle, names: &[&str]) -> Result<Bundle> {
    let mut out = b.clone();
    for n in names {
        let r = inline(&out.term, &out.external, &Id::new(*n))?;
        out.term = r.term;
        out.external = r.external;
    }
    Ok(out)
}

/// The doubling function, its application to `graph_three`, the application
/// after inlining `x` and `f`, and the encoding of the doubled graph.
pub fn generated() -> Result<Vec<Entry>> {
    let input = encode_multigraph(&graph_three())?;
    let doubler = edge_doubler()?;
    let applied = apply_to(&doubler, &input)?;
    let inlined = inline_named(&applied, &["x", "f"])?;
    let doubled = encode_multigraph(&graph_three().doubled())?;
    let valid = |name, bundle| Entry { name, bundle, expect: Expect::Valid };
    Ok(vec![
        valid("graph_three_doubled", doubled),
        valid("edge_doubler", doubler),
        valid("doubler_applied", applied),
        valid("doubler_inlined", inlined),
    ])
}

pub fn all() -> Result<Vec<Entry>> {
    let mut out = hand_written()?;
    out.extend(generated()?);
    Ok(out)
}

pub fn get(name: &str) -> Result<Bundle> {
    all()?
        .into_iter()
        .find(|e| e.name == name)
        .map(|e| e.bundle)
        .ok_or_else(|| Error::Precondition(format!("no corpus entry named `{name}`")))
}

/// Whether `entry` behaves as recorded under the checker.
pub fn meets_expectation(entry: &Entry) -> bool {
    let diags = check_bundle(&entry.bundle.ty, &entry.bundle.term, &entry.bundle.external);
    match entry.expect {
        Expect::Valid => diags.is_empty(),
        Expect::IllFormed => !diags.is_empty() && diags.iter().all(|d| d.rule.is_well_formedness()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encodings::{encode_bintree, encode_lambda, BinTree, LambdaTerm};
    use crate::equality::{bare_equal, t_equal};
    use crate::rewrite::{normalize, Strategy};
    use crate::textio::print_bundle;

    #[test]
    fn every_entry_meets_its_expectation() {
        for e in all().unwrap() {
            assert!(meets_expectation(&e), "{}", e.name);
        }
    }

    #[test]
    fn print_then_parse_is_identity() {
        for e in all().unwrap() {
            assert_eq!(parse_bundle(&print_bundle(&e.bundle)).unwrap(), e.bundle, "{}", e.name);
        }
    }

    #[test]
    fn hand_written_terms_match_the_codecs() {
        let tree = encode_bintree(&"((() ()) ())".parse::<BinTree>().unwrap()).unwrap();
        assert!(bare_equal(&get("tree_small").unwrap().term, &tree.term).is_some());
        let g = encode_multigraph(&graph_three()).unwrap();
        assert!(bare_equal(&get("graph_three").unwrap().term, &g.term).is_some());
        let l = encode_lambda(&r"\x. \y. y x".parse::<LambdaTerm>().unwrap()).unwrap();
        assert!(bare_equal(&get("lambda_xy_yx").unwrap().term, &l.term).is_some());
    }

    #[test]
    fn higher_let_steps_to_the_simple_let() {
        let higher = get("let_higher").unwrap();
        let once = inline_named(&higher, &["y"]).unwrap();
        let simple = get("let_twice").unwrap();
        assert!(t_equal(&higher.ty, &once.term, &once.external, &simple.term, &simple.external).unwrap().is_some());
        let r = normalize(&higher.term, &higher.external, Strategy::OutermostFirst, 10).unwrap();
        assert_eq!(r.trace.len(), 2);
        let four = get("call_four_times").unwrap();
        assert!(t_equal(&higher.ty, &r.term, &r.external, &four.term, &four.external).unwrap().is_some());
    }
}

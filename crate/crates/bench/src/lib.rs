//! Inputs shared by the benchmarks.

use ideograph::encodings::{apply_to, edge_doubler, encode_bintree, encode_lambda, encode_multigraph, BinTree};
use ideograph::{corpus, Bundle, Result};

/// A complete tree with `2^depth` leaves.
pub fn full_tree(depth: usize) -> BinTree {
    if depth == 0 {
        BinTree::Leaf
    } else {
        BinTree::branch(full_tree(depth - 1), full_tree(depth - 1))
    }
}

/// Named bundles for checking and comparison.
pub fn check_inputs() -> Result<Vec<(String, Bundle)>> {
    let mut out: Vec<(String, Bundle)> = corpus::all()?.into_iter().map(|e| (e.name.to_owned(), e.bundle)).collect();
    for d in [3, 4] {
        out.push((format!("tree_depth_{d}"), encode_bintree(&full_tree(d))?));
    }
    out.push(("lambda_church_two".into(), encode_lambda(&r"\f. \x. f (f x)".parse()?)?));
    out.push(("graph_k4".into(), encode_multigraph(&"n=4; 0->1 0->2 0->3 1->2 1->3 2->3".parse()?)?));
    Ok(out)
}

/// The doubling function applied to a graph with `n` vertices in a cycle.
pub fn doubling_input(n: usize) -> Result<Bundle> {
    let text = format!("n={n};{}", (0..n).map(|i| format!(" {i}->{}", (i + 1) % n)).collect::<String>());
    apply_to(&edge_doubler()?, &encode_multigraph(&text.parse()?)?)
}

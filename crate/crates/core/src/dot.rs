//! Graphviz output for terms. Boxes become clusters, resource wires are
//! drawn thick and constructor usages thin.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::model::{Correspondence, Id, Kind, Polarity, TermGraph, TermIndex};

fn q(id: &Id) -> String {
    format!("\"{}\"", id.as_str().replace('\\', "\\\\").replace('"', "\\\""))
}

fn anchor(b: &Id) -> String {
    q(&Id::new(format!("{b}#anchor")))
}

fn cluster(b: &Id) -> String {
    q(&Id::new(format!("cluster_{b}")))
}

struct Writer<'a> {
    t: &'a TermGraph,
    c: Option<&'a Correspondence>,
    children: BTreeMap<&'a Id, Vec<&'a Id>>,
    out: String,
}

impl Writer<'_> {
    fn label(&self, id: &Id) -> String {
        match self
            .c
            .and_then(|c| c.target(id))
            .or_else(|| self.t.let_correspondence.values().find_map(|f| f.target(id)))
        {
            Some(ty) => format!("{id} : {ty}"),
            None => id.to_string(),
        }
    }

    fn component(&mut self, id: &Id, depth: usize) {
        let pad = "  ".repeat(depth);
        let t = self.t;
        if t.boxes.contains(id) {
            let _ = writeln!(self.out, "{pad}subgraph {} {{", cluster(id));
            let _ = writeln!(self.out, "{pad}  label={}; style=rounded;", q(&Id::new(self.label(id))));
            let _ = writeln!(self.out, "{pad}  {} [shape=point, style=invis];", anchor(id));
            for c in self.children.get(id).cloned().unwrap_or_default() {
                self.component(c, depth + 1);
            }
            let _ = writeln!(self.out, "{pad}}}");
        } else if t.nodes.contains(id) {
            let _ = writeln!(
                self.out,
                "{pad}{} [shape=box, style=\"rounded,filled\", fillcolor=gray85, label={}];",
                q(id),
                q(&Id::new(self.label(id)))
            );
        } else if t.lets.contains(id) {
            let _ = writeln!(self.out, "{pad}{} [shape=diamond, label={}];", q(id), q(&Id::new(self.label(id))));
        } else if let Some(class) = t.ports.get(id) {
            let shape = match class.kind {
                Kind::Resource => "square",
                Kind::Constructor => "triangle",
            };
            let fill = match class.polarity {
                Polarity::Provided => "black",
                Polarity::Received => "white",
            };
            let _ = writeln!(
                self.out,
                "{pad}{} [shape={shape}, style=filled, fillcolor={fill}, width=0.15, height=0.15, fixedsize=true, label=\"\", xlabel={}];",
                q(id),
                q(&Id::new(self.label(id)))
            );
        }
    }
}

/// DOT text for `t`, labelling components with their targets in `c` (or in
/// the let-binding correspondences) when present.
pub fn export_dot(t: &TermGraph, c: Option<&Correspondence>) -> String {
    let ix = TermIndex::new(t);
    let mut children: BTreeMap<&Id, Vec<&Id>> = BTreeMap::new();
    for (p, ch) in &t.residence {
        children.entry(p).or_default().push(ch);
    }
    let mut w = Writer { t, c, children, out: String::new() };
    w.out.push_str("digraph term {\n  compound=true;\n  node [fontsize=10];\n");
    let roots: Vec<&Id> = t.boxes.iter().filter(|b| !ix.parent_box.contains_key(*b)).collect();
    for r in roots {
        w.component(r, 1);
    }
    let mut edge = |a: String, b: String, attrs: &str| {
        let _ = writeln!(w.out, "  {a} -> {b} [{attrs}];");
    };
    for (o, p) in &t.attachment {
        if !t.boxes.contains(o) {
            edge(q(o), q(p), "arrowhead=none, style=dotted");
        }
    }
    for (a, b) in &t.resource_wiring {
        edge(q(a), q(b), "penwidth=3");
    }
    for (a, b) in &t.ctor_wiring {
        edge(q(a), q(b), "style=dashed, color=gray40");
    }
    for (b, p) in &t.ctor_argument {
        edge(q(p), anchor(b), &format!("lhead={}, arrowhead=none", cluster(b)));
    }
    for (n, p) in &t.ctor_usage {
        edge(q(p), q(n), "penwidth=0.5, arrowsize=0.5");
    }
    w.out.push_str("}\n");
    w.out
}

/// Number of clusters in `dot`, the root box included.
pub fn cluster_count(dot: &str) -> usize {
    dot.lines().filter(|l| l.trim_start().starts_with("subgraph \"cluster_")).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::get;

    #[test]
    fn one_cluster_per_box() {
        let b = get("graph_three").unwrap();
        let dot = export_dot(&b.term, Some(&b.external));
        assert_eq!(cluster_count(&dot) - 1, 6);
        assert!(dot.starts_with("digraph term {"));
        assert!(dot.ends_with("}\n"));
    }

    #[test]
    fn usage_edges_are_thin() {
        let b = get("tree_small").unwrap();
        let dot = export_dot(&b.term, Some(&b.external));
        assert_eq!(dot.matches("penwidth=0.5").count(), 5);
        assert_eq!(dot.matches("penwidth=3").count(), 5);
    }

    #[test]
    fn bare_root_box_is_an_empty_cluster() {
        let mut t = TermGraph::default();
        t.add_box("z", None);
        let dot = export_dot(&t, None);
        assert_eq!(cluster_count(&dot), 1);
        assert_eq!(dot.lines().count(), 8);
    }

    #[test]
    fn quotes_are_escaped() {
        assert_eq!(q(&Id::new("a\"b")), "\"a\\\"b\"");
    }
}

//! Cograph recognition on small symmetric graphs.
//!
//! A graph is a cograph iff it can be built from single vertices by
//! complement and disjoint union. Recognition follows that construction in
//! reverse: a graph with two or more vertices must split into connected
//! components, or its complement must; each part is then checked on its own.

/// Simple undirected graph on vertices `0..n`.
#[derive(Clone, Debug)]
pub struct SmallGraph {
    adj: Vec<Vec<bool>>,
}

impl SmallGraph {
    pub fn new(n: usize) -> Self {
        SmallGraph { adj: vec![vec![false; n]; n] }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = SmallGraph::new(n);
        for (a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        if a != b {
            self.adj[a][b] = true;
            self.adj[b][a] = true;
        }
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a][b]
    }
}

/// Splits `verts` into the connected components of the induced subgraph
/// (or of its complement when `complement` is set).
fn components(g: &SmallGraph, verts: &[usize], complement: bool) -> Vec<Vec<usize>> {
    let mut seen = vec![false; verts.len()];
    let mut out = Vec::new();
    for start in 0..verts.len() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut comp = vec![verts[start]];
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for j in 0..verts.len() {
                if !seen[j] && i != j && g.has_edge(verts[i], verts[j]) != complement {
                    seen[j] = true;
                    comp.push(verts[j]);
                    stack.push(j);
                }
            }
        }
        out.push(comp);
    }
    out
}

/// Returns the vertex set of a prime (non-decomposable) induced subgraph if
/// the graph is not a cograph.
fn prime_part(g: &SmallGraph, verts: &[usize]) -> Option<Vec<usize>> {
    if verts.len() <= 1 {
        return None;
    }
    let parts = components(g, verts, false);
    if parts.len() > 1 {
        return parts.iter().find_map(|p| prime_part(g, p));
    }
    let coparts = components(g, verts, true);
    if coparts.len() > 1 {
        return coparts.iter().find_map(|p| prime_part(g, p));
    }
    Some(verts.to_vec())
}

pub fn is_cograph(g: &SmallGraph) -> bool {
    let all: Vec<usize> = (0..g.len()).collect();
    prime_part(g, &all).is_none()
}

/// An induced path `a - b - c - d`, if the graph has one.
pub fn find_induced_p4(g: &SmallGraph) -> Option<[usize; 4]> {
    let all: Vec<usize> = (0..g.len()).collect();
    let part = prime_part(g, &all)?;
    // Every prime graph on 4 or more vertices contains an induced P4.
    induced_p4_within(g, &part)
}

fn induced_p4_within(g: &SmallGraph, verts: &[usize]) -> Option<[usize; 4]> {
    for &b in verts {
        for &c in verts {
            if b == c || !g.has_edge(b, c) {
                continue;
            }
            for &a in verts {
                if a == b || a == c || !g.has_edge(a, b) || g.has_edge(a, c) {
                    continue;
                }
                for &d in verts {
                    if d == a || d == b || d == c {
                        continue;
                    }
                    if g.has_edge(c, d) && !g.has_edge(a, d) && !g.has_edge(b, d) {
                        return Some([a, b, c, d]);
                    }
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_on_four_is_not_a_cograph() {
        let g = SmallGraph::from_edges(4, [(0, 1), (1, 2), (2, 3)]);
        assert!(!is_cograph(&g));
        let p = find_induced_p4(&g).unwrap();
        assert_eq!(p.len(), 4);
    }

    #[test]
    fn small_graphs() {
        assert!(is_cograph(&SmallGraph::new(0)));
        assert!(is_cograph(&SmallGraph::new(1)));
        // triangle, star, C4 are cographs; C5 is not
        assert!(is_cograph(&SmallGraph::from_edges(3, [(0, 1), (1, 2), (0, 2)])));
        assert!(is_cograph(&SmallGraph::from_edges(4, [(0, 1), (0, 2), (0, 3)])));
        assert!(is_cograph(&SmallGraph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])));
        assert!(!is_cograph(&SmallGraph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)])));
        assert!(find_induced_p4(&SmallGraph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)])).is_some());
    }
}

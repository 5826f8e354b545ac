use std::collections::{BTreeMap, BTreeSet};

use super::{extract_interface, multigraph_type, type_matching, Builder, Scope};
use crate::check::check_bundle;
use crate::equality::Relabeling;
use crate::error::{Error, Result};
use crate::model::{Bundle, Id, TypeGraph};
use crate::types::{bowtie_with_map, dual, top_fields};

/// `a -o b`, with the map from `b`'s ids to their copies.
pub fn function_type(a: &TypeGraph, b: &TypeGraph) -> (TypeGraph, BTreeMap<Id, Id>) {
    bowtie_with_map(&dual(a), b)
}

/// The identity function at `ty`.
pub fn identity(ty: &TypeGraph) -> Result<Bundle> {
    let (ft, map) = function_type(ty, ty);
    let mut b = Builder::new(ft);
    let (root, ports) = b.root_box()?;
    let ext = Scope::External;
    for f in top_fields(ty) {
        let g = &map[&f];
        b.join(&root, (&ports[&f], &f, &ext), (&ports[g], g, &ext))?;
    }
    Ok(b.finish())
}

/// The function on multigraphs that replaces every edge by two parallel
/// copies of it.
pub fn edge_doubler() -> Result<Bundle> {
    let mg = multigraph_type();
    let (ft, map) = function_type(&mg, &mg);
    let id = Id::new;
    let mut b = Builder::new(ft);
    let (root, ports) = b.root_box()?;
    let ext = Scope::External;

    // vertices map to vertices
    let (vin, vout) = (id("vertex"), map[&id("vertex")].clone());
    b.join(&root, (&ports[&vin], &vin, &ext), (&ports[&vout], &vout, &ext))?;

    // each edge maps to two edges between the same endpoints
    let (ein, eout) = (ports[&id("edge")].clone(), ports[&map[&id("edge")]].clone());
    let out_edge = map[&id("Edge")].clone();
    b.t.wire_ctor(&eout, &ein);
    let (handler, ends) = b.arg_box(&root, &ein, &id("Edge"), &ext);
    for _ in 0..2 {
        let (_, ps) = b.node(&handler, &eout, &out_edge, &ext);
        for end in ["src", "tgt"] {
            let (f_in, f_out) = (id(end), map[&id(end)].clone());
            b.join(&handler, (&ends[&f_in], &f_in, &ext), (&ps[&f_out], &f_out, &ext))?;
        }
    }
    Ok(b.finish())
}

/// `t` restricted to its root, the given top-level fields, and everything
/// nested below those fields.
fn restrict(t: &TypeGraph, keep: &[Id]) -> TypeGraph {
    let Some(root) = t.root() else { return TypeGraph::default() };
    let mut out = TypeGraph::default();
    out.add_interface(root.clone(), None);
    for f in keep {
        out.fields.insert(f.clone(), t.fields[f].clone());
        out.residence.insert((root.clone(), f.clone()));
        if let Some(i) = t.interface_of_field(f) {
            let sub = extract_interface(t, i);
            out.interfaces.extend(sub.interfaces);
            out.fields.extend(sub.fields);
            out.residence.extend(sub.residence);
            out.ctor_interface.extend(sub.ctor_interface);
            out.connectivity.extend(sub.connectivity);
            out.residence.insert((root.clone(), i.clone()));
            out.ctor_interface.insert((f.clone(), i.clone()));
        }
    }
    let kept: BTreeSet<&Id> = keep.iter().collect();
    for (a, b) in &t.connectivity {
        if kept.contains(a) && kept.contains(b) {
            out.connectivity.insert((a.clone(), b.clone()));
        }
    }
    out
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// Splits the type of `f` into the dual of `arg` and a result: returns the
/// result fields and a map from the ids of `arg` to the input side of `f`.
fn split_function_type(f: &TypeGraph, arg: &TypeGraph) -> Option<(Vec<Id>, Relabeling)> {
    let top = top_fields(f);
    let k = top_fields(arg).len();
    if k > top.len() {
        return None;
    }
    for pick in combinations(top.len(), k) {
        let input: Vec<Id> = pick.iter().map(|&i| top[i].clone()).collect();
        let output: Vec<Id> = top.iter().filter(|x| !input.contains(x)).cloned().collect();
        if !input.iter().all(|a| output.iter().all(|b| f.connected(a, b))) {
            continue;
        }
        if let Some(h) = type_matching(&dual(&restrict(f, &input)), arg) {
            return Some((output, h));
        }
    }
    None
}

fn ensure_valid(b: &Bundle) -> Result<()> {
    let diags = check_bundle(&b.ty, &b.term, &b.external);
    if diags.is_empty() {
        Ok(())
    } else {
        Err(Error::Invalid(diags))
    }
}

/// The term that binds `x` and `f` and passes one occurrence of `x` to one
/// occurrence of `f`.
pub fn apply_to(f: &Bundle, x: &Bundle) -> Result<Bundle> {
    ensure_valid(f)?;
    ensure_valid(x)?;
    let (outputs, h) = split_function_type(&f.ty, &x.ty)
        .ok_or_else(|| Error::Type("the argument does not match the function's input".into()))?;
    let result_ty = restrict(&f.ty, &outputs);
    let (x_root, f_root) = (x.ty.root().expect("checked"), f.ty.root().expect("checked"));

    let mut b = Builder::new(result_ty);
    let (root, ports) = b.root_box()?;
    let occurrence = |b: &mut Builder, src: &Bundle, name: &str, ty_root: &Id| -> Result<(Scope, BTreeMap<Id, Id>)> {
        let (d, recv, prov, tmap) = b.let_binding_named(&root, &src.ty, name)?;
        let body = b.fresh("b");
        b.embed_body(src, &body, &d, &tmap)?;
        b.t.residence.insert((root.clone(), body.clone()));
        b.t.ctor_argument.insert((body, recv));
        let scope = Scope::Let(d);
        let (_, ps) = b.node(&root, &prov, &tmap[ty_root], &scope);
        let by_field = tmap.iter().filter_map(|(orig, copy)| ps.get(copy).map(|p| (orig.clone(), p.clone()))).collect();
        Ok((scope, by_field))
    };
    let (xs, xports) = occurrence(&mut b, x, "x", &x_root)?;
    let (fs, fports) = occurrence(&mut b, f, "f", &f_root)?;
    let field = |b: &Builder, p: &Id, s: &Scope| -> Id {
        match s {
            Scope::Let(d) => b.t.let_correspondence[d].target(p).cloned().expect("port is covered"),
            Scope::External => b.c.target(p).cloned().expect("port is covered"),
        }
    };
    for a in top_fields(&x.ty) {
        let s = h.type_id(&a);
        let (px, pf) = (xports[&a].clone(), fports[&s].clone());
        let (fx, ff) = (field(&b, &px, &xs), field(&b, &pf, &fs));
        b.join(&root, (&px, &fx, &xs), (&pf, &ff, &fs))?;
    }
    for r in &outputs {
        let pf = fports[r].clone();
        let ff = field(&b, &pf, &fs);
        b.join(&root, (&pf, &ff, &fs), (&ports[r], r, &Scope::External))?;
    }
    Ok(b.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encodings::{encode_multigraph, Multigraph};
    use crate::types::parse_and_translate;

    fn ok(b: &Bundle) {
        assert_eq!(check_bundle(&b.ty, &b.term, &b.external), vec![]);
    }

    #[test]
    fn identities_check() {
        for s in ["X", "X -o X", "X * X", "!(X -o X) -o X", "!!1 -o !(!1 -o !1 -o 1) -o 1"] {
            let ty = parse_and_translate(s).unwrap();
            ok(&identity(&ty).unwrap());
        }
    }

    #[test]
    fn doubler_checks() {
        ok(&edge_doubler().unwrap());
    }

    #[test]
    fn application_checks() {
        let g = encode_multigraph(&"n=3; 0->1 1->2 2->0".parse::<Multigraph>().unwrap()).unwrap();
        let app = apply_to(&edge_doubler().unwrap(), &g).unwrap();
        ok(&app);
        assert_eq!(app.term.lets.len(), 2);
    }

    #[test]
    fn doubling_a_triangle_normalizes() {
        use crate::encodings::decode_multigraph;
        use crate::equality::bare_equal;
        use crate::rewrite::{normalize, Strategy};
        let tri: Multigraph = "n=3; 0->1 1->2 2->0".parse().unwrap();
        let app = apply_to(&edge_doubler().unwrap(), &encode_multigraph(&tri).unwrap()).unwrap();
        let want = encode_multigraph(&tri.doubled()).unwrap();
        for s in Strategy::ALL {
            let r = normalize(&app.term, &app.external, s, 100).unwrap();
            eprintln!("{s:?}: {} steps", r.trace.len());
            assert!(r.term.lets.is_empty());
            assert_eq!(check_bundle(&app.ty, &r.term, &r.external), vec![]);
            let got = Bundle { ty: app.ty.clone(), term: r.term.clone(), external: r.external.clone() };
            assert_eq!(decode_multigraph(&got).unwrap().edge_multiset(), tri.doubled().edge_multiset());
            assert!(bare_equal(&r.term, &want.term).is_some());
        }
    }

    #[test]
    fn self_application_is_rejected() {
        let f = edge_doubler().unwrap();
        assert!(matches!(apply_to(&f, &f), Err(Error::Type(_))));
    }
}

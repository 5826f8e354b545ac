//! Line-oriented text format for types, terms, correspondences and bundles.
//!
//! ```text
//! idg 1 type
//! I: X Y
//! F: a:R+ b:C-:Nat
//! R_R: (X,a) (X,b) (X,Y)
//! R_I: (b,Y)
//! R_C: (a,b)
//! ```
//!
//! Each section is one line. Sets list ids, `F`/`P` list `id:CLASS` entries
//! (fields may add `:label`), relations list `(a,b)` records. Term documents
//! prefix their internal types with `int.`, bundles prefix the type with
//! `type.`, and let-binding correspondences are written `R_DC[let]`. Empty
//! sections are omitted; `#` starts a comment.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{sym, Bundle, Class, Correspondence, FieldDescriptor, Id, Relation, TermGraph, TypeGraph};

pub const FORMAT_VERSION: &str = "1";

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}, column {column}{}: {message}", .section.as_ref().map(|s| format!(" (section {s})")).unwrap_or_default())]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub section: Option<String>,
    pub message: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DocKind {
    Type,
    Term,
    Correspondence,
    Bundle,
}

impl DocKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DocKind::Type => "type",
            DocKind::Term => "term",
            DocKind::Correspondence => "correspondence",
            DocKind::Bundle => "bundle",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub version: String,
    pub kind: DocKind,
    pub ty: TypeGraph,
    pub term: TermGraph,
    pub correspondence: Correspondence,
}

impl Document {
    pub fn into_bundle(self) -> Bundle {
        Bundle { ty: self.ty, term: self.term, external: self.correspondence }
    }
}

struct Out(String);

impl Out {
    fn set<'a>(&mut self, name: &str, ids: impl IntoIterator<Item = &'a Id>) {
        let items: Vec<&str> = ids.into_iter().map(Id::as_str).collect();
        if !items.is_empty() {
            let _ = writeln!(self.0, "{name}: {}", items.join(" "));
        }
    }

    fn rel(&mut self, name: &str, rel: &Relation) {
        if !rel.is_empty() {
            let items: Vec<String> = rel.iter().map(|(a, b)| format!("({a},{b})")).collect();
            let _ = writeln!(self.0, "{name}: {}", items.join(" "));
        }
    }

    fn type_sections(&mut self, prefix: &str, g: &TypeGraph) {
        self.set(&format!("{prefix}I"), &g.interfaces);
        if !g.fields.is_empty() {
            let items: Vec<String> = g
                .fields
                .iter()
                .map(|(id, fd)| match &fd.label {
                    Some(l) => format!("{id}:{}:{l}", fd.class.tag()),
                    None => format!("{id}:{}", fd.class.tag()),
                })
                .collect();
            let _ = writeln!(self.0, "{prefix}F: {}", items.join(" "));
        }
        self.rel(&format!("{prefix}R_R"), &g.residence);
        self.rel(&format!("{prefix}R_I"), &g.ctor_interface);
        self.rel(&format!("{prefix}R_C"), &g.connectivity);
    }

    fn term_sections(&mut self, t: &TermGraph) {
        self.set("B", &t.boxes);
        self.set("N", &t.nodes);
        if !t.ports.is_empty() {
            let items: Vec<String> = t.ports.iter().map(|(id, c)| format!("{id}:{}", c.tag())).collect();
            let _ = writeln!(self.0, "P: {}", items.join(" "));
        }
        self.set("D", &t.lets);
        self.rel("R_R", &t.residence);
        self.rel("R_A", &t.attachment);
        self.rel("R_WR", &t.resource_wiring);
        self.rel("R_WC", &t.ctor_wiring);
        self.rel("R_CA", &t.ctor_argument);
        self.rel("R_CU", &t.ctor_usage);
        self.rel("R_DI", &t.let_typing);
        self.type_sections("int.", &t.internal);
        for (d, frag) in &t.let_correspondence {
            self.rel(&format!("R_DC[{d}]"), &frag.pairs);
        }
    }
}

fn header(kind: DocKind) -> Out {
    Out(format!("idg {FORMAT_VERSION} {}\n", kind.as_str()))
}

pub fn print_type(g: &TypeGraph) -> String {
    let mut o = header(DocKind::Type);
    o.type_sections("", g);
    o.0
}

pub fn print_term(t: &TermGraph) -> String {
    let mut o = header(DocKind::Term);
    o.term_sections(t);
    o.0
}

pub fn print_correspondence(c: &Correspondence) -> String {
    let mut o = header(DocKind::Correspondence);
    o.rel("C", &c.pairs);
    o.0
}

pub fn print_bundle(b: &Bundle) -> String {
    let mut o = header(DocKind::Bundle);
    o.type_sections("type.", &b.ty);
    o.term_sections(&b.term);
    o.rel("C", &b.external.pairs);
    o.0
}

struct Cursor<'a> {
    line: usize,
    text: &'a str,
    pos: usize,
    section: String,
}

impl<'a> Cursor<'a> {
    fn err(&self, col_offset: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            column: col_offset + 1,
            section: Some(self.section.clone()),
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text.as_bytes()[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn done(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.text.len()
    }

    /// A bare token: everything up to whitespace.
    fn token(&mut self) -> (usize, &'a str) {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.text.len() && !self.text.as_bytes()[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        (start, &self.text[start..self.pos])
    }

    fn id(&self, start: usize, s: &str) -> Result<Id, ParseError> {
        if s.is_empty() {
            return Err(self.err(start, "expected an identifier"));
        }
        if let Some(k) = s.find(|c: char| "(),:[]#".contains(c)) {
            return Err(self.err(start + k, format!("unexpected `{}` in identifier", &s[k..k + 1])));
        }
        Ok(Id::new(s))
    }

    fn pair(&mut self) -> Result<(Id, Id), ParseError> {
        let (start, tok) = self.token();
        let inner = tok
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| self.err(start, format!("expected `(a,b)`, found `{tok}`")))?;
        let (a, b) = inner.split_once(',').ok_or_else(|| self.err(start, "expected `,` inside pair"))?;
        let a = self.id(start + 1, a)?;
        let b = self.id(start + 2 + a.as_str().len(), b)?;
        Ok((a, b))
    }
}

#[derive(Default)]
struct Parsed {
    ty: TypeGraph,
    term: TermGraph,
    corr: Correspondence,
}

fn parse_set(cur: &mut Cursor, into: &mut BTreeSet<Id>) -> Result<(), ParseError> {
    while !cur.done() {
        let (start, tok) = cur.token();
        let id = cur.id(start, tok)?;
        if !into.insert(id) {
            return Err(cur.err(start, format!("duplicate entry `{tok}`")));
        }
    }
    Ok(())
}

fn parse_rel(cur: &mut Cursor, into: &mut Relation) -> Result<(), ParseError> {
    while !cur.done() {
        let start = cur.pos;
        let p = cur.pair()?;
        if !into.insert(p) {
            return Err(cur.err(start, "duplicate pair"));
        }
    }
    Ok(())
}

fn parse_classed(cur: &mut Cursor, allow_label: bool) -> Result<Vec<(Id, Class, Option<String>)>, ParseError> {
    let mut out = Vec::new();
    while !cur.done() {
        let (start, tok) = cur.token();
        let mut parts = tok.splitn(3, ':');
        let id = cur.id(start, parts.next().unwrap_or(""))?;
        let tag = parts.next().ok_or_else(|| cur.err(start, format!("expected `{tok}:CLASS`")))?;
        let class = Class::from_tag(tag)
            .ok_or_else(|| cur.err(start + id.as_str().len() + 1, format!("unknown class `{tag}`")))?;
        let label = match parts.next() {
            Some(l) if allow_label && !l.is_empty() => Some(l.to_string()),
            Some(_) => return Err(cur.err(start, "unexpected label")),
            None => None,
        };
        out.push((id, class, label));
    }
    Ok(out)
}

fn parse_type_section(name: &str, cur: &mut Cursor, g: &mut TypeGraph) -> Result<bool, ParseError> {
    match name {
        "I" => parse_set(cur, &mut g.interfaces)?,
        "F" => {
            for (id, class, label) in parse_classed(cur, true)? {
                let start = cur.pos;
                if g.fields.insert(id.clone(), FieldDescriptor { class, label }).is_some() {
                    return Err(cur.err(start, format!("duplicate field `{id}`")));
                }
            }
        }
        "R_R" => parse_rel(cur, &mut g.residence)?,
        "R_I" => parse_rel(cur, &mut g.ctor_interface)?,
        "R_C" => {
            // connectivity is symmetric; store each edge once, smaller id first
            let mut raw = Relation::new();
            parse_rel(cur, &mut raw)?;
            let start = cur.pos;
            for (a, b) in raw {
                if !g.connectivity.insert(sym(a, b)) {
                    return Err(cur.err(start, "duplicate pair"));
                }
            }
        }
        _ => return Ok(false),
    }
    Ok(true)
}

fn parse_term_section(name: &str, cur: &mut Cursor, t: &mut TermGraph) -> Result<bool, ParseError> {
    if let Some(rest) = name.strip_prefix("int.") {
        return parse_type_section(rest, cur, &mut t.internal);
    }
    if let Some(d) = name.strip_prefix("R_DC[").and_then(|r| r.strip_suffix(']')) {
        let d = cur.id(0, d)?;
        let frag = t.let_correspondence.entry(d).or_default();
        parse_rel(cur, &mut frag.pairs)?;
        return Ok(true);
    }
    match name {
        "B" => parse_set(cur, &mut t.boxes)?,
        "N" => parse_set(cur, &mut t.nodes)?,
        "D" => parse_set(cur, &mut t.lets)?,
        "P" => {
            for (id, class, _) in parse_classed(cur, false)? {
                let start = cur.pos;
                if t.ports.insert(id.clone(), class).is_some() {
                    return Err(cur.err(start, format!("duplicate port `{id}`")));
                }
            }
        }
        "R_R" => parse_rel(cur, &mut t.residence)?,
        "R_A" => parse_rel(cur, &mut t.attachment)?,
        "R_WR" => parse_rel(cur, &mut t.resource_wiring)?,
        "R_WC" => parse_rel(cur, &mut t.ctor_wiring)?,
        "R_CA" => parse_rel(cur, &mut t.ctor_argument)?,
        "R_CU" => parse_rel(cur, &mut t.ctor_usage)?,
        "R_DI" => parse_rel(cur, &mut t.let_typing)?,
        _ => return Ok(false),
    }
    Ok(true)
}

pub fn parse(text: &str) -> Result<Document, ParseError> {
    let mut kind = None;
    let mut version = String::new();
    let mut parsed = Parsed::default();
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let Some(kind_now) = kind else {
            let words: Vec<&str> = line.split_whitespace().collect();
            let bad = |column: usize, message: String| ParseError { line: line_no, column, section: None, message };
            if words.first() != Some(&"idg") {
                return Err(bad(1, "expected header `idg <version> <kind>`".into()));
            }
            let v = words.get(1).ok_or_else(|| bad(4, "missing format version".into()))?;
            if *v != FORMAT_VERSION {
                return Err(bad(5, format!("unsupported format version `{v}`")));
            }
            version = v.to_string();
            kind = Some(match words.get(2) {
                Some(&"type") => DocKind::Type,
                Some(&"term") => DocKind::Term,
                Some(&"correspondence") => DocKind::Correspondence,
                Some(&"bundle") => DocKind::Bundle,
                Some(other) => return Err(bad(7, format!("unknown document kind `{other}`"))),
                None => return Err(bad(7, "missing document kind".into())),
            });
            if words.len() > 3 {
                return Err(bad(1, "trailing text after header".into()));
            }
            continue;
        };
        let Some(colon) = line.find(':').filter(|&c| !line[..c].contains('(')) else {
            return Err(ParseError {
                line: line_no,
                column: 1,
                section: None,
                message: "expected `SECTION: records`".into(),
            });
        };
        let indent = line.len() - line.trim_start().len();
        let name = line[..colon].trim().to_string();
        if let Some(prev) = seen.insert(name.clone(), line_no) {
            return Err(ParseError {
                line: line_no,
                column: indent + 1,
                section: Some(name),
                message: format!("section repeated (first on line {prev})"),
            });
        }
        let mut cur = Cursor { line: line_no, text: line, pos: colon + 1, section: name.clone() };
        let known = match kind_now {
            DocKind::Type => parse_type_section(&name, &mut cur, &mut parsed.ty)?,
            DocKind::Term => parse_term_section(&name, &mut cur, &mut parsed.term)?,
            DocKind::Correspondence => {
                name == "C" && {
                    parse_rel(&mut cur, &mut parsed.corr.pairs)?;
                    true
                }
            }
            DocKind::Bundle => {
                if let Some(rest) = name.strip_prefix("type.") {
                    parse_type_section(rest, &mut cur, &mut parsed.ty)?
                } else if name == "C" {
                    parse_rel(&mut cur, &mut parsed.corr.pairs)?;
                    true
                } else {
                    parse_term_section(&name, &mut cur, &mut parsed.term)?
                }
            }
        };
        if !known {
            return Err(ParseError {
                line: line_no,
                column: indent + 1,
                section: Some(name.clone()),
                message: format!("unknown section `{name}` for a {} document", kind_now.as_str()),
            });
        }
    }
    let kind = kind.ok_or(ParseError { line: 1, column: 1, section: None, message: "empty document".into() })?;
    Ok(Document { version, kind, ty: parsed.ty, term: parsed.term, correspondence: parsed.corr })
}

pub fn parse_bundle(text: &str) -> crate::Result<Bundle> {
    let doc = parse(text)?;
    if doc.kind != DocKind::Bundle {
        return Err(crate::Error::Precondition(format!("expected a bundle document, found {}", doc.kind.as_str())));
    }
    Ok(doc.into_bundle())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_type_is_header_only() {
        assert_eq!(print_type(&TypeGraph::default()), "idg 1 type\n");
    }

    #[test]
    fn errors_carry_position() {
        let e = parse("idg 1 type\nI: A\nR_C: (A,B) A,B)\n").unwrap_err();
        assert_eq!(e.line, 3);
        assert_eq!(e.column, 12);
        assert_eq!(e.section.as_deref(), Some("R_C"));
        let e = parse("idg 1 type\nQ: A\n").unwrap_err();
        assert!(e.message.contains("unknown section"));
        let e = parse("idg 1 term\nP: a:Q+\n").unwrap_err();
        assert!(e.message.contains("unknown class"));
    }

    #[test]
    fn comments_and_labels() {
        let doc = parse("# leading\nidg 1 type # kind\nI: T\nF: a:R+:Nat b:C-\nR_R: (T,a) (T,b)\n").unwrap();
        assert_eq!(doc.ty.fields[&Id::new("a")].label.as_deref(), Some("Nat"));
        assert_eq!(parse(&print_type(&doc.ty)).unwrap().ty, doc.ty);
    }
}

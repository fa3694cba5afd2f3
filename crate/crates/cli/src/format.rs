//! The `sepsys` text format: separation systems, edge lists and inverse
//! systems as line-oriented documents.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;
use treesets::generators::edge_tree_set;
use treesets::inverse::{IndexPoset, InverseError, InverseSystem};
use treesets::{SeparationSystem, SystemError, SystemMap};

pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: syntax error: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Validation { line: usize, source: SystemError },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Inverse(#[from] InverseError),
}

fn syntax(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Syntax { line, msg: msg.into() }
}

/// A token list with the line it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Item {
    pub line: usize,
    pub tokens: Vec<String>,
}

/// The body of one separation system, either explicit or as a tree.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SystemSection {
    pub elements: Vec<Item>,
    pub involution: Vec<Item>,
    pub le: Vec<Item>,
    pub tree: Vec<Item>,
    pub has_tree: bool,
    /// Line of the first line of this section, for whole-section errors.
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InverseSection {
    pub points: Vec<Item>,
    pub point_le: Vec<Item>,
    pub systems: Vec<(Item, SystemSection)>,
    pub bonds: Vec<(Item, Vec<Item>)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Content {
    System(SystemSection),
    Inverse(InverseSection),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SepsysDocument {
    pub version: u32,
    pub name: Option<String>,
    pub provenance: Option<String>,
    pub content: Content,
}

struct Line<'a> {
    no: usize,
    indented: bool,
    text: &'a str,
}

fn lines(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let body = raw.split('#').next().unwrap_or("");
            let trimmed = body.trim();
            if trimmed.is_empty() {
                return None;
            }
            Some(Line { no: i + 1, indented: body.starts_with([' ', '\t']), text: trimmed })
        })
        .collect()
}

fn item(l: &Line) -> Item {
    Item { line: l.no, tokens: l.text.split_whitespace().map(str::to_string).collect() }
}

fn expect_arity(it: &Item, ok: &[usize], what: &str) -> Result<(), FormatError> {
    if ok.contains(&it.tokens.len()) {
        Ok(())
    } else {
        Err(syntax(it.line, format!("{what} expects {} token(s), got {}", join_arity(ok), it.tokens.len())))
    }
}

fn join_arity(ok: &[usize]) -> String {
    ok.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(" or ")
}

fn section_header<'a>(l: &Line<'a>) -> Option<&'a str> {
    (!l.indented).then(|| l.text.strip_suffix(':')).flatten().filter(|h| !h.contains(char::is_whitespace))
}

/// Parses the sections of a single system body, stopping at a `---` line.
fn parse_system_body<'a>(ls: &[Line<'a>], start: usize, line: usize) -> Result<(SystemSection, usize), FormatError> {
    let mut sec = SystemSection { line, ..Default::default() };
    let mut current: Option<&str> = None;
    let mut seen: Vec<&str> = Vec::new();
    let mut i = start;
    while i < ls.len() {
        let l = &ls[i];
        if l.text.starts_with("---") {
            break;
        }
        if let Some(h) = section_header(l) {
            let h = match h {
                "elements" | "involution" | "le" | "tree" => h,
                other => return Err(syntax(l.no, format!("unknown section `{other}`"))),
            };
            if seen.contains(&h) {
                return Err(syntax(l.no, format!("duplicate section `{h}`")));
            }
            seen.push(h);
            if h == "tree" {
                sec.has_tree = true;
            }
            current = Some(h);
        } else if l.indented {
            let it = item(l);
            match current {
                Some("elements") => {
                    expect_arity(&it, &[1], "an element")?;
                    sec.elements.push(it);
                }
                Some("involution") => {
                    expect_arity(&it, &[1, 2], "an involution pair")?;
                    sec.involution.push(it);
                }
                Some("le") => {
                    expect_arity(&it, &[2], "an order pair")?;
                    sec.le.push(it);
                }
                Some("tree") => {
                    expect_arity(&it, &[2], "an edge")?;
                    sec.tree.push(it);
                }
                _ => return Err(syntax(l.no, "item outside a section")),
            }
        } else {
            return Err(syntax(l.no, format!("unexpected line `{}`", l.text)));
        }
        i += 1;
    }
    if sec.has_tree && !(sec.elements.is_empty() && sec.involution.is_empty() && sec.le.is_empty()) {
        return Err(syntax(line, "a `tree:` section cannot be combined with explicit sections"));
    }
    if !sec.has_tree && !seen.contains(&"elements") {
        return Err(syntax(line, "missing `elements:` section"));
    }
    Ok((sec, i))
}

pub fn parse(text: &str) -> Result<SepsysDocument, FormatError> {
    let ls = lines(text);
    let first = ls.first().ok_or_else(|| syntax(1, "empty document"))?;
    let version = match first.text.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["sepsys", v] => v.parse::<u32>().map_err(|_| syntax(first.no, format!("bad version `{v}`")))?,
        _ => return Err(syntax(first.no, "expected header `sepsys <version>`")),
    };
    if version != VERSION {
        return Err(syntax(first.no, format!("unsupported version {version}")));
    }
    let mut name = None;
    let mut provenance = None;
    let mut kind = "system".to_string();
    let mut i = 1;
    while i < ls.len() {
        let l = &ls[i];
        let Some((key, value)) = l.text.split_once(':') else { break };
        let value = value.trim();
        if l.indented || value.is_empty() {
            break;
        }
        match key {
            "name" => name = Some(value.to_string()),
            "provenance" => provenance = Some(value.to_string()),
            "kind" => kind = value.to_string(),
            other => return Err(syntax(l.no, format!("unknown metadata field `{other}`"))),
        }
        i += 1;
    }
    let body_line = ls.get(i).map_or(first.no, |l| l.no);
    let content = match kind.as_str() {
        "system" => {
            let (sec, end) = parse_system_body(&ls, i, body_line)?;
            if let Some(l) = ls.get(end) {
                return Err(syntax(l.no, "`---` blocks are only allowed in inverse-system documents"));
            }
            Content::System(sec)
        }
        "inverse-system" => Content::Inverse(parse_inverse(&ls, i)?),
        other => return Err(syntax(body_line, format!("unknown kind `{other}`"))),
    };
    Ok(SepsysDocument { version, name, provenance, content })
}

fn parse_inverse(ls: &[Line], mut i: usize) -> Result<InverseSection, FormatError> {
    let mut points = Vec::new();
    let mut point_le = Vec::new();
    let mut current = None;
    while i < ls.len() && !ls[i].text.starts_with("---") {
        let l = &ls[i];
        match section_header(l) {
            Some(h @ ("points" | "point-le")) => current = Some(h),
            Some(other) => return Err(syntax(l.no, format!("unknown section `{other}` before the first `---` block"))),
            None if l.indented => {
                let it = item(l);
                match current {
                    Some("points") => {
                        expect_arity(&it, &[1], "an index point")?;
                        points.push(it);
                    }
                    Some("point-le") => {
                        expect_arity(&it, &[2], "an index order pair")?;
                        point_le.push(it);
                    }
                    _ => return Err(syntax(l.no, "item outside a section")),
                }
            }
            None => return Err(syntax(l.no, format!("unexpected line `{}`", l.text))),
        }
        i += 1;
    }
    let mut systems = Vec::new();
    let mut bonds = Vec::new();
    while i < ls.len() {
        let l = &ls[i];
        let head = item(l);
        match head.tokens.as_slice() {
            [dash, kw, _] if dash == "---" && kw == "point" => {
                let (sec, end) = parse_system_body(ls, i + 1, l.no)?;
                systems.push((head, sec));
                i = end;
            }
            [dash, kw, _, _] if dash == "---" && kw == "bond" => {
                let mut table = Vec::new();
                i += 1;
                while i < ls.len() && !ls[i].text.starts_with("---") {
                    if !ls[i].indented {
                        return Err(syntax(ls[i].no, "bond table entries must be indented"));
                    }
                    let it = item(&ls[i]);
                    expect_arity(&it, &[2], "a bond entry")?;
                    table.push(it);
                    i += 1;
                }
                bonds.push((head, table));
            }
            _ => return Err(syntax(l.no, "expected `--- point <id>` or `--- bond <q> <p>`")),
        }
    }
    Ok(InverseSection { points, point_le, systems, bonds })
}

/// Builds the separation system of a section, locating errors at the line
/// that introduced the offending name.
pub fn section_system(sec: &SystemSection) -> Result<SeparationSystem, FormatError> {
    if sec.has_tree {
        let edges: Vec<(String, String)> =
            sec.tree.iter().map(|it| (it.tokens[0].clone(), it.tokens[1].clone())).collect();
        return edge_tree_set(&edges)
            .map(|ts| ts.system().clone())
            .map_err(|e| FormatError::Invalid(format!("line {}: {e}", sec.line)));
    }
    let mut declared: BTreeMap<&str, usize> = BTreeMap::new();
    for it in &sec.elements {
        let name = it.tokens[0].as_str();
        if declared.insert(name, it.line).is_some() {
            return Err(FormatError::Validation { line: it.line, source: SystemError::DuplicateElement(name.into()) });
        }
    }
    let known = |it: &Item| -> Result<(), FormatError> {
        for t in &it.tokens {
            if !declared.contains_key(t.as_str()) {
                return Err(FormatError::Validation { line: it.line, source: SystemError::UnknownElement(t.clone()) });
            }
        }
        Ok(())
    };
    let mut paired: BTreeMap<&str, usize> = BTreeMap::new();
    for it in &sec.involution {
        known(it)?;
        let a = it.tokens[0].as_str();
        let b = it.tokens.get(1).map_or(a, |s| s.as_str());
        for x in if a == b { vec![a] } else { vec![a, b] } {
            if paired.insert(x, it.line).is_some() {
                return Err(FormatError::Validation { line: it.line, source: SystemError::ConflictingInverse(x.into()) });
            }
        }
    }
    for (name, &line) in &declared {
        if !paired.contains_key(name) {
            return Err(FormatError::Validation { line, source: SystemError::MissingInverse((*name).into()) });
        }
    }
    for it in &sec.le {
        known(it)?;
    }
    let elements: Vec<&str> = sec.elements.iter().map(|it| it.tokens[0].as_str()).collect();
    let involution: Vec<(&str, &str)> = sec
        .involution
        .iter()
        .map(|it| (it.tokens[0].as_str(), it.tokens.get(1).unwrap_or(&it.tokens[0]).as_str()))
        .collect();
    let le: Vec<(&str, &str)> = sec.le.iter().map(|it| (it.tokens[0].as_str(), it.tokens[1].as_str())).collect();
    SeparationSystem::build(&elements, &involution, &le).map_err(|e| {
        let line = sec.le.first().map_or(sec.line, |it| it.line);
        FormatError::Validation { line, source: e }
    })
}

impl SepsysDocument {
    pub fn to_system(&self) -> Result<SeparationSystem, FormatError> {
        match &self.content {
            Content::System(sec) => section_system(sec),
            Content::Inverse(_) => Err(FormatError::Invalid("expected a system document, got an inverse system".into())),
        }
    }

    pub fn to_inverse_system(&self) -> Result<InverseSystem, FormatError> {
        let Content::Inverse(inv) = &self.content else {
            return Err(FormatError::Invalid("expected an inverse-system document".into()));
        };
        let points: Vec<String> = inv.points.iter().map(|it| it.tokens[0].clone()).collect();
        let point_id = |name: &str, line: usize| {
            points.iter().position(|p| p == name).ok_or_else(|| syntax(line, format!("unknown index point `{name}`")))
        };
        let mut gens = Vec::new();
        for it in &inv.point_le {
            gens.push((point_id(&it.tokens[0], it.line)?, point_id(&it.tokens[1], it.line)?));
        }
        let index = IndexPoset::new(points.clone(), &gens)?;
        let mut systems: Vec<Option<Arc<SeparationSystem>>> = vec![None; points.len()];
        for (head, sec) in &inv.systems {
            let p = point_id(&head.tokens[2], head.line)?;
            if systems[p].is_some() {
                return Err(syntax(head.line, format!("duplicate system for point `{}`", head.tokens[2])));
            }
            systems[p] = Some(Arc::new(section_system(sec)?));
        }
        let systems = systems
            .into_iter()
            .enumerate()
            .map(|(p, s)| s.ok_or_else(|| FormatError::Invalid(format!("no system for point `{}`", points[p]))))
            .collect::<Result<Vec<_>, _>>()?;
        let mut bondings = BTreeMap::new();
        for (head, table) in &inv.bonds {
            let q = point_id(&head.tokens[2], head.line)?;
            let p = point_id(&head.tokens[3], head.line)?;
            let pairs: Vec<(String, String)> =
                table.iter().map(|it| (it.tokens[0].clone(), it.tokens[1].clone())).collect();
            let map = SystemMap::from_names(systems[q].clone(), systems[p].clone(), &pairs)
                .map_err(|e| FormatError::Invalid(format!("line {}: bond {} -> {}: {e}", head.line, points[q], points[p])))?;
            if bondings.insert((q, p), map).is_some() {
                return Err(syntax(head.line, "duplicate bond"));
            }
        }
        Ok(InverseSystem::new(index, systems, bondings)?)
    }
}

fn header(out: &mut String, name: Option<&str>, provenance: Option<&str>, kind: &str) {
    out.push_str(&format!("sepsys {VERSION}\n"));
    if let Some(n) = name {
        out.push_str(&format!("name: {n}\n"));
    }
    if let Some(p) = provenance {
        out.push_str(&format!("provenance: {p}\n"));
    }
    out.push_str(&format!("kind: {kind}\n"));
}

fn system_body(out: &mut String, sys: &SeparationSystem) {
    out.push_str("elements:\n");
    for n in sys.names() {
        out.push_str(&format!("  {n}\n"));
    }
    out.push_str("involution:\n");
    for x in sys.elements() {
        let y = sys.inv(x);
        if x == y {
            out.push_str(&format!("  {}\n", sys.name(x)));
        } else if x < y {
            out.push_str(&format!("  {} {}\n", sys.name(x), sys.name(y)));
        }
    }
    out.push_str("le:\n");
    for (a, b) in sys.cover_pairs() {
        out.push_str(&format!("  {} {}\n", sys.name(a), sys.name(b)));
    }
}

/// Normalized text of a system: elements sorted, each involution pair once,
/// the order as its sorted cover pairs.
pub fn serialize_system(sys: &SeparationSystem, name: Option<&str>, provenance: Option<&str>) -> String {
    let mut out = String::new();
    header(&mut out, name, provenance, "system");
    system_body(&mut out, sys);
    out
}

/// Normalized text of an inverse system. Bond tables are written for every
/// comparable pair.
pub fn serialize_inverse(inv: &InverseSystem, name: Option<&str>, provenance: Option<&str>) -> String {
    let mut out = String::new();
    header(&mut out, name, provenance, "inverse-system");
    let pts = &inv.index.points;
    out.push_str("points:\n");
    for p in pts {
        out.push_str(&format!("  {p}\n"));
    }
    out.push_str("point-le:\n");
    let n = pts.len();
    let lt = |a: usize, b: usize| a != b && inv.index.le(a, b);
    let mut covers: Vec<(&str, &str)> = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if lt(a, b) && !(0..n).any(|c| lt(a, c) && lt(c, b)) {
                covers.push((&pts[a], &pts[b]));
            }
        }
    }
    covers.sort();
    for (a, b) in covers {
        out.push_str(&format!("  {a} {b}\n"));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| pts[a].cmp(&pts[b]));
    for &p in &order {
        out.push_str(&format!("--- point {}\n", pts[p]));
        system_body(&mut out, &inv.systems[p]);
    }
    let mut bonds: Vec<(usize, usize)> = inv.bondings.keys().copied().collect();
    bonds.sort_by(|a, b| (&pts[a.0], &pts[a.1]).cmp(&(&pts[b.0], &pts[b.1])));
    for (q, p) in bonds {
        out.push_str(&format!("--- bond {} {}\n", pts[q], pts[p]));
        let f = &inv.bondings[&(q, p)];
        for x in f.domain.elements() {
            out.push_str(&format!("  {} {}\n", f.domain.name(x), f.codomain.name(f.apply(x))));
        }
    }
    out
}

/// Serializes a parsed document in normal form.
pub fn normalize(doc: &SepsysDocument) -> Result<String, FormatError> {
    let (name, prov) = (doc.name.as_deref(), doc.provenance.as_deref());
    match &doc.content {
        Content::System(_) => Ok(serialize_system(&doc.to_system()?, name, prov)),
        Content::Inverse(_) => Ok(serialize_inverse(&doc.to_inverse_system()?, name, prov)),
    }
}

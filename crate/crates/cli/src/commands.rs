//! Subcommand reports. Each command yields plain text, a JSON value and an
//! exit code; nothing here touches stdout.

use std::fmt::Write as _;
use std::path::Path;

use serde_json::{json, Value};
use treesets::characterize::{check_family, check_tree_set, PropertyVerdict, Verdict, Witness, GROWTH_THRESHOLD};
use treesets::generators::{
    example_b_family, infinite_star_family, interval_family, paper_fixture, ray_family, Fixture, TruncationFamily,
};
use treesets::inverse::{family_name, phi, verify_limit_tree_set, InverseSystem};
use treesets::orientation::{all_consistent_orientations, branching_points, splitting_stars};
use treesets::quotient::{is_branch_closed, quotient, selection_from_names, Host};
use treesets::represent::{represent, GroundKind};
use treesets::{SeparationSystem, TreeSet};

use crate::format::{self, Content};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub json: Value,
    pub code: i32,
}

impl Outcome {
    fn new(text: String, json: Value, code: i32) -> Self {
        Outcome { text, json, code }
    }

    pub fn input_error(msg: impl Into<String>) -> Self {
        let msg = msg.into();
        Outcome { text: format!("error: {msg}\n"), json: json!({ "error": msg }), code: EXIT_INPUT }
    }

    fn failure(msg: impl Into<String>) -> Self {
        let msg = msg.into();
        Outcome { text: format!("{msg}\n"), json: json!({ "failure": msg }), code: EXIT_FAIL }
    }
}

pub enum Input {
    System { label: String, sys: SeparationSystem },
    Inverse { label: String, inv: InverseSystem },
    Family(TruncationFamily),
}

impl Input {
    pub fn label(&self) -> &str {
        match self {
            Input::System { label, .. } | Input::Inverse { label, .. } => label,
            Input::Family(f) => &f.name,
        }
    }
}

/// Reads `arg` as a document path if such a file exists, otherwise as a
/// fixture name.
pub fn load(arg: &str) -> Result<Input, Outcome> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| Outcome::input_error(format!("{arg}: {e}")))?;
        let doc = format::parse(&text).map_err(|e| Outcome::input_error(format!("{arg}: {e}")))?;
        let label = doc.name.clone().unwrap_or_else(|| arg.to_string());
        return match doc.content {
            Content::System(_) => {
                let sys = doc.to_system().map_err(|e| Outcome::input_error(format!("{arg}: {e}")))?;
                Ok(Input::System { label, sys })
            }
            Content::Inverse(_) => {
                let inv = doc.to_inverse_system().map_err(|e| Outcome::input_error(format!("{arg}: {e}")))?;
                Ok(Input::Inverse { label, inv })
            }
        };
    }
    match paper_fixture(arg) {
        Ok(Fixture::TreeSet(ts)) => Ok(Input::System { label: arg.to_string(), sys: ts.system().clone() }),
        Ok(Fixture::Family(f)) => Ok(Input::Family(f)),
        Err(e) => Err(Outcome::input_error(format!("`{arg}` is neither a file nor a known fixture ({e})"))),
    }
}

/// The single system of an input; a family contributes its last level.
fn system_of(input: &Input) -> Result<(String, SeparationSystem), Outcome> {
    match input {
        Input::System { label, sys } => Ok((label.clone(), sys.clone())),
        Input::Family(f) => {
            let last = f.levels.last().ok_or_else(|| Outcome::input_error("empty family"))?;
            let param = f.params.last().copied().unwrap_or(0);
            Ok((format!("{} level {param}", f.name), last.system().clone()))
        }
        Input::Inverse { .. } => Err(Outcome::input_error("this command needs a single system, not an inverse system")),
    }
}

fn tree_set_of(input: &Input) -> Result<(String, TreeSet), Outcome> {
    let (label, sys) = system_of(input)?;
    match TreeSet::new(sys) {
        Ok(ts) => Ok((label, ts)),
        Err(f) => Err(Outcome::failure(format!("{label}: {f}"))),
    }
}

fn set(names: &[String]) -> String {
    format!("{{{}}}", names.join(", "))
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn system_summary(sys: &SeparationSystem) -> (String, Value, bool) {
    let pick = |f: &dyn Fn(usize) -> bool| -> Vec<String> {
        sys.elements().filter(|&x| f(x)).map(|x| sys.name(x).to_string()).collect()
    };
    let small = pick(&|x| sys.is_small(x));
    let trivial = pick(&|x| sys.is_trivial(x));
    let degenerate = pick(&|x| sys.is_degenerate(x));
    let crossing: Vec<(String, String)> = sys
        .crossing_pairs()
        .into_iter()
        .map(|(a, b)| (sys.name(a).to_string(), sys.name(b).to_string()))
        .collect();
    let tree_set = crossing.is_empty() && trivial.is_empty() && degenerate.is_empty();
    let mut t = String::new();
    let _ = writeln!(t, "elements: {}", sys.len());
    let _ = writeln!(t, "separations: {}", sys.separations().len());
    let _ = writeln!(t, "small: {}", set(&small));
    let _ = writeln!(t, "trivial: {}", set(&trivial));
    let _ = writeln!(t, "degenerate: {}", set(&degenerate));
    let _ = writeln!(t, "crossing pairs: {}", crossing.len());
    for (a, b) in &crossing {
        let _ = writeln!(t, "  {a} x {b}");
    }
    let _ = writeln!(t, "regular: {}", yes(small.is_empty()));
    let _ = writeln!(t, "nested: {}", yes(crossing.is_empty()));
    let _ = writeln!(t, "tree set: {}", yes(tree_set));
    let j = json!({
        "elements": sys.len(),
        "separations": sys.separations().len(),
        "small": small,
        "trivial": trivial,
        "degenerate": degenerate,
        "crossing": crossing,
        "regular": small.is_empty(),
        "nested": crossing.is_empty(),
        "tree_set": tree_set,
    });
    (t, j, tree_set)
}

pub fn validate(input: &Input) -> Outcome {
    match input {
        Input::System { label, sys } => {
            let (body, j, ok) = system_summary(sys);
            let code = if ok { EXIT_OK } else { EXIT_FAIL };
            Outcome::new(format!("system: {label}\n{body}"), json!({ "system": label, "report": j }), code)
        }
        Input::Inverse { label, inv } => {
            let mut t = format!("inverse system: {label}\n");
            let _ = writeln!(t, "index points: {}", inv.index.len());
            let _ = writeln!(t, "bonding maps: {} (homomorphisms, functorial)", inv.bondings.len());
            let mut points = Vec::new();
            let mut all_tree_sets = true;
            for (p, s) in inv.systems.iter().enumerate() {
                let ok = TreeSet::new((**s).clone()).is_ok();
                all_tree_sets &= ok;
                let _ = writeln!(t, "  {}: {} elements, tree set: {}", inv.index.points[p], s.len(), yes(ok));
                points.push(json!({ "point": inv.index.points[p], "elements": s.len(), "tree_set": ok }));
            }
            let code = if all_tree_sets { EXIT_OK } else { EXIT_FAIL };
            Outcome::new(t, json!({ "inverse_system": label, "points": points }), code)
        }
        Input::Family(f) => {
            let mut t = format!("family: {}\n", f.name);
            let mut levels = Vec::new();
            for (i, ts) in f.levels.iter().enumerate() {
                let _ = writeln!(t, "  level {}: {} elements, tree set: yes", f.params[i], ts.len());
                levels.push(json!({ "param": f.params[i], "elements": ts.len() }));
            }
            let _ = writeln!(t, "embeddings: {} (injective, strict-order preserving)", f.embeddings.len());
            Outcome::new(t, json!({ "family": f.name, "levels": levels }), EXIT_OK)
        }
    }
}

pub fn orientations(input: &Input) -> Outcome {
    let (label, sys) = match system_of(input) {
        Ok(x) => x,
        Err(o) => return o,
    };
    let all = all_consistent_orientations(&sys);
    let mut t = format!("system: {label}\nconsistent orientations: {}\n", all.len());
    let mut js = Vec::new();
    for (i, o) in all.iter().enumerate() {
        let mut flags = Vec::new();
        if o.splitting {
            flags.push("splitting");
        }
        if o.directed {
            flags.push("directed");
        }
        if o.has_greatest {
            flags.push("greatest");
        }
        let maximal = sys.names_of(&o.maximal);
        let _ = writeln!(t, "O{}: maximal {} [{}]", i + 1, set(&maximal), flags.join(", "));
        let _ = writeln!(t, "  {}", set(&o.names(&sys)));
        js.push(json!({
            "label": format!("O{}", i + 1),
            "elements": o.names(&sys),
            "maximal": maximal,
            "splitting": o.splitting,
            "directed": o.directed,
            "greatest": o.greatest().map(|g| sys.name(g).to_string()),
        }));
    }
    Outcome::new(t, json!({ "system": label, "count": all.len(), "orientations": js }), EXIT_OK)
}

pub fn stars(input: &Input) -> Outcome {
    let (label, sys) = match system_of(input) {
        Ok(x) => x,
        Err(o) => return o,
    };
    let (stars, branching) = match (splitting_stars(&sys), branching_points(&sys)) {
        (Ok(s), Ok(b)) => (s, b),
        (Err(e), _) | (_, Err(e)) => return Outcome::failure(format!("{label}: {e}")),
    };
    let mut t = format!("system: {label}\nsplitting stars: {}\n", stars.len());
    let mut js = Vec::new();
    for s in &stars {
        let names = s.names(&sys);
        let _ = writeln!(t, "  {} size {}{}", set(&names), s.len(), if s.branching { " branching" } else { "" });
        js.push(json!({ "members": names, "proper": s.proper, "branching": s.branching }));
    }
    let bp = sys.names_of(&branching);
    let _ = writeln!(t, "branching points: {}", set(&bp));
    Outcome::new(t, json!({ "system": label, "splitting_stars": js, "branching_points": bp }), EXIT_OK)
}

/// Splits a selection argument on commas outside brackets, so that
/// `(1,2),(3,2)` yields two names.
pub fn split_selection(arg: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in arg.chars() {
        match c {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            _ => {}
        }
        if c == ',' && depth == 0 {
            out.push(cur.trim().to_string());
            cur.clear();
        } else {
            cur.push(c);
        }
    }
    out.push(cur.trim().to_string());
    out.retain(|s| !s.is_empty());
    out
}

pub fn quotient_report(input: &Input, selection: &str) -> Outcome {
    let (label, ts) = match tree_set_of(input) {
        Ok(x) => x,
        Err(o) => return o,
    };
    let host = Host::new(ts);
    let sys = host.sys();
    let names = split_selection(selection);
    let sel = match selection_from_names(&host, &names) {
        Ok(s) => s,
        Err(e) => return Outcome::input_error(format!("selection: {e}")),
    };
    let q = quotient(&host, &sel);
    let closure = is_branch_closed(&host, &sel);
    let cname = |c: usize| q.class_name(c).to_string();
    let mut t = format!("host: {label} ({} elements)\n", sys.len());
    let _ = writeln!(t, "selection: {}", sel.label(sys));
    let missing = sys.names_of(&closure.missing);
    if closure.closed {
        let _ = writeln!(t, "branch-closed: yes");
    } else {
        let _ = writeln!(t, "branch-closed: no (missing {})", set(&missing));
    }
    let _ = writeln!(t, "classes: {}", q.len());
    let mut classes = Vec::new();
    for c in &q.classes {
        let members = sys.names_of(&c.members);
        let dp = sys.names_of(&c.signature.d_plus);
        let dm = sys.names_of(&c.signature.d_minus);
        let _ = writeln!(t, "  {} = {}  d+ {} d- {}", c.name, set(&members), set(&dp), set(&dm));
        classes.push(json!({ "name": c.name, "members": members, "d_plus": dp, "d_minus": dm }));
    }
    let _ = writeln!(t, "relation:");
    let mut relation = Vec::new();
    for a in 0..q.len() {
        let above: Vec<String> = (0..q.len()).filter(|&b| b != a && q.class_le(a, b)).map(cname).collect();
        if !above.is_empty() {
            let _ = writeln!(t, "  {} <= {}", cname(a), above.join(", "));
        }
        relation.push(json!({ "class": cname(a), "above": above }));
    }
    let _ = writeln!(t, "involution defects: {}", q.involution_defects.len());
    for &c in &q.involution_defects {
        let _ = writeln!(t, "  {}", cname(c));
    }
    let _ = writeln!(t, "antisymmetry violations: {}", q.antisymmetry_violations.len());
    for &(a, b) in &q.antisymmetry_violations {
        let _ = writeln!(t, "  {} <= {} <= {}", cname(a), cname(b), cname(a));
    }
    let _ = writeln!(t, "transitivity violations: {}", q.transitivity_violations.len());
    let chain = |xs: &[usize; 3]| xs.iter().map(|&c| cname(c)).collect::<Vec<_>>().join(" <= ");
    let mut violations = Vec::new();
    for v in &q.transitivity_violations {
        let _ = writeln!(t, "  {} (dual: {})", chain(&v.chain), chain(&v.dual));
        violations.push(json!({
            "chain": v.chain.iter().map(|&c| cname(c)).collect::<Vec<_>>(),
            "dual": v.dual.iter().map(|&c| cname(c)).collect::<Vec<_>>(),
        }));
    }
    let _ = writeln!(t, "trivial classes: {}", q.trivial_classes.len());
    let mut trivial = Vec::new();
    for &(a, w) in &q.trivial_classes {
        let _ = writeln!(t, "  {} trivial (witness {})", cname(a), cname(w));
        trivial.push(json!({ "class": cname(a), "witness": cname(w) }));
    }
    let three = q.three_star_witness.map(|s| {
        vec![sys.name(s.r).to_string(), sys.name(s.s1).to_string(), sys.name(sys.inv(s.s2)).to_string()]
    });
    match &three {
        Some(names) => {
            let _ = writeln!(t, "three-star witness: {}", set(names));
        }
        None => {
            let _ = writeln!(t, "three-star witness: none");
        }
    }
    let certified = q.certified.is_some();
    let _ = writeln!(t, "certified tree set: {}", yes(certified));
    let j = json!({
        "host": label,
        "selection": sel.names(sys),
        "branch_closed": closure.closed,
        "missing_branching_points": missing,
        "classes": classes,
        "relation": relation,
        "involution_defects": q.involution_defects.iter().map(|&c| cname(c)).collect::<Vec<_>>(),
        "antisymmetry_violations": q.antisymmetry_violations.iter().map(|&(a, b)| [cname(a), cname(b)]).collect::<Vec<_>>(),
        "transitivity_violations": violations,
        "trivial_classes": trivial,
        "three_star_witness": three,
        "certified": certified,
    });
    Outcome::new(t, j, if certified { EXIT_OK } else { EXIT_FAIL })
}

pub fn limit(input: &Input) -> Outcome {
    if let Input::Inverse { label, inv } = input {
        let (lim, v) = match verify_limit_tree_set(inv) {
            Ok(x) => x,
            Err(e) => return Outcome::failure(format!("{label}: {e}")),
        };
        let mut t = format!("inverse system: {label} ({} points)\n", inv.index.len());
        let _ = writeln!(t, "limit elements: {}", v.elements);
        for x in lim.system.elements() {
            let _ = writeln!(t, "  {} <-> {}", lim.system.name(x), lim.system.name(lim.system.inv(x)));
        }
        let _ = writeln!(t, "nested: {}", yes(v.nested));
        let _ = writeln!(t, "trivial-free: {}", yes(v.trivial_free));
        let _ = writeln!(t, "degenerate-free: {}", yes(v.degenerate_free));
        let _ = writeln!(t, "order componentwise: {}", yes(v.componentwise));
        let _ = writeln!(t, "regular: {}", yes(v.limit_regular));
        let _ = writeln!(t, "tree set: {}", yes(v.holds()));
        if let Some(msg) = &v.violation {
            let _ = writeln!(t, "violation: {msg}");
        }
        let j = json!({
            "inverse_system": label,
            "elements": lim.system.names(),
            "nested": v.nested,
            "trivial_free": v.trivial_free,
            "degenerate_free": v.degenerate_free,
            "componentwise": v.componentwise,
            "regular": v.limit_regular,
            "tree_set": v.holds(),
            "violation": v.violation,
        });
        return Outcome::new(t, j, if v.holds() { EXIT_OK } else { EXIT_FAIL });
    }
    let (label, ts) = match tree_set_of(input) {
        Ok(x) => x,
        Err(o) => return o,
    };
    let host = Host::new(ts);
    let sys = host.sys();
    let cert = match phi(&host, usize::MAX) {
        Ok(c) => c,
        Err(e) => return Outcome::failure(format!("{label}: {e}")),
    };
    let mut t = format!("host: {label} ({} elements)\n", sys.len());
    let _ = writeln!(t, "branch-closed selections: {}", cert.family.selections.len());
    for d in &cert.family.selections {
        let _ = writeln!(t, "  {}", d.label(sys));
    }
    let _ = writeln!(t, "limit elements: {}", cert.limit.system.len());
    let mut map = Vec::new();
    for x in sys.elements() {
        let image = family_name(&cert.system, &cert.limit.families[cert.map.apply(x)]);
        let _ = writeln!(t, "  {} -> {}", sys.name(x), image);
        map.push(json!({ "element": sys.name(x), "image": image }));
    }
    let _ = writeln!(t, "phi isomorphism: yes");
    let j = json!({
        "host": label,
        "selections": cert.family.selections.iter().map(|d| d.names(sys)).collect::<Vec<_>>(),
        "limit_elements": cert.limit.system.len(),
        "phi": map,
        "isomorphism": true,
    });
    Outcome::new(t, j, EXIT_OK)
}

pub fn represent_report(input: &Input, ground: &str) -> Outcome {
    let Some(kind) = GroundKind::parse(ground) else {
        return Outcome::input_error(format!(
            "unknown ground `{ground}` (expected directed, greatest, splitting or splitting_le2)"
        ));
    };
    let (label, ts) = match tree_set_of(input) {
        Ok(x) => x,
        Err(o) => return o,
    };
    let r = match represent(&ts, kind) {
        Ok(r) => r,
        Err(e) => return Outcome::failure(format!("{label}: {e}")),
    };
    let mut t = format!("host: {label}\nground: {} ({} orientations)\n", kind.label(), r.ground.len());
    let mut ground_js = Vec::new();
    for (l, o) in r.labels.iter().zip(&r.ground) {
        let maximal = ts.names_of(&o.maximal);
        let _ = writeln!(t, "  {l}: maximal {}", set(&maximal));
        ground_js.push(json!({ "label": l, "maximal": maximal }));
    }
    let _ = writeln!(t, "map:");
    let mut map = Vec::new();
    for x in ts.elements() {
        let image = r.image().name(r.map.apply(x)).to_string();
        let _ = writeln!(t, "  {} -> {}", ts.name(x), image);
        map.push(json!({ "element": ts.name(x), "image": image }));
    }
    let _ = writeln!(t, "isomorphism onto image: yes");
    Outcome::new(t, json!({ "host": label, "ground": kind.label(), "orientations": ground_js, "map": map }), EXIT_OK)
}

fn witness_text(w: &Witness) -> String {
    let list = |xs: &[usize]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
    match w {
        Witness::ChainWithoutSupremum(c) => format!("chain without supremum {}", set(c)),
        Witness::UnsplitPair(r, s) => format!("no splitting star separates {r} < {s}"),
        Witness::GrowingStar(sizes) => format!("splitting star sizes {}", list(sizes)),
        Witness::GrowingBranchChain { sizes, chain_sizes } => {
            format!("|C(s,s')| sizes {}; chain sizes {}", list(sizes), list(chain_sizes))
        }
    }
}

fn verdict_text(v: &Verdict) -> String {
    match v {
        Verdict::Holds => "holds".into(),
        Verdict::Violated(w) => format!("violated: {}", witness_text(w)),
        Verdict::UnknownUpTo(b) => format!("unknown up to {b}"),
    }
}

fn verdicts_outcome(header: String, label: &str, vs: &[PropertyVerdict]) -> Outcome {
    let mut t = header;
    for v in vs {
        let _ = writeln!(t, "{}: {}", v.property, verdict_text(&v.verdict));
        let _ = writeln!(t, "  {}", v.detail);
        if let Some(a) = &v.annotation {
            let _ = writeln!(t, "  limit: {a}");
        }
    }
    let violated = vs.iter().any(|v| matches!(v.verdict, Verdict::Violated(_)));
    let j = json!({ "input": label, "verdicts": vs });
    Outcome::new(t, j, if violated { EXIT_FAIL } else { EXIT_OK })
}

pub fn check(input: &Input) -> Outcome {
    if let Input::Family(f) = input {
        let params: Vec<String> = f.params.iter().map(|p| p.to_string()).collect();
        let header = format!("family: {} (levels {})\n", f.name, params.join(", "));
        return verdicts_outcome(header, &f.name, &check_family(f, GROWTH_THRESHOLD));
    }
    let (label, ts) = match tree_set_of(input) {
        Ok(x) => x,
        Err(o) => return o,
    };
    verdicts_outcome(format!("tree set: {label}\n"), &label, &check_tree_set(&ts))
}

/// Fixture text for `gen`. With `n`, `path`, `k1`, `chain` and `example_B`
/// take `n` as their size and the families take it as their level count.
pub fn gen(fixture: &str, n: Option<usize>) -> Outcome {
    let family = |name: &str, n: usize| match name {
        "ray" => Some(ray_family(n)),
        "interval" => Some(interval_family(n)),
        "infinite_star" => Some(infinite_star_family(n)),
        "example_B" => Some(example_b_family(n)),
        _ => None,
    };
    let fam_or_fixture = match n {
        Some(n) if matches!(fixture, "path" | "k1" | "chain" | "example_B") => {
            paper_fixture(&format!("{fixture}{n}")).map(|f| (format!("{fixture}{n}"), f))
        }
        Some(n) => match family(fixture, n) {
            Some(r) => r.map(|f| (fixture.to_string(), Fixture::Family(f))),
            None => return Outcome::input_error(format!("fixture `{fixture}` takes no size parameter")),
        },
        None => paper_fixture(fixture).map(|f| (fixture.to_string(), f)),
    };
    let (name, fx) = match fam_or_fixture {
        Ok(x) => x,
        Err(e) => return Outcome::input_error(e.to_string()),
    };
    let (sys, provenance) = match &fx {
        Fixture::TreeSet(ts) => (ts.system().clone(), format!("fixture {name}")),
        Fixture::Family(f) => match f.levels.last() {
            Some(ts) => (ts.system().clone(), format!("fixture {name} level {}", f.params.last().unwrap_or(&0))),
            None => return Outcome::input_error("empty family"),
        },
    };
    let text = format::serialize_system(&sys, Some(&name), Some(&provenance));
    let j = json!({ "name": name, "provenance": provenance, "document": text });
    Outcome::new(text, j, EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection_splitting() {
        assert_eq!(split_selection("(1,2),(3,2), (3,4)"), vec!["(1,2)", "(3,2)", "(3,4)"]);
        assert_eq!(split_selection("{1}|{2,3},a"), vec!["{1}|{2,3}", "a"]);
        assert!(split_selection("").is_empty());
    }

    #[test]
    fn quotient_example_report() {
        let input = load("ex_non_trans").ok().unwrap();
        let out = quotient_report(&input, "(1,2),(3,2),(3,4),(5,4)");
        assert_eq!(out.code, EXIT_FAIL);
        assert!(out.text.contains("transitivity violations: 1\n"));
        assert!(out.text.contains("[(6,3)] <= [(2,3)] <= [(3,6)] (dual: [(6,3)] <= [(3,2)] <= [(3,6)])"));
    }

    #[test]
    fn gen_variants() {
        assert_eq!(gen("path", Some(3)).text, gen("path3", None).text);
        assert_eq!(gen("ray", Some(2)).code, EXIT_OK);
        assert_eq!(gen("ex_trivial", Some(3)).code, EXIT_INPUT);
        assert_eq!(gen("nope", None).code, EXIT_INPUT);
    }
}

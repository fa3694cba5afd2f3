//! Selections of a finite tree set and the quotient by D-equivalence.
//!
//! Two separations are D-equivalent when the same members of D lie strictly
//! below them and strictly below their inverses. The quotient is computed
//! as a raw representative relation together with diagnostics, so that
//! non-transitive and trivial-class pathologies can be inspected rather
//! than papered over.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::orientation::{splitting_stars, Star};
use crate::system::{SeparationSystem, SystemMap, TreeSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuotientError {
    #[error("a selection must be nonempty")]
    EmptySelection,
    #[error("the splitting star {{{}}} meets the selection exactly once", .0.join(", "))]
    StarMetOnce(Vec<String>),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("`{0}` is not a member of the selection")]
    NotInSelection(String),
    #[error("unknown class `{0}`")]
    UnknownClass(String),
}

/// A host tree set with its splitting stars precomputed.
#[derive(Debug, Clone)]
pub struct Host {
    pub tree_set: TreeSet,
    pub stars: Vec<Star>,
    branching: Vec<bool>,
}

impl Host {
    pub fn new(tree_set: TreeSet) -> Self {
        let stars = splitting_stars(&tree_set).expect("tree sets are nested");
        let mut branching = vec![false; tree_set.len()];
        for s in stars.iter().filter(|s| s.branching) {
            for &x in &s.members {
                branching[x] = true;
            }
        }
        Host { tree_set, stars, branching }
    }

    pub fn sys(&self) -> &SeparationSystem {
        self.tree_set.system()
    }

    pub fn is_branching(&self, x: usize) -> bool {
        self.branching[x]
    }

    pub fn branching_points(&self) -> Vec<usize> {
        (0..self.branching.len()).filter(|&x| self.branching[x]).collect()
    }

    /// Elements that lie in no singleton splitting star. Every selection is
    /// a subset of these.
    pub fn selectable(&self) -> Vec<usize> {
        let mut banned = vec![false; self.tree_set.len()];
        for s in self.stars.iter().filter(|s| s.len() == 1) {
            banned[s.members[0]] = true;
        }
        self.tree_set.elements().filter(|&x| !banned[x]).collect()
    }

    fn id(&self, name: &str) -> Result<usize, QuotientError> {
        self.sys().id(name).map_err(|_| QuotientError::UnknownElement(name.to_string()))
    }
}

/// A validated selection: sorted member indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Selection {
    pub members: Vec<usize>,
}

impl Selection {
    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn names(&self, sys: &SeparationSystem) -> Vec<String> {
        sys.names_of(&self.members)
    }

    /// `{a,b,...}` in member order.
    pub fn label(&self, sys: &SeparationSystem) -> String {
        format!("{{{}}}", self.names(sys).join(","))
    }
}

pub fn validate_selection(host: &Host, members: &[usize]) -> Result<Selection, QuotientError> {
    let mut members = members.to_vec();
    members.sort_unstable();
    members.dedup();
    if members.is_empty() {
        return Err(QuotientError::EmptySelection);
    }
    let sel = Selection { members };
    for s in &host.stars {
        if s.members.iter().filter(|&&x| sel.contains(x)).count() == 1 {
            return Err(QuotientError::StarMetOnce(s.names(host.sys())));
        }
    }
    Ok(sel)
}

pub fn selection_from_names<S: AsRef<str>>(host: &Host, names: &[S]) -> Result<Selection, QuotientError> {
    let ids = names
        .iter()
        .map(|n| host.id(n.as_ref()))
        .collect::<Result<Vec<_>, _>>()?;
    validate_selection(host, &ids)
}

/// Members of D strictly below `x` and strictly below `x*`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ClassSignature {
    pub d_plus: Vec<usize>,
    pub d_minus: Vec<usize>,
}

pub fn signature(host: &Host, sel: &Selection, x: usize) -> ClassSignature {
    let sys = host.sys();
    let below = |y: usize| -> Vec<usize> { sel.members.iter().copied().filter(|&d| sys.lneq(d, y)).collect() };
    ClassSignature { d_plus: below(x), d_minus: below(sys.inv(x)) }
}

/// Whether `d` lies in the symmetric difference of the upper or of the
/// lower signature parts of `r` and `s`.
pub fn distinguishes(host: &Host, sel: &Selection, d: usize, r: usize, s: usize) -> Result<bool, QuotientError> {
    if !sel.contains(d) {
        return Err(QuotientError::NotInSelection(host.sys().name(d).to_string()));
    }
    let (a, b) = (signature(host, sel, r), signature(host, sel, s));
    let in_diff = |x: &[usize], y: &[usize]| x.contains(&d) != y.contains(&d);
    Ok(in_diff(&a.d_plus, &b.d_plus) || in_diff(&a.d_minus, &b.d_minus))
}

/// The branching points between two separations, split into chains.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BranchChain {
    pub points: Vec<usize>,
    /// Components of the comparability graph on `points`, each listed
    /// bottom-up.
    pub chains: Vec<Vec<usize>>,
    /// At most two components, each of them a chain.
    pub well_formed: bool,
}

/// `C(s, s')`: branching points `b` with `x <= b <= y` for some orientations
/// `x` of `s` and `y` of `s'`, or the other way round.
pub fn branch_chain(host: &Host, s: usize, s2: usize) -> BranchChain {
    let sys = host.sys();
    let ends = [s, sys.inv(s), s2, sys.inv(s2)];
    let (a, b) = (&ends[..2], &ends[2..]);
    let between = |x: &[usize], y: &[usize], p: usize| x.iter().any(|&u| sys.le(u, p)) && y.iter().any(|&v| sys.le(p, v));
    let points: Vec<usize> = host
        .branching_points()
        .into_iter()
        .filter(|&p| between(a, b, p) || between(b, a, p))
        .collect();
    let n = points.len();
    let mut comp = vec![usize::MAX; n];
    let mut chains = Vec::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = chains.len();
        let mut stack = vec![start];
        comp[start] = id;
        let mut members = Vec::new();
        while let Some(i) = stack.pop() {
            members.push(points[i]);
            for j in 0..n {
                if comp[j] == usize::MAX && (sys.le(points[i], points[j]) || sys.le(points[j], points[i])) {
                    comp[j] = id;
                    stack.push(j);
                }
            }
        }
        let snapshot = members.clone();
        members.sort_by_key(|&x| (members_below(sys, &snapshot, x), x));
        chains.push(members);
    }
    let is_chain = |c: &Vec<usize>| c.iter().all(|&x| c.iter().all(|&y| sys.le(x, y) || sys.le(y, x)));
    let well_formed = chains.len() <= 2 && chains.iter().all(is_chain);
    BranchChain { points, chains, well_formed }
}

fn members_below(sys: &SeparationSystem, set: &[usize], x: usize) -> usize {
    set.iter().filter(|&&y| sys.le(y, x)).count()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BranchClosure {
    pub closed: bool,
    /// Branching points between members of D that D lacks.
    pub missing: Vec<usize>,
}

pub fn is_branch_closed(host: &Host, sel: &Selection) -> BranchClosure {
    let mut missing = Vec::new();
    for (i, &s) in sel.members.iter().enumerate() {
        for &s2 in &sel.members[i..] {
            missing.extend(branch_chain(host, s, s2).points.into_iter().filter(|&p| !sel.contains(p)));
        }
    }
    missing.sort_unstable();
    missing.dedup();
    BranchClosure { closed: missing.is_empty(), missing }
}

/// Branch-closedness read off directly: every branching point `b` with
/// `d1 <= b <= d2*` for members `d1, d2` must be a member.
pub fn is_branch_closed_direct(host: &Host, sel: &Selection) -> BranchClosure {
    let sys = host.sys();
    let missing: Vec<usize> = host
        .branching_points()
        .into_iter()
        .filter(|&b| !sel.contains(b))
        .filter(|&b| {
            sel.members.iter().any(|&d1| sys.le(d1, b)) && sel.members.iter().any(|&d2| sys.le(b, sys.inv(d2)))
        })
        .collect();
    BranchClosure { closed: missing.is_empty(), missing }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuotientClass {
    pub name: String,
    pub members: Vec<usize>,
    pub signature: ClassSignature,
}

/// A triple of classes `A <= B <= C` with `A` not below `C`, together with
/// its image `C* <= B* <= A*` under the involution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransitivityViolation {
    pub chain: [usize; 3],
    pub dual: [usize; 3],
}

/// A three-star `{r, s1, s2*}` with `s1 ~ s2` while `r` is equivalent to
/// neither `s1` nor `s1*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ThreeStar {
    pub r: usize,
    pub s1: usize,
    pub s2: usize,
}

#[derive(Debug, Clone)]
pub struct CertifiedQuotient {
    pub tree_set: TreeSet,
    /// The class map from the host onto the quotient.
    pub projection: SystemMap,
}

#[derive(Debug, Clone)]
pub struct QuotientPrestructure {
    pub selection: Selection,
    /// Sorted by least member.
    pub classes: Vec<QuotientClass>,
    pub class_of: Vec<usize>,
    pub class_inv: Vec<usize>,
    /// Raw representative relation: `le[a * k + b]` iff some member of `a`
    /// lies below some member of `b`.
    pub le: Vec<bool>,
    /// Classes whose members' inverses fall into several classes.
    pub involution_defects: Vec<usize>,
    pub antisymmetry_violations: Vec<(usize, usize)>,
    /// One entry per violating triple up to the involution.
    pub transitivity_violations: Vec<TransitivityViolation>,
    /// Trivial classes with the least orientation of a witness.
    pub trivial_classes: Vec<(usize, usize)>,
    pub three_star_witness: Option<ThreeStar>,
    pub certified: Option<CertifiedQuotient>,
}

impl QuotientPrestructure {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn class_le(&self, a: usize, b: usize) -> bool {
        self.le[a * self.classes.len() + b]
    }

    pub fn class_name(&self, c: usize) -> &str {
        &self.classes[c].name
    }

    pub fn class_by_name(&self, name: &str) -> Result<usize, QuotientError> {
        self.classes
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| QuotientError::UnknownClass(name.to_string()))
    }

    pub fn is_transitive(&self) -> bool {
        self.transitivity_violations.is_empty()
    }

    pub fn equivalent(&self, x: usize, y: usize) -> bool {
        self.class_of[x] == self.class_of[y]
    }

    pub fn diagnostics_empty(&self) -> bool {
        self.involution_defects.is_empty()
            && self.antisymmetry_violations.is_empty()
            && self.transitivity_violations.is_empty()
            && self.trivial_classes.is_empty()
    }
}

pub fn quotient(host: &Host, sel: &Selection) -> QuotientPrestructure {
    let sys = host.sys();
    let n = sys.len();
    let sigs: Vec<ClassSignature> = sys.elements().map(|x| signature(host, sel, x)).collect();
    let mut by_sig: BTreeMap<&ClassSignature, Vec<usize>> = BTreeMap::new();
    for x in 0..n {
        by_sig.entry(&sigs[x]).or_default().push(x);
    }
    let mut groups: Vec<Vec<usize>> = by_sig.into_values().collect();
    groups.sort();
    let k = groups.len();
    let mut class_of = vec![0; n];
    for (c, g) in groups.iter().enumerate() {
        for &x in g {
            class_of[x] = c;
        }
    }
    let classes: Vec<QuotientClass> = groups
        .iter()
        .map(|g| QuotientClass {
            name: format!("[{}]", sys.name(g[0])),
            members: g.clone(),
            signature: sigs[g[0]].clone(),
        })
        .collect();
    let mut involution_defects = Vec::new();
    let class_inv: Vec<usize> = groups
        .iter()
        .enumerate()
        .map(|(c, g)| {
            let target = class_of[sys.inv(g[0])];
            if g.iter().any(|&x| class_of[sys.inv(x)] != target) {
                involution_defects.push(c);
            }
            target
        })
        .collect();
    let mut le = vec![false; k * k];
    for x in 0..n {
        for y in 0..n {
            if sys.le(x, y) {
                le[class_of[x] * k + class_of[y]] = true;
            }
        }
    }
    let rel = |a: usize, b: usize| le[a * k + b];
    let mut antisymmetry_violations = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            if rel(a, b) && rel(b, a) {
                antisymmetry_violations.push((a, b));
            }
        }
    }
    let mut transitivity_violations = Vec::new();
    for a in 0..k {
        for b in 0..k {
            if !rel(a, b) {
                continue;
            }
            for c in 0..k {
                if rel(b, c) && !rel(a, c) {
                    let t = [a, b, c];
                    let d = [class_inv[c], class_inv[b], class_inv[a]];
                    if t <= d {
                        transitivity_violations.push(TransitivityViolation { chain: t, dual: d });
                    }
                }
            }
        }
    }
    let same_sep = |a: usize, b: usize| a == b || class_inv[a] == b;
    let trivial_classes: Vec<(usize, usize)> = (0..k)
        .filter_map(|a| {
            (0..k)
                .find(|&b| !same_sep(a, b) && rel(a, b) && rel(a, class_inv[b]))
                .map(|b| (a, b.min(class_inv[b])))
        })
        .collect();
    let three_star_witness = find_three_star(host, &class_of);
    let mut q = QuotientPrestructure {
        selection: sel.clone(),
        classes,
        class_of,
        class_inv,
        le,
        involution_defects,
        antisymmetry_violations,
        transitivity_violations,
        trivial_classes,
        three_star_witness,
        certified: None,
    };
    if q.diagnostics_empty() {
        q.certified = certify(host, &q);
    }
    q
}

fn certify(host: &Host, q: &QuotientPrestructure) -> Option<CertifiedQuotient> {
    let names: Vec<String> = q.classes.iter().map(|c| c.name.clone()).collect();
    let quotient = SeparationSystem::from_relation(names, q.class_inv.clone(), q.le.clone()).ok()?;
    let tree_set = TreeSet::new(quotient).ok()?;
    let assignment = q
        .class_of
        .iter()
        .map(|&c| tree_set.id(&q.classes[c].name))
        .collect::<Result<Vec<_>, _>>()
        .ok()?;
    let projection = SystemMap::new(host.tree_set.arc(), tree_set.arc(), assignment).ok()?;
    Some(CertifiedQuotient { tree_set, projection })
}

/// Searches for a three-star `{r, s1, s2*}` with `s1 ~ s2` and `r`
/// equivalent to neither `s1` nor `s1*`.
pub fn find_three_star(host: &Host, class_of: &[usize]) -> Option<ThreeStar> {
    let sys = host.sys();
    for s1 in sys.elements() {
        for s2 in sys.elements().filter(|&s2| class_of[s2] == class_of[s1]) {
            let t = sys.inv(s2);
            if sys.same_separation(s1, t) || !sys.le(s1, s2) {
                continue;
            }
            for r in sys.elements() {
                if class_of[r] == class_of[s1] || class_of[r] == class_of[sys.inv(s1)] {
                    continue;
                }
                if sys.same_separation(r, s1) || sys.same_separation(r, t) {
                    continue;
                }
                if sys.le(r, sys.inv(s1)) && sys.le(r, s2) {
                    return Some(ThreeStar { r, s1, s2 });
                }
            }
        }
    }
    None
}

/// Minimal and maximal members of a class in the host order.
pub fn class_extrema(host: &Host, q: &QuotientPrestructure, class: usize) -> Result<(Vec<usize>, Vec<usize>), QuotientError> {
    let c = q
        .classes
        .get(class)
        .ok_or_else(|| QuotientError::UnknownClass(class.to_string()))?;
    Ok((host.sys().minimal_in(&c.members), host.sys().maximal_in(&c.members)))
}

/// A property of D-equivalence that failed on some configuration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaCounterexample {
    pub lemma: &'static str,
    pub elements: Vec<String>,
}

impl fmt::Display for LemmaCounterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.lemma, self.elements.join(", "))
    }
}

/// Checks every structural fact about D-equivalence and the quotient on
/// one selection, returning all counterexamples found. Facts that need
/// branch-closedness are only checked when D is branch-closed.
pub fn audit(host: &Host, q: &QuotientPrestructure) -> Vec<LemmaCounterexample> {
    let sys = host.sys();
    let n = sys.len();
    let sel = &q.selection;
    let eq = |x: usize, y: usize| q.equivalent(x, y);
    let mut out = Vec::new();
    let mut fail = |lemma: &'static str, xs: &[usize]| {
        out.push(LemmaCounterexample { lemma, elements: sys.names_of(xs) });
    };
    let closed = is_branch_closed(host, sel).closed;
    if closed != is_branch_closed_direct(host, sel).closed {
        fail("branch-closed readings agree", &sel.members);
    }
    for x in 0..n {
        let s = &q.classes[q.class_of[x]].signature;
        if s.d_plus.iter().any(|d| s.d_minus.contains(d)) {
            fail("signature parts disjoint", &[x]);
        }
        if eq(x, sys.inv(x)) {
            fail("never equivalent to inverse", &[x]);
        }
    }
    for r in 0..n {
        for s in 0..n {
            if eq(r, s) && !eq(sys.inv(r), sys.inv(s)) {
                fail("inverse-compatible", &[r, s]);
            }
            if sys.le(r, s) && !sel.members.iter().any(|&d| sys.lneq(d, s)) && !eq(r, s) {
                fail("equivalent below a selection-free element", &[r, s]);
            }
            for t in 0..n {
                if sys.le(r, s) && sys.le(s, t) && eq(r, t) && !eq(r, s) {
                    fail("convex", &[r, s, t]);
                }
                if eq(s, t) && sys.le(r, s) && sys.le(s, sys.inv(t)) && !eq(r, s) {
                    fail("down across an inverse", &[r, s, t]);
                }
                if eq(s, t) && sys.le(s, r) && sys.le(sys.inv(t), s) && !eq(r, s) {
                    fail("up across an inverse", &[r, s, t]);
                }
            }
        }
    }
    for &(a, b) in &q.antisymmetry_violations {
        fail("antisymmetric", &[q.classes[a].members[0], q.classes[b].members[0]]);
    }
    if !q.is_transitive() && q.three_star_witness.is_none() {
        fail("non-transitivity yields a three-star", &[]);
    }
    for s1 in 0..n {
        for s2 in (0..n).filter(|&s2| eq(s1, s2)) {
            for r in 0..n {
                if !is_bad_three_star(sys, q, r, s1, s2) {
                    continue;
                }
                let d1 = sel.members.iter().any(|&d| sys.lneq(d, s1));
                let d2 = sel.members.iter().any(|&d| sys.lneq(d, sys.inv(s2)));
                if !(d1 && d2) {
                    fail("three-star is bracketed by the selection", &[r, s1, s2]);
                }
                if closed {
                    fail("no bad three-star under branch-closedness", &[r, s1, s2]);
                }
            }
        }
    }
    for r in 0..n {
        for s in (0..n).filter(|&s| eq(r, s)) {
            for x in 0..n {
                if !(sys.le(r, x) && sys.le(x, sys.inv(s)) && !eq(r, x) && !eq(r, sys.inv(x))) {
                    continue;
                }
                let under = |d: usize, ys: [usize; 3]| ys.iter().all(|&y| sys.lneq(d, y));
                let (ri, si, xi) = (sys.inv(r), sys.inv(s), sys.inv(x));
                let d1 = sel.members.iter().any(|&d| under(d, [ri, si, x]));
                let d2 = sel.members.iter().any(|&d| under(d, [ri, si, xi]));
                if !(d1 && d2) {
                    fail("trivial configuration is bracketed by the selection", &[r, s, x]);
                }
            }
        }
    }
    if closed {
        if !q.is_transitive() {
            fail("transitive when branch-closed", &[]);
        }
        for &(a, _) in &q.trivial_classes {
            fail("no trivial class when branch-closed", &[q.classes[a].members[0]]);
        }
        if q.certified.is_none() {
            fail("tree set when branch-closed", &sel.members);
        }
    }
    if q.certified.is_some() {
        let same = |a: usize, b: usize| a == b || q.class_inv[a] == b;
        for r in 0..n {
            for s in 0..n {
                let (a, b) = (q.class_of[r], q.class_of[s]);
                if q.class_le(a, b) && !same(a, b) && !sys.lneq(r, s) {
                    fail("strict class order reflects", &[r, s]);
                }
            }
        }
    }
    for star in host.stars.iter().filter(|s| s.members.iter().any(|&x| sel.contains(x))) {
        for &r in &star.members {
            for &s in star.members.iter().filter(|&&s| s != r) {
                let outside = !sel.contains(r) && !sel.contains(s);
                if eq(r, s) && !outside {
                    fail("star members in D are inequivalent", &[r, s]);
                }
                if closed && outside && !eq(r, s) {
                    fail("star members outside D are equivalent", &[r, s]);
                }
            }
        }
    }
    if closed {
        for star in &host.stars {
            let mut cls: Vec<usize> = star.members.iter().map(|&x| q.class_of[x]).collect();
            cls.sort_unstable();
            cls.dedup();
            if cls.len() >= 3 && !star.members.iter().any(|&x| sel.contains(x)) {
                fail("star meeting three classes meets D", &star.members);
            }
        }
    }
    for (c, class) in q.classes.iter().enumerate() {
        match class_extrema(host, q, c) {
            Ok((lo, hi)) if !lo.is_empty() && !hi.is_empty() => {}
            _ => fail("classes have extrema", &class.members),
        }
    }
    out
}

fn is_bad_three_star(sys: &SeparationSystem, q: &QuotientPrestructure, r: usize, s1: usize, s2: usize) -> bool {
    let t = sys.inv(s2);
    if sys.same_separation(r, s1) || sys.same_separation(r, t) || sys.same_separation(s1, t) {
        return false;
    }
    if !(sys.le(r, sys.inv(s1)) && sys.le(r, s2) && sys.le(s1, s2)) {
        return false;
    }
    !q.equivalent(r, s1) && !q.equivalent(r, sys.inv(s1))
}

/// Every selection of the host, sorted by size and then lexicographically.
pub fn all_selections(host: &Host) -> Vec<Selection> {
    let cand = host.selectable();
    let mut out = Vec::new();
    for mask in 1u64..(1u64 << cand.len()) {
        let members: Vec<usize> = (0..cand.len()).filter(|&i| mask >> i & 1 == 1).map(|i| cand[i]).collect();
        if let Ok(s) = validate_selection(host, &members) {
            out.push(s);
        }
    }
    out.sort_by(|a, b| (a.len(), &a.members).cmp(&(b.len(), &b.members)));
    out
}

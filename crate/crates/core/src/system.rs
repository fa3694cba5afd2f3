//! Finite separation systems: posets with an order-reversing involution.
//!
//! Elements are identified by opaque string names. Internally every element
//! is an index into the lexicographically sorted name list, so index order and
//! name order agree everywhere.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error("duplicate element `{0}`")]
    DuplicateElement(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("element `{0}` has no inverse")]
    MissingInverse(String),
    #[error("element `{0}` is paired with more than one inverse")]
    ConflictingInverse(String),
    #[error("antisymmetry violated: `{0}` <= `{1}` and `{1}` <= `{0}`")]
    AntisymmetryViolation(String, String),
    #[error("involution not order-reversing: `{0}` <= `{1}` but not `{1}*` <= `{0}*`")]
    InvolutionNotOrderReversing(String, String),
}

/// A validated finite separation system.
#[derive(Clone, PartialEq, Eq)]
pub struct SeparationSystem {
    names: Vec<String>,
    index: BTreeMap<String, usize>,
    inv: Vec<usize>,
    le: Vec<bool>,
}

impl fmt::Debug for SeparationSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SeparationSystem")
            .field("elements", &self.names)
            .field("covers", &self.cover_pairs_named())
            .finish()
    }
}

impl SeparationSystem {
    /// Builds a system from element names, involution pairs and order
    /// generators. The order is the reflexive-transitive closure of the
    /// generators. A pair `(d, d)` declares `d` degenerate.
    pub fn build<A, B, C, D, E>(
        elements: &[A],
        involution: &[(B, C)],
        generators: &[(D, E)],
    ) -> Result<Self, SystemError>
    where
        A: AsRef<str>,
        B: AsRef<str>,
        C: AsRef<str>,
        D: AsRef<str>,
        E: AsRef<str>,
    {
        let names: Vec<String> = elements.iter().map(|e| e.as_ref().to_string()).collect();
        let mut lookup = BTreeMap::new();
        for (i, n) in names.iter().enumerate() {
            if lookup.insert(n.clone(), i).is_some() {
                return Err(SystemError::DuplicateElement(n.clone()));
            }
        }
        let find = |n: &str| {
            lookup
                .get(n)
                .copied()
                .ok_or_else(|| SystemError::UnknownElement(n.to_string()))
        };
        let mut inv: Vec<Option<usize>> = vec![None; names.len()];
        for (a, b) in involution {
            let (x, y) = (find(a.as_ref())?, find(b.as_ref())?);
            for (u, v) in [(x, y), (y, x)] {
                match inv[u] {
                    Some(w) if w != v => return Err(SystemError::ConflictingInverse(names[u].clone())),
                    _ => inv[u] = Some(v),
                }
            }
        }
        let inv: Vec<usize> = inv
            .iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| SystemError::MissingInverse(names[i].clone())))
            .collect::<Result<_, _>>()?;
        let n = names.len();
        let mut rel = vec![false; n * n];
        for (a, b) in generators {
            let (x, y) = (find(a.as_ref())?, find(b.as_ref())?);
            rel[x * n + y] = true;
        }
        Self::from_relation(names, inv, rel)
    }

    /// Builds a system from index-based data. `rel` is an `n * n` row-major
    /// relation that is closed reflexively and transitively before validation.
    pub fn from_relation(
        names: Vec<String>,
        inv: Vec<usize>,
        rel: Vec<bool>,
    ) -> Result<Self, SystemError> {
        let n = names.len();
        assert_eq!(inv.len(), n, "involution length mismatch");
        assert_eq!(rel.len(), n * n, "relation size mismatch");
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| names[a].cmp(&names[b]));
        let mut pos = vec![0; n];
        for (new, &old) in order.iter().enumerate() {
            pos[old] = new;
        }
        let mut index = BTreeMap::new();
        for (i, &old) in order.iter().enumerate() {
            if index.insert(names[old].clone(), i).is_some() {
                return Err(SystemError::DuplicateElement(names[old].clone()));
            }
        }
        let sorted: Vec<String> = order.iter().map(|&o| names[o].clone()).collect();
        let mut new_inv = vec![0; n];
        for old in 0..n {
            let target = inv[old];
            if target >= n || inv[target] != old {
                return Err(SystemError::MissingInverse(names[old].clone()));
            }
            new_inv[pos[old]] = pos[target];
        }
        let mut le = vec![false; n * n];
        for a in 0..n {
            le[pos[a] * n + pos[a]] = true;
            for b in 0..n {
                if rel[a * n + b] {
                    le[pos[a] * n + pos[b]] = true;
                }
            }
        }
        transitive_closure(&mut le, n);
        let sys = SeparationSystem { names: sorted, index, inv: new_inv, le };
        sys.validate()?;
        Ok(sys)
    }

    fn validate(&self) -> Result<(), SystemError> {
        let n = self.len();
        for x in 0..n {
            for y in 0..n {
                if x != y && self.le(x, y) && self.le(y, x) {
                    let (a, b) = (x.min(y), x.max(y));
                    return Err(SystemError::AntisymmetryViolation(
                        self.names[a].clone(),
                        self.names[b].clone(),
                    ));
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                if self.le(x, y) && !self.le(self.inv[y], self.inv[x]) {
                    return Err(SystemError::InvolutionNotOrderReversing(
                        self.names[x].clone(),
                        self.names[y].clone(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, x: usize) -> &str {
        &self.names[x]
    }

    pub fn id(&self, name: &str) -> Result<usize, SystemError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| SystemError::UnknownElement(name.to_string()))
    }

    pub fn ids<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>, SystemError> {
        names.iter().map(|n| self.id(n.as_ref())).collect()
    }

    /// Names of a set of elements, in the given order.
    pub fn names_of(&self, xs: &[usize]) -> Vec<String> {
        xs.iter().map(|&x| self.names[x].clone()).collect()
    }

    pub fn inv(&self, x: usize) -> usize {
        self.inv[x]
    }

    pub fn le(&self, x: usize, y: usize) -> bool {
        self.le[x * self.len() + y]
    }

    /// `x ≨ y`: `x <= y` and `x`, `y` are not orientations of one separation.
    pub fn lneq(&self, x: usize, y: usize) -> bool {
        self.le(x, y) && !self.same_separation(x, y)
    }

    pub fn same_separation(&self, x: usize, y: usize) -> bool {
        x == y || self.inv[x] == y
    }

    /// The lexicographically smaller orientation of the separation of `x`.
    pub fn rep(&self, x: usize) -> usize {
        x.min(self.inv[x])
    }

    /// One representative per unoriented separation, in name order.
    pub fn separations(&self) -> Vec<usize> {
        self.elements().filter(|&x| self.rep(x) == x).collect()
    }

    pub fn is_small(&self, x: usize) -> bool {
        self.le(x, self.inv[x])
    }

    pub fn is_cosmall(&self, x: usize) -> bool {
        self.le(self.inv[x], x)
    }

    pub fn is_degenerate(&self, x: usize) -> bool {
        self.inv[x] == x
    }

    /// The least separation (by representative name) witnessing that `x` is
    /// trivial, returned as its lexicographically smaller orientation.
    pub fn trivial_witness(&self, x: usize) -> Option<usize> {
        self.separations()
            .into_iter()
            .find(|&s| self.lneq(x, s) && self.lneq(x, self.inv[s]))
    }

    pub fn is_trivial(&self, x: usize) -> bool {
        self.trivial_witness(x).is_some()
    }

    pub fn is_cotrivial(&self, x: usize) -> bool {
        self.is_trivial(self.inv[x])
    }

    /// Whether the separations of `x` and `y` have comparable orientations.
    pub fn nested_pair(&self, x: usize, y: usize) -> bool {
        let (xi, yi) = (self.inv[x], self.inv[y]);
        self.le(x, y) || self.le(x, yi) || self.le(xi, y) || self.le(xi, yi)
    }

    /// All crossing pairs of separation representatives, in name order.
    pub fn crossing_pairs(&self) -> Vec<(usize, usize)> {
        let seps = self.separations();
        let mut out = Vec::new();
        for (i, &r) in seps.iter().enumerate() {
            for &s in &seps[i + 1..] {
                if !self.nested_pair(r, s) {
                    out.push((r, s));
                }
            }
        }
        out
    }

    pub fn crossing_pair(&self) -> Option<(usize, usize)> {
        let seps = self.separations();
        for (i, &r) in seps.iter().enumerate() {
            for &s in &seps[i + 1..] {
                if !self.nested_pair(r, s) {
                    return Some((r, s));
                }
            }
        }
        None
    }

    pub fn is_nested(&self) -> bool {
        self.crossing_pair().is_none()
    }

    pub fn is_regular(&self) -> bool {
        self.elements().all(|x| !self.is_small(x))
    }

    /// Covering pairs of the order (its Hasse diagram), in name order.
    pub fn cover_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if x == y || !self.le(x, y) {
                    continue;
                }
                let covered = (0..n).all(|z| z == x || z == y || !(self.le(x, z) && self.le(z, y)));
                if covered {
                    out.push((x, y));
                }
            }
        }
        out
    }

    fn cover_pairs_named(&self) -> Vec<(String, String)> {
        self.cover_pairs()
            .into_iter()
            .map(|(x, y)| (self.names[x].clone(), self.names[y].clone()))
            .collect()
    }

    /// Involution pairs, each listed once with the smaller name first.
    pub fn involution_pairs(&self) -> Vec<(usize, usize)> {
        self.separations().into_iter().map(|x| (x, self.inv[x])).collect()
    }

    /// Maximal elements of `set` with respect to the system order.
    pub fn maximal_in(&self, set: &[usize]) -> Vec<usize> {
        set.iter()
            .copied()
            .filter(|&x| !set.iter().any(|&y| y != x && self.le(x, y)))
            .collect()
    }

    pub fn minimal_in(&self, set: &[usize]) -> Vec<usize> {
        set.iter()
            .copied()
            .filter(|&x| !set.iter().any(|&y| y != x && self.le(y, x)))
            .collect()
    }

    /// Whether `set` is a star: `r <= s*` for all distinct members.
    pub fn is_star(&self, set: &[usize]) -> bool {
        set.iter().all(|&r| {
            set.iter()
                .all(|&s| r == s || self.le(r, self.inv[s]))
        })
    }
}

fn transitive_closure(le: &mut [bool], n: usize) {
    for k in 0..n {
        for i in 0..n {
            if !le[i * n + k] || i == k {
                continue;
            }
            for j in 0..n {
                if le[k * n + j] {
                    le[i * n + j] = true;
                }
            }
        }
    }
}

/// Why a system is not a tree set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeSetFailure {
    pub crossing: Vec<(String, String)>,
    /// Trivial elements with their witness separation.
    pub trivial: Vec<(String, String)>,
    pub degenerate: Vec<String>,
}

impl fmt::Display for TreeSetFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.crossing.is_empty() {
            let pairs: Vec<String> =
                self.crossing.iter().map(|(a, b)| format!("{a} x {b}")).collect();
            parts.push(format!("crossing: {}", pairs.join(", ")));
        }
        if !self.trivial.is_empty() {
            let triv: Vec<String> =
                self.trivial.iter().map(|(a, w)| format!("{a} (witness {w})")).collect();
            parts.push(format!("trivial: {}", triv.join(", ")));
        }
        if !self.degenerate.is_empty() {
            parts.push(format!("degenerate: {}", self.degenerate.join(", ")));
        }
        write!(f, "not a tree set; {}", parts.join("; "))
    }
}

impl std::error::Error for TreeSetFailure {}

/// A separation system certified nested, with no trivial and no degenerate
/// element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeSet {
    sys: Arc<SeparationSystem>,
}

impl TreeSet {
    pub fn new(sys: SeparationSystem) -> Result<Self, TreeSetFailure> {
        Self::from_arc(Arc::new(sys))
    }

    pub fn from_arc(sys: Arc<SeparationSystem>) -> Result<Self, TreeSetFailure> {
        let failure = tree_set_failure(&sys);
        match failure {
            None => Ok(TreeSet { sys }),
            Some(f) => Err(f),
        }
    }

    pub fn system(&self) -> &SeparationSystem {
        &self.sys
    }

    pub fn arc(&self) -> Arc<SeparationSystem> {
        Arc::clone(&self.sys)
    }
}

impl std::ops::Deref for TreeSet {
    type Target = SeparationSystem;

    fn deref(&self) -> &SeparationSystem {
        &self.sys
    }
}

fn tree_set_failure(sys: &SeparationSystem) -> Option<TreeSetFailure> {
    let crossing: Vec<(String, String)> = sys
        .crossing_pairs()
        .into_iter()
        .map(|(a, b)| (sys.name(a).to_string(), sys.name(b).to_string()))
        .collect();
    let trivial: Vec<(String, String)> = sys
        .elements()
        .filter_map(|x| {
            sys.trivial_witness(x)
                .map(|w| (sys.name(x).to_string(), sys.name(w).to_string()))
        })
        .collect();
    let degenerate: Vec<String> = sys
        .elements()
        .filter(|&x| sys.is_degenerate(x))
        .map(|x| sys.name(x).to_string())
        .collect();
    if crossing.is_empty() && trivial.is_empty() && degenerate.is_empty() {
        None
    } else {
        Some(TreeSetFailure { crossing, trivial, degenerate })
    }
}

pub fn is_tree_set(sys: SeparationSystem) -> Result<TreeSet, TreeSetFailure> {
    TreeSet::new(sys)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("map is not total: `{0}` has no image")]
    NotTotal(String),
    #[error("map is not bijective")]
    NotBijective,
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("maps do not compose: codomain of the first is not the domain of the second")]
    NotComposable,
}

/// A total map between two separation systems.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemMap {
    pub domain: Arc<SeparationSystem>,
    pub codomain: Arc<SeparationSystem>,
    pub assignment: Vec<usize>,
}

/// Outcome of a homomorphism check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomomorphismCheck {
    /// An element `x` with `f(x*) != f(x)*`.
    pub involution_defect: Option<String>,
    /// A pair `x <= y` with `f(x) <= f(y)` failing.
    pub order_defect: Option<(String, String)>,
}

impl HomomorphismCheck {
    pub fn holds(&self) -> bool {
        self.involution_defect.is_none() && self.order_defect.is_none()
    }
}

/// Verdict of one lemma on one map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum LemmaVerdict {
    HypothesesNotMet,
    Confirmed,
    Counterexample(String, String),
}

/// Evaluation of the two isomorphism criteria for bijective homomorphisms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IsomorphismLemmaReport {
    pub homomorphism: bool,
    /// Domain nested and codomain regular.
    pub regular_codomain: LemmaVerdict,
    /// Domain nested, codomain a tree set, preimages of small elements small.
    pub small_preimages: LemmaVerdict,
    pub isomorphism: bool,
}

/// The two preservation statements for arbitrary homomorphisms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PreservationReport {
    /// Codomain regular implies domain regular.
    pub regularity: LemmaVerdict,
    /// Domain nested implies image nested.
    pub nestedness: LemmaVerdict,
}

impl SystemMap {
    pub fn new(
        domain: Arc<SeparationSystem>,
        codomain: Arc<SeparationSystem>,
        assignment: Vec<usize>,
    ) -> Result<Self, MapError> {
        if assignment.len() != domain.len() {
            let missing = domain.len().min(assignment.len());
            return Err(MapError::NotTotal(
                domain.names().get(missing).cloned().unwrap_or_default(),
            ));
        }
        if let Some(&bad) = assignment.iter().find(|&&y| y >= codomain.len()) {
            return Err(MapError::UnknownElement(format!("#{bad}")));
        }
        Ok(SystemMap { domain, codomain, assignment })
    }

    pub fn from_names<S: AsRef<str>, T: AsRef<str>>(
        domain: Arc<SeparationSystem>,
        codomain: Arc<SeparationSystem>,
        pairs: &[(S, T)],
    ) -> Result<Self, MapError> {
        let mut assignment = vec![None; domain.len()];
        for (a, b) in pairs {
            let x = domain
                .id(a.as_ref())
                .map_err(|_| MapError::UnknownElement(a.as_ref().to_string()))?;
            let y = codomain
                .id(b.as_ref())
                .map_err(|_| MapError::UnknownElement(b.as_ref().to_string()))?;
            assignment[x] = Some(y);
        }
        let assignment = assignment
            .iter()
            .enumerate()
            .map(|(x, y)| y.ok_or_else(|| MapError::NotTotal(domain.name(x).to_string())))
            .collect::<Result<_, _>>()?;
        Ok(SystemMap { domain, codomain, assignment })
    }

    pub fn identity(sys: Arc<SeparationSystem>) -> Self {
        let assignment = sys.elements().collect();
        SystemMap { domain: Arc::clone(&sys), codomain: sys, assignment }
    }

    pub fn apply(&self, x: usize) -> usize {
        self.assignment[x]
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &SystemMap) -> Result<SystemMap, MapError> {
        if *self.codomain != *other.domain {
            return Err(MapError::NotComposable);
        }
        let assignment = self.assignment.iter().map(|&y| other.assignment[y]).collect();
        Ok(SystemMap {
            domain: Arc::clone(&self.domain),
            codomain: Arc::clone(&other.codomain),
            assignment,
        })
    }

    pub fn check_homomorphism(&self) -> HomomorphismCheck {
        let (d, c, f) = (&self.domain, &self.codomain, &self.assignment);
        let involution_defect = d
            .elements()
            .find(|&x| f[d.inv(x)] != c.inv(f[x]))
            .map(|x| d.name(x).to_string());
        let mut order_defect = None;
        'outer: for x in d.elements() {
            for y in d.elements() {
                if d.le(x, y) && !c.le(f[x], f[y]) {
                    order_defect = Some((d.name(x).to_string(), d.name(y).to_string()));
                    break 'outer;
                }
            }
        }
        HomomorphismCheck { involution_defect, order_defect }
    }

    pub fn is_homomorphism(&self) -> bool {
        self.check_homomorphism().holds()
    }

    pub fn is_bijective(&self) -> bool {
        if self.domain.len() != self.codomain.len() {
            return false;
        }
        let mut hit = vec![false; self.codomain.len()];
        for &y in &self.assignment {
            if hit[y] {
                return false;
            }
            hit[y] = true;
        }
        true
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = std::collections::BTreeSet::new();
        self.assignment.iter().all(|y| seen.insert(*y))
    }

    /// A pair `x, y` with `f(x) <= f(y)` but not `x <= y`.
    pub fn reflection_defect(&self) -> Option<(usize, usize)> {
        let (d, c, f) = (&self.domain, &self.codomain, &self.assignment);
        for x in d.elements() {
            for y in d.elements() {
                if c.le(f[x], f[y]) && !d.le(x, y) {
                    return Some((x, y));
                }
            }
        }
        None
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_bijective() && self.is_homomorphism() && self.reflection_defect().is_none()
    }

    pub fn check_isomorphism_lemmas(&self) -> Result<IsomorphismLemmaReport, MapError> {
        if !self.is_bijective() {
            return Err(MapError::NotBijective);
        }
        let (d, c, f) = (&self.domain, &self.codomain, &self.assignment);
        let homomorphism = self.is_homomorphism();
        let defect = self
            .reflection_defect()
            .map(|(x, y)| (d.name(x).to_string(), d.name(y).to_string()));
        let conclude = |hyp: bool| match (hyp, &defect) {
            (false, _) => LemmaVerdict::HypothesesNotMet,
            (true, None) => LemmaVerdict::Confirmed,
            (true, Some((x, y))) => LemmaVerdict::Counterexample(x.clone(), y.clone()),
        };
        let nested = d.is_nested();
        let regular_codomain = conclude(homomorphism && nested && c.is_regular());
        let small_ok = d.elements().all(|x| !c.is_small(f[x]) || d.is_small(x));
        let codomain_tree = tree_set_failure(c).is_none();
        let small_preimages = conclude(homomorphism && nested && codomain_tree && small_ok);
        Ok(IsomorphismLemmaReport {
            homomorphism,
            regular_codomain,
            small_preimages,
            isomorphism: homomorphism && defect.is_none(),
        })
    }

    pub fn check_preservation(&self) -> PreservationReport {
        let (d, c, f) = (&self.domain, &self.codomain, &self.assignment);
        if !self.is_homomorphism() {
            return PreservationReport {
                regularity: LemmaVerdict::HypothesesNotMet,
                nestedness: LemmaVerdict::HypothesesNotMet,
            };
        }
        let regularity = if !c.is_regular() {
            LemmaVerdict::HypothesesNotMet
        } else {
            match d.elements().find(|&x| d.is_small(x)) {
                None => LemmaVerdict::Confirmed,
                Some(x) => LemmaVerdict::Counterexample(d.name(x).to_string(), d.name(d.inv(x)).to_string()),
            }
        };
        let nestedness = if !d.is_nested() {
            LemmaVerdict::HypothesesNotMet
        } else {
            let mut image: Vec<usize> = f.clone();
            image.sort_unstable();
            image.dedup();
            let mut found = None;
            'outer: for &a in &image {
                for &b in &image {
                    if !c.nested_pair(a, b) {
                        found = Some((c.name(a).to_string(), c.name(b).to_string()));
                        break 'outer;
                    }
                }
            }
            match found {
                None => LemmaVerdict::Confirmed,
                Some((a, b)) => LemmaVerdict::Counterexample(a, b),
            }
        };
        PreservationReport { regularity, nestedness }
    }
}

/// Searches for an isomorphism between two systems by backtracking over
/// separations.
pub fn find_isomorphism(a: &Arc<SeparationSystem>, b: &Arc<SeparationSystem>) -> Option<SystemMap> {
    if a.len() != b.len() {
        return None;
    }
    let seps_a = a.separations();
    let seps_b = b.separations();
    if seps_a.len() != seps_b.len() {
        return None;
    }
    let profile = |s: &SeparationSystem, x: usize| {
        let up = s.elements().filter(|&y| s.le(x, y)).count();
        let down = s.elements().filter(|&y| s.le(y, x)).count();
        (s.is_degenerate(x), s.is_small(x), s.is_cosmall(x), up, down)
    };
    let mut f = vec![usize::MAX; a.len()];
    let mut used = vec![false; b.len()];
    fn consistent(a: &SeparationSystem, b: &SeparationSystem, f: &[usize], new: &[usize]) -> bool {
        for &u in new {
            for x in a.elements() {
                if f[x] == usize::MAX {
                    continue;
                }
                if a.le(u, x) != b.le(f[u], f[x]) || a.le(x, u) != b.le(f[x], f[u]) {
                    return false;
                }
            }
        }
        true
    }
    #[allow(clippy::too_many_arguments)]
    fn search(
        a: &SeparationSystem,
        b: &SeparationSystem,
        seps_a: &[usize],
        seps_b: &[usize],
        i: usize,
        f: &mut Vec<usize>,
        used: &mut Vec<bool>,
        profile: &dyn Fn(&SeparationSystem, usize) -> (bool, bool, bool, usize, usize),
    ) -> bool {
        if i == seps_a.len() {
            return true;
        }
        let r = seps_a[i];
        let ri = a.inv(r);
        let pr = profile(a, r);
        for &s in seps_b {
            for y in [s, b.inv(s)] {
                if used[y] || profile(b, y) != pr {
                    continue;
                }
                let yi = b.inv(y);
                f[r] = y;
                f[ri] = yi;
                used[y] = true;
                used[yi] = true;
                if consistent(a, b, f, &[r, ri])
                    && search(a, b, seps_a, seps_b, i + 1, f, used, profile)
                {
                    return true;
                }
                f[r] = usize::MAX;
                f[ri] = usize::MAX;
                used[y] = false;
                used[yi] = false;
                if yi == y {
                    break;
                }
            }
        }
        false
    }
    if search(a, b, &seps_a, &seps_b, 0, &mut f, &mut used, &profile) {
        Some(SystemMap { domain: Arc::clone(a), codomain: Arc::clone(b), assignment: f })
    } else {
        None
    }
}

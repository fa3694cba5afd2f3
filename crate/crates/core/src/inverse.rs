//! Inverse systems of finite separation systems over finite directed index
//! posets, their limits, and the canonical system of quotients of a tree set.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::quotient::{all_selections, is_branch_closed, quotient, Host, Selection};
use crate::system::{MapError, SeparationSystem, SystemError, SystemMap, TreeSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InverseError {
    #[error("index poset: {0}")]
    BadIndex(String),
    #[error("index points `{0}` and `{1}` have no common upper bound")]
    NotDirected(String, String),
    #[error("no bonding map from `{0}` to `{1}`")]
    MissingBonding(String, String),
    #[error("bonding map from `{0}` to `{1}` has the wrong domain or codomain")]
    BondingMismatch(String, String),
    #[error("bonding map from `{0}` to `{1}` is not a homomorphism")]
    BondingNotHomomorphism(String, String),
    #[error("bonding maps are not functorial at `{0}` <= `{1}` <= `{2}`")]
    BondingNotFunctorial(String, String, String),
    #[error("the host admits no selection")]
    NoSelectionExists,
    #[error("selection family truncated at {0} members")]
    FamilyTruncated(usize),
    #[error("quotient by {0} is not a tree set")]
    QuotientNotCertified(String),
    #[error("the family is not directed: {0} and {1} have no branch-closed union")]
    FamilyNotDirected(String, String),
    #[error("phi is not an isomorphism: {0}")]
    NotIsomorphism(String),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Map(#[from] MapError),
}

/// A finite partial order that is checked to be directed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexPoset {
    pub points: Vec<String>,
    le: Vec<bool>,
}

impl IndexPoset {
    /// Builds the reflexive-transitive closure of `generators` on `points`
    /// and checks antisymmetry and directedness.
    pub fn new(points: Vec<String>, generators: &[(usize, usize)]) -> Result<Self, InverseError> {
        let n = points.len();
        if n == 0 {
            return Err(InverseError::BadIndex("no points".into()));
        }
        let mut le = vec![false; n * n];
        for i in 0..n {
            le[i * n + i] = true;
        }
        for &(a, b) in generators {
            if a >= n || b >= n {
                return Err(InverseError::BadIndex(format!("generator ({a},{b}) out of range")));
            }
            le[a * n + b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if le[i * n + k] {
                    for j in 0..n {
                        if le[k * n + j] {
                            le[i * n + j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if le[i * n + j] && le[j * n + i] {
                    return Err(InverseError::BadIndex(format!("`{}` and `{}` are mutually below", points[i], points[j])));
                }
                if !(0..n).any(|k| le[i * n + k] && le[j * n + k]) {
                    return Err(InverseError::NotDirected(points[i].clone(), points[j].clone()));
                }
            }
        }
        Ok(IndexPoset { points, le })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn le(&self, p: usize, q: usize) -> bool {
        self.le[p * self.points.len() + q]
    }

    pub fn comparable_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        (0..n).flat_map(|p| (0..n).map(move |q| (p, q))).filter(|&(p, q)| p != q && self.le(p, q)).collect()
    }

    /// Points ordered so that every point comes after all points above it.
    fn top_down(&self) -> Vec<usize> {
        let n = self.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&p| (std::cmp::Reverse((0..n).filter(|&q| self.le(q, p)).count()), p));
        order
    }
}

/// Finite systems indexed by a directed poset, with a bonding map
/// `S_q -> S_p` for every `p <= q`.
#[derive(Debug, Clone)]
pub struct InverseSystem {
    pub index: IndexPoset,
    pub systems: Vec<Arc<SeparationSystem>>,
    /// Keyed by `(q, p)` with `p < q`.
    pub bondings: BTreeMap<(usize, usize), SystemMap>,
}

impl InverseSystem {
    /// Validates bonding maps: present for all `p < q`, homomorphisms
    /// between the right systems, and functorial.
    pub fn new(
        index: IndexPoset,
        systems: Vec<Arc<SeparationSystem>>,
        bondings: BTreeMap<(usize, usize), SystemMap>,
    ) -> Result<Self, InverseError> {
        let name = |p: usize| index.points[p].clone();
        if systems.len() != index.len() {
            return Err(InverseError::BadIndex("one system per index point is required".into()));
        }
        for (p, q) in index.comparable_pairs() {
            let f = bondings.get(&(q, p)).ok_or_else(|| InverseError::MissingBonding(name(q), name(p)))?;
            if *f.domain != *systems[q] || *f.codomain != *systems[p] {
                return Err(InverseError::BondingMismatch(name(q), name(p)));
            }
            if !f.is_homomorphism() {
                return Err(InverseError::BondingNotHomomorphism(name(q), name(p)));
            }
        }
        let sys = InverseSystem { index, systems, bondings };
        sys.check_functorial()?;
        Ok(sys)
    }

    /// The bonding map `S_q -> S_p`; the identity when `p = q`.
    pub fn bonding(&self, q: usize, p: usize) -> Option<SystemMap> {
        if p == q {
            Some(SystemMap::identity(self.systems[p].clone()))
        } else {
            self.bondings.get(&(q, p)).cloned()
        }
    }

    fn check_functorial(&self) -> Result<(), InverseError> {
        let n = self.index.len();
        for p in 0..n {
            for q in (0..n).filter(|&q| q != p && self.index.le(p, q)) {
                for r in (0..n).filter(|&r| r != q && self.index.le(q, r)) {
                    let fqp = &self.bondings[&(q, p)];
                    let frq = &self.bondings[&(r, q)];
                    let frp = &self.bondings[&(r, p)];
                    let ok = self.systems[r].elements().all(|x| fqp.apply(frq.apply(x)) == frp.apply(x));
                    if !ok {
                        let nm = |i: usize| self.index.points[i].clone();
                        return Err(InverseError::BondingNotFunctorial(nm(p), nm(q), nm(r)));
                    }
                }
            }
        }
        Ok(())
    }
}

/// The limit: all compatible families, with componentwise involution and
/// order. `families[x]` is the family of limit element `x`.
#[derive(Debug, Clone)]
pub struct Limit {
    pub system: Arc<SeparationSystem>,
    pub families: Vec<Vec<usize>>,
}

impl Limit {
    /// The projection onto the system at index point `p`.
    pub fn projection(&self, inv: &InverseSystem, p: usize) -> Result<SystemMap, InverseError> {
        let assignment = self.families.iter().map(|f| f[p]).collect();
        Ok(SystemMap::new(self.system.clone(), inv.systems[p].clone(), assignment)?)
    }
}

fn compatible_families(inv: &InverseSystem) -> Vec<Vec<usize>> {
    let order = inv.index.top_down();
    let mut out = Vec::new();
    let mut choice = vec![usize::MAX; inv.index.len()];
    fn go(inv: &InverseSystem, order: &[usize], i: usize, choice: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let Some(&p) = order.get(i) else {
            out.push(choice.clone());
            return;
        };
        let uppers: Vec<usize> = order[..i].iter().copied().filter(|&q| inv.index.le(p, q)).collect();
        let forced = uppers.first().map(|&q| inv.bondings[&(q, p)].apply(choice[q]));
        let candidates: Vec<usize> = match forced {
            Some(x) => vec![x],
            None => inv.systems[p].elements().collect(),
        };
        for x in candidates {
            if uppers.iter().all(|&q| inv.bondings[&(q, p)].apply(choice[q]) == x) {
                choice[p] = x;
                go(inv, order, i + 1, choice, out);
            }
        }
        choice[p] = usize::MAX;
    }
    go(inv, &order, 0, &mut choice, &mut out);
    out
}

pub fn family_name(inv: &InverseSystem, family: &[usize]) -> String {
    family
        .iter()
        .enumerate()
        .map(|(p, &x)| inv.systems[p].name(x))
        .collect::<Vec<_>>()
        .join("|")
}

pub fn inverse_limit(inv: &InverseSystem) -> Result<Limit, InverseError> {
    let fams = compatible_families(inv);
    let m = fams.len();
    let index: BTreeMap<&Vec<usize>, usize> = fams.iter().enumerate().map(|(i, f)| (f, i)).collect();
    let names: Vec<String> = fams.iter().map(|f| family_name(inv, f)).collect();
    let invs: Vec<usize> = fams
        .iter()
        .map(|f| {
            let g: Vec<usize> = f.iter().enumerate().map(|(p, &x)| inv.systems[p].inv(x)).collect();
            index[&g]
        })
        .collect();
    let mut rel = vec![false; m * m];
    for a in 0..m {
        for b in 0..m {
            rel[a * m + b] = (0..inv.index.len()).all(|p| inv.systems[p].le(fams[a][p], fams[b][p]));
        }
    }
    let system = SeparationSystem::from_relation(names.clone(), invs, rel)?;
    let mut families = vec![Vec::new(); m];
    for (i, f) in fams.into_iter().enumerate() {
        families[system.id(&names[i])?] = f;
    }
    Ok(Limit { system: Arc::new(system), families })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LimitVerdict {
    pub elements: usize,
    pub nested: bool,
    pub trivial_free: bool,
    pub degenerate_free: bool,
    /// Whether every system of the inverse system is regular.
    pub inputs_regular: bool,
    pub limit_regular: bool,
    /// Componentwise order agrees with the order of the limit system.
    pub componentwise: bool,
    pub violation: Option<String>,
}

impl LimitVerdict {
    /// A tree set, and regular whenever all inputs are.
    pub fn holds(&self) -> bool {
        self.nested
            && self.trivial_free
            && self.degenerate_free
            && self.componentwise
            && (!self.inputs_regular || self.limit_regular)
    }
}

pub fn verify_limit_tree_set(inv: &InverseSystem) -> Result<(Limit, LimitVerdict), InverseError> {
    let limit = inverse_limit(inv)?;
    let sys = &limit.system;
    let crossing = sys.crossing_pair();
    let trivial = sys.elements().find(|&x| sys.is_trivial(x));
    let degenerate = sys.elements().find(|&x| sys.is_degenerate(x));
    let componentwise = sys.elements().all(|a| {
        sys.elements().all(|b| {
            let cw = (0..inv.index.len()).all(|p| inv.systems[p].le(limit.families[a][p], limit.families[b][p]));
            cw == sys.le(a, b)
        })
    });
    let violation = crossing
        .map(|(a, b)| format!("crossing {} / {}", sys.name(a), sys.name(b)))
        .or_else(|| trivial.map(|x| format!("trivial {}", sys.name(x))))
        .or_else(|| degenerate.map(|x| format!("degenerate {}", sys.name(x))));
    let verdict = LimitVerdict {
        elements: sys.len(),
        nested: crossing.is_none(),
        trivial_free: trivial.is_none(),
        degenerate_free: degenerate.is_none(),
        inputs_regular: inv.systems.iter().all(|s| s.is_regular()),
        limit_regular: sys.is_regular(),
        componentwise,
        violation,
    };
    Ok((limit, verdict))
}

/// The branch-closed selections of a host.
#[derive(Debug, Clone)]
pub struct SelectionFamily {
    pub selections: Vec<Selection>,
    /// Set when selections larger than the cap exist but were not listed.
    pub truncated: bool,
    /// Separations excluded from every selection. Reserved for infinite
    /// splitting stars, so always empty for finite hosts.
    pub reserved: Vec<usize>,
}

/// All branch-closed selections with at most `cap` members, ordered by
/// size and then lexicographically, checked to be directed under
/// `E = D ∪ D' ∪ ⋃ C(s,s')`.
pub fn canonical_selection_family(host: &Host, cap: usize) -> Result<SelectionFamily, InverseError> {
    let all = all_selections(host);
    let truncated = all.iter().any(|s| s.len() > cap && is_branch_closed(host, s).closed);
    let selections: Vec<Selection> = all
        .into_iter()
        .filter(|s| s.len() <= cap && is_branch_closed(host, s).closed)
        .collect();
    for (i, d) in selections.iter().enumerate() {
        for e in &selections[i + 1..] {
            let joined = join_selections(host, d, e);
            if !selections.iter().any(|s| s.members == joined) && !truncated {
                let sys = host.sys();
                return Err(InverseError::FamilyNotDirected(d.label(sys), e.label(sys)));
            }
        }
    }
    Ok(SelectionFamily { selections, truncated, reserved: Vec::new() })
}

/// `D ∪ D'` together with all branching points between their members.
pub fn join_selections(host: &Host, d: &Selection, e: &Selection) -> Vec<usize> {
    let mut union: Vec<usize> = d.members.iter().chain(&e.members).copied().collect();
    union.sort_unstable();
    union.dedup();
    let mut out = union.clone();
    for (i, &s) in union.iter().enumerate() {
        for &t in &union[i..] {
            out.extend(crate::quotient::branch_chain(host, s, t).points);
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// The inverse system of quotients `τ/D` over the canonical family, ordered
/// by inclusion, with the class maps as bondings.
pub fn canonical_system(host: &Host, family: &SelectionFamily) -> Result<InverseSystem, InverseError> {
    if family.selections.is_empty() {
        return Err(InverseError::NoSelectionExists);
    }
    let sys = host.sys();
    let sels = &family.selections;
    let quotients = sels
        .iter()
        .map(|d| {
            quotient(host, d).certified.ok_or_else(|| InverseError::QuotientNotCertified(d.label(sys)))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let subset = |a: &Selection, b: &Selection| a.members.iter().all(|x| b.contains(*x));
    let mut gens = Vec::new();
    for (i, a) in sels.iter().enumerate() {
        for (j, b) in sels.iter().enumerate() {
            if i != j && subset(a, b) {
                gens.push((i, j));
            }
        }
    }
    let index = IndexPoset::new(sels.iter().map(|d| d.label(sys)).collect(), &gens)?;
    let mut bondings = BTreeMap::new();
    for (p, q) in index.comparable_pairs() {
        let (hi, lo) = (&quotients[q], &quotients[p]);
        let mut assignment = vec![usize::MAX; hi.tree_set.len()];
        for x in sys.elements() {
            let a = hi.projection.apply(x);
            let b = lo.projection.apply(x);
            if assignment[a] != usize::MAX && assignment[a] != b {
                return Err(InverseError::BondingNotHomomorphism(index.points[q].clone(), index.points[p].clone()));
            }
            assignment[a] = b;
        }
        bondings.insert((q, p), SystemMap::new(hi.tree_set.arc(), lo.tree_set.arc(), assignment)?);
    }
    InverseSystem::new(index, quotients.iter().map(|c| c.tree_set.arc()).collect(), bondings)
}

/// A certified isomorphism from a host onto the limit of its canonical
/// system.
#[derive(Debug, Clone)]
pub struct PhiCertificate {
    pub family: SelectionFamily,
    pub system: InverseSystem,
    pub limit: Limit,
    pub map: SystemMap,
}

pub fn phi(host: &Host, cap: usize) -> Result<PhiCertificate, InverseError> {
    let family = canonical_selection_family(host, cap)?;
    if family.selections.is_empty() {
        return Err(InverseError::NoSelectionExists);
    }
    if family.truncated {
        return Err(InverseError::FamilyTruncated(cap));
    }
    let system = canonical_system(host, &family)?;
    let limit = inverse_limit(&system)?;
    let sys = host.sys();
    let by_family: BTreeMap<&Vec<usize>, usize> = limit.families.iter().enumerate().map(|(i, f)| (f, i)).collect();
    let mut quotients = Vec::new();
    for d in &family.selections {
        quotients.push(quotient(host, d).certified.expect("checked while building the system"));
    }
    let assignment = sys
        .elements()
        .map(|x| {
            let f: Vec<usize> = quotients.iter().map(|q| q.projection.apply(x)).collect();
            by_family
                .get(&f)
                .copied()
                .ok_or_else(|| InverseError::NotIsomorphism(format!("image of {} is not compatible", sys.name(x))))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let map = SystemMap::new(host.tree_set.arc(), limit.system.clone(), assignment)?;
    let report = map.check_isomorphism_lemmas();
    match report {
        Ok(r) if r.isomorphism && r.homomorphism => Ok(PhiCertificate { family, system, limit, map }),
        Ok(r) => Err(InverseError::NotIsomorphism(format!("{r:?}"))),
        Err(MapError::NotBijective) => Err(InverseError::NotIsomorphism("not bijective".into())),
        Err(e) => Err(e.into()),
    }
}

/// Convenience: a tree set as a one-point inverse system.
pub fn trivial_system(ts: &TreeSet) -> InverseSystem {
    let index = IndexPoset::new(vec!["0".into()], &[]).expect("a point is directed");
    InverseSystem::new(index, vec![ts.arc()], BTreeMap::new()).expect("no bondings to check")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{edge_tree_set, ex_non_trans, path};
    use crate::quotient::selection_from_names;
    use crate::system::find_isomorphism;

    #[test]
    fn one_point_limit() {
        let ts = path(4).unwrap();
        let inv = trivial_system(&ts);
        let (limit, v) = verify_limit_tree_set(&inv).unwrap();
        assert!(v.holds());
        assert!(find_isomorphism(&limit.system, &ts.arc()).is_some());
    }

    #[test]
    fn undirected_index_is_rejected() {
        let e = IndexPoset::new(vec!["a".into(), "b".into()], &[]);
        assert!(matches!(e, Err(InverseError::NotDirected(..))));
    }

    #[test]
    fn two_quotients_under_a_common_bound() {
        let host = Host::new(path(4).unwrap());
        let d1 = selection_from_names(&host, &["(1,2)", "(3,2)"]).unwrap();
        let d2 = selection_from_names(&host, &["(2,3)", "(4,3)"]).unwrap();
        let q1 = quotient(&host, &d1).certified.unwrap();
        let q2 = quotient(&host, &d2).certified.unwrap();
        let top = host.tree_set.arc();
        let index = IndexPoset::new(vec!["a".into(), "b".into(), "top".into()], &[(0, 2), (1, 2)]).unwrap();
        let mut bondings = BTreeMap::new();
        bondings.insert((2, 0), q1.projection.clone());
        bondings.insert((2, 1), q2.projection.clone());
        let inv = InverseSystem::new(index, vec![q1.tree_set.arc(), q2.tree_set.arc(), top.clone()], bondings).unwrap();
        let (limit, v) = verify_limit_tree_set(&inv).unwrap();
        assert!(v.holds());
        assert_eq!(limit.system.len(), 6);
        assert!(find_isomorphism(&limit.system, &top).is_some());
    }

    #[test]
    fn canonical_family_of_paths() {
        let host = Host::new(path(3).unwrap());
        let fam = canonical_selection_family(&host, 64).unwrap();
        assert_eq!(fam.selections.len(), 1);
        let host = Host::new(path(4).unwrap());
        let fam = canonical_selection_family(&host, 64).unwrap();
        let labels: Vec<String> = fam.selections.iter().map(|s| s.label(host.sys())).collect();
        assert_eq!(labels, ["{(1,2),(3,2)}", "{(2,3),(4,3)}", "{(1,2),(2,3),(3,2),(4,3)}"]);
        let small = canonical_selection_family(&host, 2).unwrap();
        assert!(small.truncated);
        assert!(matches!(phi(&host, 2), Err(InverseError::FamilyTruncated(2))));
    }

    #[test]
    fn phi_is_an_isomorphism() {
        for ts in [path(3).unwrap(), path(5).unwrap(), ex_non_trans()] {
            let host = Host::new(ts);
            let cert = phi(&host, 64).unwrap();
            assert!(cert.map.is_isomorphism());
            assert_eq!(cert.limit.system.len(), host.tree_set.len());
        }
    }

    #[test]
    fn single_edge_has_no_selection() {
        let host = Host::new(edge_tree_set(&[("1", "2")]).unwrap());
        assert!(matches!(phi(&host, 64), Err(InverseError::NoSelectionExists)));
    }
}

//! Representing regular tree sets by bipartitions of sets of consistent
//! orientations.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::orientation::{all_consistent_orientations, is_proper_star, splitting_stars, Orientation, Star};
use crate::system::{SeparationSystem, SystemError, SystemMap, TreeSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum GroundKind {
    Directed,
    Greatest,
    Splitting,
    /// Splitting orientations with at most two maximal elements.
    SplittingLe2,
}

impl GroundKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "directed" => Some(GroundKind::Directed),
            "greatest" => Some(GroundKind::Greatest),
            "splitting" => Some(GroundKind::Splitting),
            "splitting_le2" => Some(GroundKind::SplittingLe2),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            GroundKind::Directed => "directed",
            GroundKind::Greatest => "greatest",
            GroundKind::Splitting => "splitting",
            GroundKind::SplittingLe2 => "splitting_le2",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepresentError {
    #[error("the tree set is not regular: `{0}` is small")]
    NotRegular(String),
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),
    #[error("certificate failed: {0}")]
    CertificateFailed(String),
    #[error(transparent)]
    System(#[from] SystemError),
}

fn require_regular(ts: &TreeSet) -> Result<(), RepresentError> {
    match ts.elements().find(|&x| ts.is_small(x)) {
        Some(x) => Err(RepresentError::NotRegular(ts.name(x).to_string())),
        None => Ok(()),
    }
}

/// The consistent orientations of the requested kind, in sorted order.
pub fn orientation_ground(ts: &TreeSet, kind: GroundKind) -> Result<Vec<Orientation>, RepresentError> {
    require_regular(ts)?;
    Ok(all_consistent_orientations(ts)
        .into_iter()
        .filter(|o| match kind {
            GroundKind::Directed => o.directed,
            GroundKind::Greatest => o.has_greatest,
            GroundKind::Splitting => o.splitting,
            GroundKind::SplittingLe2 => o.splitting && o.maximal.len() <= 2,
        })
        .collect())
}

/// Whether no proper two-star of distinct separations is inclusion-maximal
/// among proper stars; otherwise such a two-star.
pub fn is_ever_branching(sys: &SeparationSystem) -> (bool, Option<[usize; 2]>) {
    for a in sys.elements() {
        for b in sys.elements().filter(|&b| b > a && !sys.same_separation(a, b)) {
            if !is_proper_star(sys, &[a, b]) {
                continue;
            }
            let extends = sys.elements().any(|c| {
                c != a && c != b && !sys.same_separation(c, a) && !sys.same_separation(c, b) && is_proper_star(sys, &[a, b, c])
            });
            if !extends {
                return (false, Some([a, b]));
            }
        }
    }
    (true, None)
}

pub fn splitting_two_star(sys: &SeparationSystem) -> Option<Star> {
    splitting_stars(sys).ok()?.into_iter().find(|s| s.len() == 2)
}

pub fn has_splitting_two_star(sys: &SeparationSystem) -> bool {
    splitting_two_star(sys).is_some()
}

/// Name of the oriented bipartition `(A, X \ A)` of `X = {0..n}`, using
/// the labels of the ground points.
pub fn bipartition_name(labels: &[String], side: &BTreeSet<usize>) -> String {
    let part = |inside: bool| -> String {
        let xs: Vec<&str> = (0..labels.len()).filter(|i| side.contains(i) == inside).map(|i| labels[i].as_str()).collect();
        format!("{{{}}}", xs.join(","))
    };
    format!("{}|{}", part(true), part(false))
}

/// The separation system of the given oriented bipartitions `(A, X \ A)`
/// of the labelled ground set, closed under swapping sides, ordered by
/// inclusion of first sides.
pub fn bipartition_system(labels: &[String], sides: &[BTreeSet<usize>]) -> Result<SeparationSystem, SystemError> {
    let n = labels.len();
    let mut all: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    for a in sides {
        if a.is_empty() || a.len() == n {
            continue;
        }
        all.insert(a.clone());
        all.insert((0..n).filter(|i| !a.contains(i)).collect());
    }
    let sides: Vec<BTreeSet<usize>> = all.into_iter().collect();
    let m = sides.len();
    let names: Vec<String> = sides.iter().map(|a| bipartition_name(labels, a)).collect();
    let inv: Vec<usize> = sides
        .iter()
        .map(|a| {
            let c: BTreeSet<usize> = (0..n).filter(|i| !a.contains(i)).collect();
            sides.iter().position(|b| *b == c).expect("closed under complement")
        })
        .collect();
    let mut rel = vec![false; m * m];
    for i in 0..m {
        for j in 0..m {
            rel[i * m + j] = sides[i].is_subset(&sides[j]);
        }
    }
    SeparationSystem::from_relation(names, inv, rel)
}

/// All nontrivial oriented bipartitions of the labelled ground set.
pub fn full_bipartition_system(labels: &[String]) -> Result<SeparationSystem, SystemError> {
    let n = labels.len();
    let sides: Vec<BTreeSet<usize>> = (1..(1u64 << n) - 1)
        .map(|mask| (0..n).filter(|&i| mask >> i & 1 == 1).collect())
        .collect();
    bipartition_system(labels, &sides)
}

#[derive(Debug, Clone)]
pub struct Representation {
    pub kind: GroundKind,
    pub ground: Vec<Orientation>,
    /// `O1, O2, ...` in ground order.
    pub labels: Vec<String>,
    /// For each host element `s`: the ground points containing `s`.
    pub fibers: Vec<BTreeSet<usize>>,
    /// The host onto its image among the bipartitions of the ground.
    pub map: SystemMap,
}

impl Representation {
    pub fn image(&self) -> &Arc<SeparationSystem> {
        &self.map.codomain
    }
}

/// The fiber map `s -> (O(s*), O(s))` into the bipartitions of the chosen
/// ground, certified to be an isomorphism onto its image.
pub fn represent(ts: &TreeSet, kind: GroundKind) -> Result<Representation, RepresentError> {
    require_regular(ts)?;
    if matches!(kind, GroundKind::Directed | GroundKind::Greatest) {
        if let Some(star) = splitting_two_star(ts) {
            return Err(RepresentError::HypothesisFailed(format!(
                "splitting two-star {{{}}}",
                star.names(ts).join(", ")
            )));
        }
        if kind == GroundKind::Directed {
            if let (false, Some([a, b])) = is_ever_branching(ts) {
                return Err(RepresentError::HypothesisFailed(format!(
                    "maximal proper two-star {{{}, {}}}",
                    ts.name(a),
                    ts.name(b)
                )));
            }
        }
    }
    let ground = orientation_ground(ts, kind)?;
    let labels: Vec<String> = (1..=ground.len()).map(|i| format!("O{i}")).collect();
    let fibers: Vec<BTreeSet<usize>> = ts
        .elements()
        .map(|s| (0..ground.len()).filter(|&i| ground[i].contains(s)).collect())
        .collect();
    for s in ts.elements() {
        let (f, g) = (&fibers[s], &fibers[ts.inv(s)]);
        if f.is_empty() {
            return Err(RepresentError::CertificateFailed(format!("empty fiber of {}", ts.name(s))));
        }
        if !f.is_disjoint(g) || f.len() + g.len() != ground.len() {
            return Err(RepresentError::CertificateFailed(format!("fibers of {} do not partition", ts.name(s))));
        }
    }
    // phi(s) = (O(s*), O(s)): its first side is the fiber of s*.
    let firsts: Vec<BTreeSet<usize>> = ts.elements().map(|s| fibers[ts.inv(s)].clone()).collect();
    let image = Arc::new(bipartition_system(&labels, &firsts)?);
    let assignment = firsts
        .iter()
        .map(|a| image.id(&bipartition_name(&labels, a)))
        .collect::<Result<Vec<_>, _>>()?;
    let map = SystemMap::new(ts.arc(), image, assignment)
        .map_err(|e| RepresentError::CertificateFailed(e.to_string()))?;
    if !map.is_injective() {
        return Err(RepresentError::CertificateFailed("fiber map is not injective".into()));
    }
    if !map.is_isomorphism() {
        return Err(RepresentError::CertificateFailed("fiber map is not an isomorphism onto its image".into()));
    }
    Ok(Representation { kind, ground, labels, fibers, map })
}

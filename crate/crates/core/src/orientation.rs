//! Consistent orientations, the extension lemma, splitting and branching stars.

use serde::Serialize;
use thiserror::Error;

use crate::system::{SeparationSystem, TreeSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrientationError {
    #[error("`{0}` is co-trivial, so the partial orientation does not extend")]
    CotrivialInPartial(String),
    #[error("partial orientation is inconsistent: `{0}` and `{1}`")]
    InconsistentPartial(String, String),
    #[error("designated maximal element `{0}` is trivial")]
    TrivialDesignatedMax(String),
    #[error("designated element `{0}` is not a maximal element of the partial orientation")]
    InvalidDesignation(String),
    #[error("no consistent orientation extends the partial orientation")]
    NoExtension,
    #[error("extension with designated maximum is not unique ({0} candidates)")]
    ExtensionNotUnique(usize),
    #[error("not an orientation: separation of `{0}` is oriented {1} times")]
    NotAnOrientation(String, usize),
    #[error("system is not nested: `{0}` crosses `{1}`")]
    NotNested(String, String),
    #[error("not a star: `{0}` and `{1}`")]
    NotAStar(String, String),
    #[error("expected a star of size 3, got {0}")]
    WrongSize(usize),
    #[error("expected exactly one branching star above the given star, found {0}")]
    BranchingStarCount(usize),
    #[error("the chain of separations above `{0}` has no maximum")]
    NoSupremum(String),
}

/// A choice of one orientation per separation, with derived flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orientation {
    pub chosen: Vec<usize>,
    pub maximal: Vec<usize>,
    pub consistent: bool,
    pub splitting: bool,
    pub directed: bool,
    pub has_greatest: bool,
}

impl Orientation {
    /// Validates that `chosen` orients every separation exactly once and
    /// computes the flags.
    pub fn new(sys: &SeparationSystem, mut chosen: Vec<usize>) -> Result<Self, OrientationError> {
        chosen.sort_unstable();
        chosen.dedup();
        for s in sys.separations() {
            let count = chosen
                .iter()
                .filter(|&&x| sys.same_separation(x, s))
                .count();
            if count != 1 {
                return Err(OrientationError::NotAnOrientation(sys.name(s).to_string(), count));
            }
        }
        Ok(Self::analyze(sys, chosen))
    }

    fn analyze(sys: &SeparationSystem, chosen: Vec<usize>) -> Self {
        let maximal = sys.maximal_in(&chosen);
        let consistent = consistency_violation(sys, &chosen).is_none();
        let splitting = chosen
            .iter()
            .all(|&x| maximal.iter().any(|&m| sys.le(x, m)));
        let directed = chosen.iter().all(|&x| {
            chosen
                .iter()
                .all(|&y| chosen.iter().any(|&z| sys.le(x, z) && sys.le(y, z)))
        });
        let has_greatest = chosen
            .iter()
            .any(|&g| chosen.iter().all(|&x| sys.le(x, g)));
        Orientation { chosen, maximal, consistent, splitting, directed, has_greatest }
    }

    pub fn contains(&self, x: usize) -> bool {
        self.chosen.binary_search(&x).is_ok()
    }

    pub fn greatest(&self) -> Option<usize> {
        match self.maximal.as_slice() {
            [g] if self.has_greatest => Some(*g),
            _ => None,
        }
    }

    pub fn names(&self, sys: &SeparationSystem) -> Vec<String> {
        sys.names_of(&self.chosen)
    }
}

/// A pair `(a, b)` of elements of `set` from distinct separations with
/// `a* <= b`, i.e. pointing away from each other.
pub fn consistency_violation(sys: &SeparationSystem, set: &[usize]) -> Option<(usize, usize)> {
    for &a in set {
        for &b in set {
            if !sys.same_separation(a, b) && sys.le(sys.inv(a), b) {
                return Some((a, b));
            }
        }
    }
    None
}

pub fn is_consistent(sys: &SeparationSystem, set: &[usize]) -> bool {
    consistency_violation(sys, set).is_none()
}

/// All elements below some member of `set`.
pub fn down_closure(sys: &SeparationSystem, set: &[usize]) -> Vec<usize> {
    sys.elements()
        .filter(|&x| set.iter().any(|&m| sys.le(x, m)))
        .collect()
}

fn options(sys: &SeparationSystem, s: usize) -> Vec<usize> {
    if sys.is_degenerate(s) {
        vec![s]
    } else {
        vec![s, sys.inv(s)]
    }
}

fn compatible(sys: &SeparationSystem, chosen: &[usize], x: usize) -> bool {
    chosen.iter().all(|&a| {
        sys.same_separation(a, x) || !(sys.le(sys.inv(a), x) || sys.le(sys.inv(x), a))
    })
}

/// Backtracking enumeration of consistent orientations satisfying `accept`
/// for each new element, calling `visit` on every complete one. Stops early
/// when `visit` returns false.
fn enumerate<F>(sys: &SeparationSystem, fixed: &[usize], visit: &mut F)
where
    F: FnMut(&[usize]) -> bool,
{
    let seps = sys.separations();
    let mut chosen = Vec::with_capacity(seps.len());
    fn rec<F: FnMut(&[usize]) -> bool>(
        sys: &SeparationSystem,
        seps: &[usize],
        fixed: &[usize],
        i: usize,
        chosen: &mut Vec<usize>,
        visit: &mut F,
    ) -> bool {
        if i == seps.len() {
            return visit(chosen);
        }
        let s = seps[i];
        let forced: Vec<usize> = fixed
            .iter()
            .copied()
            .filter(|&x| sys.same_separation(x, s))
            .collect();
        let opts = if forced.is_empty() { options(sys, s) } else { forced };
        for x in opts {
            if compatible(sys, chosen, x) {
                chosen.push(x);
                let go_on = rec(sys, seps, fixed, i + 1, chosen, visit);
                chosen.pop();
                if !go_on {
                    return false;
                }
            }
        }
        true
    }
    rec(sys, &seps, fixed, 0, &mut chosen, visit);
}

/// Every consistent orientation, sorted lexicographically by element names.
pub fn all_consistent_orientations(sys: &SeparationSystem) -> Vec<Orientation> {
    let mut out = Vec::new();
    enumerate(sys, &[], &mut |chosen| {
        let mut c = chosen.to_vec();
        c.sort_unstable();
        out.push(Orientation::analyze(sys, c));
        true
    });
    out.sort_by(|a, b| a.chosen.cmp(&b.chosen));
    out
}

/// Extends a consistent partial orientation to a consistent orientation.
///
/// With a designated element `p` of `partial` the result has `p` maximal; on
/// nested systems this extension is unique, which is cross-checked
/// exhaustively on systems of at most ten elements.
pub fn extend_orientation(
    sys: &SeparationSystem,
    partial: &[usize],
    designated: Option<usize>,
) -> Result<Orientation, OrientationError> {
    let mut partial = partial.to_vec();
    partial.sort_unstable();
    partial.dedup();
    for &a in &partial {
        for &b in &partial {
            if a != b && sys.same_separation(a, b) {
                return Err(OrientationError::InconsistentPartial(
                    sys.name(a).to_string(),
                    sys.name(b).to_string(),
                ));
            }
        }
    }
    if let Some((a, b)) = consistency_violation(sys, &partial) {
        return Err(OrientationError::InconsistentPartial(
            sys.name(a).to_string(),
            sys.name(b).to_string(),
        ));
    }
    if let Some(&x) = partial.iter().find(|&&x| sys.is_cotrivial(x)) {
        return Err(OrientationError::CotrivialInPartial(sys.name(x).to_string()));
    }
    let Some(p) = designated else {
        let mut found = None;
        enumerate(sys, &partial, &mut |chosen| {
            found = Some(chosen.to_vec());
            false
        });
        let mut chosen = found.ok_or(OrientationError::NoExtension)?;
        chosen.sort_unstable();
        return Ok(Orientation::analyze(sys, chosen));
    };
    if !partial.contains(&p) || partial.iter().any(|&y| y != p && sys.le(p, y)) {
        return Err(OrientationError::InvalidDesignation(sys.name(p).to_string()));
    }
    if sys.is_trivial(p) {
        return Err(OrientationError::TrivialDesignatedMax(sys.name(p).to_string()));
    }
    let keeps_max = |chosen: &[usize]| chosen.iter().all(|&y| y == p || !sys.le(p, y));
    let result = if sys.is_nested() {
        let mut chosen: Vec<usize> = sys
            .separations()
            .into_iter()
            .map(|s| {
                if sys.same_separation(s, p) {
                    p
                } else if let Some(x) = options(sys, s).into_iter().find(|&x| sys.le(x, p)) {
                    x
                } else {
                    options(sys, s)
                        .into_iter()
                        .find(|&x| sys.le(p, x))
                        .map(|x| sys.inv(x))
                        .unwrap_or(s)
                }
            })
            .collect();
        chosen.sort_unstable();
        let ok = is_consistent(sys, &chosen)
            && partial.iter().all(|x| chosen.binary_search(x).is_ok())
            && keeps_max(&chosen);
        if !ok {
            return Err(OrientationError::NoExtension);
        }
        if sys.len() <= 10 {
            let mut count = 0;
            enumerate(sys, &partial, &mut |c| {
                if keeps_max(c) {
                    count += 1;
                }
                true
            });
            if count != 1 {
                return Err(OrientationError::ExtensionNotUnique(count));
            }
        }
        chosen
    } else {
        let mut found = None;
        enumerate(sys, &partial, &mut |c| {
            if keeps_max(c) {
                found = Some(c.to_vec());
                false
            } else {
                true
            }
        });
        let mut chosen = found.ok_or(OrientationError::NoExtension)?;
        chosen.sort_unstable();
        chosen
    };
    Ok(Orientation::analyze(sys, result))
}

/// A set of oriented separations with its star flags.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Star {
    pub members: Vec<usize>,
    pub proper: bool,
    pub splitting: bool,
    pub branching: bool,
}

impl Star {
    pub fn names(&self, sys: &SeparationSystem) -> Vec<String> {
        sys.names_of(&self.members)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search(&x).is_ok()
    }
}

/// Whether `set` is an antichain star of nondegenerate elements.
pub fn is_proper_star(sys: &SeparationSystem, set: &[usize]) -> bool {
    sys.is_star(set)
        && set.iter().all(|&x| !sys.is_degenerate(x))
        && set
            .iter()
            .all(|&a| set.iter().all(|&b| a == b || !sys.le(a, b)))
}

/// The splitting star of `orientation`, if the orientation is splitting.
pub fn splits_at(sys: &SeparationSystem, orientation: &Orientation) -> Option<Star> {
    if !orientation.splitting || !orientation.consistent {
        return None;
    }
    let members = orientation.maximal.clone();
    Some(Star {
        proper: is_proper_star(sys, &members),
        splitting: true,
        branching: members.len() >= 3,
        members,
    })
}

/// Maximal-element sets of all splitting consistent orientations, sorted.
pub fn splitting_stars(sys: &SeparationSystem) -> Result<Vec<Star>, OrientationError> {
    if let Some((a, b)) = sys.crossing_pair() {
        return Err(OrientationError::NotNested(
            sys.name(a).to_string(),
            sys.name(b).to_string(),
        ));
    }
    let mut stars: Vec<Star> = all_consistent_orientations(sys)
        .iter()
        .filter_map(|o| splits_at(sys, o))
        .collect();
    stars.sort_by(|a, b| a.members.cmp(&b.members));
    stars.dedup_by(|a, b| a.members == b.members);
    Ok(stars)
}

/// Every element of a branching star.
pub fn branching_points(sys: &SeparationSystem) -> Result<Vec<usize>, OrientationError> {
    let mut pts: Vec<usize> = splitting_stars(sys)?
        .into_iter()
        .filter(|s| s.branching)
        .flat_map(|s| s.members)
        .collect();
    pts.sort_unstable();
    pts.dedup();
    Ok(pts)
}

/// Whether each element of `small` lies below a different element of `big`.
pub fn below_distinct(sys: &SeparationSystem, small: &[usize], big: &[usize]) -> bool {
    fn assign(sys: &SeparationSystem, small: &[usize], big: &[usize], used: &mut Vec<bool>) -> bool {
        let Some((&x, rest)) = small.split_first() else {
            return true;
        };
        for (j, &b) in big.iter().enumerate() {
            if !used[j] && sys.le(x, b) {
                used[j] = true;
                if assign(sys, rest, big, used) {
                    return true;
                }
                used[j] = false;
            }
        }
        false
    }
    assign(sys, small, big, &mut vec![false; big.len()])
}

fn chain_max(sys: &SeparationSystem, set: &[usize]) -> Option<usize> {
    set.iter()
        .copied()
        .find(|&m| set.iter().all(|&x| sys.le(x, m)))
}

/// The unique branching star above a three-star, each member of the star
/// lying below a different element of it.
///
/// The star is computed constructively from the maxima of the three chains
/// of separations squeezed between the members, then checked against an
/// exhaustive scan of all branching stars.
pub fn find_branching_star(ts: &TreeSet, three_star: &[usize]) -> Result<Star, OrientationError> {
    let sys = ts.system();
    let mut members = three_star.to_vec();
    members.sort_unstable();
    members.dedup();
    if members.len() != 3 {
        return Err(OrientationError::WrongSize(members.len()));
    }
    for &a in &members {
        for &b in &members {
            if a != b && (sys.same_separation(a, b) || !sys.le(a, sys.inv(b))) {
                return Err(OrientationError::NotAStar(
                    sys.name(a).to_string(),
                    sys.name(b).to_string(),
                ));
            }
        }
    }
    let scan: Vec<Star> = splitting_stars(sys)?
        .into_iter()
        .filter(|s| s.branching && below_distinct(sys, &members, &s.members))
        .collect();
    if scan.len() != 1 {
        return Err(OrientationError::BranchingStarCount(scan.len()));
    }
    let squeeze = |r: usize, others: [usize; 2]| -> Result<usize, OrientationError> {
        let chain: Vec<usize> = sys
            .elements()
            .filter(|&x| sys.le(r, x) && others.iter().all(|&o| sys.le(x, sys.inv(o))))
            .collect();
        chain_max(sys, &chain).ok_or_else(|| OrientationError::NoSupremum(sys.name(r).to_string()))
    };
    let (r, s, t) = (members[0], members[1], members[2]);
    let tops = [squeeze(r, [s, t])?, squeeze(s, [r, t])?, squeeze(t, [r, s])?];
    let o = extend_orientation(sys, &tops, Some(tops[0]))?;
    let star = splits_at(sys, &o).ok_or(OrientationError::BranchingStarCount(0))?;
    if star.members != scan[0].members || !tops.iter().all(|&x| star.contains(x)) {
        return Err(OrientationError::BranchingStarCount(2));
    }
    Ok(star)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::edge_tree_set;

    fn path3() -> TreeSet {
        edge_tree_set(&[("1", "2"), ("2", "3")]).unwrap()
    }

    fn names(sys: &SeparationSystem, xs: &[usize]) -> Vec<String> {
        sys.names_of(xs)
    }

    #[test]
    fn path_has_three_orientations() {
        let t = path3();
        let all = all_consistent_orientations(&t);
        assert_eq!(all.len(), 3);
        assert!(all.iter().all(|o| o.consistent && o.splitting));
    }

    #[test]
    fn small_pair_has_two_consistent_orientations() {
        let s = SeparationSystem::build(&["a", "a*"], &[("a", "a*")], &[("a", "a*")]).unwrap();
        assert_eq!(all_consistent_orientations(&s).len(), 2);
    }

    #[test]
    fn extension_with_designated_maximum() {
        let t = path3();
        let p = t.ids(&["(1,2)", "(3,2)"]).unwrap();
        let o = extend_orientation(&t, &p, Some(p[0])).unwrap();
        assert_eq!(o.names(&t), vec!["(1,2)", "(3,2)"]);
        assert!(o.maximal.contains(&p[0]));
    }

    #[test]
    fn empty_partial_extends() {
        let t = edge_tree_set(&[("1", "2"), ("2", "3"), ("2", "4")]).unwrap();
        let o = extend_orientation(&t, &[], None).unwrap();
        assert!(o.consistent);
    }

    #[test]
    fn cotrivial_partial_rejected() {
        let s = SeparationSystem::build(
            &["r", "r*", "s", "s*"],
            &[("r", "r*"), ("s", "s*")],
            &[("r", "s"), ("r", "s*"), ("s*", "r*"), ("s", "r*")],
        )
        .unwrap();
        let rstar = s.id("r*").unwrap();
        assert_eq!(
            extend_orientation(&s, &[rstar], None).unwrap_err(),
            OrientationError::CotrivialInPartial("r*".into())
        );
    }

    #[test]
    fn inconsistent_partial_rejected() {
        let t = path3();
        let p = t.ids(&["(2,1)", "(2,3)"]).unwrap();
        assert!(matches!(
            extend_orientation(&t, &p, None),
            Err(OrientationError::InconsistentPartial(..))
        ));
    }

    #[test]
    fn path_splitting_stars() {
        let t = path3();
        let stars = splitting_stars(&t).unwrap();
        let got: Vec<Vec<String>> = stars.iter().map(|s| s.names(&t)).collect();
        assert_eq!(
            got,
            vec![vec!["(1,2)", "(3,2)"], vec!["(2,1)"], vec!["(2,3)"]]
        );
    }

    #[test]
    fn k13_stars() {
        let t = edge_tree_set(&[("c", "a"), ("c", "b"), ("c", "d")]).unwrap();
        let stars = splitting_stars(&t).unwrap();
        assert_eq!(stars.len(), 4);
        let branching: Vec<&Star> = stars.iter().filter(|s| s.branching).collect();
        assert_eq!(branching.len(), 1);
        assert_eq!(branching[0].names(&t), vec!["(a,c)", "(b,c)", "(d,c)"]);
        assert_eq!(stars.iter().filter(|s| s.len() == 1).count(), 3);
    }

    #[test]
    fn degenerate_unique_splitting_subset() {
        let s = SeparationSystem::build(&["d"], &[("d", "d")], &[] as &[(&str, &str)]).unwrap();
        let stars = splitting_stars(&s).unwrap();
        assert_eq!(stars.len(), 1);
        assert_eq!(names(&s, &stars[0].members), vec!["d"]);
    }

    #[test]
    fn branching_star_fixed_point() {
        let t = edge_tree_set(&[("c", "a"), ("c", "b"), ("c", "d")]).unwrap();
        let star = t.ids(&["(a,c)", "(b,c)", "(d,c)"]).unwrap();
        assert_eq!(find_branching_star(&t, &star).unwrap().members, star);
    }

    #[test]
    fn branching_star_pushed_to_node_three() {
        let t = edge_tree_set(&[("1", "2"), ("2", "3"), ("3", "4"), ("4", "5"), ("3", "6")]).unwrap();
        let star = t.ids(&["(1,2)", "(4,3)", "(6,3)"]).unwrap();
        let found = find_branching_star(&t, &star).unwrap();
        assert_eq!(found.names(&t), vec!["(2,3)", "(4,3)", "(6,3)"]);
    }

    #[test]
    fn branching_star_in_subdivided_claw() {
        let t = edge_tree_set(&[
            ("c", "x"), ("x", "a"), ("c", "y"), ("y", "b"), ("c", "z"), ("z", "d"),
        ])
        .unwrap();
        let star = t.ids(&["(a,x)", "(b,y)", "(d,z)"]).unwrap();
        let found = find_branching_star(&t, &star).unwrap();
        assert_eq!(found.names(&t), vec!["(x,c)", "(y,c)", "(z,c)"]);
    }

    #[test]
    fn branching_star_input_errors() {
        let t = path3();
        let two = t.ids(&["(1,2)", "(3,2)"]).unwrap();
        assert_eq!(find_branching_star(&t, &two).unwrap_err(), OrientationError::WrongSize(2));
        let bad = t.ids(&["(1,2)", "(2,1)", "(2,3)"]).unwrap();
        assert!(matches!(find_branching_star(&t, &bad), Err(OrientationError::NotAStar(..))));
    }

    #[test]
    fn down_closure_recovers_orientation() {
        let t = edge_tree_set(&[("1", "2"), ("2", "3"), ("2", "4"), ("4", "5")]).unwrap();
        for o in all_consistent_orientations(&t) {
            assert_eq!(down_closure(&t, &o.maximal), o.chosen);
        }
    }
}

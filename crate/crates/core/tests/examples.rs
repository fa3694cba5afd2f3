//! Worked examples, each checked against a value computed independently in
//! the test.

use std::collections::BTreeSet;

use treesets::characterize::{branch_bound, check_tree_set};
use treesets::generators::{chain_tree_set, edge_tree_set, ex_non_trans, ex_trivial, example_b, path, star};
use treesets::inverse::{canonical_selection_family, phi};
use treesets::orientation::{all_consistent_orientations, find_branching_star, splitting_stars};
use treesets::quotient::{
    all_selections, branch_chain, class_extrema, distinguishes, quotient, selection_from_names, signature, Host,
};
use treesets::represent::{has_splitting_two_star, is_ever_branching};
use treesets::system::find_isomorphism;
use treesets::{SeparationSystem, TreeSet};

fn names(sys: &SeparationSystem, xs: &[usize]) -> Vec<String> {
    sys.names_of(xs)
}

#[test]
fn one_edge_pair_has_two_orientations() {
    let sys = SeparationSystem::build(&["a", "a*"], &[("a", "a*")], &[("a", "a*")]).unwrap();
    assert_eq!(all_consistent_orientations(&sys).len(), 2);
}

#[test]
fn degenerate_element_is_its_own_splitting_star() {
    let sys = SeparationSystem::build(&["d"], &[("d", "d")], &[] as &[(&str, &str)]).unwrap();
    let stars = splitting_stars(&sys).unwrap();
    assert_eq!(stars.len(), 1);
    assert_eq!(stars[0].names(&sys), vec!["d"]);
}

#[test]
fn path3_stars() {
    let ts = path(3).unwrap();
    let mut got: Vec<Vec<String>> = splitting_stars(&ts).unwrap().iter().map(|s| s.names(&ts)).collect();
    got.sort();
    assert_eq!(got, vec![vec!["(1,2)", "(3,2)"], vec!["(2,1)"], vec!["(2,3)"]]);
    assert!(has_splitting_two_star(&ts));
    assert!(!is_ever_branching(&ts).0);
}

#[test]
fn k13_has_one_branching_star() {
    let ts = star(3).unwrap();
    let stars = splitting_stars(&ts).unwrap();
    let branching: Vec<_> = stars.iter().filter(|s| s.branching).collect();
    assert_eq!(branching.len(), 1);
    assert_eq!(branching[0].names(&ts), vec!["(1,0)", "(2,0)", "(3,0)"]);
    assert_eq!(stars.iter().filter(|s| s.len() == 1).count(), 3);
    assert!(!has_splitting_two_star(&ts));
    assert!(is_ever_branching(&ts).0);
}

#[test]
fn three_star_in_the_non_transitive_example() {
    let ts = ex_non_trans();
    assert_eq!(ts.len(), 10);
    let three = ts.ids(&["(1,2)", "(4,3)", "(6,3)"]).unwrap();
    let b = find_branching_star(&ts, &three).unwrap();
    assert_eq!(b.names(&ts), vec!["(2,3)", "(4,3)", "(6,3)"]);
}

#[test]
fn subdivided_claw_three_star() {
    let ts = edge_tree_set(&[("0", "a"), ("a", "1"), ("0", "b"), ("b", "2"), ("0", "c"), ("c", "3")]).unwrap();
    let three = ts.ids(&["(1,a)", "(2,b)", "(3,c)"]).unwrap();
    let b = find_branching_star(&ts, &three).unwrap();
    assert_eq!(b.names(&ts), vec!["(a,0)", "(b,0)", "(c,0)"]);
}

#[test]
fn path4_signatures() {
    let host = Host::new(path(4).unwrap());
    let sys = host.sys();
    let d = selection_from_names(&host, &["(1,2)", "(3,2)", "(2,3)", "(4,3)"]).unwrap();
    let sig = signature(&host, &d, sys.id("(2,3)").unwrap());
    assert_eq!(names(sys, &sig.d_plus), vec!["(1,2)"]);
    assert_eq!(names(sys, &sig.d_minus), vec!["(4,3)"]);

    let d = selection_from_names(&host, &["(1,2)", "(3,2)"]).unwrap();
    let a = signature(&host, &d, sys.id("(2,3)").unwrap());
    let b = signature(&host, &d, sys.id("(3,4)").unwrap());
    assert_eq!(a, b);
    assert_eq!(names(sys, &a.d_plus), vec!["(1,2)"]);
    assert!(a.d_minus.is_empty());

    let q = quotient(&host, &d);
    assert_eq!(q.len(), 4);
    let cert = q.certified.as_ref().unwrap();
    assert!(find_isomorphism(&cert.tree_set.arc(), &path(3).unwrap().arc()).is_some());
    let c = q.class_of[sys.id("(2,3)").unwrap()];
    let (min, max) = class_extrema(&host, &q, c).unwrap();
    assert_eq!(names(sys, &min), vec!["(2,3)"]);
    assert_eq!(names(sys, &max), vec!["(3,4)"]);
}

#[test]
fn trivial_example_signatures() {
    let host = Host::new(ex_trivial());
    let sys = host.sys();
    let d = selection_from_names(&host, &["(2,5)", "(6,5)", "(3,7)", "(8,7)"]).unwrap();
    let id = |n: &str| sys.id(n).unwrap();
    for &x in &d.members {
        assert!(!distinguishes(&host, &d, x, id("(1,2)"), id("(4,3)")).unwrap());
    }
    assert!(distinguishes(&host, &d, id("(6,5)"), id("(1,2)"), id("(2,3)")).unwrap());
    assert!(!distinguishes(&host, &d, id("(2,5)"), id("(1,2)"), id("(2,3)")).unwrap());
    let q = quotient(&host, &d);
    let (class, witness) = q.trivial_classes[0];
    assert_eq!(q.class_name(class), "[(1,2)]");
    assert_eq!(witness, q.class_of[id("(2,3)")]);
}

#[test]
fn branch_chains_split_into_two_chains() {
    let host = Host::new(ex_non_trans());
    let sys = host.sys();
    let (s, t) = (sys.id("(1,2)").unwrap(), sys.id("(5,4)").unwrap());
    let c = branch_chain(&host, s, t);
    assert!(c.well_formed);
    // Oracle: branching points between any orientations of the two.
    let bp: BTreeSet<usize> = host.branching_points().into_iter().collect();
    let ends = |x: usize| [x, sys.inv(x)];
    let expected: Vec<usize> = sys
        .elements()
        .filter(|b| bp.contains(b))
        .filter(|&b| {
            ends(s).iter().any(|&x| ends(t).iter().any(|&y| (sys.le(x, b) && sys.le(b, y)) || (sys.le(y, b) && sys.le(b, x))))
        })
        .collect();
    assert_eq!(c.points, expected);
    assert_eq!(names(sys, &c.points), vec!["(2,3)", "(4,3)"]);
    assert_eq!(c.chains.len(), 2);
}

#[test]
fn branch_bound_matches_pair_scan() {
    for ts in [ex_non_trans(), ex_trivial(), star(4).unwrap()] {
        let host = Host::new(ts.clone());
        let sys = host.sys();
        let bp: BTreeSet<usize> = host.branching_points().into_iter().collect();
        let regular: Vec<usize> = sys.separations().into_iter().filter(|&x| !sys.is_small(x) && !sys.is_cosmall(x)).collect();
        let mut best = 0;
        for &s in &regular {
            for &t in &regular {
                let count = bp
                    .iter()
                    .filter(|&&b| {
                        [s, sys.inv(s)].iter().any(|&x| {
                            [t, sys.inv(t)].iter().any(|&y| (sys.le(x, b) && sys.le(b, y)) || (sys.le(y, b) && sys.le(b, x)))
                        })
                    })
                    .count();
                best = best.max(count);
            }
        }
        assert_eq!(branch_bound(&host), best);
    }
}

#[test]
fn path_selection_families() {
    let h3 = Host::new(path(3).unwrap());
    let sels: Vec<Vec<String>> = all_selections(&h3).iter().map(|s| s.names(h3.sys())).collect();
    assert_eq!(sels, vec![vec!["(1,2)", "(3,2)"]]);

    let h4 = Host::new(path(4).unwrap());
    let fam = canonical_selection_family(&h4, usize::MAX).unwrap();
    let labels: Vec<String> = fam.selections.iter().map(|s| s.label(h4.sys())).collect();
    for want in ["{(1,2),(3,2)}", "{(2,3),(4,3)}", "{(1,2),(2,3),(3,2),(4,3)}"] {
        assert!(labels.iter().any(|l| l == want), "{want} missing from {labels:?}");
    }
}

#[test]
fn phi_on_the_worked_examples() {
    for ts in [path(3).unwrap(), ex_non_trans(), ex_trivial()] {
        let cert = phi(&Host::new(ts.clone()), usize::MAX).unwrap();
        assert_eq!(cert.limit.system.len(), ts.len());
        assert!(cert.map.is_isomorphism());
    }
}

#[test]
fn chain_tree_set_relations() {
    let ts = chain_tree_set(&[1.0, 2.0]).unwrap();
    let strict: Vec<(String, String)> = ts
        .elements()
        .flat_map(|a| ts.elements().map(move |b| (a, b)))
        .filter(|&(a, b)| ts.lneq(a, b))
        .map(|(a, b)| (ts.name(a).to_string(), ts.name(b).to_string()))
        .collect();
    assert_eq!(strict, vec![("-2".to_string(), "-1".to_string()), ("1".to_string(), "2".to_string())]);
    let three = chain_tree_set(&[1.0, 2.0, 3.0]).unwrap();
    assert!(check_tree_set(&three).iter().all(|v| v.verdict.holds()));
}

#[test]
fn example_b3_relations() {
    let ts: TreeSet = example_b(3).unwrap();
    assert_eq!(ts.len(), 14);
    let le = |a: &str, b: &str| ts.le(ts.id(a).unwrap(), ts.id(b).unwrap());
    assert!(le("s1", "s3") && le("s3", "m") && le("t2", "m"));
    assert!(le("t1", "t2*") && !le("t1", "t1*"));
    assert!(le("s1", "t3*") && le("t1", "s2") && !le("t2", "s1"));
}

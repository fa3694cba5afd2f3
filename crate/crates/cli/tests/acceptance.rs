//! Acceptance run: every criterion at its stated scale and time limit, one
//! PASS/FAIL line each.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use treesets::characterize::{check_family, check_tree_set, Property, Verdict, Witness, GROWTH_THRESHOLD};
use treesets::generators::{
    edge_tree_set, edge_tree_set_with_small, ex_non_trans, ex_trivial, example_b, example_b_family, exhaustive_tree_sets,
    free_trees, infinite_star_family, interval_family, labelled, paper_fixture, random_tree, ray_family,
    tree_set_hosts, Fixture,
};
use treesets::inverse::{
    canonical_selection_family, phi, verify_limit_tree_set, IndexPoset, InverseError, InverseSystem,
};
use treesets::orientation::{all_consistent_orientations, find_branching_star, is_proper_star};
use treesets::quotient::{all_selections, audit, is_branch_closed, quotient, selection_from_names, Host};
use treesets::represent::{has_splitting_two_star, orientation_ground, represent, GroundKind, RepresentError};
use treesets::{SystemMap, TreeSet};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion_1() -> Outcome {
    let host = Host::new(ex_non_trans());
    let sys = host.sys();
    let sel = selection_from_names(&host, &["(1,2)", "(3,2)", "(3,4)", "(5,4)"]).map_err(|e| e.to_string())?;
    let q = quotient(&host, &sel);
    let id = |n: &str| sys.id(n).unwrap();
    ensure(q.equivalent(id("(2,3)"), id("(3,4)")), || "(2,3) and (3,4) not identified".into())?;
    ensure(q.equivalent(id("(3,2)"), id("(4,3)")), || "(3,2) and (4,3) not identified".into())?;
    ensure(q.transitivity_violations.len() == 1, || format!("{} violations", q.transitivity_violations.len()))?;
    let v = &q.transitivity_violations[0];
    let names = |t: &[usize; 3]| t.iter().map(|&c| q.class_name(c).to_string()).collect::<Vec<_>>();
    let expected = ["[(6,3)]", "[(3,2)]", "[(3,6)]"];
    ensure(names(&v.chain) == expected || names(&v.dual) == expected, || format!("violation {:?}", names(&v.chain)))?;
    ensure(q.class_of[id("(4,3)")] == q.class_by_name("[(3,2)]").unwrap(), || "(4,3) not in [(3,2)]".into())?;
    ensure(!q.class_le(q.class_by_name("[(6,3)]").unwrap(), q.class_by_name("[(3,6)]").unwrap()), || {
        "[(6,3)] <= [(3,6)] holds".into()
    })?;
    Ok(format!("{} classes; [(6,3)] <= [(3,2)] = [(4,3)] <= [(3,6)] without [(6,3)] <= [(3,6)]", q.len()))
}

fn criterion_2() -> Outcome {
    let host = Host::new(ex_trivial());
    let sel = selection_from_names(&host, &["(2,5)", "(6,5)", "(3,7)", "(8,7)"]).map_err(|e| e.to_string())?;
    let q = quotient(&host, &sel);
    let c = q.class_of[host.sys().id("(1,2)").unwrap()];
    ensure(q.class_name(c) == "[(1,2)]", || format!("class named {}", q.class_name(c)))?;
    ensure(q.trivial_classes.iter().any(|&(a, _)| a == c), || "[(1,2)] not reported trivial".into())?;
    ensure(q.trivial_classes.len() == 1, || format!("{} trivial classes", q.trivial_classes.len()))?;
    Ok("[(1,2)] is the only trivial class".into())
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..200 {
        let n = rng.gen_range(2..=9);
        let edges = random_tree(n, &mut rng);
        let ts = edge_tree_set(&labelled(&edges)).map_err(|e| e.to_string())?;
        let os = all_consistent_orientations(&ts);
        ensure(os.len() == n, || format!("tree {i} on {n} nodes has {} orientations", os.len()))?;
        // Each orientation points at exactly one node: the one no chosen edge leaves.
        let mut hit = vec![0usize; n + 1];
        for o in &os {
            let sinks: Vec<usize> = (1..=n)
                .filter(|t| o.chosen.iter().all(|&x| !ts.name(x).starts_with(&format!("({t},"))))
                .collect();
            ensure(sinks.len() == 1, || format!("tree {i}: orientation with sinks {sinks:?}"))?;
            hit[sinks[0]] += 1;
        }
        ensure(hit[1..].iter().all(|&h| h == 1), || format!("tree {i}: node hits {hit:?}"))?;
    }
    Ok("200 trees, orientations biject with nodes".into())
}

fn criterion_4() -> Outcome {
    let hosts = tree_set_hosts(10);
    let mut pairs = 0;
    for h in &hosts {
        let host = Host::new(h.tree_set.clone());
        for sel in all_selections(&host) {
            pairs += 1;
            let q = quotient(&host, &sel);
            let bad = audit(&host, &q);
            if let Some(c) = bad.first() {
                return Err(format!("{} / {}: {} at {:?}", h.label, sel.label(host.sys()), c.lemma, c.elements));
            }
        }
    }
    Ok(format!("{} hosts, {pairs} (host, selection) pairs, 0 counterexamples", hosts.len()))
}

/// A random directed index poset on `n` points whose generators go from
/// lower to higher indices.
fn random_index<R: Rng>(n: usize, rng: &mut R) -> IndexPoset {
    let names: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
    let mut gens: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|_| rng.gen_bool(0.5)).collect();
    match IndexPoset::new(names.clone(), &gens) {
        Ok(p) => p,
        Err(_) => {
            gens.extend((0..n - 1).map(|i| (i, n - 1)));
            IndexPoset::new(names, &gens).expect("a top element makes it directed")
        }
    }
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut built = 0;
    while built < 100 {
        let nodes = rng.gen_range(3..=7);
        let ts = edge_tree_set(&labelled(&random_tree(nodes, &mut rng))).map_err(|e| e.to_string())?;
        let host = Host::new(ts);
        let sys = host.sys();
        let family = canonical_selection_family(&host, usize::MAX).map_err(|e| e.to_string())?;
        if family.selections.is_empty() {
            continue;
        }
        let index = random_index(rng.gen_range(1..=4), &mut rng);
        let n = index.len();
        // Monotone choice: each D_q contains every D_p below it.
        let mut chosen: Vec<usize> = Vec::new();
        for q in 0..n {
            let below: Vec<usize> = (0..q).filter(|&p| index.le(p, q)).flat_map(|p| family.selections[chosen[p]].members.clone()).collect();
            let options: Vec<usize> = (0..family.selections.len())
                .filter(|&k| below.iter().all(|&x| family.selections[k].contains(x)))
                .collect();
            let &k = options.choose(&mut rng).ok_or_else(|| format!("no branch-closed superset of {below:?}"))?;
            chosen.push(k);
        }
        let quotients = chosen
            .iter()
            .map(|&k| {
                let d = &family.selections[k];
                quotient(&host, d).certified.ok_or_else(|| format!("τ/{} not certified", d.label(sys)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut bondings = BTreeMap::new();
        for (p, q) in index.comparable_pairs() {
            let (hi, lo) = (&quotients[q], &quotients[p]);
            let mut assignment = vec![usize::MAX; hi.tree_set.len()];
            for x in sys.elements() {
                let (a, b) = (hi.projection.apply(x), lo.projection.apply(x));
                ensure(assignment[a] == usize::MAX || assignment[a] == b, || "classes do not refine".into())?;
                assignment[a] = b;
            }
            let f = SystemMap::new(hi.tree_set.arc(), lo.tree_set.arc(), assignment).map_err(|e| e.to_string())?;
            bondings.insert((q, p), f);
        }
        let inv = InverseSystem::new(index, quotients.iter().map(|c| c.tree_set.arc()).collect(), bondings)
            .map_err(|e| e.to_string())?;
        let (_, v) = verify_limit_tree_set(&inv).map_err(|e| e.to_string())?;
        ensure(v.nested && v.trivial_free && v.degenerate_free && v.componentwise, || {
            format!("limit of system {built}: {:?}", v.violation)
        })?;
        built += 1;
    }
    Ok("100 inverse systems, every limit nested with no trivial element".into())
}

fn criterion_6() -> Outcome {
    let mut certified = 0;
    for n in 2..=7 {
        for edges in free_trees(n) {
            let host = Host::new(edge_tree_set(&labelled(&edges)).map_err(|e| e.to_string())?);
            match phi(&host, usize::MAX) {
                Ok(_) => certified += 1,
                Err(InverseError::NoSelectionExists) if n == 2 => {}
                Err(e) => return Err(format!("tree {edges:?}: {e}")),
            }
        }
    }
    Ok(format!("{certified} trees on 3..=7 nodes certified; the single edge has no selection"))
}

fn criterion_7() -> Outcome {
    let mut closed = 0;
    for h in tree_set_hosts(10) {
        let host = Host::new(h.tree_set.clone());
        for sel in all_selections(&host) {
            if !is_branch_closed(&host, &sel).closed {
                continue;
            }
            closed += 1;
            let q = quotient(&host, &sel);
            ensure(q.diagnostics_empty() && q.certified.is_some(), || {
                format!("{} / {} not certified", h.label, sel.label(host.sys()))
            })?;
        }
    }
    Ok(format!("{closed} branch-closed selections, all certified"))
}

fn criterion_8() -> Outcome {
    let mut sets: Vec<TreeSet> = tree_set_hosts(12).into_iter().map(|h| h.tree_set).collect();
    for k in 1..=4 {
        sets.extend(exhaustive_tree_sets(k));
    }
    let mut stars = 0;
    for ts in &sets {
        let n = ts.len();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    let m = [a, b, c];
                    let distinct = !ts.same_separation(a, b) && !ts.same_separation(a, c) && !ts.same_separation(b, c);
                    if !distinct || !is_proper_star(ts, &m) {
                        continue;
                    }
                    stars += 1;
                    find_branching_star(ts, &m).map_err(|e| format!("{:?}: {e}", ts.names_of(&m)))?;
                }
            }
        }
    }
    Ok(format!("{} tree sets, {stars} three-stars, each with exactly one branching star", sets.len()))
}

fn fixture_tree_sets() -> Vec<(String, TreeSet)> {
    let mut out = Vec::new();
    let mut names: Vec<String> = vec!["ex_non_trans".into(), "ex_trivial".into()];
    names.extend((2..=8).map(|n| format!("path{n}")));
    names.extend((2..=6).map(|n| format!("k1{n}")));
    names.extend((1..=5).map(|n| format!("chain{n}")));
    names.extend((1..=4).map(|n| format!("example_B{n}")));
    for name in names {
        if let Ok(Fixture::TreeSet(ts)) = paper_fixture(&name) {
            out.push((name, ts));
        }
    }
    for n in 2..=7 {
        for edges in free_trees(n) {
            out.push((format!("tree{edges:?}"), edge_tree_set(&labelled(&edges)).unwrap()));
        }
    }
    out
}

fn criterion_9() -> Outcome {
    let fixtures = fixture_tree_sets();
    let mut regular = 0;
    for (name, ts) in &fixtures {
        if !ts.is_regular() {
            ensure(matches!(represent(ts, GroundKind::Splitting), Err(RepresentError::NotRegular(_))), || {
                format!("{name}: non-regular host not rejected")
            })?;
            continue;
        }
        regular += 1;
        represent(ts, GroundKind::Splitting).map_err(|e| format!("{name} splitting: {e}"))?;
        let greatest = represent(ts, GroundKind::Greatest);
        if has_splitting_two_star(ts) {
            ensure(matches!(greatest, Err(RepresentError::HypothesisFailed(_))), || format!("{name}: greatest should fail"))?;
        } else {
            greatest.map_err(|e| format!("{name} greatest: {e}"))?;
        }
        let d = orientation_ground(ts, GroundKind::Directed).map_err(|e| e.to_string())?;
        let g = orientation_ground(ts, GroundKind::Greatest).map_err(|e| e.to_string())?;
        ensure(d == g, || format!("{name}: directed and greatest grounds differ"))?;
    }
    let p3 = paper_fixture("path3").map_err(|e| e.to_string())?;
    let Fixture::TreeSet(p3) = p3 else { return Err("path3 is not a tree set".into()) };
    ensure(matches!(represent(&p3, GroundKind::Greatest), Err(RepresentError::HypothesisFailed(_))), || {
        "path3 greatest did not fail".into()
    })?;
    let small = edge_tree_set_with_small(&[("1", "2"), ("2", "3")], &[("1", "2")]).map_err(|e| e.to_string())?;
    ensure(matches!(represent(&small, GroundKind::Splitting), Err(RepresentError::NotRegular(_))), || {
        "small leaf not rejected".into()
    })?;
    Ok(format!("{regular} regular fixtures; path3 fails greatest with HypothesisFailed"))
}

fn criterion_10() -> Outcome {
    for (name, ts) in fixture_tree_sets() {
        let vs = check_tree_set(&ts);
        ensure(vs.iter().all(|v| v.verdict.holds()), || format!("{name}: {vs:?}"))?;
    }
    let verdict = |vs: &[treesets::characterize::PropertyVerdict], p: Property| {
        vs.iter().find(|v| v.property == p).cloned().expect("all four properties reported")
    };
    let ray = check_family(&ray_family(20).map_err(|e| e.to_string())?, GROWTH_THRESHOLD);
    let v = verdict(&ray, Property::ChainComplete);
    ensure(v.verdict == Verdict::UnknownUpTo(20) && v.annotation.is_some(), || format!("ray: {v:?}"))?;

    let interval = check_family(&interval_family(5).map_err(|e| e.to_string())?, GROWTH_THRESHOLD);
    let v = verdict(&interval, Property::Splittable);
    ensure(matches!(v.verdict, Verdict::UnknownUpTo(_)) && v.annotation.is_some(), || format!("interval: {v:?}"))?;

    let star = check_family(&infinite_star_family(8).map_err(|e| e.to_string())?, GROWTH_THRESHOLD);
    let v = verdict(&star, Property::StarFinite);
    ensure(v.verdict == Verdict::Violated(Witness::GrowingStar(vec![3, 4, 5, 6, 7, 8])), || format!("star: {v:?}"))?;

    let fam = example_b_family(8).map_err(|e| e.to_string())?;
    let b = check_family(&fam, GROWTH_THRESHOLD);
    let v = verdict(&b, Property::BranchBounded);
    let Verdict::Violated(Witness::GrowingBranchChain { sizes, chain_sizes }) = &v.verdict else {
        return Err(format!("example_B: {v:?}"));
    };
    ensure(*chain_sizes == fam.params, || format!("example_B chain sizes {chain_sizes:?}"))?;
    let doubled: Vec<usize> = fam.params.iter().map(|n| 2 * n).collect();
    ensure(*sizes == doubled, || format!("example_B |C| sizes {sizes:?}"))?;
    ensure(example_b(8).is_ok(), || "B(8) missing".into())?;
    Ok("finite fixtures hold; ray, interval, star and example_B report their limit failures".into())
}

fn criterion_11() -> Outcome {
    let runs: Vec<Vec<&str>> = vec![
        vec!["validate", "ex_trivial"],
        vec!["orientations", "path4"],
        vec!["stars", "k14"],
        vec!["quotient", "ex_non_trans", "--selection", "(1,2),(3,2),(3,4),(5,4)"],
        vec!["quotient", "ex_trivial", "--selection", "(2,5),(6,5),(3,7),(8,7)"],
        vec!["limit", "path5"],
        vec!["represent", "k13", "--ground", "directed"],
        vec!["represent", "path4", "--ground", "splitting"],
        vec!["check", "example_B"],
        vec!["check", "infinite_star"],
        vec!["gen", "example_B", "--n", "3"],
    ];
    let mut reports = 0;
    for args in &runs {
        for json in [false, true] {
            let mut full: Vec<&str> = if json { vec!["--json"] } else { vec![] };
            full.extend(args);
            let outs: Vec<(Option<i32>, Vec<u8>)> = (0..3)
                .map(|_| {
                    let o = Command::new(env!("CARGO_BIN_EXE_sepsys")).args(&full).output().expect("binary runs");
                    (o.status.code(), o.stdout)
                })
                .collect();
            ensure(outs.iter().all(|o| *o == outs[0]), || format!("{full:?} differs across runs"))?;
            ensure(!outs[0].1.is_empty(), || format!("{full:?} printed nothing"))?;
            reports += 1;
        }
    }
    Ok(format!("{reports} reports byte-identical across 3 runs"))
}

#[test]
fn acceptance() {
    let criteria: Vec<(&str, Duration, fn() -> Outcome)> = vec![
        ("1 non-transitive quotient", Duration::from_secs(1), criterion_1),
        ("2 trivial class", Duration::from_secs(1), criterion_2),
        ("3 node-orientation bijection", Duration::from_secs(10), criterion_3),
        ("4 quotient lemma suite", Duration::from_secs(300), criterion_4),
        ("5 limits of random inverse systems", Duration::from_secs(60), criterion_5),
        ("6 phi isomorphism", Duration::from_secs(300), criterion_6),
        ("7 branch-closed quotients", Duration::from_secs(300), criterion_7),
        ("8 unique branching star", Duration::from_secs(120), criterion_8),
        ("9 representation suite", Duration::from_secs(60), criterion_9),
        ("10 characterization battery", Duration::from_secs(60), criterion_10),
        ("11 CLI determinism", Duration::from_secs(300), criterion_11),
    ];
    let mut failed = Vec::new();
    for (name, limit, run) in criteria {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let result = result.and_then(|d| {
            if elapsed <= limit {
                Ok(d)
            } else {
                Err(format!("took {elapsed:.2?}, limit {limit:?}"))
            }
        });
        match &result {
            Ok(detail) => println!("criterion {name}: PASS ({elapsed:.2?}) {detail}"),
            Err(why) => {
                println!("criterion {name}: FAIL ({elapsed:.2?}) {why}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

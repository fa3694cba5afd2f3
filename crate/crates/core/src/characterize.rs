//! The four structural properties of profinite tree sets, checked exactly on
//! finite tree sets and by bounded evidence on truncation families.

use std::fmt;

use serde::Serialize;

use crate::generators::{FamilyWitness, TruncationFamily};
use crate::quotient::{branch_chain, Host};
use crate::system::{SeparationSystem, TreeSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Property {
    ChainComplete,
    Splittable,
    StarFinite,
    BranchBounded,
}

impl Property {
    pub const ALL: [Property; 4] = [
        Property::ChainComplete,
        Property::Splittable,
        Property::StarFinite,
        Property::BranchBounded,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Property::ChainComplete => "chain-complete",
            Property::Splittable => "splittable",
            Property::StarFinite => "star-finite",
            Property::BranchBounded => "branch-bounded",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Witness {
    ChainWithoutSupremum(Vec<String>),
    UnsplitPair(String, String),
    /// Sizes of the witness splitting star, level by level.
    GrowingStar(Vec<usize>),
    /// `|C(s,s')|` level by level, with the size of the chain running
    /// from the first given orientation towards the second.
    GrowingBranchChain { sizes: Vec<usize>, chain_sizes: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Holds,
    Violated(Witness),
    UnknownUpTo(usize),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyVerdict {
    pub property: Property,
    pub verdict: Verdict,
    pub detail: String,
    /// The limit failure recorded for a family, if any.
    pub annotation: Option<String>,
}

impl PropertyVerdict {
    fn new(property: Property, verdict: Verdict, detail: String) -> Self {
        PropertyVerdict { property, verdict, detail, annotation: None }
    }
}

/// Chains beyond this many are not enumerated individually.
pub const CHAIN_BUDGET: usize = 20_000;

/// Strictly monotone growth over this many consecutive levels counts as
/// evidence of an infinite limit object.
pub const GROWTH_THRESHOLD: usize = 3;

fn supremum(sys: &SeparationSystem, chain: &[usize]) -> Option<usize> {
    let upper: Vec<usize> = sys.elements().filter(|&u| chain.iter().all(|&c| sys.le(c, u))).collect();
    upper.iter().copied().find(|&u| upper.iter().all(|&v| sys.le(u, v)))
}

pub fn is_chain_complete(sys: &SeparationSystem) -> PropertyVerdict {
    let mut count = 0usize;
    let mut bad: Option<Vec<usize>> = None;
    let mut stack: Vec<Vec<usize>> = sys.elements().map(|x| vec![x]).collect();
    while let Some(chain) = stack.pop() {
        if count >= CHAIN_BUDGET {
            break;
        }
        count += 1;
        if supremum(sys, &chain).is_none() {
            bad = Some(chain);
            break;
        }
        let top = *chain.last().unwrap();
        for y in sys.elements().filter(|&y| y > top && chain.iter().all(|&c| sys.le(c, y) || sys.le(y, c))) {
            let mut next = chain.clone();
            next.push(y);
            stack.push(next);
        }
    }
    match bad {
        Some(c) => PropertyVerdict::new(
            Property::ChainComplete,
            Verdict::Violated(Witness::ChainWithoutSupremum(sys.names_of(&c))),
            "chain has no least upper bound".into(),
        ),
        None => {
            let detail = if count >= CHAIN_BUDGET {
                format!("first {count} chains have suprema; every finite chain contains its maximum")
            } else {
                format!("all {count} chains have suprema")
            };
            PropertyVerdict::new(Property::ChainComplete, Verdict::Holds, detail)
        }
    }
}

/// For `r < s` (distinct separations), a splitting star with distinct
/// members `a`, `b` such that `r <= a` and `s* <= b`.
pub fn split_pair(host: &Host, r: usize, s: usize) -> Option<(usize, usize, usize)> {
    let sys = host.sys();
    let si = sys.inv(s);
    host.stars.iter().enumerate().find_map(|(k, star)| {
        star.members.iter().find_map(|&a| {
            if !sys.le(r, a) {
                return None;
            }
            star.members.iter().find(|&&b| b != a && sys.le(si, b)).map(|&b| (k, a, b))
        })
    })
}

pub fn is_splittable(host: &Host) -> PropertyVerdict {
    let sys = host.sys();
    let mut pairs = 0;
    for r in sys.elements() {
        for s in sys.elements().filter(|&s| sys.lneq(r, s)) {
            pairs += 1;
            if split_pair(host, r, s).is_none() {
                return PropertyVerdict::new(
                    Property::Splittable,
                    Verdict::Violated(Witness::UnsplitPair(sys.name(r).into(), sys.name(s).into())),
                    "no splitting star separates the pair".into(),
                );
            }
        }
    }
    PropertyVerdict::new(Property::Splittable, Verdict::Holds, format!("all {pairs} strict pairs split"))
}

/// Size of a largest star of pairwise distinct elements.
pub fn largest_star(sys: &SeparationSystem) -> usize {
    fn grow(sys: &SeparationSystem, cand: &[usize], size: usize, best: &mut usize) {
        if size + cand.len() <= *best {
            return;
        }
        if cand.is_empty() {
            *best = size;
            return;
        }
        for (i, &x) in cand.iter().enumerate() {
            let rest: Vec<usize> = cand[i + 1..].iter().copied().filter(|&y| sys.le(x, sys.inv(y))).collect();
            grow(sys, &rest, size + 1, best);
            if size + cand.len() - i <= *best {
                return;
            }
        }
    }
    let mut best = 0;
    let all: Vec<usize> = sys.elements().collect();
    grow(sys, &all, 0, &mut best);
    best
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StarReport {
    pub largest_star: usize,
    pub largest_splitting_star: usize,
    /// Splitting stars of at least the threshold size without a small member.
    pub large_regular_stars: usize,
}

pub fn star_report(host: &Host, threshold: usize) -> (StarReport, PropertyVerdict) {
    let sys = host.sys();
    let report = StarReport {
        largest_star: largest_star(sys),
        largest_splitting_star: host.stars.iter().map(|s| s.len()).max().unwrap_or(0),
        large_regular_stars: host
            .stars
            .iter()
            .filter(|s| s.len() >= threshold && !s.members.iter().any(|&x| sys.is_small(x)))
            .count(),
    };
    let detail = format!(
        "largest star {}, largest splitting star {}, {} regular splitting stars of size >= {}",
        report.largest_star, report.largest_splitting_star, report.large_regular_stars, threshold
    );
    (report.clone(), PropertyVerdict::new(Property::StarFinite, Verdict::Holds, detail))
}

/// Largest `|C(s,s')|` over pairs of regular separations.
pub fn branch_bound(host: &Host) -> usize {
    let sys = host.sys();
    let regular: Vec<usize> = sys
        .separations()
        .into_iter()
        .filter(|&x| !sys.is_small(x) && !sys.is_cosmall(x))
        .collect();
    let mut best = 0;
    for (i, &s) in regular.iter().enumerate() {
        for &t in &regular[i..] {
            best = best.max(branch_chain(host, s, t).points.len());
        }
    }
    best
}

pub fn branch_bound_report(host: &Host) -> PropertyVerdict {
    let b = branch_bound(host);
    PropertyVerdict::new(Property::BranchBounded, Verdict::Holds, format!("max |C(s,s')| over regular pairs is {b}"))
}

/// All four verdicts for a finite tree set.
pub fn check_tree_set(ts: &TreeSet) -> Vec<PropertyVerdict> {
    let host = Host::new(ts.clone());
    vec![
        is_chain_complete(ts),
        is_splittable(&host),
        star_report(&host, GROWTH_THRESHOLD).1,
        branch_bound_report(&host),
    ]
}

fn strictly_growing_run(xs: &[usize]) -> usize {
    let mut best = xs.len().min(1);
    let mut run = best;
    for w in xs.windows(2) {
        run = if w[1] > w[0] { run + 1 } else { 1 };
        best = best.max(run);
    }
    best
}

/// Verdicts for a truncation family. Every level is checked as a finite
/// tree set; limit behaviour is judged from the designated witnesses.
pub fn check_family(fam: &TruncationFamily, threshold: usize) -> Vec<PropertyVerdict> {
    let bound = fam.params.last().copied().unwrap_or(0);
    let hosts: Vec<Host> = fam.levels.iter().map(|t| Host::new(t.clone())).collect();
    let level_verdicts: Vec<Vec<PropertyVerdict>> = fam.levels.iter().map(check_tree_set).collect();
    let mut out = Vec::new();
    for (pi, &prop) in Property::ALL.iter().enumerate() {
        let failing = level_verdicts.iter().position(|v| !v[pi].verdict.holds());
        let mut v = if let Some(l) = failing {
            let mut v = level_verdicts[l][pi].clone();
            v.detail = format!("level {}: {}", fam.params[l], v.detail);
            v
        } else {
            match (prop, &fam.witness) {
                (Property::ChainComplete, FamilyWitness::Chain(chains)) => chain_evidence(fam, chains, bound),
                (Property::StarFinite, FamilyWitness::Star(stars)) => star_evidence(fam, &hosts, stars, bound, threshold),
                (Property::BranchBounded, FamilyWitness::Pair(pairs)) => {
                    branch_evidence(fam, &hosts, pairs, bound, threshold)
                }
                _ => PropertyVerdict::new(
                    prop,
                    Verdict::UnknownUpTo(bound),
                    format!("holds at every level up to {bound}"),
                ),
            }
        };
        v.annotation = fam.annotations.iter().find(|a| a.property == prop).map(|a| a.note.clone());
        out.push(v);
    }
    out
}

fn chain_evidence(fam: &TruncationFamily, chains: &[Vec<usize>], bound: usize) -> PropertyVerdict {
    let mut escapes = 0;
    for i in 0..chains.len().saturating_sub(1) {
        let (a, b) = (&fam.levels[i], &fam.levels[i + 1]);
        let Some(sup) = supremum(a, &chains[i]) else { continue };
        let image = fam.embeddings[i].apply(sup);
        if !chains[i + 1].iter().all(|&c| b.le(c, image)) {
            escapes += 1;
        }
    }
    let last = fam.levels.len() - 1;
    let names = fam.levels[last].names_of(&chains[last]);
    PropertyVerdict::new(
        Property::ChainComplete,
        Verdict::UnknownUpTo(bound),
        format!(
            "candidate chain {{{}}}: its supremum escapes at {} of {} level steps",
            names.join(", "),
            escapes,
            chains.len().saturating_sub(1)
        ),
    )
}

fn persists(fam: &TruncationFamily, i: usize, from: &[usize], into: &[usize]) -> bool {
    from.iter().all(|&x| into.contains(&fam.embeddings[i].apply(x)))
}

fn star_evidence(
    fam: &TruncationFamily,
    hosts: &[Host],
    stars: &[Vec<usize>],
    bound: usize,
    threshold: usize,
) -> PropertyVerdict {
    let sizes: Vec<usize> = stars.iter().map(|s| s.len()).collect();
    let splitting = stars.iter().zip(hosts).all(|(s, h)| {
        let mut m = s.clone();
        m.sort_unstable();
        h.stars.iter().any(|t| t.members == m) && !s.iter().any(|&x| h.sys().is_small(x))
    });
    let persistent = (0..stars.len().saturating_sub(1)).all(|i| persists(fam, i, &stars[i], &stars[i + 1]));
    if splitting && persistent && strictly_growing_run(&sizes) >= threshold {
        PropertyVerdict::new(
            Property::StarFinite,
            Verdict::Violated(Witness::GrowingStar(sizes)),
            "a regular splitting star grows strictly at every level".into(),
        )
    } else {
        PropertyVerdict::new(Property::StarFinite, Verdict::UnknownUpTo(bound), format!("witness star sizes {sizes:?}"))
    }
}

fn branch_evidence(
    fam: &TruncationFamily,
    hosts: &[Host],
    pairs: &[(usize, usize)],
    bound: usize,
    threshold: usize,
) -> PropertyVerdict {
    let chains: Vec<Vec<usize>> = pairs.iter().zip(hosts).map(|(&(s, t), h)| branch_chain(h, s, t).points).collect();
    let sizes: Vec<usize> = chains.iter().map(|c| c.len()).collect();
    let chain_sizes: Vec<usize> = pairs
        .iter()
        .zip(hosts)
        .map(|(&(s, t), h)| h.branching_points().into_iter().filter(|&b| h.sys().le(s, b) && h.sys().le(b, t)).count())
        .collect();
    let regular = pairs.iter().zip(hosts).all(|(&(s, t), h)| {
        let sys = h.sys();
        [s, t].iter().all(|&x| !sys.is_small(x) && !sys.is_cosmall(x))
    });
    let persistent = (0..chains.len().saturating_sub(1)).all(|i| persists(fam, i, &chains[i], &chains[i + 1]));
    if regular && persistent && strictly_growing_run(&sizes) >= threshold {
        PropertyVerdict::new(
            Property::BranchBounded,
            Verdict::Violated(Witness::GrowingBranchChain { sizes, chain_sizes }),
            "C(s,s') of a regular pair grows strictly at every level".into(),
        )
    } else {
        PropertyVerdict::new(Property::BranchBounded, Verdict::UnknownUpTo(bound), format!("|C(s,s')| per level {sizes:?}"))
    }
}

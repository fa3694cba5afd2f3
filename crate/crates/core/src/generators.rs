//! Fixture construction: edge tree sets of trees, chain tree sets, the
//! worked examples, truncation families and exhaustive host enumeration.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::characterize::Property;
use crate::system::{SeparationSystem, SystemError, SystemMap, TreeSet, TreeSetFailure};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeneratorError {
    #[error("not a tree: {0}")]
    NotATree(String),
    #[error("empty system: a tree without edges has no separations")]
    EmptySystem,
    #[error("chain tree sets need positive reals, got {0}")]
    NonPositiveInput(f64),
    #[error("chain tree sets need a nonempty ground set")]
    EmptyInput,
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
    #[error("closure of the listed relations adds `{0}` <= `{1}`, which no clause allows")]
    ClosureGuard(String, String),
    #[error("`{0}` is not an edge pointing away from a leaf")]
    NotALeafEdge(String),
    #[error("embedding from level {0} is not an injective strict-order-preserving homomorphism")]
    BadEmbedding(usize),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    NotTreeSet(#[from] TreeSetFailure),
}

pub fn edge_name(u: &str, v: &str) -> String {
    format!("({u},{v})")
}

struct TreeGraph {
    labels: Vec<String>,
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl TreeGraph {
    fn new<A: AsRef<str>, B: AsRef<str>>(edges: &[(A, B)]) -> Result<Self, GeneratorError> {
        let mut index: BTreeMap<String, usize> = BTreeMap::new();
        let mut labels = Vec::new();
        let mut intern = |s: &str, labels: &mut Vec<String>| {
            *index.entry(s.to_string()).or_insert_with(|| {
                labels.push(s.to_string());
                labels.len() - 1
            })
        };
        let mut es = Vec::new();
        for (a, b) in edges {
            let (u, v) = (intern(a.as_ref(), &mut labels), intern(b.as_ref(), &mut labels));
            if u == v {
                return Err(GeneratorError::NotATree(format!("loop at {}", a.as_ref())));
            }
            es.push((u, v));
        }
        if es.is_empty() {
            return Err(GeneratorError::EmptySystem);
        }
        let n = labels.len();
        let mut adj = vec![Vec::new(); n];
        let mut seen = BTreeSet::new();
        for &(u, v) in &es {
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(GeneratorError::NotATree(format!(
                    "repeated edge {}-{}",
                    labels[u], labels[v]
                )));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        if es.len() != n - 1 {
            return Err(GeneratorError::NotATree(format!(
                "{} vertices but {} edges",
                n,
                es.len()
            )));
        }
        let g = TreeGraph { labels, adj, edges: es };
        if g.component(0, None).iter().filter(|&&b| b).count() != n {
            return Err(GeneratorError::NotATree("disconnected".into()));
        }
        Ok(g)
    }

    /// Vertices reachable from `start` without using the edge `cut`.
    fn component(&self, start: usize, cut: Option<(usize, usize)>) -> Vec<bool> {
        let mut seen = vec![false; self.labels.len()];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(x) = stack.pop() {
            for &y in &self.adj[x] {
                let blocked = matches!(cut, Some((a, b)) if (a == x && b == y) || (a == y && b == x));
                if !blocked && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen
    }

    fn edge_system(&self, small: &[(usize, usize)]) -> Result<SeparationSystem, GeneratorError> {
        let mut oriented = Vec::new();
        for &(u, v) in &self.edges {
            oriented.push((u, v));
            oriented.push((v, u));
        }
        let sides: Vec<Vec<bool>> = oriented
            .iter()
            .map(|&(u, v)| self.component(u, Some((u, v))))
            .collect();
        let m = oriented.len();
        let names: Vec<String> = oriented
            .iter()
            .map(|&(u, v)| edge_name(&self.labels[u], &self.labels[v]))
            .collect();
        let inv: Vec<usize> = (0..m).map(|i| i ^ 1).collect();
        let mut rel = vec![false; m * m];
        for a in 0..m {
            for b in 0..m {
                rel[a * m + b] = sides[a].iter().zip(&sides[b]).all(|(&x, &y)| !x || y);
            }
        }
        for &(l, p) in small {
            let a = oriented.iter().position(|&e| e == (l, p)).expect("edge present");
            rel[a * m + (a ^ 1)] = true;
        }
        Ok(SeparationSystem::from_relation(names, inv, rel)?)
    }
}

/// The edge tree set of a tree: oriented edges `(u,v)`, ordered by inclusion
/// of the side of `u`.
pub fn edge_tree_set<A: AsRef<str>, B: AsRef<str>>(edges: &[(A, B)]) -> Result<TreeSet, GeneratorError> {
    let g = TreeGraph::new(edges)?;
    Ok(TreeSet::new(g.edge_system(&[])?)?)
}

/// An edge tree set in which the given edges `(leaf, parent)` are made small,
/// i.e. `(leaf,parent) <= (parent,leaf)`.
pub fn edge_tree_set_with_small<A, B, C, D>(
    edges: &[(A, B)],
    small: &[(C, D)],
) -> Result<TreeSet, GeneratorError>
where
    A: AsRef<str>,
    B: AsRef<str>,
    C: AsRef<str>,
    D: AsRef<str>,
{
    let g = TreeGraph::new(edges)?;
    let mut pairs = Vec::new();
    for (l, p) in small {
        let name = edge_name(l.as_ref(), p.as_ref());
        let li = g.labels.iter().position(|x| x == l.as_ref());
        let pi = g.labels.iter().position(|x| x == p.as_ref());
        match (li, pi) {
            (Some(li), Some(pi)) if g.adj[li] == vec![pi] => pairs.push((li, pi)),
            _ => return Err(GeneratorError::NotALeafEdge(name)),
        }
    }
    Ok(TreeSet::new(g.edge_system(&pairs)?)?)
}

pub fn format_real(x: f64) -> String {
    format!("{x}")
}

/// The chain tree set on `{x, -x : x ∈ X}`: `x <= y` iff `x <= y` as reals
/// and both have the same sign.
pub fn chain_tree_set(xs: &[f64]) -> Result<TreeSet, GeneratorError> {
    if xs.is_empty() {
        return Err(GeneratorError::EmptyInput);
    }
    if let Some(&bad) = xs.iter().find(|&&x| x.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater)) {
        return Err(GeneratorError::NonPositiveInput(bad));
    }
    let mut vals: Vec<f64> = xs.to_vec();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals.dedup();
    let signed: Vec<f64> = vals.iter().flat_map(|&x| [x, -x]).collect();
    let names: Vec<String> = signed.iter().map(|&x| format_real(x)).collect();
    let m = signed.len();
    let inv: Vec<usize> = (0..m).map(|i| i ^ 1).collect();
    let mut rel = vec![false; m * m];
    for a in 0..m {
        for b in 0..m {
            rel[a * m + b] = (signed[a] > 0.0) == (signed[b] > 0.0) && signed[a] <= signed[b];
        }
    }
    Ok(TreeSet::new(SeparationSystem::from_relation(names, inv, rel)?)?)
}

/// The `n`-th truncation of the tree set `B`: elements `m`, `s1..sn`,
/// `t1..tn` and their inverses, with exactly the relations of the five
/// defining clauses.
pub fn example_b(n: usize) -> Result<TreeSet, GeneratorError> {
    let mut names = vec!["m".to_string(), "m*".to_string()];
    for i in 1..=n {
        names.extend([format!("s{i}"), format!("s{i}*"), format!("t{i}"), format!("t{i}*")]);
    }
    let id: BTreeMap<String, usize> = names.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
    let e = |s: String| id[&s];
    let (s, sb) = (|i: usize| format!("s{i}"), |i: usize| format!("s{i}*"));
    let (t, tb) = (|i: usize| format!("t{i}"), |i: usize| format!("t{i}*"));
    let mut gens: BTreeSet<(usize, usize)> = BTreeSet::new();
    for i in 1..=n {
        // (1)
        gens.insert((e(s(i)), e("m".into())));
        gens.insert((e(t(i)), e("m".into())));
        gens.insert((e("m*".into()), e(sb(i))));
        gens.insert((e("m*".into()), e(tb(i))));
        for j in 1..=n {
            // (2)
            if i <= j {
                gens.insert((e(s(i)), e(s(j))));
                gens.insert((e(sb(j)), e(sb(i))));
            }
            // (3)
            if i != j {
                gens.insert((e(t(i)), e(tb(j))));
            }
            // (4)
            if i <= j {
                gens.insert((e(s(i)), e(tb(j))));
                gens.insert((e(t(j)), e(sb(i))));
            }
            // (5)
            if i >= j && i != j {
                gens.insert((e(t(j)), e(s(i))));
                gens.insert((e(sb(i)), e(tb(j))));
            }
        }
    }
    let m = names.len();
    let holds = |a: usize, b: usize| a == b || gens.contains(&(a, b));
    for a in 0..m {
        for b in 0..m {
            if !holds(a, b) {
                continue;
            }
            for c in 0..m {
                if holds(b, c) && !holds(a, c) {
                    return Err(GeneratorError::ClosureGuard(names[a].clone(), names[c].clone()));
                }
            }
        }
    }
    let inv: Vec<usize> = (0..m).map(|i| i ^ 1).collect();
    let mut rel = vec![false; m * m];
    for &(a, b) in &gens {
        rel[a * m + b] = true;
    }
    Ok(TreeSet::new(SeparationSystem::from_relation(names, inv, rel)?)?)
}

pub const EX_NON_TRANS_EDGES: [(&str, &str); 5] = [("1", "2"), ("2", "3"), ("3", "4"), ("4", "5"), ("3", "6")];
pub const EX_TRIVIAL_EDGES: [(&str, &str); 7] = [
    ("1", "2"),
    ("2", "3"),
    ("3", "4"),
    ("2", "5"),
    ("5", "6"),
    ("3", "7"),
    ("7", "8"),
];

/// The non-transitive quotient example: a path 1-2-3-4-5 with a pendant 3-6.
pub fn ex_non_trans() -> TreeSet {
    edge_tree_set(&EX_NON_TRANS_EDGES).expect("fixture is a tree")
}

/// The trivial-class quotient example on eight vertices.
pub fn ex_trivial() -> TreeSet {
    edge_tree_set(&EX_TRIVIAL_EDGES).expect("fixture is a tree")
}

pub fn path(n: usize) -> Result<TreeSet, GeneratorError> {
    let edges: Vec<(String, String)> = (1..n).map(|i| (i.to_string(), (i + 1).to_string())).collect();
    edge_tree_set(&edges)
}

/// The star `K_{1,n}` with centre `0` and leaves `1..=n`.
pub fn star(n: usize) -> Result<TreeSet, GeneratorError> {
    let edges: Vec<(String, String)> = (1..=n).map(|i| ("0".to_string(), i.to_string())).collect();
    edge_tree_set(&edges)
}

/// A limit property a truncation family loses, as recorded for the family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LimitAnnotation {
    pub property: Property,
    pub note: String,
}

/// Designated witnesses a family carries level by level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyWitness {
    /// A chain per level, growing with the level.
    Chain(Vec<Vec<usize>>),
    /// A splitting star per level.
    Star(Vec<Vec<usize>>),
    /// A pair of separations per level, given by one orientation each.
    Pair(Vec<(usize, usize)>),
    None,
}

/// Finite truncations of an infinite tree set, linked by embeddings.
#[derive(Debug, Clone)]
pub struct TruncationFamily {
    pub name: String,
    /// Parameter value of each level, e.g. the number of leaves.
    pub params: Vec<usize>,
    pub levels: Vec<TreeSet>,
    /// `embeddings[i]` maps `levels[i]` into `levels[i + 1]`.
    pub embeddings: Vec<SystemMap>,
    pub annotations: Vec<LimitAnnotation>,
    pub witness: FamilyWitness,
}

impl TruncationFamily {
    fn assemble(
        name: &str,
        params: Vec<usize>,
        levels: Vec<TreeSet>,
        annotations: Vec<LimitAnnotation>,
        witness: FamilyWitness,
    ) -> Result<Self, GeneratorError> {
        let mut embeddings = Vec::new();
        for i in 0..levels.len().saturating_sub(1) {
            let (a, b) = (&levels[i], &levels[i + 1]);
            let pairs: Vec<(String, String)> =
                a.names().iter().map(|n| (n.clone(), n.clone())).collect();
            let map = SystemMap::from_names(a.arc(), b.arc(), &pairs)
                .map_err(|_| GeneratorError::BadEmbedding(i))?;
            let strict = a
                .elements()
                .all(|x| a.elements().all(|y| !a.lneq(x, y) || b.lneq(map.apply(x), map.apply(y))));
            if !map.is_homomorphism() || !map.is_injective() || !strict {
                return Err(GeneratorError::BadEmbedding(i));
            }
            embeddings.push(map);
        }
        Ok(TruncationFamily { name: name.to_string(), params, levels, embeddings, annotations, witness })
    }
}

/// Paths `0-1-...-n` truncating a one-way infinite ray.
pub fn ray_family(levels: usize) -> Result<TruncationFamily, GeneratorError> {
    let mut sets = Vec::new();
    let mut chains = Vec::new();
    for n in 1..=levels {
        let edges: Vec<(String, String)> = (0..n).map(|i| (i.to_string(), (i + 1).to_string())).collect();
        let ts = edge_tree_set(&edges)?;
        let chain = (0..n)
            .map(|i| ts.id(&edge_name(&i.to_string(), &(i + 1).to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        chains.push(chain);
        sets.push(ts);
    }
    TruncationFamily::assemble(
        "ray",
        (1..=levels).collect(),
        sets,
        vec![LimitAnnotation {
            property: Property::ChainComplete,
            note: "the forward-edge chain of the ray has no supremum; regular, splittable and star-finite otherwise".into(),
        }],
        FamilyWitness::Chain(chains),
    )
}

/// Dyadic samples of `[1,2]` (and their negatives in `[-2,-1]`) with
/// `2^n + 1` points at level `n`.
pub fn interval_family(levels: usize) -> Result<TruncationFamily, GeneratorError> {
    let mut sets = Vec::new();
    for n in 1..=levels {
        let k = 1usize << n;
        let xs: Vec<f64> = (0..=k).map(|i| 1.0 + i as f64 / k as f64).collect();
        sets.push(chain_tree_set(&xs)?);
    }
    TruncationFamily::assemble(
        "interval",
        (1..=levels).map(|n| (1 << n) + 1).collect(),
        sets,
        vec![LimitAnnotation {
            property: Property::Splittable,
            note: "splittability lost only in the limit: the full interval tree set has only the splitting stars {-1} and {2}".into(),
        }],
        FamilyWitness::None,
    )
}

/// Stars `K_{1,n}` for `n = 3..=max_leaves`.
pub fn infinite_star_family(max_leaves: usize) -> Result<TruncationFamily, GeneratorError> {
    let mut sets = Vec::new();
    let mut stars = Vec::new();
    for n in 3..=max_leaves.max(3) {
        let ts = star(n)?;
        let centre = (1..=n)
            .map(|i| ts.id(&edge_name(&i.to_string(), "0")))
            .collect::<Result<Vec<_>, _>>()?;
        stars.push(centre);
        sets.push(ts);
    }
    TruncationFamily::assemble(
        "infinite_star",
        (3..=max_leaves.max(3)).collect(),
        sets,
        vec![LimitAnnotation {
            property: Property::StarFinite,
            note: "the limit contains a regular infinite splitting star".into(),
        }],
        FamilyWitness::Star(stars),
    )
}

/// Truncations `B(1..=levels)` of the tree set `B` with infinite `C(s1,m)`.
pub fn example_b_family(levels: usize) -> Result<TruncationFamily, GeneratorError> {
    let mut sets = Vec::new();
    let mut pairs = Vec::new();
    for n in 1..=levels {
        let ts = example_b(n)?;
        pairs.push((ts.id("s1")?, ts.id("m")?));
        sets.push(ts);
    }
    TruncationFamily::assemble(
        "example_B",
        (1..=levels).collect(),
        sets,
        vec![LimitAnnotation {
            property: Property::BranchBounded,
            note: "C(s1,m) is infinite in the limit although s1 and m are regular".into(),
        }],
        FamilyWitness::Pair(pairs),
    )
}

/// A named fixture: a single tree set or a truncation family.
#[derive(Debug, Clone)]
pub enum Fixture {
    TreeSet(TreeSet),
    Family(TruncationFamily),
}

pub const DEFAULT_RAY_LEVELS: usize = 20;
pub const DEFAULT_INTERVAL_LEVELS: usize = 5;
pub const DEFAULT_STAR_LEAVES: usize = 8;
pub const DEFAULT_B_LEVELS: usize = 8;

/// Looks up a fixture by name. Besides the worked examples this accepts
/// `path<N>`, `k1<N>` (the star `K_{1,N}`), `chain<N>` and `example_B<N>`.
pub fn paper_fixture(name: &str) -> Result<Fixture, GeneratorError> {
    let unknown = || GeneratorError::UnknownFixture(name.to_string());
    let number = |prefix: &str| -> Option<usize> {
        name.strip_prefix(prefix).filter(|r| !r.is_empty()).and_then(|r| r.parse().ok())
    };
    Ok(match name {
        "ex_non_trans" => Fixture::TreeSet(ex_non_trans()),
        "ex_trivial" => Fixture::TreeSet(ex_trivial()),
        "ray" => Fixture::Family(ray_family(DEFAULT_RAY_LEVELS)?),
        "interval" => Fixture::Family(interval_family(DEFAULT_INTERVAL_LEVELS)?),
        "infinite_star" => Fixture::Family(infinite_star_family(DEFAULT_STAR_LEAVES)?),
        "example_B" => Fixture::Family(example_b_family(DEFAULT_B_LEVELS)?),
        _ => {
            if let Some(n) = number("path") {
                Fixture::TreeSet(path(n)?)
            } else if let Some(n) = number("k1") {
                Fixture::TreeSet(star(n)?)
            } else if let Some(n) = number("chain") {
                let xs: Vec<f64> = (1..=n).map(|i| i as f64).collect();
                Fixture::TreeSet(chain_tree_set(&xs)?)
            } else if let Some(n) = number("example_B") {
                Fixture::TreeSet(example_b(n)?)
            } else {
                return Err(unknown());
            }
        }
    })
}

/// Edge list of a tree on vertices `1..=n`.
pub type Edges = Vec<(usize, usize)>;

pub fn labelled(edges: &Edges) -> Vec<(String, String)> {
    edges.iter().map(|&(u, v)| (u.to_string(), v.to_string())).collect()
}

/// A uniformly random labelled tree on `1..=n` from a random Prüfer code.
pub fn random_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Edges {
    match n {
        0 | 1 => Vec::new(),
        2 => vec![(1, 2)],
        _ => {
            let code: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(1..=n)).collect();
            decode_prufer(n, &code)
        }
    }
}

fn decode_prufer(n: usize, code: &[usize]) -> Edges {
    let mut degree = vec![1usize; n + 1];
    for &c in code {
        degree[c] += 1;
    }
    let mut edges = Vec::new();
    for &c in code {
        let leaf = (1..=n).find(|&v| degree[v] == 1).expect("a leaf exists");
        edges.push((leaf.min(c), leaf.max(c)));
        degree[leaf] -= 1;
        degree[c] -= 1;
    }
    let rest: Vec<usize> = (1..=n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges.sort_unstable();
    edges
}

fn rooted_code(adj: &[Vec<usize>], v: usize, parent: usize) -> String {
    let mut kids: Vec<String> = adj[v]
        .iter()
        .filter(|&&w| w != parent)
        .map(|&w| rooted_code(adj, w, v))
        .collect();
    kids.sort();
    format!("({})", kids.concat())
}

fn tree_code(n: usize, edges: &Edges) -> String {
    let mut adj = vec![Vec::new(); n + 1];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    (1..=n).map(|r| rooted_code(&adj, r, 0)).min().unwrap_or_default()
}

/// All trees on `n` vertices up to isomorphism, labelled `1..=n`.
pub fn free_trees(n: usize) -> Vec<Edges> {
    let mut current: Vec<Edges> = vec![Vec::new()];
    for size in 2..=n {
        let mut seen = BTreeSet::new();
        let mut next = Vec::new();
        for t in &current {
            for v in 1..size {
                let mut e = t.clone();
                e.push((v, size));
                if seen.insert(tree_code(size, &e)) {
                    next.push(e);
                }
            }
        }
        current = next;
    }
    if n == 0 {
        Vec::new()
    } else {
        current
    }
}

fn leaf_edges(edges: &Edges) -> Vec<(usize, usize)> {
    let mut deg: BTreeMap<usize, usize> = BTreeMap::new();
    for &(u, v) in edges {
        *deg.entry(u).or_default() += 1;
        *deg.entry(v).or_default() += 1;
    }
    let mut out = Vec::new();
    for &(u, v) in edges {
        if deg[&u] == 1 {
            out.push((u, v));
        }
        if deg[&v] == 1 {
            out.push((v, u));
        }
    }
    out
}

/// A labelled host tree set for exhaustive suites.
#[derive(Debug, Clone)]
pub struct Host {
    pub label: String,
    pub tree_set: TreeSet,
}

/// Finite tree sets with at most `max_elements` elements: edge tree sets of
/// all trees up to isomorphism, each with every admissible choice of small
/// leaf edges, followed by the truncations `B(n)` that fit.
pub fn tree_set_hosts(max_elements: usize) -> Vec<Host> {
    let mut out = Vec::new();
    for nodes in 2..=max_elements / 2 + 1 {
        for edges in free_trees(nodes) {
            let leaves = leaf_edges(&edges);
            let named = labelled(&edges);
            for mask in 0u32..(1 << leaves.len()) {
                let chosen: Vec<(usize, usize)> = leaves
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, &e)| e)
                    .collect();
                let clash = chosen.iter().any(|&(a, b)| chosen.contains(&(b, a)));
                if clash {
                    continue;
                }
                let small: Vec<(String, String)> =
                    chosen.iter().map(|&(a, b)| (a.to_string(), b.to_string())).collect();
                let ts = edge_tree_set_with_small(&named, &small).expect("valid leaf variant");
                let edge_list: Vec<String> = edges.iter().map(|(u, v)| format!("{u}-{v}")).collect();
                let mut label = format!("tree[{}]", edge_list.join(","));
                if !small.is_empty() {
                    let s: Vec<String> = small.iter().map(|(a, b)| edge_name(a, b)).collect();
                    label.push_str(&format!(" small[{}]", s.join(",")));
                }
                out.push(Host { label, tree_set: ts });
            }
        }
    }
    for n in 1.. {
        if 2 + 4 * n > max_elements {
            break;
        }
        out.push(Host { label: format!("example_B{n}"), tree_set: example_b(n).expect("B(n) is a tree set") });
    }
    out
}

/// A relabelling-invariant code of a system: the lexicographically least
/// order matrix over all orderings and orientation flips of its separations.
pub fn canonical_code(sys: &SeparationSystem) -> Vec<bool> {
    let seps = sys.separations();
    let k = seps.len();
    let mut best: Option<Vec<bool>> = None;
    let mut perm: Vec<usize> = (0..k).collect();
    loop {
        for flips in 0u32..(1 << k) {
            let order: Vec<usize> = perm
                .iter()
                .enumerate()
                .flat_map(|(pos, &i)| {
                    let x = seps[i];
                    let x = if flips & (1 << pos) != 0 { sys.inv(x) } else { x };
                    [x, sys.inv(x)]
                })
                .collect();
            let code: Vec<bool> = order
                .iter()
                .flat_map(|&a| order.iter().map(move |&b| (a, b)))
                .map(|(a, b)| sys.le(a, b))
                .collect();
            if best.as_ref().is_none_or(|b| code < *b) {
                best = Some(code);
            }
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    best.unwrap_or_default()
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Every tree set on `k` separations up to isomorphism, by brute force over
/// the relation type of each pair of separations and the smallness of each
/// separation. Intended for `k <= 4`.
pub fn exhaustive_tree_sets(k: usize) -> Vec<TreeSet> {
    let m = 2 * k;
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    let names: Vec<String> = (0..k).flat_map(|i| [format!("x{i}"), format!("x{i}*")]).collect();
    let inv: Vec<usize> = (0..m).map(|i| i ^ 1).collect();
    let total_types = 4usize.pow(pairs.len() as u32);
    let total_small = 3usize.pow(k as u32);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for code in 0..total_types {
        for small in 0..total_small {
            let mut rel = vec![false; m * m];
            let mut set = |a: usize, b: usize| {
                rel[a * m + b] = true;
                rel[(b ^ 1) * m + (a ^ 1)] = true;
            };
            let mut c = code;
            for &(i, j) in &pairs {
                let t = c % 4;
                c /= 4;
                let a = 2 * i + (t >> 1);
                let b = 2 * j + (t & 1);
                set(a, b);
            }
            let mut s = small;
            for i in 0..k {
                match s % 3 {
                    1 => set(2 * i, 2 * i + 1),
                    2 => set(2 * i + 1, 2 * i),
                    _ => {}
                }
                s /= 3;
            }
            let Ok(sys) = SeparationSystem::from_relation(names.clone(), inv.clone(), rel) else {
                continue;
            };
            let Ok(ts) = TreeSet::new(sys) else { continue };
            if seen.insert(canonical_code(&ts)) {
                out.push(ts);
            }
        }
    }
    out
}

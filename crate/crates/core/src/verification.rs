//! Verifying sets: exact minimum vertex cover of the covered forest and
//! bounded-size batches built from a separating labelling.

use crate::error::{Error, Result};
use crate::graph::{Dag, NodeSet};
use crate::mec::{covered_edges, CoveredForest};
use crate::oracle::InterventionSet;

const INF: usize = usize::MAX / 4;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Force {
    Free,
    In,
    Out,
}

/// Rooted traversal of each tree in the forest, roots at the smallest node.
struct Rooted {
    order: Vec<usize>,
    children: Vec<Vec<usize>>,
    roots: Vec<usize>,
}

fn root_forest(f: &CoveredForest) -> Rooted {
    let adj = f.adjacency();
    let n = f.node_count();
    let mut seen = vec![false; n];
    let mut order = Vec::new();
    let mut children = vec![Vec::new(); n];
    let mut roots = Vec::new();
    for s in 0..n {
        if seen[s] || adj[s].is_empty() {
            continue;
        }
        roots.push(s);
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            order.push(u);
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    children[u].push(w);
                    stack.push(w);
                }
            }
        }
    }
    Rooted { order, children, roots }
}

impl Rooted {
    /// Min cover weight under forced memberships, per node `(out, in)`.
    fn dp(&self, force: &[Force], weight: &[usize]) -> Vec<(usize, usize)> {
        let mut dp = vec![(0, 0); force.len()];
        for &v in self.order.iter().rev() {
            let mut out = 0usize;
            let mut inn = weight[v];
            for &c in &self.children[v] {
                let (c0, c1) = dp[c];
                out = out.saturating_add(c1);
                inn = inn.saturating_add(c0.min(c1));
            }
            match force[v] {
                Force::In => out = INF,
                Force::Out => inn = INF,
                Force::Free => {}
            }
            dp[v] = (out.min(INF), inn.min(INF));
        }
        dp
    }

    fn optimum(&self, force: &[Force], weight: &[usize]) -> usize {
        let dp = self.dp(force, weight);
        self.roots
            .iter()
            .fold(0usize, |acc, &r| acc.saturating_add(dp[r].0.min(dp[r].1)))
            .min(INF)
    }

    fn nodes_sorted(&self) -> Vec<usize> {
        let mut v = self.order.clone();
        v.sort_unstable();
        v
    }
}

/// Exact minimum vertex cover of a forest.
///
/// Ties among minimum covers go first to the largest total forest degree, then
/// to the lexicographically smallest node set. On a path `a - b - c - d` this
/// picks the two inner nodes.
pub fn min_vertex_cover_forest(f: &CoveredForest) -> NodeSet {
    let t = root_forest(f);
    let adj = f.adjacency();
    let big = 2 * f.len() + 1;
    let weight: Vec<usize> = adj.iter().map(|a| big - a.len()).collect();
    let mut force = vec![Force::Free; f.node_count()];
    let best = t.optimum(&force, &weight);
    let mut cover = NodeSet::new();
    for v in t.nodes_sorted() {
        force[v] = Force::In;
        if t.optimum(&force, &weight) == best {
            cover.insert(v);
        } else {
            force[v] = Force::Out;
        }
    }
    debug_assert!(f.is_covered_by(&cover));
    cover
}

/// Number of minimum vertex covers of a forest, saturating at `u64::MAX`.
pub fn count_min_covers(f: &CoveredForest) -> u64 {
    let t = root_forest(f);
    // per node: (size, count) with v out / v in
    let mut dp = vec![((0usize, 1u64), (1usize, 1u64)); f.node_count()];
    let combine = |a: (usize, u64), b: (usize, u64)| -> (usize, u64) {
        match a.0.cmp(&b.0) {
            std::cmp::Ordering::Less => a,
            std::cmp::Ordering::Greater => b,
            std::cmp::Ordering::Equal => (a.0, a.1.saturating_add(b.1)),
        }
    };
    for &v in t.order.iter().rev() {
        let mut out = (0usize, 1u64);
        let mut inn = (1usize, 1u64);
        for &c in &t.children[v] {
            let (c0, c1) = dp[c];
            out = (out.0 + c1.0, out.1.saturating_mul(c1.1));
            let m = combine(c0, c1);
            inn = (inn.0 + m.0, inn.1.saturating_mul(m.1));
        }
        dp[v] = (out, inn);
    }
    t.roots
        .iter()
        .fold(1u64, |acc, &r| acc.saturating_mul(combine(dp[r].0, dp[r].1).1))
}

/// All minimum vertex covers in lexicographic order; errors past `cap`.
pub fn all_min_covers(f: &CoveredForest, cap: usize) -> Result<Vec<NodeSet>> {
    let total = count_min_covers(f);
    if total > cap as u64 {
        return Err(Error::CapExceeded { cap, found: usize::try_from(total).unwrap_or(usize::MAX) });
    }
    let t = root_forest(f);
    let nodes = t.nodes_sorted();
    let unit = vec![1; f.node_count()];
    let mut force = vec![Force::Free; f.node_count()];
    let best = t.optimum(&force, &unit);
    let mut out = Vec::new();
    branch(&t, &nodes, 0, &mut force, &unit, best, &mut out);
    Ok(out)
}

fn branch(
    t: &Rooted,
    nodes: &[usize],
    i: usize,
    force: &mut [Force],
    unit: &[usize],
    best: usize,
    out: &mut Vec<NodeSet>,
) {
    if i == nodes.len() {
        out.push(nodes.iter().copied().filter(|&v| force[v] == Force::In).collect());
        return;
    }
    let v = nodes[i];
    for choice in [Force::In, Force::Out] {
        force[v] = choice;
        if t.optimum(force, unit) == best {
            branch(t, nodes, i + 1, force, unit, best, out);
        }
    }
    force[v] = Force::Free;
}

/// Smallest atomic verifying set: the minimum cover of the covered edges.
pub fn verifying_set_atomic(g: &Dag) -> NodeSet {
    min_vertex_cover_forest(&covered_edges(g))
}

pub fn nu1(g: &Dag) -> usize {
    verifying_set_atomic(g).len()
}

/// Labels of `n` items: `ℓ` digits each, letters drawn from `1..=a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelTable {
    pub n: usize,
    pub k: usize,
    pub a: usize,
    pub ell: usize,
    pub labels: Vec<Vec<usize>>,
}

impl LabelTable {
    /// Items whose digit `x` equals `y`.
    pub fn class(&self, x: usize, y: usize) -> Vec<usize> {
        (0..self.n).filter(|&i| self.labels[i][x] == y).collect()
    }
}

/// Distinct labels with every letter used at most `⌈n/a⌉` times per digit.
///
/// Digit `j` of item `i` is `(q_j + q_0 + .. + q_{j-1}) mod a`, shifted into
/// `1..=a`, where `q` are the base-`a` digits of `i`. The map from `q` is
/// triangular and hence injective.
pub fn separating_labels(n: usize, k: usize, a: usize) -> Result<LabelTable> {
    if n == 0 || k == 0 || 2 * k > n.max(2) || a < 2 {
        return Err(Error::InvalidParameter(format!("separating_labels(n={n}, k={k}, a={a})")));
    }
    let mut ell = 0;
    let mut reach = 1usize;
    while reach < n {
        reach = reach.saturating_mul(a);
        ell += 1;
    }
    let labels = (0..n)
        .map(|i| {
            let mut rest = i;
            let mut prefix = 0;
            (0..ell)
                .map(|_| {
                    let q = rest % a;
                    rest /= a;
                    let d = (q + prefix) % a;
                    prefix += q;
                    d + 1
                })
                .collect()
        })
        .collect();
    Ok(LabelTable { n, k, a, ell, labels })
}

/// Intervention batch with sets of size at most `k` that separates every pair of
/// `nodes` and every node of `nodes` from every node outside it.
pub fn labelled_batches(nodes: &NodeSet, k: usize) -> InterventionSet {
    let c = nodes.len();
    if k <= 1 || c <= 1 {
        return InterventionSet::atomic(nodes);
    }
    let kp = k.min(c / 2).max(1);
    let a = c.div_ceil(kp).max(2);
    let table = separating_labels(c, kp, a).expect("parameters clamped into range");
    let members: Vec<usize> = nodes.iter().copied().collect();
    let mut out = InterventionSet::new(k);
    for x in 0..table.ell {
        for y in 1..=a {
            let set: NodeSet = table.class(x, y).into_iter().map(|i| members[i]).collect();
            if !set.is_empty() {
                out.push(set).expect("class sizes are at most ⌈c/a⌉ ≤ k");
            }
        }
    }
    out
}

/// Verifying set with interventions of size at most `k`.
pub fn verifying_set_bounded(g: &Dag, k: usize) -> InterventionSet {
    labelled_batches(&verifying_set_atomic(g), k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::NO_PAIRS;
    use crate::oracle::Oracle;

    #[test]
    fn mvc_fixtures() {
        let (g1, g2) = fixtures::tight();
        assert_eq!(g1.names_of(&verifying_set_atomic(&g1)), vec!["b", "c"]);
        assert_eq!(g2.names_of(&verifying_set_atomic(&g2)), vec!["c"]);
        assert_eq!(nu1(&g2), 1);
        let f = fixtures::six_node_truth();
        assert_eq!(f.names_of(&verifying_set_atomic(&f)), vec!["A", "B"]);
        assert!(min_vertex_cover_forest(&CoveredForest::new(3, Default::default())).is_empty());
        assert_eq!(nu1(&fixtures::path_dag(9, 0)), 1);
        assert_eq!(nu1(&Dag::build(["x"], NO_PAIRS).unwrap()), 0);
    }

    #[test]
    fn cover_counting() {
        // covered forest of a path rooted at one end is one arc: two covers of size 1
        let p = fixtures::path_dag(5, 0);
        let f = covered_edges(&p);
        assert_eq!(count_min_covers(&f), 2);
        assert_eq!(all_min_covers(&f, 10).unwrap().len(), 2);
        let (g1, _) = fixtures::tight();
        let f = covered_edges(&g1);
        // b->a, c->b, c->d: path a-b-c-d has covers {b,c}, {a,c}, {b,d}
        assert_eq!(count_min_covers(&f), 3);
        let all = all_min_covers(&f, 10).unwrap();
        let named: Vec<Vec<String>> = all.iter().map(|c| g1.names_of(c)).collect();
        assert_eq!(named, vec![vec!["a", "c"], vec!["b", "c"], vec!["b", "d"]]);
        assert!(all_min_covers(&f, 2).is_err());
    }

    #[test]
    fn labels_small() {
        let t = separating_labels(4, 2, 2).unwrap();
        assert_eq!(t.ell, 2);
        check_table(&t);
        let t = separating_labels(2, 1, 2).unwrap();
        assert_eq!(t.ell, 1);
        assert_ne!(t.labels[0], t.labels[1]);
        let t = separating_labels(9, 3, 3).unwrap();
        assert_eq!(t.ell, 2);
        check_table(&t);
        assert!(separating_labels(4, 3, 2).is_err());
        assert!(separating_labels(4, 1, 1).is_err());
    }

    pub(crate) fn check_table(t: &LabelTable) {
        let distinct: std::collections::BTreeSet<_> = t.labels.iter().collect();
        assert_eq!(distinct.len(), t.n);
        let cap = t.n.div_ceil(t.a);
        for x in 0..t.ell {
            for y in 0..=t.a {
                assert!(t.class(x, y).len() <= cap);
            }
            assert!(t.class(x, 0).is_empty());
        }
    }

    #[test]
    fn bounded_sets() {
        assert_eq!(verifying_set_bounded(&fixtures::path_dag(4, 1), 3).len(), 1);
        let g = Dag::build(["a", "b", "c"], &[("a", "b"), ("c", "b")]).unwrap();
        assert!(verifying_set_bounded(&g, 2).is_empty());
        let p = fixtures::path_dag(6, 0);
        let b = verifying_set_bounded(&p, 5);
        assert_eq!(b.sets(), &[NodeSet::from([0])]);
    }

    #[test]
    fn bounded_cover_of_four_orients() {
        // two disjoint copies of the tight G1 have a cover of size 4
        let g = Dag::build(
            ["a", "b", "c", "d", "p", "q", "r", "s"],
            &[
                ("b", "a"), ("c", "a"), ("c", "b"), ("c", "d"),
                ("q", "p"), ("r", "p"), ("r", "q"), ("r", "s"),
            ],
        )
        .unwrap();
        assert_eq!(nu1(&g), 4);
        let b = verifying_set_bounded(&g, 2);
        assert!(b.sets().iter().all(|s| s.len() <= 2));
        let mut o = Oracle::new(g.clone());
        o.intervene(&b).unwrap();
        assert_eq!(o.learned_dag(), Some(g));
    }
}

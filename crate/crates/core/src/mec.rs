//! Markov equivalence: essential graphs, enumeration, covered edges and the
//! covered-edge transformation machinery.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::{reaches, Arc2, Dag, NodeSet, Ordering, Pdag};
use crate::meek::meek_closure;

/// Skeleton with v-structures oriented, closed under the Meek rules.
pub fn essential_graph(g: &Dag) -> Pdag {
    let mut arcs = BTreeSet::new();
    for (u, v, w) in g.v_structures() {
        arcs.insert((u, v));
        arcs.insert((w, v));
    }
    let edges: Vec<Arc2> = g.skeleton().edges().filter(|&(a, b)| !arcs.contains(&(a, b)) && !arcs.contains(&(b, a))).collect();
    let start = g.from_pairs(arcs, edges).expect("pairs come from a valid skeleton");
    meek_closure(&start).expect("a DAG is a consistent extension of its own pattern")
}

pub fn same_mec(g1: &Dag, g2: &Dag) -> Result<bool> {
    if g1.ids() != g2.ids() {
        return Err(Error::NodeSetMismatch);
    }
    Ok(g1.skeleton() == g2.skeleton() && g1.v_structures() == g2.v_structures())
}

/// Every consistent DAG extension of `e`: acyclic orientations of its undirected
/// edges that keep its arcs and create no v-structure beyond those its arcs
/// already form. Sorted by arc list.
pub fn enumerate_mec(e: &Pdag, cap: usize) -> Result<Vec<Dag>> {
    let mut allowed = BTreeSet::new();
    for v in 0..e.n() {
        let pa: Vec<usize> = e.parents(v).iter().copied().collect();
        for (i, &u) in pa.iter().enumerate() {
            for &w in &pa[i + 1..] {
                if !e.is_adjacent(u, w) {
                    allowed.insert((u, v, w));
                }
            }
        }
    }
    let edges: Vec<Arc2> = e.edges().collect();
    let mut base = e.with_arcs_only(e.arcs());
    if !base.directed_part_acyclic() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut search = Enumerator { e, allowed: &allowed, edges: &edges, cap, out: &mut out };
    search.recurse(&mut base, 0)?;
    let mut keyed: Vec<(Vec<Arc2>, Dag)> = out.into_iter().map(|d| (d.arcs().collect(), d)).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(keyed.into_iter().map(|(_, d)| d).collect())
}

struct Enumerator<'a> {
    e: &'a Pdag,
    allowed: &'a BTreeSet<(usize, usize, usize)>,
    edges: &'a [Arc2],
    cap: usize,
    out: &'a mut Vec<Dag>,
}

impl Enumerator<'_> {
    fn recurse(&mut self, g: &mut Pdag, i: usize) -> Result<()> {
        if i == self.edges.len() {
            if self.out.len() == self.cap {
                return Err(Error::CapExceeded { cap: self.cap, found: self.cap + 1 });
            }
            self.out.push(Dag::new_unchecked(g.clone()));
            return Ok(());
        }
        let (a, b) = self.edges[i];
        for (u, w) in [(a, b), (b, a)] {
            if self.admissible(g, u, w) {
                g.add_arc(u, w);
                let r = self.recurse(g, i + 1);
                g.remove_arc(u, w);
                r?;
            }
        }
        Ok(())
    }

    fn admissible(&self, g: &Pdag, u: usize, w: usize) -> bool {
        if reaches(g, w, u) {
            return false;
        }
        g.parents(w).iter().all(|&p| {
            self.e.is_adjacent(p, u) || self.allowed.contains(&(p.min(u), w, p.max(u)))
        })
    }
}

/// Covered edges of a DAG: arcs `x -> y` with `Pa(x) = Pa(y) \ {x}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoveredForest {
    n: usize,
    arcs: BTreeSet<Arc2>,
}

impl CoveredForest {
    pub fn new(n: usize, arcs: BTreeSet<Arc2>) -> CoveredForest {
        CoveredForest { n, arcs }
    }

    pub fn arcs(&self) -> &BTreeSet<Arc2> {
        &self.arcs
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn contains(&self, arc: Arc2) -> bool {
        self.arcs.contains(&arc)
    }

    /// Nodes touching at least one covered arc.
    pub fn endpoints(&self) -> NodeSet {
        self.arcs.iter().flat_map(|&(u, v)| [u, v]).collect()
    }

    /// Undirected adjacency lists of the edge-induced graph.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.arcs {
            adj[u].push(v);
            adj[v].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        adj
    }

    /// The edge-induced graph has no cycle.
    pub fn is_forest(&self) -> bool {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(u, v) in &self.arcs {
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru == rv {
                return false;
            }
            parent[ru] = rv;
        }
        true
    }

    /// No node is the head of two covered arcs.
    pub fn heads_unique(&self) -> bool {
        let mut seen = NodeSet::new();
        self.arcs.iter().all(|&(_, v)| seen.insert(v))
    }

    pub fn is_covered_by(&self, cover: &NodeSet) -> bool {
        self.arcs.iter().all(|(u, v)| cover.contains(u) || cover.contains(v))
    }
}

pub fn is_covered(g: &Dag, x: usize, y: usize) -> bool {
    if !g.has_arc(x, y) {
        return false;
    }
    let px = g.parents(x);
    let py = g.parents(y);
    py.len() == px.len() + 1 && px.iter().all(|p| py.contains(p))
}

pub fn covered_edges(g: &Dag) -> CoveredForest {
    let arcs = g.arcs().filter(|&(x, y)| is_covered(g, x, y)).collect();
    CoveredForest::new(g.n(), arcs)
}

pub fn reverse_covered_edge(g: &Dag, (x, y): Arc2) -> Result<Dag> {
    if !g.has_arc(x, y) {
        return Err(Error::MissingArc(g.name(x).to_string(), g.name(y).to_string()));
    }
    if !is_covered(g, x, y) {
        return Err(Error::NotCovered(g.name(x).to_string(), g.name(y).to_string()));
    }
    let mut p = g.as_pdag().clone();
    p.flip(x, y);
    Ok(Dag::new_unchecked(p))
}

/// Covered-edge reversals turning `gs` into `gt`. Each step takes the smallest-rank
/// node with a differing parent and reverses the arc from its highest-rank such parent.
pub fn chickering_sequence(gs: &Dag, gt: &Dag) -> Result<Vec<Arc2>> {
    if !same_mec(gs, gt)? {
        return Err(Error::NotSameMec);
    }
    let mut cur = gs.clone();
    let mut seq = Vec::new();
    loop {
        let diff: Vec<Arc2> = cur.arcs().filter(|&(u, v)| !gt.has_arc(u, v)).collect();
        if diff.is_empty() {
            return Ok(seq);
        }
        let pi = cur.topological_order();
        let y = diff.iter().map(|&(_, v)| v).min_by_key(|&v| pi.rank(v)).expect("nonempty");
        let x = diff
            .iter()
            .filter(|&&(_, v)| v == y)
            .map(|&(u, _)| u)
            .max_by_key(|&u| pi.rank(u))
            .expect("y has a differing parent");
        cur = reverse_covered_edge(&cur, (x, y))?;
        seq.push((x, y));
    }
}

/// Conditional-root-greedy maximal matching on the covered edges.
pub fn crg_matching(g: &Dag, pi: &Ordering, s: &BTreeSet<Arc2>) -> Result<BTreeSet<Arc2>> {
    if !pi.is_valid_for(g) {
        return Err(Error::InvalidOrdering);
    }
    let n = g.n();
    let mut c: BTreeSet<Arc2> = covered_edges(g).arcs;
    let mut m = BTreeSet::new();
    while !c.is_empty() {
        let x = c.iter().map(|&(u, _)| u).min_by_key(|&u| pi.rank(u)).expect("nonempty");
        let y = c
            .iter()
            .filter(|&&(u, _)| u == x)
            .map(|&(_, v)| v)
            .min_by_key(|&v| pi.rank(v) + n * n * usize::from(s.contains(&(x, v))))
            .expect("x is a tail");
        m.insert((x, y));
        c.retain(|&(u, v)| u != x && v != x && u != y && v != y);
    }
    Ok(m)
}

/// Ordering for the DAG obtained by reversing the covered arc `x -> y` of `g1`:
/// `y` takes the rank of `x`, `x` that of `u`, and `u` that of `y`, where `u` is
/// the smallest-rank direct child of `x`.
pub fn reversal_ordering(g1: &Dag, pi: &Ordering, (x, y): Arc2) -> Ordering {
    let u = g1
        .direct_children(x)
        .into_iter()
        .min_by_key(|&z| pi.rank(z))
        .unwrap_or(y);
    let mut rank = pi.ranks().to_vec();
    for v in [x, y, u] {
        rank[v] = if v == y {
            pi.rank(x)
        } else if v == x {
            pi.rank(u)
        } else {
            pi.rank(y)
        };
    }
    Ordering::from_ranks(rank).expect("permutation of ranks")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::UGraph;

    fn arc_names(g: &Pdag, arcs: impl IntoIterator<Item = Arc2>) -> BTreeSet<String> {
        arcs.into_iter().map(|a| g.arc_name(a)).collect()
    }

    fn set(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn essential_six_node() {
        let e = essential_graph(&fixtures::six_node_truth());
        assert_eq!(arc_names(&e, e.arcs()), set(&["C->E", "D->E", "D->F", "E->F"]));
        assert_eq!(e, fixtures::six_node_essential());
    }

    #[test]
    fn essential_small_cases() {
        let g = Dag::build(["a", "b"], &[("a", "b")]).unwrap();
        let e = essential_graph(&g);
        assert_eq!(e.arc_count(), 0);
        assert_eq!(e.edge_count(), 1);
        let (g1, _) = fixtures::tight();
        let e = essential_graph(&g1);
        assert_eq!(e.arc_count(), 0);
        assert_eq!(e.edge_count(), 4);
    }

    #[test]
    fn same_mec_cases() {
        let (g1, g2) = fixtures::tight();
        assert!(same_mec(&g1, &g2).unwrap());
        assert!(same_mec(&g1, &g1).unwrap());
        let chain = Dag::build(["a", "b", "c"], &[("a", "b"), ("b", "c")]).unwrap();
        let coll = Dag::build(["a", "b", "c"], &[("a", "b"), ("c", "b")]).unwrap();
        assert!(!same_mec(&chain, &coll).unwrap());
        let other = Dag::build(["a", "b", "z"], &[("a", "b")]).unwrap();
        assert_eq!(same_mec(&chain, &other), Err(Error::NodeSetMismatch));
    }

    #[test]
    fn enumerate_paths_and_edges() {
        for n in 1..=7 {
            let names: Vec<String> = (1..=n).map(|i| format!("v{i}")).collect();
            let edges: Vec<(String, String)> = names.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
            let p = UGraph::build(&names, &edges).unwrap();
            assert_eq!(enumerate_mec(&p, 1000).unwrap().len(), n);
        }
        let (g1, g2) = fixtures::tight();
        let members = enumerate_mec(&g1.skeleton(), 1000).unwrap();
        assert!(members.contains(&g1) && members.contains(&g2));
    }

    #[test]
    fn enumerate_cap() {
        let k4 = UGraph::build(
            ["a", "b", "c", "d"],
            &[("a", "b"), ("a", "c"), ("a", "d"), ("b", "c"), ("b", "d"), ("c", "d")],
        )
        .unwrap();
        assert_eq!(enumerate_mec(&k4, 24).unwrap().len(), 24);
        assert_eq!(enumerate_mec(&k4, 10), Err(Error::CapExceeded { cap: 10, found: 11 }));
    }

    #[test]
    fn covered_cases() {
        let (g1, _) = fixtures::tight();
        assert_eq!(arc_names(&g1, covered_edges(&g1).arcs().iter().copied()), set(&["b->a", "c->b", "c->d"]));
        let f = fixtures::six_node_truth();
        assert_eq!(arc_names(&f, covered_edges(&f).arcs().iter().copied()), set(&["A->B", "A->C", "B->D"]));
        let path = Dag::build(["v1", "v2", "v3", "v4"], &[("v1", "v2"), ("v2", "v3"), ("v3", "v4")]).unwrap();
        assert_eq!(arc_names(&path, covered_edges(&path).arcs().iter().copied()), set(&["v1->v2"]));
    }

    #[test]
    fn reversal_cases() {
        let (g1, g2) = fixtures::tight();
        let b = g2.index_of("b").unwrap();
        let c = g2.index_of("c").unwrap();
        assert_eq!(reverse_covered_edge(&g2, (b, c)).unwrap(), g1);
        let ab = Dag::build(["a", "b"], &[("a", "b")]).unwrap();
        let ba = Dag::build(["a", "b"], &[("b", "a")]).unwrap();
        assert_eq!(reverse_covered_edge(&ab, (0, 1)).unwrap(), ba);
        let f = fixtures::six_node_truth();
        let d = f.index_of("D").unwrap();
        let e = f.index_of("E").unwrap();
        assert!(matches!(reverse_covered_edge(&f, (d, e)), Err(Error::NotCovered(..))));
    }

    #[test]
    fn chickering_cases() {
        let (g1, g2) = fixtures::tight();
        assert!(chickering_sequence(&g1, &g1).unwrap().is_empty());
        let seq = chickering_sequence(&g2, &g1).unwrap();
        assert_eq!(arc_names(&g1, seq), set(&["b->c"]));
        let fwd = Dag::build(["v1", "v2", "v3"], &[("v1", "v2"), ("v2", "v3")]).unwrap();
        let back = Dag::build(["v1", "v2", "v3"], &[("v3", "v2"), ("v2", "v1")]).unwrap();
        assert_eq!(chickering_sequence(&fwd, &back).unwrap(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn crg_reversal_examples() {
        let (g1, pi1, s1, g2) = fixtures::reversal_example();
        let m = crg_matching(&g1, &pi1, &s1).unwrap();
        assert_eq!(arc_names(&g1, m), set(&["a->x", "y->b"]));
        let x = g1.index_of("x").unwrap();
        let y = g1.index_of("y").unwrap();
        let pi2 = reversal_ordering(&g1, &pi1, (x, y));
        let named: Vec<(String, usize)> = g2.ids().iter().enumerate().map(|(i, id)| (id.to_string(), pi2.rank(i))).collect();
        assert_eq!(
            named,
            vec![("a".into(), 1), ("b".into(), 5), ("u".into(), 4), ("x".into(), 3), ("y".into(), 2)]
        );
        let m2 = crg_matching(&g2, &pi2, &s1).unwrap();
        assert_eq!(arc_names(&g2, m2), set(&["a->y", "x->b"]));

        let (g3, pi3, s3) = fixtures::reversal_example_rootless();
        assert_eq!(arc_names(&g3, crg_matching(&g3, &pi3, &s3).unwrap()), set(&["x->y"]));

        let single = Dag::build(["a"], crate::graph::NO_PAIRS).unwrap();
        let pi = single.topological_order();
        assert!(crg_matching(&single, &pi, &BTreeSet::new()).unwrap().is_empty());
    }

    #[test]
    fn crg_rejects_invalid_ordering() {
        let g = Dag::build(["a", "b"], &[("a", "b")]).unwrap();
        let pi = Ordering::from_sequence(&[1, 0]).unwrap();
        assert_eq!(crg_matching(&g, &pi, &BTreeSet::new()), Err(Error::InvalidOrdering));
    }
}

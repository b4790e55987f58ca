//! Chordality via maximum cardinality search, clique trees, and balanced
//! clique separators.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::graph::{NodeSet, Ordering, Pdag, UGraph};

/// Induced view of a graph on a node subset, with sorted adjacency lists.
struct View {
    nodes: Vec<usize>,
    adj: Vec<Vec<usize>>,
    inside: Vec<bool>,
}

impl View {
    fn new(g: &Pdag, nodes: &NodeSet) -> View {
        let mut inside = vec![false; g.n()];
        for &v in nodes {
            inside[v] = true;
        }
        let adj = (0..g.n())
            .map(|v| {
                if inside[v] {
                    g.neighbors(v).into_iter().filter(|&w| inside[w]).collect()
                } else {
                    Vec::new()
                }
            })
            .collect();
        View { nodes: nodes.iter().copied().collect(), adj, inside }
    }

    fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Maximum cardinality search visit order, ties to the smallest node.
    fn mcs(&self) -> Vec<usize> {
        let n = self.adj.len();
        let mut weight = vec![0usize; n];
        let mut done = vec![false; n];
        // buckets keyed by weight, each a sorted set so ties go to the smallest node
        let mut buckets: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); self.nodes.len() + 1];
        buckets[0].extend(self.nodes.iter().copied());
        let mut top = 0;
        let mut order = Vec::with_capacity(self.nodes.len());
        for _ in 0..self.nodes.len() {
            while buckets[top].is_empty() {
                top -= 1;
            }
            let v = buckets[top].pop_first().expect("nonempty bucket");
            done[v] = true;
            order.push(v);
            for &w in &self.adj[v] {
                if !done[w] {
                    buckets[weight[w]].remove(&w);
                    weight[w] += 1;
                    buckets[weight[w]].insert(w);
                    top = top.max(weight[w]);
                }
            }
        }
        order
    }

    /// Earlier-visited neighbours of each node under `order`.
    fn earlier(&self, order: &[usize]) -> Vec<Vec<usize>> {
        let mut pos = vec![usize::MAX; self.adj.len()];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let mut out = vec![Vec::new(); self.adj.len()];
        for &v in order {
            out[v] = self.adj[v].iter().copied().filter(|&w| pos[w] < pos[v]).collect();
        }
        out
    }

    /// First pair of non-adjacent earlier neighbours, if the order is not a reversed PEO.
    fn violation(&self, order: &[usize]) -> Option<(usize, usize, usize)> {
        let earlier = self.earlier(order);
        for &v in order {
            let e = &earlier[v];
            for (i, &x) in e.iter().enumerate() {
                for &y in &e[i + 1..] {
                    if !self.adjacent(x, y) {
                        return Some((v, x, y));
                    }
                }
            }
        }
        None
    }

    /// A chordless cycle of length at least four; the graph must be non-chordal.
    fn chordless_cycle(&self) -> Vec<usize> {
        for &v in &self.nodes {
            let nb = &self.adj[v];
            for (i, &x) in nb.iter().enumerate() {
                for &y in &nb[i + 1..] {
                    if self.adjacent(x, y) {
                        continue;
                    }
                    let mut blocked = vec![false; self.adj.len()];
                    blocked[v] = true;
                    for &w in nb {
                        blocked[w] = w != x && w != y;
                    }
                    if let Some(path) = self.shortest_path(x, y, &blocked) {
                        let mut cycle = vec![v];
                        cycle.extend(path);
                        return cycle;
                    }
                }
            }
        }
        unreachable!("a non-chordal graph has a chordless cycle")
    }

    fn shortest_path(&self, from: usize, to: usize, blocked: &[bool]) -> Option<Vec<usize>> {
        let mut prev = vec![usize::MAX; self.adj.len()];
        prev[from] = from;
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            if u == to {
                let mut path = vec![to];
                let mut cur = to;
                while cur != from {
                    cur = prev[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for &w in &self.adj[u] {
                if !blocked[w] && prev[w] == usize::MAX {
                    prev[w] = u;
                    queue.push_back(w);
                }
            }
        }
        None
    }

    fn maximal_cliques(&self, order: &[usize]) -> Vec<NodeSet> {
        let earlier = self.earlier(order);
        let mut cands: Vec<NodeSet> = order
            .iter()
            .map(|&v| earlier[v].iter().copied().chain([v]).collect())
            .collect();
        cands.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        let mut out: Vec<NodeSet> = Vec::new();
        for c in cands {
            if !out.iter().any(|k| c.is_subset(k)) {
                out.push(c);
            }
        }
        out.sort();
        out
    }

    /// Sizes of the connected components left after deleting `removed`.
    fn component_sizes(&self, removed: &NodeSet) -> Vec<usize> {
        let mut seen = vec![false; self.adj.len()];
        for &r in removed {
            seen[r] = true;
        }
        let mut sizes = Vec::new();
        for &s in &self.nodes {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut stack = vec![s];
            let mut size = 0;
            while let Some(u) = stack.pop() {
                size += 1;
                for &w in &self.adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            sizes.push(size);
        }
        sizes
    }

    fn is_connected(&self) -> bool {
        self.component_sizes(&NodeSet::new()).len() <= 1
    }
}

fn not_chordal(g: &Pdag, view: &View) -> Error {
    let cycle = view.chordless_cycle();
    Error::NotChordal(g.names_of(&cycle))
}

/// Maximum cardinality search order (rank 1 = first visited), confirmed to be a
/// reversed perfect elimination ordering; otherwise a chordless-cycle error.
pub fn peo_mcs(g: &UGraph) -> Result<Ordering> {
    let view = View::new(g, &g.all_nodes());
    let order = view.mcs();
    if view.violation(&order).is_some() {
        return Err(not_chordal(g, &view));
    }
    Ordering::from_sequence(&order)
}

/// Whether the subgraph of `g` induced on `nodes` (all adjacencies, directions ignored) is chordal.
pub fn is_chordal_on(g: &Pdag, nodes: &NodeSet) -> bool {
    let view = View::new(g, nodes);
    view.violation(&view.mcs()).is_none()
}

pub fn is_chordal(g: &UGraph) -> bool {
    is_chordal_on(g, &g.all_nodes())
}

/// Every chain component of `g` induces a chordal graph on its undirected edges.
pub fn chain_components_chordal(g: &Pdag) -> bool {
    let und = undirected_part(g);
    g.chain_components().iter().all(|c| c.len() < 4 || is_chordal_on(&und, c))
}

fn undirected_part(g: &Pdag) -> Pdag {
    g.from_pairs(std::iter::empty(), g.edges()).expect("edges of a valid graph")
}

/// MCS visit order restricted to `nodes`.
pub fn mcs_order_on(g: &Pdag, nodes: &NodeSet) -> Vec<usize> {
    View::new(g, nodes).mcs()
}

/// Maximal cliques as nodes of a tree with the running-intersection property.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueTree {
    pub cliques: Vec<NodeSet>,
    /// Tree edges as index pairs into `cliques`.
    pub edges: Vec<(usize, usize)>,
}

impl CliqueTree {
    /// For every node, the cliques containing it induce a connected subtree.
    pub fn has_running_intersection(&self) -> bool {
        let nodes: NodeSet = self.cliques.iter().flatten().copied().collect();
        nodes.iter().all(|v| {
            let holding: Vec<usize> = (0..self.cliques.len()).filter(|&i| self.cliques[i].contains(v)).collect();
            let tree_edges = self
                .edges
                .iter()
                .filter(|(a, b)| holding.contains(a) && holding.contains(b))
                .count();
            tree_edges + 1 == holding.len()
        })
    }
}

/// Clique tree of a connected chordal graph: a maximum-weight spanning tree over
/// maximal cliques weighted by intersection size.
pub fn clique_tree(g: &UGraph) -> Result<CliqueTree> {
    let view = View::new(g, &g.all_nodes());
    let order = view.mcs();
    if view.violation(&order).is_some() {
        return Err(not_chordal(g, &view));
    }
    let cliques = view.maximal_cliques(&order);
    let mut pairs = Vec::new();
    for i in 0..cliques.len() {
        for j in i + 1..cliques.len() {
            let w = cliques[i].intersection(&cliques[j]).count();
            if w > 0 {
                pairs.push((w, i, j));
            }
        }
    }
    pairs.sort_by(|a, b| b.0.cmp(&a.0).then((a.1, a.2).cmp(&(b.1, b.2))));
    let mut parent: Vec<usize> = (0..cliques.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut edges = Vec::new();
    for (_, i, j) in pairs {
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        if a != b {
            parent[a] = b;
            edges.push((i, j));
        }
    }
    Ok(CliqueTree { cliques, edges })
}

/// Clique whose removal leaves components of at most `⌈|V|/2⌉` nodes.
pub fn half_clique_separator(g: &UGraph) -> Result<NodeSet> {
    separator_on(g, &g.all_nodes())
}

/// [`half_clique_separator`] on the subgraph induced by `nodes`.
///
/// Every subset of every maximal clique is a candidate (greedy shrinking for
/// cliques above 10 nodes). Candidates of size at most `max(1, p - 1)` are
/// preferred, `p` being the largest clique size; among valid candidates the
/// smallest largest-remaining-component wins, then the smaller set, then the
/// lexicographically smaller set.
pub fn separator_on(g: &Pdag, nodes: &NodeSet) -> Result<NodeSet> {
    if nodes.len() < 2 {
        return Err(Error::TooFewNodes { needed: 2, got: nodes.len() });
    }
    let view = View::new(g, nodes);
    if !view.is_connected() {
        return Err(Error::Disconnected);
    }
    let order = view.mcs();
    if view.violation(&order).is_some() {
        return Err(not_chordal(g, &view));
    }
    let cliques = view.maximal_cliques(&order);
    let p = cliques.iter().map(|c| c.len()).max().unwrap_or(1);
    let half = nodes.len().div_ceil(2);
    let score = |k: &NodeSet| -> Option<usize> {
        let worst = view.component_sizes(k).into_iter().max().unwrap_or(0);
        (worst <= half).then_some(worst)
    };
    for limit in [(p - 1).max(1), p] {
        let mut best: Option<(usize, usize, NodeSet)> = None;
        let mut consider = |k: NodeSet| {
            if k.is_empty() || k.len() > limit {
                return;
            }
            if let Some(w) = score(&k) {
                let key = (w, k.len(), k);
                if best.as_ref().is_none_or(|b| key < *b) {
                    best = Some(key);
                }
            }
        };
        for c in &cliques {
            let members: Vec<usize> = c.iter().copied().collect();
            if members.len() <= 10 {
                for mask in 1u32..(1 << members.len()) {
                    let k: NodeSet = (0..members.len()).filter(|i| mask >> i & 1 == 1).map(|i| members[i]).collect();
                    consider(k);
                }
            } else {
                for k in shrink_stages(c, &score) {
                    consider(k);
                }
            }
        }
        if let Some((_, _, k)) = best {
            debug_assert!(k.iter().all(|&u| k.iter().all(|&v| u == v || view.adjacent(u, v))));
            debug_assert!(k.iter().all(|&v| view.inside[v]));
            return Ok(k);
        }
    }
    unreachable!("every maximal clique of a connected chordal graph contains a separator of this kind")
}

/// Successively smaller valid sub-cliques, dropping the node whose removal keeps
/// the best balance.
fn shrink_stages(c: &NodeSet, score: &dyn Fn(&NodeSet) -> Option<usize>) -> Vec<NodeSet> {
    let mut cur = c.clone();
    let mut stages = vec![cur.clone()];
    while cur.len() > 1 {
        let next = cur
            .iter()
            .filter_map(|&v| {
                let mut k = cur.clone();
                k.remove(&v);
                score(&k).map(|w| (w, k))
            })
            .min();
        match next {
            Some((_, k)) => {
                cur = k;
                stages.push(cur.clone());
            }
            None => break,
        }
    }
    stages
}

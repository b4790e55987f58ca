//! Graph carriers and basic queries.
//!
//! A [`Pdag`] holds a sorted node table plus parent/child/undirected adjacency
//! keyed by node index. Because the node table is sorted by [`NodeId`], index
//! order and identifier order coincide, so every "smallest node first" rule in
//! the crate can compare plain indices. Graphs derived from one another share
//! the same node table.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Opaque node identifier, ordered lexicographically on its text.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(s: impl Into<String>) -> Self {
        NodeId(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_string())
    }
}

impl From<String> for NodeId {
    fn from(s: String) -> Self {
        NodeId(s)
    }
}

/// Set of node indices; iteration order is NodeId order.
pub type NodeSet = BTreeSet<usize>;

/// An ordered pair `(tail, head)` of node indices.
pub type Arc2 = (usize, usize);

/// Empty pair list for the name-based builders.
pub const NO_PAIRS: &[(&str, &str)] = &[];

#[derive(Debug)]
struct NodeTable {
    ids: Vec<NodeId>,
    index: HashMap<NodeId, usize>,
}

/// Partially directed graph: the carrier for DAGs, essential graphs and MPDAGs.
#[derive(Clone, Debug)]
pub struct Pdag {
    table: Arc<NodeTable>,
    parents: Vec<NodeSet>,
    children: Vec<NodeSet>,
    undirected: Vec<NodeSet>,
}

impl PartialEq for Pdag {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.table, &other.table) || self.table.ids == other.table.ids)
            && self.parents == other.parents
            && self.undirected == other.undirected
    }
}

impl Eq for Pdag {}

impl Pdag {
    /// Builds a graph from node names and endpoint-name pairs.
    pub fn build<N: AsRef<str>, S: AsRef<str>>(
        nodes: impl IntoIterator<Item = N>,
        arcs: &[(S, S)],
        edges: &[(S, S)],
    ) -> Result<Pdag> {
        let mut ids: Vec<NodeId> = nodes.into_iter().map(|s| NodeId::from(s.as_ref())).collect();
        ids.sort();
        for w in ids.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateNode(w[0].to_string()));
            }
        }
        let mut g = Pdag::empty(ids);
        for (u, v) in arcs {
            let (a, b) = (g.require(u.as_ref())?, g.require(v.as_ref())?);
            g.try_insert(a, b, true)?;
        }
        for (u, v) in edges {
            let (a, b) = (g.require(u.as_ref())?, g.require(v.as_ref())?);
            g.try_insert(a, b, false)?;
        }
        Ok(g)
    }

    /// Graph with the given nodes (sorted here) and no adjacencies.
    pub fn empty(mut ids: Vec<NodeId>) -> Pdag {
        ids.sort();
        ids.dedup();
        let index = ids.iter().cloned().enumerate().map(|(i, id)| (id, i)).collect();
        let n = ids.len();
        Pdag {
            table: Arc::new(NodeTable { ids, index }),
            parents: vec![NodeSet::new(); n],
            children: vec![NodeSet::new(); n],
            undirected: vec![NodeSet::new(); n],
        }
    }

    /// Same node table, no adjacencies.
    pub fn blank(&self) -> Pdag {
        let n = self.n();
        Pdag {
            table: Arc::clone(&self.table),
            parents: vec![NodeSet::new(); n],
            children: vec![NodeSet::new(); n],
            undirected: vec![NodeSet::new(); n],
        }
    }

    /// Builds a graph over this graph's node table from index pairs.
    pub fn from_pairs(
        &self,
        arcs: impl IntoIterator<Item = Arc2>,
        edges: impl IntoIterator<Item = Arc2>,
    ) -> Result<Pdag> {
        let mut g = self.blank();
        for (u, v) in arcs {
            g.try_insert(u, v, true)?;
        }
        for (u, v) in edges {
            g.try_insert(u, v, false)?;
        }
        Ok(g)
    }

    fn require(&self, name: &str) -> Result<usize> {
        self.index_of(name).ok_or_else(|| Error::UnknownNode(name.to_string()))
    }

    fn try_insert(&mut self, u: usize, v: usize, directed: bool) -> Result<()> {
        if u >= self.n() || v >= self.n() {
            return Err(Error::UnknownNode(format!("#{}", u.max(v))));
        }
        if u == v {
            return Err(Error::SelfLoop(self.name(u).to_string()));
        }
        if self.is_adjacent(u, v) {
            let (a, b) = (u.min(v), u.max(v));
            return Err(Error::DuplicatePair(self.name(a).to_string(), self.name(b).to_string()));
        }
        if directed {
            self.children[u].insert(v);
            self.parents[v].insert(u);
        } else {
            self.undirected[u].insert(v);
            self.undirected[v].insert(u);
        }
        Ok(())
    }

    /// Turns the undirected edge `u - v` into `u -> v`.
    pub(crate) fn orient(&mut self, u: usize, v: usize) {
        debug_assert!(self.undirected[u].contains(&v));
        self.undirected[u].remove(&v);
        self.undirected[v].remove(&u);
        self.children[u].insert(v);
        self.parents[v].insert(u);
    }

    pub(crate) fn add_arc(&mut self, u: usize, v: usize) {
        self.children[u].insert(v);
        self.parents[v].insert(u);
    }

    pub(crate) fn remove_arc(&mut self, u: usize, v: usize) {
        self.children[u].remove(&v);
        self.parents[v].remove(&u);
    }

    /// Replaces the arc `u -> v` with `v -> u`.
    pub(crate) fn flip(&mut self, u: usize, v: usize) {
        debug_assert!(self.children[u].contains(&v));
        self.children[u].remove(&v);
        self.parents[v].remove(&u);
        self.children[v].insert(u);
        self.parents[u].insert(v);
    }

    pub fn n(&self) -> usize {
        self.table.ids.len()
    }

    pub fn ids(&self) -> &[NodeId] {
        &self.table.ids
    }

    pub fn name(&self, v: usize) -> &str {
        self.table.ids[v].as_str()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.table.index.get(&NodeId::from(name)).copied()
    }

    /// Resolves names into a node set.
    pub fn set_of<S: AsRef<str>>(&self, names: &[S]) -> Result<NodeSet> {
        names.iter().map(|s| self.require(s.as_ref())).collect()
    }

    pub fn names_of<'a>(&self, set: impl IntoIterator<Item = &'a usize>) -> Vec<String> {
        set.into_iter().map(|&v| self.name(v).to_string()).collect()
    }

    pub fn arc_name(&self, (u, v): Arc2) -> String {
        format!("{}->{}", self.name(u), self.name(v))
    }

    pub fn all_nodes(&self) -> NodeSet {
        (0..self.n()).collect()
    }

    pub fn parents(&self, v: usize) -> &NodeSet {
        &self.parents[v]
    }

    pub fn children(&self, v: usize) -> &NodeSet {
        &self.children[v]
    }

    pub fn undirected_neighbors(&self, v: usize) -> &NodeSet {
        &self.undirected[v]
    }

    /// All adjacent nodes regardless of edge type, sorted.
    pub fn neighbors(&self, v: usize) -> NodeSet {
        self.parents[v]
            .iter()
            .chain(&self.children[v])
            .chain(&self.undirected[v])
            .copied()
            .collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.parents[v].len() + self.children[v].len() + self.undirected[v].len()
    }

    pub fn is_adjacent(&self, u: usize, v: usize) -> bool {
        self.undirected[u].contains(&v) || self.children[u].contains(&v) || self.parents[u].contains(&v)
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.children[u].contains(&v)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.undirected[u].contains(&v)
    }

    /// Arcs in lexicographic order.
    pub fn arcs(&self) -> impl Iterator<Item = Arc2> + '_ {
        self.children
            .iter()
            .enumerate()
            .flat_map(|(u, ch)| ch.iter().map(move |&v| (u, v)))
    }

    /// Undirected edges as `(low, high)` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = Arc2> + '_ {
        self.undirected
            .iter()
            .enumerate()
            .flat_map(|(u, nb)| nb.range(u + 1..).map(move |&v| (u, v)))
    }

    pub fn arc_set(&self) -> BTreeSet<Arc2> {
        self.arcs().collect()
    }

    pub fn edge_set(&self) -> BTreeSet<Arc2> {
        self.edges().collect()
    }

    pub fn arc_count(&self) -> usize {
        self.children.iter().map(|c| c.len()).sum()
    }

    pub fn edge_count(&self) -> usize {
        self.undirected.iter().map(|c| c.len()).sum::<usize>() / 2
    }

    pub fn is_fully_oriented(&self) -> bool {
        self.undirected.iter().all(|s| s.is_empty())
    }

    pub fn skeleton(&self) -> UGraph {
        skeleton(self)
    }

    /// Connected components of the undirected part; fully oriented nodes are singletons.
    pub fn chain_components(&self) -> Vec<NodeSet> {
        chain_components(self)
    }

    /// Node-induced subgraph keeping every node but only pairs inside `keep`.
    pub fn induced(&self, keep: &NodeSet) -> Pdag {
        let mut g = self.blank();
        for &u in keep {
            for &v in self.children[u].intersection(keep) {
                g.children[u].insert(v);
                g.parents[v].insert(u);
            }
            for &v in self.undirected[u].intersection(keep) {
                g.undirected[u].insert(v);
            }
        }
        g
    }

    /// Sub-graph keeping only the listed arcs (as arcs) and all nodes.
    pub fn with_arcs_only(&self, arcs: impl IntoIterator<Item = Arc2>) -> Pdag {
        let mut g = self.blank();
        for (u, v) in arcs {
            g.children[u].insert(v);
            g.parents[v].insert(u);
        }
        g
    }

    /// Checks the directed part for cycles.
    pub fn directed_part_acyclic(&self) -> bool {
        topo_sort(self).is_ok()
    }
}

/// Fully oriented acyclic graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dag(Pdag);

impl Dag {
    pub fn new(g: Pdag) -> Result<Dag> {
        if !g.is_fully_oriented() {
            return Err(Error::NotFullyOriented(g.edge_count()));
        }
        topo_sort(&g)?;
        Ok(Dag(g))
    }

    pub fn build<N: AsRef<str>, S: AsRef<str>>(nodes: impl IntoIterator<Item = N>, arcs: &[(S, S)]) -> Result<Dag> {
        Dag::new(Pdag::build(nodes, arcs, &[] as &[(S, S)])?)
    }

    pub(crate) fn new_unchecked(g: Pdag) -> Dag {
        debug_assert!(g.is_fully_oriented() && g.directed_part_acyclic());
        Dag(g)
    }

    pub fn as_pdag(&self) -> &Pdag {
        &self.0
    }

    pub fn into_pdag(self) -> Pdag {
        self.0
    }

    /// Unshielded colliders `(u, v, w)` with `u -> v <- w`, `u < w`, `u` and `w` non-adjacent.
    pub fn v_structures(&self) -> BTreeSet<(usize, usize, usize)> {
        v_structures(&self.0)
    }

    pub fn topological_order(&self) -> Ordering {
        topo_sort(&self.0).expect("Dag is acyclic by construction")
    }

    pub fn ancestry(&self, v: usize) -> Ancestry {
        ancestry(self, v)
    }

    /// Direct children: `w` with `v -> w` and no other directed path from `v` to `w`.
    pub fn direct_children(&self, v: usize) -> NodeSet {
        let ch = self.children(v);
        ch.iter()
            .copied()
            .filter(|&w| {
                // w is indirect iff some other child of v reaches w
                !ch.iter().any(|&z| z != w && reaches(&self.0, z, w))
            })
            .collect()
    }
}

impl Deref for Dag {
    type Target = Pdag;
    fn deref(&self) -> &Pdag {
        &self.0
    }
}

impl TryFrom<Pdag> for Dag {
    type Error = Error;
    fn try_from(g: Pdag) -> Result<Dag> {
        Dag::new(g)
    }
}

/// Fully undirected graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UGraph(Pdag);

impl UGraph {
    pub fn new(g: Pdag) -> Result<UGraph> {
        if g.arc_count() > 0 {
            return Err(Error::NotUndirected);
        }
        Ok(UGraph(g))
    }

    pub fn build<N: AsRef<str>, S: AsRef<str>>(nodes: impl IntoIterator<Item = N>, edges: &[(S, S)]) -> Result<UGraph> {
        UGraph::new(Pdag::build(nodes, &[] as &[(S, S)], edges)?)
    }

    pub fn as_pdag(&self) -> &Pdag {
        &self.0
    }

    pub fn into_pdag(self) -> Pdag {
        self.0
    }

    pub fn hop_neighborhood(&self, seed: &NodeSet, r: usize) -> Result<NodeSet> {
        hop_neighborhood(self, seed, r)
    }

    /// Connected components, each sorted, listed by smallest member.
    pub fn components(&self) -> Vec<NodeSet> {
        chain_components(&self.0)
    }

    pub fn is_connected(&self) -> bool {
        self.n() <= 1 || self.components().len() == 1
    }

    /// Subgraph induced on `keep`, over the same node table.
    pub fn induced_on(&self, keep: &NodeSet) -> UGraph {
        UGraph(self.0.induced(keep))
    }
}

impl Deref for UGraph {
    type Target = Pdag;
    fn deref(&self) -> &Pdag {
        &self.0
    }
}

/// A bijection from nodes to ranks `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ordering {
    rank: Vec<usize>,
}

impl Ordering {
    /// From a sequence listing every node exactly once, first gets rank 1.
    pub fn from_sequence(seq: &[usize]) -> Result<Ordering> {
        let n = seq.len();
        let mut rank = vec![0; n];
        for (i, &v) in seq.iter().enumerate() {
            if v >= n || rank[v] != 0 {
                return Err(Error::InvalidOrdering);
            }
            rank[v] = i + 1;
        }
        Ok(Ordering { rank })
    }

    /// From explicit ranks (must be a permutation of `1..=n`).
    pub fn from_ranks(rank: Vec<usize>) -> Result<Ordering> {
        let n = rank.len();
        let mut seen = vec![false; n + 1];
        for &r in &rank {
            if r == 0 || r > n || seen[r] {
                return Err(Error::InvalidOrdering);
            }
            seen[r] = true;
        }
        Ok(Ordering { rank })
    }

    pub fn rank(&self, v: usize) -> usize {
        self.rank[v]
    }

    pub fn ranks(&self) -> &[usize] {
        &self.rank
    }

    pub fn len(&self) -> usize {
        self.rank.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rank.is_empty()
    }

    /// Nodes listed by increasing rank.
    pub fn sequence(&self) -> Vec<usize> {
        let mut seq = vec![0; self.rank.len()];
        for (v, &r) in self.rank.iter().enumerate() {
            seq[r - 1] = v;
        }
        seq
    }

    /// Every arc goes from lower to higher rank.
    pub fn is_valid_for(&self, g: &Pdag) -> bool {
        self.rank.len() == g.n() && g.arcs().all(|(u, v)| self.rank[u] < self.rank[v])
    }
}

/// Parents, direct children and transitive relatives of one node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ancestry {
    pub parents: NodeSet,
    pub children: NodeSet,
    pub ancestors: NodeSet,
    pub descendants: NodeSet,
}

pub fn skeleton(g: &Pdag) -> UGraph {
    let mut s = g.blank();
    for u in 0..g.n() {
        s.undirected[u] = g.neighbors(u);
    }
    UGraph(s)
}

pub fn v_structures(g: &Pdag) -> BTreeSet<(usize, usize, usize)> {
    let mut out = BTreeSet::new();
    for v in 0..g.n() {
        let pa: Vec<usize> = g.parents(v).iter().copied().collect();
        for (i, &u) in pa.iter().enumerate() {
            for &w in &pa[i + 1..] {
                if !g.is_adjacent(u, w) {
                    out.insert((u, v, w));
                }
            }
        }
    }
    out
}

/// Kahn's algorithm on the directed part, always taking the smallest available source.
pub fn topological_order(g: &Pdag) -> Result<Ordering> {
    topo_sort(g)
}

fn topo_sort(g: &Pdag) -> Result<Ordering> {
    let n = g.n();
    let mut indeg: Vec<usize> = (0..n).map(|v| g.parents(v).len()).collect();
    let mut frontier: BTreeSet<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut seq = Vec::with_capacity(n);
    while let Some(v) = frontier.pop_first() {
        seq.push(v);
        for &w in g.children(v) {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                frontier.insert(w);
            }
        }
    }
    if seq.len() == n {
        return Ordering::from_sequence(&seq);
    }
    // every leftover node has a leftover parent; walk parents until a repeat
    let left: NodeSet = (0..n).filter(|&v| indeg[v] > 0).collect();
    let mut pos: BTreeMap<usize, usize> = BTreeMap::new();
    let mut walk = Vec::new();
    let mut cur = *left.iter().next().expect("leftover nodes");
    while !pos.contains_key(&cur) {
        pos.insert(cur, walk.len());
        walk.push(cur);
        cur = *g.parents(cur).iter().find(|p| left.contains(p)).expect("leftover parent");
    }
    let mut cycle: Vec<usize> = walk[pos[&cur]..].to_vec();
    cycle.reverse();
    let mut names = g.names_of(&cycle);
    names.push(g.name(cycle[0]).to_string());
    Err(Error::Cycle(names))
}

pub fn chain_components(g: &Pdag) -> Vec<NodeSet> {
    let n = g.n();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut comp = NodeSet::new();
        let mut queue = VecDeque::from([s]);
        seen[s] = true;
        while let Some(u) = queue.pop_front() {
            comp.insert(u);
            for &w in g.undirected_neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        out.push(comp);
    }
    out
}

/// Nodes within `r` hops of `seed`.
pub fn hop_neighborhood(g: &UGraph, seed: &NodeSet, r: usize) -> Result<NodeSet> {
    if let Some(&bad) = seed.iter().find(|&&v| v >= g.n()) {
        return Err(Error::UnknownNode(format!("#{bad}")));
    }
    Ok(hop_distances(g, seed)
        .into_iter()
        .enumerate()
        .filter(|(_, d)| d.is_some_and(|d| d <= r))
        .map(|(v, _)| v)
        .collect())
}

/// BFS distances from a seed set over all adjacencies.
pub fn hop_distances(g: &Pdag, seed: &NodeSet) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.n()];
    let mut queue = VecDeque::new();
    for &s in seed {
        dist[s] = Some(0);
        queue.push_back(s);
    }
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap_or(0);
        for w in g.neighbors(u) {
            if dist[w].is_none() {
                dist[w] = Some(du + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

pub fn ancestry(g: &Dag, v: usize) -> Ancestry {
    let closure = |start: &NodeSet, next: &dyn Fn(usize) -> NodeSet| {
        let mut seen = NodeSet::new();
        let mut stack: Vec<usize> = start.iter().copied().collect();
        while let Some(u) = stack.pop() {
            if seen.insert(u) {
                stack.extend(next(u));
            }
        }
        seen
    };
    Ancestry {
        parents: g.parents(v).clone(),
        children: g.direct_children(v),
        ancestors: closure(g.parents(v), &|u| g.parents(u).clone()),
        descendants: closure(g.children(v), &|u| g.children(u).clone()),
    }
}

pub(crate) fn reaches(g: &Pdag, from: usize, to: usize) -> bool {
    let mut seen = NodeSet::new();
    let mut stack = vec![from];
    while let Some(u) = stack.pop() {
        if u == to {
            return true;
        }
        if seen.insert(u) {
            stack.extend(g.children(u).iter().copied());
        }
    }
    false
}

//! Brute-force reference computations shared by integration tests. Nothing here
//! calls the library's orientation or verification logic.
#![allow(dead_code)]

use std::collections::BTreeSet;

use advsearch::{Arc2, Dag, NodeSet, Pdag};
use rand::seq::SliceRandom;
use rand::Rng;

/// Skeleton edges `(low, high)` indexed for bitmask orientations; bit `i` set
/// means edge `i` points high to low.
pub struct Orientations {
    pub edges: Vec<Arc2>,
    pub members: Vec<u32>,
}

impl Orientations {
    pub fn arcs(&self, mask: u32) -> BTreeSet<Arc2> {
        self.edges
            .iter()
            .enumerate()
            .map(|(i, &(u, v))| if mask >> i & 1 == 1 { (v, u) } else { (u, v) })
            .collect()
    }

    pub fn dag(&self, skel: &Pdag, mask: u32) -> Dag {
        Dag::new(skel.blank().from_pairs(self.arcs(mask), std::iter::empty()).unwrap()).unwrap()
    }

    pub fn mask_of(&self, g: &Dag) -> u32 {
        self.edges
            .iter()
            .enumerate()
            .filter(|&(_, &(u, v))| g.has_arc(v, u))
            .fold(0, |m, (i, _)| m | 1 << i)
    }
}

/// Every ordering of `0..n`.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    fn rec(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == cur.len() {
            out.push(cur.clone());
            return;
        }
        for i in k..cur.len() {
            cur.swap(k, i);
            rec(k + 1, cur, out);
            cur.swap(k, i);
        }
    }
    rec(0, &mut cur, &mut out);
    out
}

/// All acyclic orientations of the skeleton of `skel` without v-structures, found
/// by orienting along every node permutation.
pub fn moral_orientations(skel: &Pdag) -> Orientations {
    let n = skel.n();
    let mut edges: Vec<Arc2> = skel.arcs().chain(skel.edges()).map(|(u, v)| (u.min(v), u.max(v))).collect();
    edges.sort_unstable();
    assert!(edges.len() <= 32);
    let mut found = BTreeSet::new();
    for perm in permutations(n) {
        let mut pos = vec![0; n];
        for (i, &v) in perm.iter().enumerate() {
            pos[v] = i;
        }
        let mut mask = 0u32;
        let mut parents = vec![Vec::new(); n];
        for (i, &(u, v)) in edges.iter().enumerate() {
            if pos[v] < pos[u] {
                mask |= 1 << i;
                parents[u].push(v);
            } else {
                parents[v].push(u);
            }
        }
        let moral = parents.iter().all(|pa| {
            pa.iter().enumerate().all(|(i, &a)| pa[i + 1..].iter().all(|&b| skel.is_adjacent(a, b)))
        });
        if moral {
            found.insert(mask);
        }
    }
    Orientations { edges, members: found.into_iter().collect() }
}

/// Parent-set definition of covered arcs.
pub fn covered_brute(g: &Dag) -> BTreeSet<Arc2> {
    g.arcs()
        .filter(|&(x, y)| {
            let mut py = g.parents(y).clone();
            py.remove(&x);
            &py == g.parents(x)
        })
        .collect()
}

/// Whether intervening on each node of `nodes` singly leaves `truth` as the only
/// member that agrees on every edge touching `nodes`.
pub fn verifies_brute(o: &Orientations, truth: u32, nodes: &NodeSet) -> bool {
    let cut: u32 = o
        .edges
        .iter()
        .enumerate()
        .filter(|&(_, &(u, v))| nodes.contains(&u) || nodes.contains(&v))
        .fold(0, |m, (i, _)| m | 1 << i);
    o.members.iter().all(|&m| m == truth || (m ^ truth) & cut != 0)
}

/// Smallest number of atomic interventions that verify `truth`, by subset search.
pub fn nu1_brute(o: &Orientations, n: usize, truth: u32) -> usize {
    (0u32..1 << n)
        .filter(|&s| verifies_brute(o, truth, &(0..n).filter(|&v| s >> v & 1 == 1).collect()))
        .map(|s| s.count_ones() as usize)
        .min()
        .unwrap()
}

/// Random DAG: a random order with each forward pair present with probability `p`.
pub fn random_dag(n: usize, p: f64, rng: &mut impl Rng) -> Dag {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let names: Vec<String> = (0..n).map(|i| format!("n{i}")).collect();
    let mut arcs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                arcs.push((names[order[i]].clone(), names[order[j]].clone()));
            }
        }
    }
    Dag::build(&names, &arcs).unwrap()
}

/// Random nonempty subset of `0..n`.
pub fn random_subset(n: usize, rng: &mut impl Rng) -> NodeSet {
    loop {
        let s: NodeSet = (0..n).filter(|_| rng.gen_bool(0.4)).collect();
        if !s.is_empty() {
            return s;
        }
    }
}

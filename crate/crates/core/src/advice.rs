//! Advice quality: min-hop-coverage, relevant-node counts by radius, the ψ
//! measure, and completing a partially oriented advice graph to a DAG.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{hop_distances, Dag, NodeSet, Pdag};
use crate::mec::{covered_edges, same_mec};
use crate::meek::meek_closure;
use crate::oracle::{InterventionSet, Oracle};
use crate::verification::all_min_covers;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdviceQuality {
    pub h: usize,
    pub psi: usize,
    /// `(r, ρ)` for `r = 0..=h`.
    pub rho_by_radius: Vec<(usize, usize)>,
}

/// Smallest radius around `vtilde` in the skeleton that contains both endpoints of
/// every covered edge of `truth`. Zero when there are no covered edges.
pub fn min_hop_coverage(truth: &Dag, vtilde: &NodeSet) -> Result<usize> {
    let c = covered_edges(truth);
    if c.is_empty() {
        return Ok(0);
    }
    if vtilde.is_empty() {
        return Err(Error::EmptySeed(c.len()));
    }
    if let Some(&bad) = vtilde.iter().find(|&&v| v >= truth.n()) {
        return Err(Error::UnknownNode(format!("#{bad}")));
    }
    let dist = hop_distances(truth, vtilde);
    c.endpoints().iter().try_fold(0, |h, &v| match dist[v] {
        Some(d) => Ok(h.max(d)),
        None => Err(Error::InvalidParameter(format!(
            "covered endpoint {} is unreachable from the seed set",
            truth.name(v)
        ))),
    })
}

/// ψ evaluated for one verifying set: relevant nodes within `h` hops after intervening `vtilde`.
pub fn psi_proxy(truth: &Dag, vtilde: &NodeSet) -> Result<AdviceQuality> {
    let h = min_hop_coverage(truth, vtilde)?;
    let mut oracle = Oracle::new(truth.clone());
    oracle.intervene(&InterventionSet::atomic(vtilde))?;
    let skel = oracle.skeleton().clone();
    let mut rho_by_radius = Vec::with_capacity(h + 1);
    for r in 0..=h {
        let ball = skel.hop_neighborhood(vtilde, r)?;
        rho_by_radius.push((r, oracle.relevant_nodes(&ball).len()));
    }
    let psi = rho_by_radius.last().map_or(0, |&(_, p)| p);
    Ok(AdviceQuality { h, psi, rho_by_radius })
}

/// ψ maximised over every minimum verifying set of `advice`.
pub fn psi_full(truth: &Dag, advice: &Dag, cap: usize) -> Result<usize> {
    if !same_mec(truth, advice)? {
        return Err(Error::NotSameMec);
    }
    let covers = all_min_covers(&covered_edges(advice), cap)?;
    covers.iter().try_fold(0, |best, v| Ok(best.max(psi_proxy(truth, v)?.psi)))
}

/// Completes `mpdag` to a DAG: repeatedly take the smallest undirected pair, orient
/// it low to high if the Meek closure stays consistent, else high to low.
pub fn extend_mpdag(mpdag: &Pdag) -> Result<Dag> {
    let allowed = implied_v_structures(mpdag);
    let mut g = meek_closure(mpdag).map_err(|_| Error::NoConsistentExtension)?;
    if !consistent(&g, &allowed) {
        return Err(Error::NoConsistentExtension);
    }
    loop {
        let first = g.edges().next();
        let Some((a, b)) = first else { break };
        let next = [(a, b), (b, a)].into_iter().find_map(|(u, w)| {
            let mut t = g.clone();
            t.orient(u, w);
            meek_closure(&t).ok().filter(|c| consistent(c, &allowed))
        });
        g = next.ok_or(Error::NoConsistentExtension)?;
    }
    Dag::new(g)
}

fn implied_v_structures(g: &Pdag) -> BTreeSet<(usize, usize, usize)> {
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

fn consistent(g: &Pdag, allowed: &BTreeSet<(usize, usize, usize)>) -> bool {
    g.directed_part_acyclic() && implied_v_structures(g).is_subset(allowed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::{UGraph, NO_PAIRS};
    use crate::mec::enumerate_mec;
    use crate::verification::verifying_set_atomic;

    #[test]
    fn psi_example_quality() {
        let (truth, advice) = fixtures::psi_example();
        let v = truth.set_of(&["a", "e", "z2"]).unwrap();
        assert_eq!(min_hop_coverage(&truth, &v).unwrap(), 1);
        let q = psi_proxy(&truth, &v).unwrap();
        assert_eq!(q.psi, 2);
        assert_eq!(q.rho_by_radius, vec![(0, 0), (1, 2)]);
        assert_eq!(psi_full(&truth, &advice, 100).unwrap(), 2);
    }

    #[test]
    fn psi_example_swapped_roles() {
        let (truth, advice) = fixtures::psi_example();
        let v = verifying_set_atomic(&truth);
        assert_eq!(advice.names_of(&v), vec!["a", "d"]);
        let q = psi_proxy(&advice, &v).unwrap();
        assert_eq!(q.h, 5);
        assert_eq!(q.psi, 7);
    }

    #[test]
    fn perfect_advice_zero() {
        for g in [fixtures::six_node_truth(), fixtures::psi_example().0, fixtures::tight().0] {
            assert_eq!(psi_proxy(&g, &verifying_set_atomic(&g)).unwrap().psi, 0);
            assert_eq!(psi_full(&g, &g, 100).unwrap(), 0);
        }
        let e = Dag::build(["a", "b"], &[("a", "b")]).unwrap();
        for v in [NodeSet::from([0]), NodeSet::from([1])] {
            assert_eq!(psi_proxy(&e, &v).unwrap().psi, 0);
        }
    }

    #[test]
    fn hop_coverage_cases() {
        let (truth, _) = fixtures::star(8);
        assert_eq!(min_hop_coverage(&truth, &truth.set_of(&["v1"]).unwrap()).unwrap(), 2);
        let g = fixtures::six_node_truth();
        assert!(min_hop_coverage(&g, &verifying_set_atomic(&g)).unwrap() <= 1);
        assert_eq!(min_hop_coverage(&g, &NodeSet::new()), Err(Error::EmptySeed(3)));
        let coll = Dag::build(["a", "b", "c"], &[("a", "b"), ("c", "b")]).unwrap();
        assert_eq!(min_hop_coverage(&coll, &NodeSet::new()), Ok(0));
    }

    #[test]
    fn extend_cases() {
        let d = extend_mpdag(&fixtures::six_node_mpdag()).unwrap();
        for arc in ["B->A", "B->D", "A->C", "A->D"] {
            assert!(d.arcs().any(|a| d.arc_name(a) == arc), "{arc}");
        }
        let g = fixtures::six_node_truth();
        assert_eq!(extend_mpdag(g.as_pdag()).unwrap(), g);
        let p3 = UGraph::build(["a", "b", "c"], &[("a", "b"), ("b", "c")]).unwrap();
        let d = extend_mpdag(&p3).unwrap();
        assert!(enumerate_mec(&p3, 10).unwrap().contains(&d));
        let cyclic = Pdag::build(["a", "b", "c"], &[("a", "b"), ("b", "c"), ("c", "a")], NO_PAIRS).unwrap();
        assert_eq!(extend_mpdag(&cyclic), Err(Error::NoConsistentExtension));
        let clash = Pdag::build(["a", "b", "x", "y"], &[("x", "a"), ("y", "b")], &[("a", "b")]).unwrap();
        assert_eq!(extend_mpdag(&clash), Err(Error::NoConsistentExtension));
    }
}

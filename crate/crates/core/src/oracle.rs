//! Ideal-intervention oracle over a hidden DAG.
//!
//! Search code only ever sees an [`Oracle`]: it can submit interventions and read
//! the current interventional essential graph, but the DAG behind it stays private.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::{Arc2, Dag, NodeSet, Pdag, UGraph};
use crate::mec::essential_graph;
use crate::meek::meek_closure;

/// Ordered collection of node subsets, each of size at most `bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterventionSet {
    sets: Vec<NodeSet>,
    bound: usize,
}

impl InterventionSet {
    pub fn new(bound: usize) -> InterventionSet {
        InterventionSet { sets: Vec::new(), bound: bound.max(1) }
    }

    /// One singleton intervention per node, in node order.
    pub fn atomic(nodes: &NodeSet) -> InterventionSet {
        InterventionSet { sets: nodes.iter().map(|&v| NodeSet::from([v])).collect(), bound: 1 }
    }

    pub fn push(&mut self, set: NodeSet) -> Result<()> {
        if set.len() > self.bound {
            return Err(Error::OversizedIntervention { size: set.len(), bound: self.bound });
        }
        self.sets.push(set);
        Ok(())
    }

    /// Appends another batch, widening the bound if needed.
    pub fn extend(&mut self, other: &InterventionSet) {
        self.bound = self.bound.max(other.bound);
        self.sets.extend(other.sets.iter().cloned());
    }

    pub fn sets(&self) -> &[NodeSet] {
        &self.sets
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Union of all intervened nodes.
    pub fn nodes(&self) -> NodeSet {
        self.sets.iter().flatten().copied().collect()
    }
}

/// Intervention counts: the running total and the size of each submitted batch.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Ledger {
    pub total: usize,
    pub per_call: Vec<usize>,
}

/// Hidden ground truth plus everything learned about it so far.
#[derive(Clone, Debug)]
pub struct Oracle {
    truth: Dag,
    applied: InterventionSet,
    observational: Pdag,
    skeleton: UGraph,
    current: Pdag,
    ledger: Ledger,
}

impl Oracle {
    pub fn new(truth: Dag) -> Oracle {
        let observational = essential_graph(&truth);
        Oracle {
            skeleton: truth.skeleton(),
            current: observational.clone(),
            observational,
            applied: InterventionSet::new(1),
            ledger: Ledger::default(),
            truth,
        }
    }

    /// Applies a batch; each set reveals the true direction of every edge it cuts.
    pub fn intervene(&mut self, batch: &InterventionSet) -> Result<()> {
        for s in batch.sets() {
            if s.len() > batch.bound() {
                return Err(Error::OversizedIntervention { size: s.len(), bound: batch.bound() });
            }
            if let Some(&bad) = s.iter().find(|&&v| v >= self.truth.n()) {
                return Err(Error::UnknownNode(format!("#{bad}")));
            }
        }
        if batch.is_empty() {
            return Ok(());
        }
        self.current = orient_cut_edges(&self.truth, &self.current, batch.sets());
        self.applied.extend(batch);
        self.ledger.total += batch.len();
        self.ledger.per_call.push(batch.len());
        Ok(())
    }

    /// The current interventional essential graph.
    pub fn current(&self) -> &Pdag {
        &self.current
    }

    /// Essential graph before any intervention.
    pub fn observational(&self) -> &Pdag {
        &self.observational
    }

    /// Skeleton shared by every member of the class.
    pub fn skeleton(&self) -> &UGraph {
        &self.skeleton
    }

    pub fn applied(&self) -> &InterventionSet {
        &self.applied
    }

    pub fn ledger(&self) -> &Ledger {
        &self.ledger
    }

    pub fn revealed_arcs(&self) -> BTreeSet<Arc2> {
        self.current.arc_set()
    }

    pub fn is_fully_oriented(&self) -> bool {
        self.current.is_fully_oriented()
    }

    /// The learned DAG once nothing is left undirected.
    pub fn learned_dag(&self) -> Option<Dag> {
        self.is_fully_oriented().then(|| Dag::new_unchecked(self.current.clone()))
    }

    pub fn relevant_nodes(&self, subset: &NodeSet) -> NodeSet {
        relevant_nodes(&self.current, subset)
    }
}

/// Closure of `current` after orienting, per `truth`, every undirected edge cut by one of `sets`.
fn orient_cut_edges(truth: &Dag, current: &Pdag, sets: &[NodeSet]) -> Pdag {
    let mut g = current.clone();
    let cut: Vec<Arc2> = current
        .edges()
        .filter(|&(u, v)| sets.iter().any(|s| s.contains(&u) != s.contains(&v)))
        .collect();
    for (u, v) in cut {
        if truth.has_arc(u, v) {
            g.orient(u, v);
        } else {
            g.orient(v, u);
        }
    }
    meek_closure(&g).expect("the truth is a consistent extension")
}

/// `E_I(g)` for the given intervention sets.
pub fn interventional_essential_graph(g: &Dag, sets: &[NodeSet]) -> Pdag {
    orient_cut_edges(g, &essential_graph(g), sets)
}

/// `R(g, I)`: arcs oriented in `E_I(g)`.
pub fn revealed(g: &Dag, sets: &[NodeSet]) -> BTreeSet<Arc2> {
    interventional_essential_graph(g, sets).arc_set()
}

/// Sub-DAG of `g` on the arcs left unoriented by `sets`.
pub fn residual_dag(g: &Dag, sets: &[NodeSet]) -> Dag {
    let e = interventional_essential_graph(g, sets);
    let arcs = g.arcs().filter(|&(u, v)| e.has_edge(u, v));
    Dag::new_unchecked(g.with_arcs_only(arcs))
}

/// Nodes of `subset` incident to an undirected edge with both ends in `subset`.
pub fn relevant_nodes(g: &Pdag, subset: &NodeSet) -> NodeSet {
    subset
        .iter()
        .copied()
        .filter(|&v| g.undirected_neighbors(v).iter().any(|w| subset.contains(w)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn names(g: &Pdag, arcs: &BTreeSet<Arc2>) -> BTreeSet<String> {
        arcs.iter().map(|&a| g.arc_name(a)).collect()
    }

    fn set(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn fresh_oracles() {
        let o = Oracle::new(fixtures::six_node_truth());
        assert_eq!(o.current(), &fixtures::six_node_essential());
        assert_eq!(names(o.current(), &o.revealed_arcs()), set(&["C->E", "D->E", "D->F", "E->F"]));
        assert_eq!(o.ledger().total, 0);

        let single = Oracle::new(Dag::build(["x"], crate::graph::NO_PAIRS).unwrap());
        assert!(single.is_fully_oriented());

        let p3 = Oracle::new(fixtures::path_dag(3, 0));
        assert_eq!(p3.current().arc_count(), 0);
        assert_eq!(p3.current().edge_count(), 2);

        let coll = Oracle::new(Dag::build(["a", "b", "c"], &[("a", "b"), ("c", "b")]).unwrap());
        assert!(coll.is_fully_oriented());
    }

    #[test]
    fn intervene_six_node() {
        let g = fixtures::six_node_truth();
        let mut o = Oracle::new(g.clone());
        let a = g.set_of(&["A"]).unwrap();
        o.intervene(&InterventionSet::atomic(&a)).unwrap();
        let cur = o.current();
        assert_eq!(
            names(cur, &o.revealed_arcs()),
            set(&["A->B", "A->C", "A->D", "C->E", "D->E", "D->F", "E->F"])
        );
        assert_eq!(cur.edges().map(|e| (cur.name(e.0).to_string(), cur.name(e.1).to_string())).collect::<Vec<_>>(),
            vec![("B".to_string(), "D".to_string())]);
        assert_eq!(o.ledger().total, 1);

        let mut o = Oracle::new(g.clone());
        o.intervene(&InterventionSet::atomic(&g.set_of(&["A", "B"]).unwrap())).unwrap();
        assert!(o.is_fully_oriented());
        assert_eq!(o.learned_dag().unwrap(), g);
        assert_eq!(o.ledger().per_call, vec![2]);

        let before = o.current().clone();
        o.intervene(&InterventionSet::new(1)).unwrap();
        assert_eq!(o.current(), &before);
        assert_eq!(o.ledger().total, 2);
    }

    #[test]
    fn intervene_rejects_bad_batches() {
        let mut o = Oracle::new(fixtures::six_node_truth());
        let mut b = InterventionSet::new(1);
        assert!(b.push(NodeSet::from([0, 1])).is_err());
        b.push(NodeSet::from([42])).unwrap();
        assert!(matches!(o.intervene(&b), Err(Error::UnknownNode(_))));
    }

    #[test]
    fn relevant_six_node() {
        let o = Oracle::new(fixtures::six_node_truth());
        let g = o.current();
        let sub = g.set_of(&["A", "C", "D", "E", "F"]).unwrap();
        assert_eq!(g.names_of(&o.relevant_nodes(&sub)), vec!["A", "C", "D"]);
    }

    #[test]
    fn relevant_star_after_v1() {
        let (truth, _) = fixtures::star(8);
        let mut o = Oracle::new(truth.clone());
        o.intervene(&InterventionSet::atomic(&truth.set_of(&["v1"]).unwrap())).unwrap();
        let rel = o.relevant_nodes(&truth.all_nodes());
        assert_eq!(rel.len(), 7);
        assert!(!rel.contains(&truth.index_of("v1").unwrap()));
        let near = o.skeleton().hop_neighborhood(&truth.set_of(&["v1"]).unwrap(), 1).unwrap();
        assert!(o.relevant_nodes(&near).is_empty());
    }

    #[test]
    fn residual_cases() {
        let g = fixtures::six_node_truth();
        let r = residual_dag(&g, &[]);
        assert_eq!(names(&r, &r.arc_set()), set(&["A->B", "A->C", "A->D", "B->D"]));
        let r = residual_dag(&g, &[g.set_of(&["A"]).unwrap(), g.set_of(&["B"]).unwrap()]);
        assert_eq!(r.arc_count(), 0);
        // v1 -> v2 -> v3 -> v4 with {v2}: cut edges v1v2, v2v3 then R1 orients v3 -> v4
        let p = fixtures::path_dag(4, 0);
        let r = residual_dag(&p, &[p.set_of(&["v2"]).unwrap()]);
        assert_eq!(r.arc_count(), 0);
        let r = residual_dag(&p, &[p.set_of(&["v4"]).unwrap()]);
        assert_eq!(names(&r, &r.arc_set()), set(&["v1->v2", "v2->v3"]));
    }
}

//! Adaptive search over an [`Oracle`]: clique-separator subset search, full
//! search, and advice-guided search with a growing radius schedule.

use serde::Serialize;

use crate::advice::extend_mpdag;
use crate::chordal::separator_on;
use crate::error::{Error, Result};
use crate::graph::{Dag, NodeSet, Pdag};
use crate::mec::essential_graph;
use crate::oracle::{InterventionSet, Oracle};
use crate::verification::{labelled_batches, verifying_set_atomic};

/// One trigger of the advice loop.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Round {
    /// Trigger index, starting at 1.
    pub i: usize,
    /// Radius at which the trigger fired.
    pub r: usize,
    /// Relevant nodes within radius `r` when it fired.
    pub n_i: usize,
    /// Interventions spent on radius `r - 1`.
    pub c: usize,
    /// Interventions spent on radius `r`.
    pub c_prime: usize,
    /// Set when this is the final fallback over all nodes rather than a trigger.
    pub safeguard: bool,
}

#[derive(Clone, Debug)]
pub struct SearchReport {
    /// Every submitted intervention, in order.
    pub interventions: InterventionSet,
    pub rounds: Vec<Round>,
    pub total: usize,
    /// The oracle's graph when the search returned.
    pub final_graph: Pdag,
    /// Size of the initial advice batch (zero for advice-free search).
    pub initial: usize,
}

impl SearchReport {
    fn new(k: usize) -> SearchReport {
        SearchReport {
            interventions: InterventionSet::new(k),
            rounds: Vec::new(),
            total: 0,
            final_graph: Pdag::empty(Vec::new()),
            initial: 0,
        }
    }

    fn submit(&mut self, oracle: &mut Oracle, batch: &InterventionSet) -> Result<()> {
        oracle.intervene(batch)?;
        self.interventions.extend(batch);
        self.total += batch.len();
        Ok(())
    }

    fn absorb(&mut self, other: &SearchReport) {
        self.interventions.extend(&other.interventions);
        self.total += other.total;
    }
}

/// Orients every undirected edge with both ends in `target`.
///
/// Each round takes the connected components of the still-undirected edges among
/// the relevant target nodes, finds a balanced clique separator of each, and
/// intervenes on all separators at once (singletons for `k = 1`, separating
/// batches otherwise).
pub fn subset_search(oracle: &mut Oracle, target: &NodeSet, k: usize) -> Result<SearchReport> {
    check_k(k)?;
    let mut report = SearchReport::new(k);
    loop {
        let rel = oracle.relevant_nodes(target);
        if rel.is_empty() {
            break;
        }
        let h = oracle.current().induced(&rel);
        let mut batch = InterventionSet::new(k);
        for comp in h.chain_components() {
            if comp.len() < 2 {
                continue;
            }
            let sep = separator_on(&h, &comp)?;
            batch.extend(&labelled_batches(&sep, k));
        }
        report.submit(oracle, &batch)?;
    }
    report.final_graph = oracle.current().clone();
    Ok(report)
}

/// Subset search over every node.
pub fn full_search(oracle: &mut Oracle, k: usize) -> Result<SearchReport> {
    let all = oracle.current().all_nodes();
    subset_search(oracle, &all, k)
}

/// Advice-guided search using the deterministic minimum verifying set of `advice`.
pub fn advice_search(oracle: &mut Oracle, advice: &Dag, k: usize) -> Result<SearchReport> {
    check_advice(oracle, advice)?;
    advice_search_from(oracle, &verifying_set_atomic(advice), k)
}

/// Advice-guided search starting from an explicit verifying set `vtilde` of the advice.
///
/// After intervening on `vtilde`, radii `r = 0, 1, ..` are scanned in the public
/// skeleton. When the relevant nodes within radius `r` reach `n_i²`, the search
/// orients radius `r - 1` and then radius `r`, and `n_i` becomes that count. If the
/// ball stops growing before a trigger fires, the remaining graph is searched in full.
pub fn advice_search_from(oracle: &mut Oracle, vtilde: &NodeSet, k: usize) -> Result<SearchReport> {
    check_k(k)?;
    let mut report = SearchReport::new(k);
    let first = labelled_batches(vtilde, k);
    report.submit(oracle, &first)?;
    report.initial = first.len();

    let skel = oracle.skeleton().clone();
    let (mut r, mut i, mut n_i) = (0usize, 0usize, 2usize);
    while !oracle.is_fully_oriented() {
        let ball = skel.hop_neighborhood(vtilde, r)?;
        let rho = oracle.relevant_nodes(&ball).len();
        if rho >= n_i * n_i {
            assert!(r >= 1, "no relevant nodes remain inside the intervened set");
            i += 1;
            n_i = rho;
            let inner = skel.hop_neighborhood(vtilde, r - 1)?;
            let c = subset_search(oracle, &inner, k)?;
            report.absorb(&c);
            let mut round = Round { i, r, n_i, c: c.total, c_prime: 0, safeguard: false };
            if !oracle.is_fully_oriented() {
                let c2 = subset_search(oracle, &ball, k)?;
                report.absorb(&c2);
                round.c_prime = c2.total;
            }
            report.rounds.push(round);
        } else if skel.hop_neighborhood(vtilde, r + 1)? == ball {
            let all = skel.all_nodes();
            let c = subset_search(oracle, &all, k)?;
            report.absorb(&c);
            report.rounds.push(Round { i: i + 1, r, n_i: rho, c: c.total, c_prime: 0, safeguard: true });
            break;
        }
        r += 1;
    }
    report.final_graph = oracle.current().clone();
    Ok(report)
}

/// Advice search with partially oriented advice, completed by [`extend_mpdag`].
pub fn advice_search_mpdag(oracle: &mut Oracle, mpdag: &Pdag, k: usize) -> Result<SearchReport> {
    let advice = extend_mpdag(mpdag)?;
    advice_search(oracle, &advice, k)
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidParameter("intervention size k must be at least 1".into()));
    }
    Ok(())
}

/// Advice must share the observational essential graph; nothing else about the truth is consulted.
fn check_advice(oracle: &Oracle, advice: &Dag) -> Result<()> {
    if advice.ids() != oracle.observational().ids() || &essential_graph(advice) != oracle.observational() {
        return Err(Error::InconsistentAdvice);
    }
    Ok(())
}

//! Orientation closure under Meek's rules R1-R4.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{Arc2, Pdag};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    R1,
    R2,
    R3,
    R4,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// One oriented arc and the rule that forced it.
pub type TraceStep = (Rule, Arc2);

/// Applies R1-R4 until no rule fires.
pub fn meek_closure(g: &Pdag) -> Result<Pdag> {
    closure_with_trace(g).map(|(g, _)| g)
}

/// The orientations performed by [`meek_closure`], in order.
pub fn rule_trace(g: &Pdag) -> Result<Vec<TraceStep>> {
    closure_with_trace(g).map(|(_, t)| t)
}

/// Closure plus its trace. Undirected pairs are examined smallest first; after
/// each orientation `u -> w` only pairs touching `N[u] ∪ N[w]` are revisited.
pub fn closure_with_trace(g: &Pdag) -> Result<(Pdag, Vec<TraceStep>)> {
    let mut g = g.clone();
    let mut trace = Vec::new();
    loop {
        let mut work: BTreeSet<Arc2> = g.edges().collect();
        let before = trace.len();
        while let Some((a, b)) = work.pop_first() {
            if !g.has_edge(a, b) {
                continue;
            }
            let fwd = forcing_rule(&g, a, b);
            let back = forcing_rule(&g, b, a);
            let (rule, u, w) = match (fwd, back) {
                (Some(_), Some(_)) => {
                    return Err(Error::MeekConflict(g.name(a).to_string(), g.name(b).to_string()));
                }
                (Some(r), None) => (r, a, b),
                (None, Some(r)) => (r, b, a),
                (None, None) => continue,
            };
            g.orient(u, w);
            trace.push((rule, (u, w)));
            let mut touched = g.neighbors(u);
            touched.extend(g.neighbors(w));
            touched.insert(u);
            touched.insert(w);
            for x in touched {
                for &y in g.undirected_neighbors(x) {
                    work.insert((x.min(y), x.max(y)));
                }
            }
        }
        // a final sweep guards against rules whose premises changed shape mid-pass
        if trace.len() == before {
            return Ok((g, trace));
        }
    }
}

/// Which rule, if any, forces the undirected edge `a - b` into `a -> b`.
pub fn forcing_rule(g: &Pdag, a: usize, b: usize) -> Option<Rule> {
    // R1: c -> a - b with c, b non-adjacent
    if g.parents(a).iter().any(|&c| !g.is_adjacent(c, b)) {
        return Some(Rule::R1);
    }
    // R2: a -> c -> b
    if g.children(a).iter().any(|c| g.parents(b).contains(c)) {
        return Some(Rule::R2);
    }
    // R3: c - a - d, c -> b <- d, c and d non-adjacent
    let mids: Vec<usize> = g
        .undirected_neighbors(a)
        .iter()
        .copied()
        .filter(|c| g.parents(b).contains(c))
        .collect();
    for (i, &c) in mids.iter().enumerate() {
        if mids[i + 1..].iter().any(|&d| !g.is_adjacent(c, d)) {
            return Some(Rule::R3);
        }
    }
    // R4: d - a, d -> c -> b, a adjacent to c, d and b non-adjacent
    for &d in g.undirected_neighbors(a) {
        if d == b || g.is_adjacent(d, b) {
            continue;
        }
        if g.children(d).iter().any(|&c| g.parents(b).contains(&c) && g.is_adjacent(a, c)) {
            return Some(Rule::R4);
        }
    }
    None
}

/// Applies a trace to `g` without re-checking the rules.
pub fn replay(g: &Pdag, trace: &[TraceStep]) -> Pdag {
    let mut g = g.clone();
    for &(_, (u, w)) in trace {
        g.orient(u, w);
    }
    g
}

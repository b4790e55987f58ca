//! Small reference graphs with hand-checked properties, shared by tests,
//! examples and the command line.

use std::collections::BTreeSet;

use crate::graph::{Arc2, Dag, Ordering, Pdag};

fn dag(nodes: &[&str], arcs: &[(&str, &str)]) -> Dag {
    Dag::build(nodes.iter().copied(), arcs).expect("fixture is a valid DAG")
}

/// Six-node DAG with a single v-structure `C -> E <- D`.
pub fn six_node_truth() -> Dag {
    dag(
        &["A", "B", "C", "D", "E", "F"],
        &[
            ("A", "B"),
            ("A", "C"),
            ("A", "D"),
            ("B", "D"),
            ("C", "E"),
            ("D", "E"),
            ("D", "F"),
            ("E", "F"),
        ],
    )
}

/// Essential graph of [`six_node_truth`].
pub fn six_node_essential() -> Pdag {
    Pdag::build(
        ["A", "B", "C", "D", "E", "F"],
        &[("C", "E"), ("D", "E"), ("D", "F"), ("E", "F")],
        &[("A", "B"), ("A", "C"), ("A", "D"), ("B", "D")],
    )
    .expect("valid fixture")
}

/// [`six_node_essential`] with background arcs `B -> A`, `B -> D` closed under the Meek rules.
pub fn six_node_mpdag() -> Pdag {
    Pdag::build(
        ["A", "B", "C", "D", "E", "F"],
        &[
            ("B", "A"),
            ("A", "C"),
            ("B", "D"),
            ("C", "E"),
            ("D", "E"),
            ("D", "F"),
            ("E", "F"),
        ],
        &[("A", "D")],
    )
    .expect("valid fixture")
}

/// Two members of one MEC with verification numbers 2 and 1.
pub fn tight() -> (Dag, Dag) {
    let nodes = ["a", "b", "c", "d"];
    (
        dag(&nodes, &[("b", "a"), ("c", "a"), ("c", "b"), ("c", "d")]),
        dag(&nodes, &[("b", "a"), ("c", "a"), ("b", "c"), ("c", "d")]),
    )
}

/// Truth and advice where the advice pulls a tail of `z` nodes into the wrong direction.
/// Returns `(truth, advice)`.
pub fn psi_example() -> (Dag, Dag) {
    let nodes = ["a", "b", "c", "d", "e", "z1", "z2", "z3", "z4"];
    let truth = dag(
        &nodes,
        &[
            ("e", "d"),
            ("e", "c"),
            ("d", "c"),
            ("c", "b"),
            ("c", "a"),
            ("b", "a"),
            ("c", "z4"),
            ("z4", "z3"),
            ("z3", "z2"),
            ("z2", "z1"),
        ],
    );
    let advice = dag(
        &nodes,
        &[
            ("z1", "z2"),
            ("z2", "z3"),
            ("z3", "z4"),
            ("z4", "c"),
            ("c", "a"),
            ("c", "b"),
            ("c", "d"),
            ("c", "e"),
            ("b", "a"),
            ("e", "d"),
        ],
    );
    (truth, advice)
}

/// Path `v1 - v2 - v3` with spokes `v3 - v4 .. vn`. Returns `(truth, advice)` where the
/// truth is rooted at `v2` and the advice at `v1`.
pub fn star(n: usize) -> (Dag, Dag) {
    assert!(n >= 4);
    let names: Vec<String> = (1..=n).map(|i| format!("v{i}")).collect();
    let mut truth = vec![("v2".to_string(), "v1".to_string()), ("v2".into(), "v3".into())];
    let mut advice = vec![("v1".to_string(), "v2".to_string()), ("v2".into(), "v3".into())];
    for name in &names[3..] {
        truth.push(("v3".into(), name.clone()));
        advice.push(("v3".into(), name.clone()));
    }
    (
        Dag::build(&names, &truth).expect("valid fixture"),
        Dag::build(&names, &advice).expect("valid fixture"),
    )
}

/// Zero-padded node names `v1..vn` so that text order equals numeric order.
pub fn padded_names(n: usize) -> Vec<String> {
    let width = n.to_string().len();
    (1..=n).map(|i| format!("v{i:0width$}")).collect()
}

/// Directed path on `n` nodes whose unique source is node `root` (0-based).
pub fn path_dag(n: usize, root: usize) -> Dag {
    assert!(root < n);
    let names = padded_names(n);
    let mut arcs = Vec::with_capacity(n.saturating_sub(1));
    for i in 0..n.saturating_sub(1) {
        if i < root {
            arcs.push((names[i + 1].clone(), names[i].clone()));
        } else {
            arcs.push((names[i].clone(), names[i + 1].clone()));
        }
    }
    Dag::build(&names, &arcs).expect("valid fixture")
}

/// Reversal pair with ordering and conditioning set: `(g1, pi1, s, g2)` where `g2`
/// reverses the covered arc `x -> y` of `g1`.
pub fn reversal_example() -> (Dag, Ordering, BTreeSet<Arc2>, Dag) {
    let nodes = ["a", "b", "u", "x", "y"];
    let common = [
        ("a", "x"),
        ("a", "y"),
        ("a", "u"),
        ("a", "b"),
        ("x", "b"),
        ("x", "u"),
        ("y", "b"),
    ];
    let mut a1 = common.to_vec();
    a1.push(("x", "y"));
    let mut a2 = common.to_vec();
    a2.push(("y", "x"));
    let g1 = dag(&nodes, &a1);
    let g2 = dag(&nodes, &a2);
    let pi = ranks(&g1, &[("a", 1), ("x", 2), ("u", 3), ("y", 4), ("b", 5)]);
    let s = arc_set(&g1, &common);
    (g1, pi, s, g2)
}

/// Variant of [`reversal_example`] without the common parent: `(g3, pi3, s)`.
pub fn reversal_example_rootless() -> (Dag, Ordering, BTreeSet<Arc2>) {
    let nodes = ["b", "u", "x", "y"];
    let g3 = dag(&nodes, &[("x", "b"), ("x", "y"), ("x", "u"), ("y", "b")]);
    let pi = ranks(&g3, &[("x", 1), ("u", 2), ("y", 3), ("b", 4)]);
    let s = arc_set(&g3, &[("x", "b"), ("x", "u"), ("y", "b")]);
    (g3, pi, s)
}

fn ranks(g: &Dag, pairs: &[(&str, usize)]) -> Ordering {
    let mut r = vec![0; g.n()];
    for &(name, k) in pairs {
        r[g.index_of(name).expect("fixture node")] = k;
    }
    Ordering::from_ranks(r).expect("fixture ordering")
}

fn arc_set(g: &Dag, arcs: &[(&str, &str)]) -> BTreeSet<Arc2> {
    arcs.iter()
        .map(|(u, v)| (g.index_of(u).expect("node"), g.index_of(v).expect("node")))
        .collect()
}

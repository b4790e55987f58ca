//! Canonical JSON graph format.
//!
//! `{"nodes":[..],"directed":[[tail,head],..],"undirected":[[low,high],..]}`
//! with nodes and pair lists sorted. Saving is bit-exact for equal graphs.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::{Dag, Pdag};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    nodes: Vec<String>,
    #[serde(default)]
    directed: Vec<(String, String)>,
    #[serde(default)]
    undirected: Vec<(String, String)>,
}

pub fn load_graph(text: &str) -> Result<Pdag> {
    let f: GraphFile = serde_json::from_str(text)?;
    Pdag::build(&f.nodes, &f.directed, &f.undirected)
}

pub fn save_graph(g: &Pdag) -> String {
    let name = |v: usize| g.name(v).to_string();
    let f = GraphFile {
        nodes: g.ids().iter().map(|id| id.to_string()).collect(),
        directed: g.arcs().map(|(u, v)| (name(u), name(v))).collect(),
        undirected: g.edges().map(|(u, v)| (name(u), name(v))).collect(),
    };
    serde_json::to_string(&f).expect("graph serializes")
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<Pdag> {
    load_graph(&std::fs::read_to_string(path)?)
}

pub fn read_dag(path: impl AsRef<Path>) -> Result<Dag> {
    Dag::new(read_graph(path)?)
}

pub fn write_graph(path: impl AsRef<Path>, g: &Pdag) -> Result<()> {
    let mut text = save_graph(g);
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn single_arc() {
        let g = load_graph(r#"{"nodes":["A","B"],"directed":[["A","B"]],"undirected":[]}"#).unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.arc_set().into_iter().collect::<Vec<_>>(), vec![(0, 1)]);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn duplicate_pair_rejected() {
        let err = load_graph(r#"{"nodes":["A","B"],"directed":[["A","B"]],"undirected":[["B","A"]]}"#).unwrap_err();
        assert!(err.to_string().contains("duplicate pair"), "{err}");
    }

    #[test]
    fn unknown_endpoint_and_parse_errors() {
        let err = load_graph(r#"{"nodes":["A"],"directed":[["A","Q"]]}"#).unwrap_err();
        assert_eq!(err, Error::UnknownNode("Q".into()));
        let err = load_graph("{\n\"nodes\": [\"A\",\n 3]}").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn canonical_save_sorts() {
        let text = r#"{"nodes":["c","a","b"],"directed":[["c","a"]],"undirected":[["c","b"]]}"#;
        let g = load_graph(text).unwrap();
        assert_eq!(
            save_graph(&g),
            r#"{"nodes":["a","b","c"],"directed":[["c","a"]],"undirected":[["b","c"]]}"#
        );
        assert_eq!(load_graph(&save_graph(&g)).unwrap(), g);
    }
}

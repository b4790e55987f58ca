//! Active causal structure learning with DAG advice.
//!
//! The crate simulates ideal interventions against a hidden DAG and provides
//! the graph machinery around it: essential graphs and Meek closure, covered
//! edges and verification numbers, chordal separators, advice-free and
//! advice-guided adaptive search, and an experiment pipeline.

pub mod advice;
pub mod chordal;
pub mod error;
pub mod experiment;
pub mod fixtures;
pub mod graph;
pub mod io;
pub mod mec;
pub mod meek;
pub mod oracle;
pub mod search;
pub mod verification;

pub use error::{Error, Result};
pub use graph::{Ancestry, Arc2, Dag, NodeId, NodeSet, Ordering, Pdag, UGraph};

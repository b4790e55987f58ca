//! Instance generators, MEC sampling and the ψ-bucketed experiment pipeline.
//!
//! Randomness comes from `ChaCha8Rng::seed_from_u64`. Per-trial streams use the
//! seed `seed ^ trial_index`, so results do not depend on scheduling.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::advice::{extend_mpdag, psi_proxy};
use crate::chordal::peo_mcs;
use crate::error::{Error, Result};
use crate::fixtures::padded_names;
use crate::graph::{Dag, NodeSet, UGraph};
use crate::mec::{covered_edges, enumerate_mec, reverse_covered_edge};
use crate::oracle::Oracle;
use crate::search::{advice_search, full_search};
use crate::verification::{nu1, verifying_set_atomic};

pub const CSV_HEADER: &str = "psi,trials,mean_advice,std_advice,nu1,mean_blind,ecdf,eps";

/// Probability that a node of a thickened tree inherits each earlier neighbour of its parent.
pub const THICKEN_DENSITY: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ChordalKind {
    /// Uniform random labelled tree.
    Tree,
    /// Random tree with extra chords inherited along a BFS order.
    Thickened,
    /// Intersection graph of overlapping random intervals.
    Interval,
}

impl FromStr for ChordalKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tree" => Ok(ChordalKind::Tree),
            "thickened" => Ok(ChordalKind::Thickened),
            "interval" => Ok(ChordalKind::Interval),
            other => Err(Error::InvalidParameter(format!("unknown graph kind {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleMode {
    /// Uniform draws from the fully enumerated class.
    Exhaustive,
    /// Random covered-edge-reversal walks; not exactly uniform.
    Walk,
}

impl FromStr for SampleMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" => Ok(SampleMode::Exhaustive),
            "walk" => Ok(SampleMode::Walk),
            other => Err(Error::InvalidParameter(format!("unknown sampling mode {other:?}"))),
        }
    }
}

/// Connected chordal graph on `n` nodes named `v1..vn` (zero padded).
pub fn gen_chordal(kind: ChordalKind, n: usize, seed: u64) -> Result<UGraph> {
    if n < 2 {
        return Err(Error::TooFewNodes { needed: 2, got: n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = match kind {
        ChordalKind::Tree => random_tree(n, &mut rng),
        ChordalKind::Thickened => thickened(n, &mut rng),
        ChordalKind::Interval => intervals(n, &mut rng),
    };
    let names = padded_names(n);
    let pairs: Vec<(&str, &str)> = edges.iter().map(|&(u, v)| (names[u].as_str(), names[v].as_str())).collect();
    UGraph::build(&names, &pairs)
}

/// Prüfer decoding of a uniform random sequence.
fn random_tree(n: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    if n == 2 {
        return vec![(0, 1)];
    }
    let seq: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &s in &seq {
        degree[s] += 1;
    }
    let mut leaves: std::collections::BTreeSet<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &s in &seq {
        let leaf = leaves.pop_first().expect("a leaf exists");
        edges.push((leaf.min(s), leaf.max(s)));
        degree[s] -= 1;
        if degree[s] == 1 {
            leaves.insert(s);
        }
    }
    let rest: Vec<usize> = leaves.into_iter().collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// Each node, visited in BFS order of a random tree, links to its parent and to
/// each earlier neighbour of the parent with probability [`THICKEN_DENSITY`].
/// Earlier neighbourhoods stay cliques, so the BFS order reversed is a perfect
/// elimination ordering.
fn thickened(n: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let tree = random_tree(n, rng);
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in &tree {
        adj[u].push(v);
        adj[v].push(u);
    }
    for a in &mut adj {
        a.sort_unstable();
    }
    let mut earlier: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::from([0usize]);
    seen[0] = true;
    let mut edges = Vec::new();
    while let Some(u) = queue.pop_front() {
        for &w in &adj[u] {
            if seen[w] {
                continue;
            }
            seen[w] = true;
            let mut nb = vec![u];
            for &x in &earlier[u] {
                if rng.gen_bool(THICKEN_DENSITY) {
                    nb.push(x);
                }
            }
            for &x in &nb {
                edges.push((x.min(w), x.max(w)));
            }
            earlier[w] = nb;
            queue.push_back(w);
        }
    }
    edges
}

/// Intervals with increasing starts, each starting before the furthest end so far,
/// which keeps the intersection graph connected.
fn intervals(n: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut spans: Vec<(f64, f64)> = Vec::with_capacity(n);
    let mut start = 0.0f64;
    let mut reach = 0.0f64;
    for i in 0..n {
        if i > 0 {
            start += rng.gen::<f64>() * (reach - start);
        }
        let end = start + 0.5 + rng.gen::<f64>() * 2.5;
        reach = reach.max(end);
        spans.push((start, end));
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if spans[j].0 < spans[i].1 && spans[i].0 < spans[j].1 {
                edges.push((i, j));
            }
        }
    }
    edges
}

/// A moral DAG on a chordal skeleton: orient edges along a maximum cardinality
/// search with uniformly random tie-breaking.
pub fn random_moral_dag(skel: &UGraph, rng: &mut impl Rng) -> Result<Dag> {
    peo_mcs(skel)?;
    let n = skel.n();
    let mut weight = vec![0usize; n];
    let mut pos = vec![usize::MAX; n];
    for step in 0..n {
        let best = (0..n).filter(|&v| pos[v] == usize::MAX).map(|v| weight[v]).max().expect("unvisited node");
        let cands: Vec<usize> = (0..n).filter(|&v| pos[v] == usize::MAX && weight[v] == best).collect();
        let v = cands[rng.gen_range(0..cands.len())];
        pos[v] = step;
        for w in skel.neighbors(v) {
            weight[w] += 1;
        }
    }
    let arcs = skel.edges().map(|(u, v)| if pos[u] < pos[v] { (u, v) } else { (v, u) });
    Dag::new(skel.from_pairs(arcs, std::iter::empty())?)
}

/// MEC samples plus whether they are exactly uniform.
#[derive(Clone, Debug)]
pub struct MecSample {
    pub dags: Vec<Dag>,
    pub uniform: bool,
    /// Class size when enumerated.
    pub class_size: Option<usize>,
}

/// `m` DAGs from the class of moral DAGs on a chordal skeleton.
pub fn sample_mec_dags(skel: &UGraph, m: usize, seed: u64, mode: SampleMode, cap: usize) -> Result<MecSample> {
    peo_mcs(skel)?;
    match mode {
        SampleMode::Exhaustive => {
            let members = enumerate_mec(skel, cap)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let dags = (0..m).map(|_| members[rng.gen_range(0..members.len())].clone()).collect();
            Ok(MecSample { dags, uniform: true, class_size: Some(members.len()) })
        }
        SampleMode::Walk => {
            let start = extend_mpdag(skel)?;
            let steps = 10 * skel.n();
            let dags = (0..m)
                .into_par_iter()
                .map(|t| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ t as u64);
                    covered_walk(&start, steps, &mut rng)
                })
                .collect();
            Ok(MecSample { dags, uniform: false, class_size: None })
        }
    }
}

/// Reverses a uniformly chosen covered edge `steps` times.
pub fn covered_walk(start: &Dag, steps: usize, rng: &mut impl Rng) -> Dag {
    let mut cur = start.clone();
    for _ in 0..steps {
        let c: Vec<_> = covered_edges(&cur).arcs().iter().copied().collect();
        if c.is_empty() {
            break;
        }
        let arc = c[rng.gen_range(0..c.len())];
        cur = reverse_covered_edge(&cur, arc).expect("chosen arc is covered");
    }
    cur
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub psi: usize,
    pub trials: usize,
    pub mean_advice: f64,
    pub std_advice: f64,
    pub nu1: usize,
    pub mean_blind: f64,
    pub ecdf: f64,
    pub eps: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    pub m: usize,
    pub delta: f64,
    pub k: usize,
    pub seed: u64,
    pub mode: SampleMode,
    pub cap: usize,
}

/// Run metadata written next to the CSV.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentSummary {
    pub n: usize,
    pub m: usize,
    pub delta: f64,
    pub k: usize,
    pub seed: u64,
    pub mode: SampleMode,
    pub uniform_sampling: bool,
    pub sampling_note: &'static str,
    pub class_size: Option<usize>,
    pub truth_index: usize,
    pub nu1: usize,
    pub blind: usize,
    pub eps: f64,
}

/// Per-trial record before bucketing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Trial {
    pub psi: usize,
    pub count: usize,
    pub vtilde: usize,
}

#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub rows: Vec<ExperimentRow>,
    pub trials: Vec<Trial>,
    pub summary: ExperimentSummary,
}

/// Confidence radius `max{√(n/m), √((2/m)·ln(2/δ))}`.
pub fn epsilon(n: usize, m: usize, delta: f64) -> f64 {
    let m = m as f64;
    (n as f64 / m).sqrt().max((2.0 / m * (2.0 / delta).ln()).sqrt())
}

/// Samples `m` advice DAGs, picks the truth among them, runs advice search for each
/// advice and blind search once, and buckets intervention counts by ψ.
pub fn run_experiment(skel: &UGraph, cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    if cfg.m == 0 {
        return Err(Error::InvalidParameter("m must be positive".into()));
    }
    if !(cfg.delta > 0.0 && cfg.delta < 1.0) {
        return Err(Error::InvalidParameter(format!("delta must lie in (0,1), got {}", cfg.delta)));
    }
    let sample = sample_mec_dags(skel, cfg.m, cfg.seed, cfg.mode, cfg.cap)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.rotate_left(32));
    let truth_index = rng.gen_range(0..cfg.m);
    let truth = sample.dags[truth_index].clone();
    let nu = nu1(&truth);
    let mut blind_oracle = Oracle::new(truth.clone());
    let blind = full_search(&mut blind_oracle, cfg.k)?.total;
    if blind_oracle.learned_dag().as_ref() != Some(&truth) {
        return Err(Error::InvalidParameter("blind search ended away from the truth".into()));
    }

    let trials: Vec<Trial> = sample
        .dags
        .par_iter()
        .map(|advice| -> Result<Trial> {
            let vtilde: NodeSet = verifying_set_atomic(advice);
            let psi = psi_proxy(&truth, &vtilde)?.psi;
            let mut oracle = Oracle::new(truth.clone());
            let report = advice_search(&mut oracle, advice, cfg.k)?;
            if oracle.learned_dag().as_ref() != Some(&truth) {
                return Err(Error::InvalidParameter("advice search ended away from the truth".into()));
            }
            Ok(Trial { psi, count: report.total, vtilde: vtilde.len() })
        })
        .collect::<Result<_>>()?;

    let eps = epsilon(skel.n(), cfg.m, cfg.delta);
    let mut buckets: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for t in &trials {
        buckets.entry(t.psi).or_default().push(t.count);
    }
    let mut seen = 0usize;
    let rows = buckets
        .into_iter()
        .map(|(psi, counts)| {
            let len = counts.len() as f64;
            let mean = counts.iter().sum::<usize>() as f64 / len;
            let var = counts.iter().map(|&c| (c as f64 - mean).powi(2)).sum::<f64>() / len;
            seen += counts.len();
            ExperimentRow {
                psi,
                trials: counts.len(),
                mean_advice: mean,
                std_advice: var.sqrt(),
                nu1: nu,
                mean_blind: blind as f64,
                ecdf: seen as f64 / cfg.m as f64,
                eps,
            }
        })
        .collect();
    let summary = ExperimentSummary {
        n: skel.n(),
        m: cfg.m,
        delta: cfg.delta,
        k: cfg.k,
        seed: cfg.seed,
        mode: cfg.mode,
        uniform_sampling: sample.uniform,
        sampling_note: if sample.uniform {
            "advice drawn uniformly from the enumerated class"
        } else {
            "advice drawn by covered-edge-reversal walks; NOT exactly uniform"
        },
        class_size: sample.class_size,
        truth_index,
        nu1: nu,
        blind,
        eps,
    };
    Ok(ExperimentResult { rows, trials, summary })
}

pub fn rows_to_csv(rows: &[ExperimentRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{:.6},{:.6},{},{:.6},{:.6},{:.6}",
            r.psi, r.trials, r.mean_advice, r.std_advice, r.nu1, r.mean_blind, r.ecdf, r.eps
        )
        .expect("write to string");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mec::same_mec;

    #[test]
    fn generators_are_connected_chordal_and_deterministic() {
        for kind in [ChordalKind::Tree, ChordalKind::Thickened, ChordalKind::Interval] {
            for n in [2, 3, 16, 40] {
                let g = gen_chordal(kind, n, 7).unwrap();
                assert_eq!(g.n(), n);
                assert!(g.is_connected(), "{kind:?} {n}");
                assert!(peo_mcs(&g).is_ok(), "{kind:?} {n}");
                assert_eq!(g, gen_chordal(kind, n, 7).unwrap());
            }
        }
        let t = gen_chordal(ChordalKind::Tree, 32, 1).unwrap();
        assert_eq!(t.edge_count(), 31);
        assert!(gen_chordal(ChordalKind::Tree, 1, 0).is_err());
    }

    #[test]
    fn eps_formula() {
        assert!((epsilon(16, 1000, 0.01) - 0.126491).abs() < 5e-7);
        let want = (16.0f64 / 200.0).sqrt().max((2.0f64 / 200.0 * 200.0f64.ln()).sqrt());
        assert!((epsilon(16, 200, 0.01) - want).abs() < 1e-12);
    }

    #[test]
    fn p3_sampling_is_uniform() {
        let p3 = UGraph::build(["a", "b", "c"], &[("a", "b"), ("b", "c")]).unwrap();
        let s = sample_mec_dags(&p3, 300, 11, SampleMode::Exhaustive, 10).unwrap();
        let members = enumerate_mec(&p3, 10).unwrap();
        let counts: Vec<usize> = members.iter().map(|m| s.dags.iter().filter(|d| *d == m).count()).collect();
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - 100.0).powi(2) / 100.0).sum();
        // two degrees of freedom, p = 0.001
        assert!(chi2 < 13.82, "{counts:?}");
    }

    #[test]
    fn walk_stays_in_class() {
        let skel = gen_chordal(ChordalKind::Thickened, 10, 3).unwrap();
        let s = sample_mec_dags(&skel, 20, 5, SampleMode::Walk, 0).unwrap();
        let start = extend_mpdag(&skel).unwrap();
        assert!(!s.uniform);
        assert!(s.dags.iter().all(|d| same_mec(d, &start).unwrap()));
        let one = sample_mec_dags(&skel, 1, 5, SampleMode::Exhaustive, 100000).unwrap();
        assert!(same_mec(&one.dags[0], &start).unwrap());
    }

    #[test]
    fn single_trial_experiment() {
        let skel = gen_chordal(ChordalKind::Tree, 8, 2).unwrap();
        let cfg = ExperimentConfig { m: 1, delta: 0.05, k: 1, seed: 9, mode: SampleMode::Exhaustive, cap: 1000 };
        let r = run_experiment(&skel, &cfg).unwrap();
        assert_eq!(r.rows.len(), 1);
        assert_eq!(r.rows[0].ecdf, 1.0);
        assert_eq!(r.rows[0].psi, 0);
        assert_eq!(r.rows[0].mean_advice, r.rows[0].nu1 as f64);
    }

    #[test]
    fn non_chordal_rejected() {
        let c4 = UGraph::build(["a", "b", "c", "d"], &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")]).unwrap();
        let cfg = ExperimentConfig { m: 4, delta: 0.05, k: 1, seed: 0, mode: SampleMode::Exhaustive, cap: 100 };
        assert!(matches!(run_experiment(&c4, &cfg), Err(Error::NotChordal(_))));
    }
}

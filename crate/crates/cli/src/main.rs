use std::path::{Path, PathBuf};
use std::process::ExitCode;

use advsearch::advice::{min_hop_coverage, psi_full, psi_proxy};
use advsearch::experiment::{
    gen_chordal, random_moral_dag, rows_to_csv, run_experiment, ChordalKind, ExperimentConfig, SampleMode,
};
use advsearch::io::{read_dag, read_graph, save_graph};
use advsearch::mec::{enumerate_mec, essential_graph};
use advsearch::oracle::Oracle;
use advsearch::search::{advice_search, full_search, SearchReport};
use advsearch::verification::{verifying_set_atomic, verifying_set_bounded};
use advsearch::{Error, Pdag, UGraph};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

#[derive(Parser)]
#[command(name = "advsearch", version, about = "Adaptive causal structure search with DAG advice")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Tree,
    Thickened,
    Interval,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exhaustive,
    Walk,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a connected chordal skeleton, or a moral DAG on one with --dag.
    Gen {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Orient the skeleton into a random DAG without v-structures.
        #[arg(long)]
        dag: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Essential graph of a DAG.
    Essential {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Minimum verifying set of a DAG.
    Verify {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        json: bool,
    },
    /// Run adaptive search against a hidden DAG, with or without advice.
    Search {
        #[arg(short = 'i', long = "truth", visible_alias = "input")]
        truth: PathBuf,
        #[arg(long)]
        advice: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        json: bool,
    },
    /// Advice quality measures for a truth and an advice DAG.
    Psi {
        #[arg(short = 'i', long = "truth", visible_alias = "input")]
        truth: PathBuf,
        #[arg(long)]
        advice: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        cap: usize,
        #[arg(long)]
        json: bool,
    },
    /// Bucket advice-search costs by advice quality over sampled advice.
    Experiment {
        #[arg(long, visible_alias = "input", short = 'i')]
        skeleton: PathBuf,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        cap: usize,
        #[arg(long, value_enum, default_value = "exhaustive")]
        mode: Mode,
        /// CSV path; a `.meta.json` sidecar is written next to it.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// List every DAG in the class described by a graph.
    MecEnum {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        cap: usize,
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, Error::CapExceeded { .. }) {
                eprintln!("hint: raise --cap or use --mode walk");
            }
            ExitCode::from(2)
        }
    }
}

fn emit(output: Option<&Path>, text: &str) -> advsearch::Result<()> {
    match output {
        Some(p) => Ok(std::fs::write(p, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn graph_text(g: &Pdag) -> String {
    format!("{}\n", save_graph(g))
}

fn report_json(g: &Pdag, r: &SearchReport) -> serde_json::Value {
    json!({
        "total": r.total,
        "initial": r.initial,
        "interventions": r.interventions.sets().iter().map(|s| g.names_of(s)).collect::<Vec<_>>(),
        "rounds": r.rounds,
    })
}

fn run(cmd: Command) -> advsearch::Result<()> {
    match cmd {
        Command::Gen { kind, n, seed, dag, output } => {
            let kind = match kind {
                Kind::Tree => ChordalKind::Tree,
                Kind::Thickened => ChordalKind::Thickened,
                Kind::Interval => ChordalKind::Interval,
            };
            let skel = gen_chordal(kind, n, seed)?;
            let g = if dag {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
                random_moral_dag(&skel, &mut rng)?.into_pdag()
            } else {
                skel.into_pdag()
            };
            emit(output.as_deref(), &graph_text(&g))
        }
        Command::Essential { input, output } => {
            let g = read_dag(input)?;
            emit(output.as_deref(), &graph_text(&essential_graph(&g)))
        }
        Command::Verify { input, k, json } => {
            let g = read_dag(input)?;
            if k == 0 {
                return Err(Error::InvalidParameter("k must be at least 1".into()));
            }
            let cover = verifying_set_atomic(&g);
            let sets = verifying_set_bounded(&g, k);
            let batches: Vec<Vec<String>> = sets.sets().iter().map(|s| g.names_of(s)).collect();
            if json {
                let v = json!({"nu1": cover.len(), "cover": g.names_of(&cover), "k": k, "interventions": batches});
                println!("{v}");
            } else {
                println!("nu1 {}", cover.len());
                println!("cover {}", g.names_of(&cover).join(" "));
                if k > 1 {
                    println!("interventions {}", batches.len());
                    for b in &batches {
                        println!("  {}", b.join(" "));
                    }
                }
            }
            Ok(())
        }
        Command::Search { truth, advice, k, json } => {
            let truth = read_dag(truth)?;
            let mut oracle = Oracle::new(truth.clone());
            let report = match advice {
                Some(p) => advice_search(&mut oracle, &read_dag(p)?, k)?,
                None => full_search(&mut oracle, k)?,
            };
            let learned = oracle.learned_dag().as_ref() == Some(&truth);
            if json {
                let mut v = report_json(&truth, &report);
                v["learned"] = json!(learned);
                println!("{v}");
            } else {
                println!("interventions {}", report.total);
                for s in report.interventions.sets() {
                    println!("  {}", truth.names_of(s).join(" "));
                }
                for r in &report.rounds {
                    let tag = if r.safeguard { " safeguard" } else { "" };
                    println!("round {} r={} n_i={} c={} c'={}{tag}", r.i, r.r, r.n_i, r.c, r.c_prime);
                }
                println!("learned {learned}");
            }
            Ok(())
        }
        Command::Psi { truth, advice, cap, json } => {
            let truth = read_dag(truth)?;
            let advice = read_dag(advice)?;
            let full = psi_full(&truth, &advice, cap)?;
            let vtilde = verifying_set_atomic(&advice);
            let h = min_hop_coverage(&truth, &vtilde)?;
            let q = psi_proxy(&truth, &vtilde)?;
            if json {
                let v = json!({
                    "cover": truth.names_of(&vtilde),
                    "h": h,
                    "psi_proxy": q.psi,
                    "psi": full,
                    "rho_by_radius": q.rho_by_radius,
                });
                println!("{v}");
            } else {
                println!("cover {}", truth.names_of(&vtilde).join(" "));
                println!("h {h}");
                println!("psi_proxy {}", q.psi);
                println!("psi {full}");
            }
            Ok(())
        }
        Command::Experiment { skeleton, m, delta, k, seed, cap, mode, output, json } => {
            let skel = UGraph::new(read_graph(skeleton)?)?;
            let mode = match mode {
                Mode::Exhaustive => SampleMode::Exhaustive,
                Mode::Walk => SampleMode::Walk,
            };
            let cfg = ExperimentConfig { m, delta, k, seed, mode, cap };
            let result = run_experiment(&skel, &cfg)?;
            let csv = rows_to_csv(&result.rows);
            let meta = serde_json::to_string_pretty(&result.summary)? + "\n";
            if let Some(path) = output.as_deref() {
                std::fs::write(path, &csv)?;
                let mut side = path.as_os_str().to_owned();
                side.push(".meta.json");
                std::fs::write(PathBuf::from(side), &meta)?;
                if json {
                    print!("{meta}");
                }
            } else if json {
                print!("{meta}");
            } else {
                print!("{csv}");
            }
            Ok(())
        }
        Command::MecEnum { input, cap, json } => {
            let g = read_graph(input)?;
            let members = enumerate_mec(&g, cap)?;
            if json {
                let all: Vec<serde_json::Value> =
                    members.iter().map(|d| serde_json::from_str(&save_graph(d)).expect("valid json")).collect();
                println!("{}", serde_json::Value::Array(all));
            } else {
                println!("members {}", members.len());
                for d in &members {
                    let arcs: Vec<String> = d.arcs().map(|a| d.arc_name(a)).collect();
                    println!("  {}", arcs.join(" "));
                }
            }
            Ok(())
        }
    }
}

//! Command-line front end. Reports go to stdout (or `--out`) as JSON, sweeps
//! as CSV. Exit codes: 0 success, 1 bad input, 2 validation failure,
//! 3 numeric invariant violation.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use psi_monotones::graph::PsiGraph;
use psi_monotones::io::{self, CertificateFile};
use psi_monotones::locc::{self, FuzzReport};
use psi_monotones::monotones::{Exponent, GraphSource, MonotoneSpec};
use psi_monotones::reflect::{self, CertificateStatus, DEFAULT_SEARCH_CAP};
use psi_monotones::tensor::{self, InvariantEvaluator};
use psi_monotones::Error;

#[derive(Parser)]
#[command(name = "psimono", version, about = "Graph-encoded entanglement monotones and LOCC bounds")]
struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Graph validation, reflecting cuts and certificates.
    #[command(subcommand)]
    Graph(GraphCmd),
    /// Invariant evaluation.
    #[command(subcommand)]
    Invariant(InvariantCmd),
    /// Monotone evaluation.
    #[command(subcommand)]
    Monotone(MonotoneCmd),
    /// Transition-probability bounds.
    #[command(subcommand)]
    Bounds(BoundsCmd),
    /// Randomized property checks.
    #[command(subcommand)]
    Fuzz(FuzzCmd),
    /// Certificate files.
    #[command(subcommand)]
    Certificate(CertificateCmd),
}

#[derive(Subcommand)]
enum GraphCmd {
    /// Validate a graph and report its reflecting cuts.
    Check {
        graph: PathBuf,
        /// Restrict the per-label analysis to this label.
        #[arg(long)]
        label: Option<usize>,
        /// Also verify this certificate against the graph.
        #[arg(long)]
        certificate: Option<PathBuf>,
        /// Vertex cap for the automorphism search.
        #[arg(long, default_value_t = DEFAULT_SEARCH_CAP)]
        cap: usize,
    },
}

#[derive(Subcommand)]
enum InvariantCmd {
    /// Contract a graph against a state.
    Eval {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        state: PathBuf,
        /// Trace out this party and evaluate on the reduced density matrix.
        #[arg(long, value_name = "PARTY")]
        as_density: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Vidal,
    Graph,
    Bl,
    Multirenyi,
}

#[derive(Subcommand)]
enum MonotoneCmd {
    /// Evaluate a monotone on a state, emitting `{value, diagnostics}`.
    Eval(MonotoneEval),
}

#[derive(Args)]
struct MonotoneEval {
    #[arg(long)]
    state: PathBuf,
    /// Monotone family; ignored when `--spec` is given.
    #[arg(long, value_enum, required_unless_present = "spec")]
    kind: Option<Kind>,
    /// Full monotone description as JSON.
    #[arg(long, conflicts_with = "kind")]
    spec: Option<PathBuf>,
    /// Parties on one side of the bipartition (vidal).
    #[arg(long, value_delimiter = ',', default_value = "0")]
    parties: Vec<usize>,
    /// Number of leading Schmidt eigenvalues (vidal).
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Graph file (graph).
    #[arg(long, conflicts_with_all = ["cycle", "cycle_product", "hypercube"])]
    graph: Option<PathBuf>,
    /// Treat `--graph` as convex without certificate search.
    #[arg(long, requires = "graph")]
    trusted: bool,
    /// Cycle graph C_n (graph).
    #[arg(long)]
    cycle: Option<usize>,
    /// Product of cycles, e.g. `1,3` (graph).
    #[arg(long, value_delimiter = ',')]
    cycle_product: Option<Vec<usize>>,
    /// Hypercube on q parties (graph).
    #[arg(long)]
    hypercube: Option<usize>,
    /// Exponent `a/b` applied to Z (graph); defaults to one over the ket count.
    #[arg(long)]
    exponent: Option<String>,
    /// Party count (multirenyi).
    #[arg(long)]
    q: Option<usize>,
    /// Projector ranks (bl).
    #[arg(long, value_delimiter = ',')]
    ranks: Option<Vec<usize>>,
    /// Random restarts (bl).
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum BoundsCmd {
    /// Sweep the GHZ-class deformation and emit CSV.
    GhzExample {
        #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
        alpha_min: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        alpha_max: f64,
        #[arg(long, default_value_t = 81)]
        steps: usize,
        #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
        ns: Vec<usize>,
    },
}

#[derive(Subcommand)]
enum FuzzCmd {
    /// Check averaged monotonicity under random one-party instruments.
    Monotonicity {
        /// Monotone description as JSON.
        #[arg(long)]
        spec: PathBuf,
        /// Local dimensions; defaults to qubits on every party of the spec.
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum CertificateCmd {
    /// Verify a certificate file.
    Verify {
        certificate: PathBuf,
        /// Graph to check against; defaults to the graph embedded in the file.
        #[arg(long)]
        graph: Option<PathBuf>,
    },
}

/// Outcome of a subcommand before exit-code mapping.
enum Outcome {
    Pass,
    ValidationFailed,
    InvariantViolated,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            eprintln!("error: {}", first_line(&msg));
            return ExitCode::from(1);
        }
    };
    match run(&cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::ValidationFailed) => ExitCode::from(2),
        Ok(Outcome::InvariantViolated) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {}", first_line(&e.to_string()));
            ExitCode::from(exit_code(&e))
        }
    }
}

fn first_line(s: &str) -> &str {
    s.trim_start_matches("error: ").lines().next().unwrap_or("")
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidGraph(_) | Error::CertificateMismatch(_) => 2,
        Error::InvariantViolation(_) | Error::NonRealInvariant { .. } | Error::OutOfRange(_) => 3,
        _ => 1,
    }
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Graph(GraphCmd::Check {
            graph,
            label,
            certificate,
            cap,
        }) => graph_check(graph, *label, certificate.as_deref(), *cap, out),
        Command::Invariant(InvariantCmd::Eval {
            graph,
            state,
            as_density,
        }) => invariant_eval(graph, state, *as_density, out),
        Command::Monotone(MonotoneCmd::Eval(args)) => monotone_eval(args, out),
        Command::Bounds(BoundsCmd::GhzExample {
            alpha_min,
            alpha_max,
            steps,
            ns,
        }) => ghz_example(*alpha_min, *alpha_max, *steps, ns, out),
        Command::Fuzz(FuzzCmd::Monotonicity {
            spec,
            dims,
            trials,
            seed,
        }) => fuzz(spec, dims.as_deref(), *trials, *seed, out),
        Command::Certificate(CertificateCmd::Verify { certificate, graph }) => {
            certificate_verify(certificate, graph.as_deref(), out)
        }
    }
}

fn emit_text(text: &str, out: Option<&Path>) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), Error> {
    emit_text(&io::to_json_string(value)?, out)
}

fn graph_check(
    path: &Path,
    label: Option<usize>,
    certificate: Option<&Path>,
    cap: usize,
    out: Option<&Path>,
) -> Result<Outcome, Error> {
    let g: PsiGraph = io::read_json(path)?;
    let validation = g.validate();
    if !validation.passed() {
        emit(&json!({ "valid": false, "validation": validation }), out)?;
        return Ok(Outcome::ValidationFailed);
    }
    if let Some(l) = label {
        if l >= g.party_count() {
            return Err(Error::PartyOutOfRange {
                party: l,
                parties: g.party_count(),
            });
        }
    }
    let cuts = reflect::enumerate_reflecting_cuts_capped(&g, cap)?;
    let labels: Vec<usize> = match label {
        Some(l) => vec![l],
        None => (0..g.party_count()).collect(),
    };
    let per_label: Vec<Value> = labels
        .iter()
        .map(|&l| {
            let decision = reflect::edge_reflecting_with(&g, l, &cuts);
            let status = match reflect::constructive_certificate(&g, l)? {
                CertificateStatus::Verified(..) => "verified",
                CertificateStatus::Unknown => "unknown",
                CertificateStatus::NotEdgeReflecting(_) => "not_edge_reflecting",
            };
            Ok(json!({ "label": l, "edge_reflecting": decision, "certificate_status": status }))
        })
        .collect::<Result<_, Error>>()?;
    let mut report = json!({
        "valid": true,
        "vertices": g.vertex_count(),
        "edges": g.edges().len(),
        "party_count": g.party_count(),
        "ket_count": g.ket_count(),
        "parity_symmetric": reflect::is_parity_symmetric(&g),
        "reflecting_cut_count": cuts.len(),
        "reflecting_cuts": cuts.iter().map(|c| c.cut_edges()).collect::<Vec<_>>(),
        "labels": per_label,
        "vertex_reflecting": reflect::vertex_reflecting_with(&g, &cuts),
    });
    let all_reflecting = per_label_holds(&report);
    if all_reflecting {
        report["distance_property"] = serde_json::to_value(reflect::cut_count_with(&g, &cuts))?;
    }
    let mut outcome = Outcome::Pass;
    if let Some(cpath) = certificate {
        let file: CertificateFile = io::read_json(cpath)?;
        let cert = file.to_certificate(&g)?;
        let verification = reflect::verify_certificate(&g, &cert)?;
        if !verification.passed {
            outcome = Outcome::ValidationFailed;
        }
        report["certificate"] = serde_json::to_value(verification)?;
    }
    emit(&report, out)?;
    Ok(outcome)
}

fn per_label_holds(report: &Value) -> bool {
    report["labels"]
        .as_array()
        .is_some_and(|ls| ls.iter().all(|l| l["edge_reflecting"]["holds"] == json!(true)))
}

fn invariant_eval(graph: &Path, state: &Path, as_density: Option<usize>, out: Option<&Path>) -> Result<Outcome, Error> {
    let g = io::read_graph(graph)?;
    let psi = io::read_state(state)?;
    let value = match as_density {
        None => tensor::evaluate_invariant(&g, &psi)?,
        Some(party) => {
            let rho = tensor::partial_trace(&psi, party)?;
            let mut dims = psi.dims().to_vec();
            dims[party] = 1;
            InvariantEvaluator::new(&g, &dims)?.evaluate_on_density(party, &rho)?
        }
    };
    emit(
        &json!({
            "re": value.re,
            "im": value.im,
            "parity_symmetric": value.parity_symmetric,
            "ket_count": g.ket_count(),
            "as_density": as_density,
        }),
        out,
    )?;
    Ok(Outcome::Pass)
}

fn parse_exponent(s: &str) -> Result<Exponent, Error> {
    let bad = || Error::InvalidArgument(format!("exponent {s:?} is not of the form a/b"));
    let (a, b) = s.split_once('/').ok_or_else(bad)?;
    let num = a.trim().parse().map_err(|_| bad())?;
    let den: u64 = b.trim().parse().map_err(|_| bad())?;
    if den == 0 {
        return Err(bad());
    }
    Ok(Exponent { num, den })
}

fn spec_from_args(a: &MonotoneEval) -> Result<MonotoneSpec, Error> {
    if let Some(path) = &a.spec {
        return io::read_json(path);
    }
    let missing = |what: &str| Error::InvalidArgument(format!("missing --{what}"));
    Ok(match a.kind.expect("clap requires kind or spec") {
        Kind::Vidal => MonotoneSpec::vidal(&a.parties, a.k),
        Kind::Multirenyi => MonotoneSpec::MultiRenyi {
            q: a.q.ok_or_else(|| missing("q"))?,
        },
        Kind::Bl => MonotoneSpec::Bl {
            ranks: a.ranks.clone().ok_or_else(|| missing("ranks"))?,
            restarts: a.restarts,
            seed: a.seed,
        },
        Kind::Graph => {
            let source = if let Some(path) = &a.graph {
                GraphSource::Explicit {
                    graph: io::read_graph(path)?,
                    trusted: a.trusted,
                }
            } else if let Some(n) = a.cycle {
                GraphSource::Cycle { n }
            } else if let Some(ns) = &a.cycle_product {
                GraphSource::CycleProduct { ns: ns.clone() }
            } else if let Some(q) = a.hypercube {
                GraphSource::Hypercube { q }
            } else {
                return Err(missing("graph, --cycle, --cycle-product or --hypercube"));
            };
            MonotoneSpec::Graph {
                graph: source,
                exponent: a.exponent.as_deref().map(parse_exponent).transpose()?,
            }
        }
    })
}

fn monotone_eval(a: &MonotoneEval, out: Option<&Path>) -> Result<Outcome, Error> {
    let psi = io::read_state(&a.state)?;
    let spec = spec_from_args(a)?;
    let value = spec.prepare(psi.dims())?.evaluate_detailed(&psi)?;
    emit(&value, out)?;
    Ok(Outcome::Pass)
}

fn ghz_example(min: f64, max: f64, steps: usize, ns: &[usize], out: Option<&Path>) -> Result<Outcome, Error> {
    if steps == 0 || !min.is_finite() || !max.is_finite() || min > max {
        return Err(Error::InvalidArgument("need finite alpha-min <= alpha-max and steps >= 1".into()));
    }
    let grid = locc::alpha_grid(min, max, steps);
    let rows = locc::ghz_sweep(&grid, ns)?;
    let mut buf = Vec::new();
    io::write_sweep_csv(&mut buf, ns, &rows)?;
    emit_text(&String::from_utf8(buf).expect("csv is utf-8"), out)?;
    Ok(Outcome::Pass)
}

fn spec_party_count(spec: &MonotoneSpec) -> Result<usize, Error> {
    Ok(match spec {
        MonotoneSpec::Vidal { parties, .. } => parties.iter().max().map_or(2, |&m| (m + 1).max(2)),
        MonotoneSpec::Graph { graph, .. } => graph.build()?.0.party_count(),
        MonotoneSpec::MultiRenyi { q } => *q,
        MonotoneSpec::Bl { ranks, .. } => ranks.len(),
    })
}

fn fuzz(spec: &Path, dims: Option<&[usize]>, trials: usize, seed: u64, out: Option<&Path>) -> Result<Outcome, Error> {
    let spec: MonotoneSpec = io::read_json(spec)?;
    let dims = match dims {
        Some(d) => d.to_vec(),
        None => vec![2; spec_party_count(&spec)?],
    };
    let report: FuzzReport = locc::fuzz_monotonicity(&spec, &dims, trials, seed)?;
    emit(
        &json!({ "spec": spec, "dims": dims, "seed": seed, "report": report }),
        out,
    )?;
    Ok(if report.passed {
        Outcome::Pass
    } else {
        Outcome::InvariantViolated
    })
}

fn certificate_verify(path: &Path, graph: Option<&Path>, out: Option<&Path>) -> Result<Outcome, Error> {
    let file: CertificateFile = io::read_json(path)?;
    let g = match (graph, &file.graph) {
        (Some(p), _) => io::read_graph(p)?,
        (None, Some(g)) => {
            g.ensure_valid()?;
            g.clone()
        }
        (None, None) => {
            return Err(Error::InvalidArgument(
                "certificate has no embedded graph; pass --graph".into(),
            ))
        }
    };
    let cert = file.to_certificate(&g)?;
    let report = reflect::verify_certificate(&g, &cert)?;
    emit(&json!({ "label": cert.label(), "cuts": cert.cuts.len(), "report": report }), out)?;
    Ok(if report.passed {
        Outcome::Pass
    } else {
        Outcome::ValidationFailed
    })
}

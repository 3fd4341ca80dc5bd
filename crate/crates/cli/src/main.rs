//! `bff`: find dense node sets in graph histories.

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bff_core::density::aggregate_density;
use bff_core::eval::{run_experiment, GridConfig, Protocol};
use bff_core::graph_model::{load_history, write_history};
use bff_core::o2bff::{
    o2bff_incremental_density, o2bff_incremental_overlap, o2bff_iterative, InitKind, O2Options,
};
use bff_core::oracle::{brute_force_bff, brute_force_o2bff, dcs_baseline, DcsOptions, ExactSolution, OracleBudget};
use bff_core::peeling::{find_bff, find_bff_query, restrict_to_component};
use bff_core::synthetic::{generate_history, write_ground_truth, AdversarialFamily, InstanceSpec, PlantedSet, RNG_NAME};
use bff_core::{AggregateKind, BffError, GraphHistory, NodeId, O2Solution, Rational, Scorer, Solution};
use clap::{Args, Parser, Subcommand, ValueEnum};

const THREADS_VAR: &str = "BFF_THREADS";

#[derive(Parser, Debug)]
#[command(name = "bff", version, about = "Dense subgraphs that persist across graph snapshots")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Densest set over all snapshots by peeling.
    Bff {
        #[command(flatten)]
        io: SolveIo,
        #[arg(long, value_parser = parse_kind)]
        density: AggregateKind,
        /// min, avg or greedy; defaults to min for mm/ma and avg for am/aa.
        #[arg(long)]
        scorer: Option<String>,
    },
    /// Densest set over the best k snapshots.
    O2bff {
        #[command(flatten)]
        io: SolveIo,
        #[arg(long, value_parser = parse_kind)]
        density: AggregateKind,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum)]
        solver: O2Choice,
        /// Seed for itr-r initialization.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        max_iters: usize,
        /// Scorer for the inner peels.
        #[arg(long)]
        scorer: Option<String>,
    },
    /// Peeling constrained to keep a set of query nodes.
    QrBff {
        #[command(flatten)]
        io: SolveIo,
        #[arg(long, value_parser = parse_kind)]
        density: AggregateKind,
        #[arg(long)]
        scorer: Option<String>,
        /// Query node labels.
        #[arg(long, num_args = 1.., required = true)]
        query: Vec<String>,
        /// Drop nodes not connected to the query in the union of snapshots.
        #[arg(long)]
        restrict_component: bool,
    },
    /// DCS baseline, scored under ma.
    Dcs {
        #[command(flatten)]
        io: SolveIo,
        /// Reuse a snapshot's dense subgraph when the removed node was outside it.
        #[arg(long)]
        reuse_unaffected: bool,
    },
    /// Exact optimum by exhaustive enumeration (small inputs only).
    Oracle {
        #[command(flatten)]
        io: SolveIo,
        #[arg(long, value_parser = parse_kind)]
        density: AggregateKind,
        /// Also choose the best k snapshots.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = OracleBudget::default().max_nodes)]
        max_nodes: usize,
    },
    /// Write a synthetic history with its ground truth.
    Generate {
        /// Instance spec (TOML).
        #[arg(long, conflicts_with = "family", required_unless_present = "family")]
        spec: Option<PathBuf>,
        /// Adversarial family, e.g. `pendant-clique:10,4`.
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run an experiment grid and write its report.
    Evaluate {
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Debug)]
struct SolveIo {
    /// Edge list with `t u v` lines.
    #[arg(long)]
    input: PathBuf,
    /// Write the solution here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Also print internal node ids.
    #[arg(long)]
    debug_ids: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Tabular,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum O2Choice {
    ItrR,
    ItrC,
    ItrK,
    IncD,
    IncO,
}

fn parse_kind(s: &str) -> Result<AggregateKind, String> {
    s.parse().map_err(|e: BffError| e.to_string())
}

fn parse_scorer(s: Option<&str>, kind: AggregateKind) -> Result<Scorer, BffError> {
    match s {
        None => Ok(Scorer::default_for(kind)),
        Some(s) if s.eq_ignore_ascii_case("greedy") => Ok(Scorer::Greedy(kind)),
        Some(s) => s.parse(),
    }
}

fn warn_unguaranteed(scorer: Scorer, kind: AggregateKind) {
    if !scorer.has_guarantee(kind) {
        eprintln!("warning: scorer {scorer} has no approximation guarantee for {kind}");
    }
}

/// What every solve subcommand prints.
struct Report {
    solver: String,
    kind: AggregateKind,
    scorer: Option<Scorer>,
    nodes: Vec<NodeId>,
    snapshots: Vec<usize>,
    score: Rational,
    extra: Vec<(&'static str, String)>,
}

fn fmt_score(r: &Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl Report {
    /// Recomputes the score from the printed nodes and snapshots.
    fn self_check(&self, history: &GraphHistory) -> Result<(), BffError> {
        let view = history.select(&self.snapshots)?;
        let recomputed: Rational = aggregate_density(self.kind, &self.nodes, view)?;
        if recomputed != self.score {
            return Err(BffError::Domain(format!(
                "self-check failed: reported {} but recomputed {}",
                fmt_score(&self.score),
                fmt_score(&recomputed)
            )));
        }
        Ok(())
    }

    fn write<W: Write>(&self, history: &GraphHistory, io: &SolveIo, mut out: W) -> io::Result<()> {
        let labels: Vec<String> = self.nodes.iter().map(|&u| history.label(u).into_owned()).collect();
        let snaps: Vec<String> = self.snapshots.iter().map(ToString::to_string).collect();
        let score = fmt_score(&self.score);
        let approx = *self.score.numer() as f64 / *self.score.denom() as f64;
        match io.format {
            Format::Text => {
                writeln!(out, "solver: {}", self.solver)?;
                writeln!(out, "density: {}", self.kind)?;
                if let Some(s) = self.scorer {
                    writeln!(out, "scorer: {s}")?;
                }
                writeln!(out, "score: {score}")?;
                writeln!(out, "score_approx: {approx:.6}")?;
                writeln!(out, "size: {}", self.nodes.len())?;
                writeln!(out, "snapshots: {}", snaps.join(" "))?;
                writeln!(out, "nodes: {}", labels.join(" "))?;
                if io.debug_ids {
                    let ids: Vec<String> = self.nodes.iter().map(ToString::to_string).collect();
                    writeln!(out, "ids: {}", ids.join(" "))?;
                }
                for (k, v) in &self.extra {
                    writeln!(out, "{k}: {v}")?;
                }
                writeln!(out, "self_check: ok")?;
            }
            Format::Tabular => {
                writeln!(out, "solver\tdensity\tscorer\tscore\tsize\tsnapshots\tnodes")?;
                writeln!(
                    out,
                    "{}\t{}\t{}\t{score}\t{}\t{}\t{}",
                    self.solver,
                    self.kind,
                    self.scorer.map_or_else(|| "-".to_owned(), |s| s.to_string()),
                    self.nodes.len(),
                    snaps.join(","),
                    labels.join(",")
                )?;
            }
        }
        Ok(())
    }
}

enum Failure {
    Data(BffError),
    Budget(BffError),
}

impl From<BffError> for Failure {
    fn from(e: BffError) -> Self {
        match e {
            BffError::Budget(_) => Failure::Budget(e),
            other => Failure::Data(other),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Data(BffError::Io(e))
    }
}

fn read_history(path: &Path) -> Result<GraphHistory, Failure> {
    let file = File::open(path)
        .map_err(|e| BffError::Domain(format!("cannot open {}: {e}", path.display())))?;
    load_history(BufReader::new(file)).map_err(|e| match e {
        BffError::Parse { .. } => BffError::Domain(format!("{}: {e}", path.display())).into(),
        other => other.into(),
    })
}

fn emit(report: &Report, history: &GraphHistory, io: &SolveIo) -> Result<(), Failure> {
    report.self_check(history)?;
    match &io.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            report.write(history, io, &mut w)?;
            w.flush()?;
        }
        None => report.write(history, io, io::stdout().lock())?,
    }
    Ok(())
}

fn all_snapshots(history: &GraphHistory) -> Vec<usize> {
    (0..history.tau()).collect()
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Bff { io, density, scorer } => {
            let history = read_history(&io.input)?;
            let scorer = parse_scorer(scorer.as_deref(), density)?;
            warn_unguaranteed(scorer, density);
            let s: Solution = find_bff(&history, density, scorer)?;
            let report = Report {
                solver: "bff".into(),
                kind: density,
                scorer: Some(scorer),
                snapshots: all_snapshots(&history),
                score: s.score,
                extra: vec![("peel_index", s.peel_index.to_string())],
                nodes: s.nodes,
            };
            emit(&report, &history, &io)
        }
        Command::O2bff { io, density, k, solver, seed, max_iters, scorer } => {
            let history = read_history(&io.input)?;
            let scorer = parse_scorer(scorer.as_deref(), density)?;
            warn_unguaranteed(scorer, density);
            let opts = O2Options {
                scorer: Some(scorer),
                max_iters,
                ..O2Options::default()
            };
            let s: O2Solution = match solver {
                O2Choice::ItrR => o2bff_iterative(&history, density, k, InitKind::Random(seed), &opts)?,
                O2Choice::ItrC => o2bff_iterative(&history, density, k, InitKind::Contiguous, &opts)?,
                O2Choice::ItrK => o2bff_iterative(&history, density, k, InitKind::AtLeastK, &opts)?,
                O2Choice::IncD => o2bff_incremental_density(&history, density, k, &opts)?,
                O2Choice::IncO => o2bff_incremental_overlap(&history, density, k, &opts)?,
            };
            if s.fallback_used {
                eprintln!("warning: at-least-k initialization was empty; fell back to a random start");
            }
            let report = Report {
                solver: s.solver.to_string(),
                kind: density,
                scorer: Some(scorer),
                snapshots: s.snapshots.indices().to_vec(),
                score: s.score,
                extra: vec![
                    ("iterations", s.iterations.to_string()),
                    ("fallback_used", s.fallback_used.to_string()),
                ],
                nodes: s.nodes,
            };
            emit(&report, &history, &io)
        }
        Command::QrBff { io, density, scorer, query, restrict_component } => {
            let history = read_history(&io.input)?;
            let scorer = parse_scorer(scorer.as_deref(), density)?;
            warn_unguaranteed(scorer, density);
            let q = history.resolve_labels(&query)?;
            let s: Solution = if restrict_component {
                let sub = restrict_to_component(&history, &q)?;
                let local: Vec<NodeId> = q.iter().filter_map(|&u| sub.to_local(u)).collect();
                let mut s: Solution = find_bff_query(&sub.history, density, scorer, &local)?;
                s.nodes = sub.to_original(&s.nodes);
                s
            } else {
                find_bff_query(&history, density, scorer, &q)?
            };
            let report = Report {
                solver: "qr-bff".into(),
                kind: density,
                scorer: Some(scorer),
                snapshots: all_snapshots(&history),
                score: s.score,
                extra: vec![("restrict_component", restrict_component.to_string())],
                nodes: s.nodes,
            };
            emit(&report, &history, &io)
        }
        Command::Dcs { io, reuse_unaffected } => {
            let history = read_history(&io.input)?;
            let s = dcs_baseline::<Rational>(&history, &DcsOptions { reuse_unaffected })?;
            let report = Report {
                solver: "dcs".into(),
                kind: AggregateKind::MA,
                scorer: None,
                snapshots: all_snapshots(&history),
                score: s.score,
                extra: vec![("peel_index", s.peel_index.to_string())],
                nodes: s.nodes,
            };
            emit(&report, &history, &io)
        }
        Command::Oracle { io, density, k, max_nodes } => {
            let history = read_history(&io.input)?;
            let budget = OracleBudget {
                max_nodes,
                ..OracleBudget::default()
            };
            let report = match k {
                None => {
                    let s: ExactSolution<Rational> = brute_force_bff(&history, density, &budget)?;
                    Report {
                        solver: "oracle".into(),
                        kind: density,
                        scorer: None,
                        snapshots: all_snapshots(&history),
                        score: s.score,
                        extra: vec![("evaluated", s.evaluated.to_string())],
                        nodes: s.nodes,
                    }
                }
                Some(k) => {
                    let s: O2Solution = brute_force_o2bff(&history, density, k, &budget)?;
                    Report {
                        solver: "oracle".into(),
                        kind: density,
                        scorer: None,
                        snapshots: s.snapshots.indices().to_vec(),
                        score: s.score,
                        extra: Vec::new(),
                        nodes: s.nodes,
                    }
                }
            };
            emit(&report, &history, &io)
        }
        Command::Generate { spec, family, out } => generate(spec.as_deref(), family.as_deref(), &out),
        Command::Evaluate { grid, out } => evaluate(&grid, &out),
    }
}

fn generate(spec: Option<&Path>, family: Option<&str>, out: &Path) -> Result<(), Failure> {
    fs::create_dir_all(out)?;
    let mut meta = vec![("rng".to_owned(), RNG_NAME.to_owned())];
    let (history, plants) = match (spec, family) {
        (Some(path), _) => {
            let text = fs::read_to_string(path)
                .map_err(|e| BffError::Domain(format!("cannot read {}: {e}", path.display())))?;
            let spec = InstanceSpec::from_toml(&text)?;
            fs::write(out.join("spec.toml"), spec.to_toml())?;
            meta.push(("seed".into(), spec.seed.to_string()));
            generate_history(&spec)?
        }
        (None, Some(name)) => {
            let fam: AdversarialFamily = name.parse()?;
            let inst = fam.build()?;
            meta.push(("family".into(), fam.to_string()));
            meta.push(("density".into(), inst.kind.to_string()));
            let plant = PlantedSet {
                nodes: inst.designated,
                snapshots: all_snapshots(&inst.history),
            };
            (inst.history, vec![plant])
        }
        (None, None) => return Err(BffError::Domain("one of --spec or --family is required".into()).into()),
    };
    meta.push(("n".into(), history.n().to_string()));
    meta.push(("tau".into(), history.tau().to_string()));
    meta.push(("edges".into(), history.total_edges().to_string()));

    let mut w = BufWriter::new(File::create(out.join("history.txt"))?);
    write_history(&history, &mut w)?;
    w.flush()?;
    let mut w = BufWriter::new(File::create(out.join("truth.txt"))?);
    write_ground_truth(&history, &plants, &mut w)?;
    w.flush()?;
    let text: String = meta.iter().map(|(k, v)| format!("{k}: {v}\n")).collect();
    fs::write(out.join("meta.txt"), &text)?;
    print!("{text}");
    Ok(())
}

fn evaluate(grid_path: &Path, out: &Path) -> Result<(), Failure> {
    let text = fs::read_to_string(grid_path)
        .map_err(|e| BffError::Domain(format!("cannot read {}: {e}", grid_path.display())))?;
    let mut grid = GridConfig::from_toml(&text)?;
    // file paths in a grid are relative to the grid file
    if let Protocol::Files { files, .. } = &mut grid.protocol {
        let base = grid_path.parent().unwrap_or(Path::new(""));
        for entry in files.iter_mut() {
            entry.history = base.join(&entry.history);
            if let Some(t) = entry.truth.as_mut() {
                *t = base.join(&*t);
            }
        }
    }
    let report = run_experiment(&grid)?;
    report.write_to_dir(out)?;
    let failed = report.rows.iter().filter(|r| r.status != "ok").count();
    println!("name: {}", report.name);
    println!("rows: {}", report.rows.len());
    println!("failed_rows: {failed}");
    for s in report.series() {
        let points: Vec<String> = s.points.iter().map(|(x, f)| format!("{x}:{f:.3}")).collect();
        println!("series {} {} plant{}: {}", s.kind, s.solver, s.plant, points.join(" "));
    }
    Ok(())
}

fn configure_threads() -> Result<(), BffError> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .map_err(|_| BffError::Domain(format!("{THREADS_VAR} must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| BffError::Domain(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Budget(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

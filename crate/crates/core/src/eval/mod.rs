//! F-measure scoring and experiment grids over synthetic or on-disk
//! histories.

mod grid;

use std::fs;
use std::io::{BufReader, Write};
use std::path::Path;
use std::time::Instant;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use grid::{FileEntry, GridConfig, Protocol, SolverKind};

use crate::density::{aggregate_density, AggregateKind};
use crate::error::{BffError, Result};
use crate::graph_model::{load_history, GraphHistory, NodeId};
use crate::o2bff::{o2bff_incremental_density, o2bff_incremental_overlap, o2bff_iterative, O2Options};
use crate::oracle::{dcs_baseline, DcsOptions};
use crate::peeling::{find_bff, Scorer};
use crate::scalar::format_rational;
use crate::synthetic::{generate_history, read_ground_truth, InstanceSpec, NodeChoice, PlantSpec};
use crate::Rational;

/// Harmonic mean of precision and recall of `found` against `truth`; zero
/// when they do not intersect or `found` is empty.
pub fn f_measure(found: &[NodeId], truth: &[NodeId]) -> Result<f64> {
    if truth.is_empty() {
        return Err(BffError::domain("ground-truth set is empty"));
    }
    let mut a = found.to_vec();
    a.sort_unstable();
    a.dedup();
    let mut b = truth.to_vec();
    b.sort_unstable();
    b.dedup();
    let common = a.iter().filter(|u| b.binary_search(u).is_ok()).count();
    if common == 0 {
        return Ok(0.0);
    }
    let precision = common as f64 / a.len() as f64;
    let recall = common as f64 / b.len() as f64;
    Ok(2.0 * precision * recall / (precision + recall))
}

/// Median of the finite values; the mean of the middle two for an even count.
pub fn median(values: &[f64]) -> Option<f64> {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[mid] } else { (v[mid - 1] + v[mid]) / 2.0 })
}

/// A solver's answer, scored exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverOutput {
    pub nodes: Vec<NodeId>,
    /// Snapshots the score is taken over; all of them for BFF solvers.
    pub snapshots: Vec<usize>,
    pub score: Rational,
    pub iterations: usize,
    pub fallback_used: bool,
}

/// Runs one solver. `k` is required by the O²BFF solvers and ignored
/// otherwise; DCS always scores under `ma`.
pub fn run_solver(
    history: &GraphHistory,
    kind: AggregateKind,
    solver: SolverKind,
    k: Option<usize>,
    options: &O2Options,
) -> Result<SolverOutput> {
    let all: Vec<usize> = (0..history.tau()).collect();
    let need_k = || k.ok_or_else(|| BffError::domain(format!("solver {solver} needs k")));
    Ok(match solver {
        SolverKind::Bff(scorer) => {
            let scorer = match scorer {
                None => Scorer::default_for(kind),
                Some(Scorer::Greedy(_)) => Scorer::Greedy(kind),
                Some(s) => s,
            };
            let s: crate::Solution = find_bff(history, kind, scorer)?;
            SolverOutput {
                nodes: s.nodes,
                snapshots: all,
                score: s.score,
                iterations: s.removal_order.len(),
                fallback_used: false,
            }
        }
        SolverKind::Dcs => {
            let s = dcs_baseline::<Rational>(history, &DcsOptions::default())?;
            SolverOutput {
                nodes: s.nodes,
                snapshots: all,
                score: s.score,
                iterations: s.removal_order.len(),
                fallback_used: false,
            }
        }
        SolverKind::Iterative(init) => from_o2(o2bff_iterative(history, kind, need_k()?, init, options)?),
        SolverKind::IncDensity => from_o2(o2bff_incremental_density(history, kind, need_k()?, options)?),
        SolverKind::IncOverlap => from_o2(o2bff_incremental_overlap(history, kind, need_k()?, options)?),
    })
}

fn from_o2(s: crate::O2Solution) -> SolverOutput {
    SolverOutput {
        nodes: s.nodes,
        snapshots: s.snapshots.indices().to_vec(),
        score: s.score,
        iterations: s.iterations,
        fallback_used: s.fallback_used,
    }
}

/// One solver run on one instance.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub instance: String,
    /// The swept parameter.
    pub x: f64,
    pub seed: u64,
    pub solver: String,
    pub kind: AggregateKind,
    pub k: Option<usize>,
    pub score: Rational,
    pub size: usize,
    /// F against the grid's target plant (NaN without ground truth).
    pub f: f64,
    /// F against every planted set, in plant order.
    pub f_per_plant: Vec<f64>,
    pub wall_ms: f64,
    /// Instance generation or loading time, shared by the instance's rows.
    pub setup_ms: f64,
    /// `ok`, or the error message of a failed run.
    pub status: String,
    pub nodes: Vec<NodeId>,
    pub snapshots: Vec<usize>,
}

/// Rows of an experiment grid in deterministic order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExperimentReport {
    pub name: String,
    pub rows: Vec<ReportRow>,
}

/// Median F over seeds at one x for one (kind, solver, plant).
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub kind: AggregateKind,
    pub solver: String,
    pub plant: usize,
    pub points: Vec<(f64, f64)>,
}

const HEADER: &str = "instance\tx\tseed\tsolver\tkind\tk\tscore\tscore_decimal\tsize\tf\tf_per_plant\twall_ms\tsetup_ms\tstatus\tnodes\tsnapshots";

fn fmt_f(f: f64) -> String {
    if f.is_finite() {
        format!("{f:.6}")
    } else {
        "-".into()
    }
}

fn join<T: ToString>(items: &[T], sep: &str) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(sep)
}

impl ExperimentReport {
    /// Median over seeds of F against plant `plant`, at `x`.
    pub fn median_f(&self, x: f64, kind: AggregateKind, solver: &str, plant: usize) -> Option<f64> {
        let values: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| r.x == x && r.kind == kind && r.solver == solver)
            .filter_map(|r| r.f_per_plant.get(plant).copied())
            .collect();
        median(&values)
    }

    pub fn series(&self) -> Vec<Series> {
        let mut keys: Vec<(AggregateKind, String, usize)> = Vec::new();
        let mut xs: Vec<f64> = Vec::new();
        for r in &self.rows {
            for p in 0..r.f_per_plant.len() {
                let key = (r.kind, r.solver.clone(), p);
                if !keys.contains(&key) {
                    keys.push(key);
                }
            }
            if !xs.contains(&r.x) {
                xs.push(r.x);
            }
        }
        keys.into_iter()
            .map(|(kind, solver, plant)| {
                let points = xs
                    .iter()
                    .filter_map(|&x| self.median_f(x, kind, &solver, plant).map(|y| (x, y)))
                    .collect();
                Series {
                    kind,
                    solver,
                    plant,
                    points,
                }
            })
            .collect()
    }

    /// Tab-separated rows with a header line.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{HEADER}")?;
        for r in &self.rows {
            let f_all: Vec<String> = r.f_per_plant.iter().map(|&f| fmt_f(f)).collect();
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.6}\t{}\t{}\t{}\t{:.3}\t{:.3}\t{}\t{}\t{}",
                r.instance,
                r.x,
                r.seed,
                r.solver,
                r.kind,
                r.k.map_or_else(|| "-".to_string(), |k| k.to_string()),
                format_rational(&r.score),
                crate::Scalar::to_f64_lossy(&r.score),
                r.size,
                fmt_f(r.f),
                if f_all.is_empty() { "-".into() } else { f_all.join(",") },
                r.wall_ms,
                r.setup_ms,
                r.status,
                join(&r.nodes, " "),
                join(&r.snapshots, " "),
            )?;
        }
        Ok(())
    }

    /// Writes `report.tsv` and one `x<TAB>y` file per series into `dir`.
    pub fn write_to_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut buf = Vec::new();
        self.write_tsv(&mut buf)?;
        fs::write(dir.join("report.tsv"), buf)?;
        let prefix = if self.name.is_empty() { String::new() } else { format!("{}_", self.name) };
        for s in self.series() {
            let solver = s.solver.replace(':', "-");
            let mut text = String::new();
            for (x, y) in &s.points {
                text.push_str(&format!("{x}\t{y:.6}\n"));
            }
            fs::write(dir.join(format!("{prefix}{}_{solver}_plant{}.tsv", s.kind, s.plant)), text)?;
        }
        Ok(())
    }
}

struct Instance {
    id: String,
    x: f64,
    seed: u64,
    history: GraphHistory,
    truth: Vec<Vec<NodeId>>,
    k: Option<usize>,
    setup_ms: f64,
}

fn plant(size: usize, edge_prob: f64, snapshots: Vec<usize>, seed: u64) -> PlantSpec {
    PlantSpec {
        size,
        edge_prob,
        snapshots: Some(snapshots),
        node_choice: Some(NodeChoice::Random(seed)),
    }
}

// The generated instance for one (x, seed) cell.
fn synthetic_cell(grid: &GridConfig, x: f64, seed: u64) -> Result<Instance> {
    let started = Instant::now();
    let (n, tau, planted, k) = match &grid.protocol {
        Protocol::Recovery { n, tau, plant_size, .. } => {
            (*n, *tau, vec![plant(*plant_size, x, (0..*tau).collect(), seed)], None)
        }
        Protocol::TwoPlant { n, tau, plant_size, p_a, p_b, .. }
        | Protocol::OnOff { n, tau, plant_size, p_a, p_b, .. } => {
            let count = ((x * *tau as f64).round() as usize).min(*tau);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(u64::MAX);
            let mut b_snapshots = sample(&mut rng, *tau, count).into_vec();
            b_snapshots.sort_unstable();
            let k = matches!(grid.protocol, Protocol::OnOff { .. }).then_some(count);
            (
                *n,
                *tau,
                vec![
                    plant(*plant_size, *p_a, (0..*tau).collect(), seed),
                    plant(*plant_size, *p_b, b_snapshots, seed.wrapping_add(1)),
                ],
                k,
            )
        }
        Protocol::Files { .. } => unreachable!("files are loaded, not generated"),
    };
    let spec = InstanceSpec {
        n,
        tau,
        p_forward: grid.p_forward,
        p_backward: grid.p_backward,
        planted,
        seed,
    };
    let (history, plants) = generate_history(&spec)?;
    Ok(Instance {
        id: format!("{}/x={x}/seed={seed}", grid.name),
        x,
        seed,
        history,
        truth: plants.into_iter().map(|p| p.nodes).collect(),
        k,
        setup_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

fn file_cell(entry: &FileEntry, k: Option<usize>) -> Result<Instance> {
    let started = Instant::now();
    let history = load_history(BufReader::new(fs::File::open(&entry.history)?))?;
    let truth = match &entry.truth {
        Some(path) => read_ground_truth(&history, BufReader::new(fs::File::open(path)?))?
            .into_iter()
            .map(|p| p.nodes)
            .collect(),
        None => Vec::new(),
    };
    Ok(Instance {
        id: entry.history.display().to_string(),
        x: 0.0,
        seed: 0,
        history,
        truth,
        k,
        setup_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

fn run_cell(grid: &GridConfig, inst: &Instance) -> Vec<ReportRow> {
    let mut rows = Vec::new();
    for &kind in &grid.kinds {
        for &solver in &grid.solvers {
            let k = if solver.is_o2() { inst.k } else { None };
            let started = Instant::now();
            let result = run_solver(&inst.history, kind, solver, k, &O2Options::default());
            let wall_ms = started.elapsed().as_secs_f64() * 1e3;
            let row = match result {
                Ok(out) => {
                    let f_per_plant: Vec<f64> = inst
                        .truth
                        .iter()
                        .map(|t| f_measure(&out.nodes, t).unwrap_or(f64::NAN))
                        .collect();
                    ReportRow {
                        instance: inst.id.clone(),
                        x: inst.x,
                        seed: inst.seed,
                        solver: solver.to_string(),
                        kind,
                        k,
                        score: out.score,
                        size: out.nodes.len(),
                        f: f_per_plant.get(grid.target()).copied().unwrap_or(f64::NAN),
                        f_per_plant,
                        wall_ms,
                        setup_ms: inst.setup_ms,
                        status: "ok".into(),
                        nodes: out.nodes,
                        snapshots: out.snapshots,
                    }
                }
                Err(e) => ReportRow {
                    instance: inst.id.clone(),
                    x: inst.x,
                    seed: inst.seed,
                    solver: solver.to_string(),
                    kind,
                    k,
                    score: Rational::from_integer(0),
                    size: 0,
                    f: f64::NAN,
                    f_per_plant: Vec::new(),
                    wall_ms,
                    setup_ms: inst.setup_ms,
                    status: format!("error: {e}"),
                    nodes: Vec::new(),
                    snapshots: Vec::new(),
                },
            };
            rows.push(row);
        }
    }
    rows
}

/// Runs every cell of the grid. Cells run in parallel; rows come back in
/// (x, seed, kind, solver) order. Solver failures become rows with an error
/// status; instance failures (bad spec, unreadable file) abort the run.
pub fn run_experiment(grid: &GridConfig) -> Result<ExperimentReport> {
    grid.validate()?;
    let rows: Vec<Vec<ReportRow>> = match &grid.protocol {
        Protocol::Files { files, k } => files
            .par_iter()
            .map(|entry| file_cell(entry, *k).map(|inst| run_cell(grid, &inst)))
            .collect::<Result<_>>()?,
        Protocol::Recovery { p_a: xs, .. }
        | Protocol::TwoPlant { fractions: xs, .. }
        | Protocol::OnOff { fractions: xs, .. } => {
            let cells: Vec<(f64, u64)> = xs
                .iter()
                .flat_map(|&x| grid.seeds.iter().map(move |&s| (x, s)))
                .collect();
            cells
                .par_iter()
                .map(|&(x, seed)| synthetic_cell(grid, x, seed).map(|inst| run_cell(grid, &inst)))
                .collect::<Result<_>>()?
        }
    };
    Ok(ExperimentReport {
        name: grid.name.clone(),
        rows: rows.into_iter().flatten().collect(),
    })
}

/// Recomputes each successful row's score from its node and snapshot lists
/// on `history`; returns the first mismatch.
pub fn verify_row(history: &GraphHistory, row: &ReportRow) -> Result<()> {
    if row.status != "ok" {
        return Ok(());
    }
    let view = history.select(&row.snapshots)?;
    let recomputed: Rational = aggregate_density(
        if row.solver == "dcs" { AggregateKind::MA } else { row.kind },
        &row.nodes,
        view,
    )?;
    if recomputed == row.score {
        Ok(())
    } else {
        Err(BffError::domain(format!(
            "row {} {} {}: stored score {} but recomputed {}",
            row.instance,
            row.solver,
            row.kind,
            format_rational(&row.score),
            format_rational(&recomputed)
        )))
    }
}

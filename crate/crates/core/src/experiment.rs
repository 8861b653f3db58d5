//! Benchmark harness: paired ICD/FCI runs on random instances, result
//! files, and summary reports.
//!
//! A results directory holds
//!
//! | file            | contents                                                  |
//! |-----------------|-----------------------------------------------------------|
//! | `runs.csv`      | one row per (regime, nodes, graph, samples, algorithm)    |
//! | `ci_sizes.csv`  | unique CI tests per conditioning-set size, long format    |
//! | `anytime.csv`   | ICD state after every iteration `r`                       |
//! | `timings.csv`   | wall-clock seconds of each discovery call                 |
//! | `results.json`  | replaces the first three files under [`OutputFormat::Json`] |
//!
//! Everything except `timings.csv` is a pure function of the configuration,
//! so reruns with the same seed produce byte-identical files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::citest::{CachedTester, CiTester, FisherZ};
use crate::error::{Error, Result};
use crate::eval::{ks_2sample, structural_errors, Ecdf, StructuralErrors};
use crate::fci::{fci, FciConfig};
use crate::graph::{EdgeMark, MixedGraph};
use crate::icd::{icd_iteration, IcdConfig};
use crate::oracle::{true_pag, DSepOracle};
use crate::orientation::{ConflictPolicy, SepsetRecord};
use crate::simgen::{sample_data, Instance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Oracle,
    Data,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    Icd,
    Fci,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Icd => "icd",
            Algo::Fci => "fci",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub node_counts: Vec<usize>,
    pub rho: f64,
    pub graphs_per_size: usize,
    /// Sample sizes for the data regime; ignored under the oracle.
    pub sample_sizes: Vec<usize>,
    pub alpha: f64,
    pub algos: Vec<Algo>,
    pub seed: u64,
    /// Caps the conditioning-set size of both algorithms.
    pub max_cond: Option<usize>,
    /// Worker threads; `0` lets the thread pool decide.
    pub jobs: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            node_counts: vec![15, 20, 25, 35],
            rho: 2.0,
            graphs_per_size: 25,
            sample_sizes: vec![100, 500, 1000],
            alpha: 0.01,
            algos: vec![Algo::Icd, Algo::Fci],
            seed: 0,
            max_cond: None,
            jobs: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self, regime: Regime) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.node_counts.is_empty() || self.node_counts.iter().any(|&n| n < 2) {
            return bad(format!("node counts must be at least 2: {:?}", self.node_counts));
        }
        if !(self.rho > 0.0) {
            return bad(format!("rho must be positive, got {}", self.rho));
        }
        if self.graphs_per_size == 0 {
            return bad("graph count must be positive".into());
        }
        if self.algos.is_empty() {
            return bad("no algorithm selected".into());
        }
        if regime == Regime::Data {
            if self.sample_sizes.is_empty() || self.sample_sizes.contains(&0) {
                return bad(format!("sample sizes must be positive: {:?}", self.sample_sizes));
            }
            if !(self.alpha > 0.0 && self.alpha < 1.0) {
                return bad(format!("alpha must lie in (0, 1), got {}", self.alpha));
            }
        }
        Ok(())
    }

    /// Seed of instance `graph`, shared by every algorithm and sample size.
    pub fn instance_seed(&self, graph: usize) -> u64 {
        self.seed ^ graph as u64
    }
}

/// Identifies one paired comparison; `samples` is 0 under the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RunKey {
    pub regime: Regime,
    pub nodes: usize,
    pub graph: usize,
    pub samples: usize,
}

/// ICD state after one iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnytimeSnapshot {
    pub r: usize,
    /// Unique CI tests performed so far.
    pub ci_total: u64,
    pub edges: usize,
    pub errors: StructuralErrors,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub key: RunKey,
    pub algo: Algo,
    pub seed: u64,
    pub observed: usize,
    /// Unique CI tests by conditioning-set size.
    pub ci_by_size: Vec<u64>,
    pub cache_hits: u64,
    pub errors: StructuralErrors,
    /// Wall-clock time of the discovery call; not serialized with the run.
    #[serde(skip)]
    pub seconds: f64,
    /// Empty for FCI.
    pub anytime: Vec<AnytimeSnapshot>,
}

impl RunResult {
    pub fn ci_total(&self) -> u64 {
        self.ci_by_size.iter().sum()
    }
}

/// Output of one discovery call on one CI backend.
struct Discovery {
    ci_by_size: Vec<u64>,
    cache_hits: u64,
    graph: MixedGraph,
    elapsed: Duration,
    anytime: Vec<(usize, u64, MixedGraph)>,
}

fn discover(algo: Algo, backend: &dyn CiTester, max_cond: Option<usize>, conflicts: ConflictPolicy) -> Result<Discovery> {
    let mut ci = CachedTester::new(backend);
    let mut anytime = Vec::new();
    let mut elapsed = Duration::ZERO;
    let graph = match algo {
        Algo::Icd => {
            let cfg = IcdConfig { n_max: max_cond, conflicts, ..IcdConfig::default() };
            let vars = ci.num_vars();
            let mut g = MixedGraph::complete(vars, EdgeMark::Circle);
            let mut seps = SepsetRecord::new();
            if vars >= 2 {
                for r in cfg.r0..=cfg.last_size(vars)? {
                    let start = Instant::now();
                    let done = icd_iteration(&mut g, &mut seps, r, &mut ci, &cfg)?;
                    elapsed += start.elapsed();
                    anytime.push((r, ci.stats().total(), g.clone()));
                    if done {
                        break;
                    }
                }
            }
            g
        }
        Algo::Fci => {
            let cfg = FciConfig { max_cond, conflicts, ..FciConfig::default() };
            let start = Instant::now();
            let g = fci(&mut ci, &cfg)?;
            elapsed = start.elapsed();
            g
        }
    };
    Ok(Discovery {
        ci_by_size: ci.stats().by_size().to_vec(),
        cache_hits: ci.stats().cache_hits(),
        graph,
        elapsed,
        anytime,
    })
}

fn score(key: RunKey, algo: Algo, seed: u64, d: Discovery, truth: &MixedGraph) -> Result<RunResult> {
    let anytime = d
        .anytime
        .iter()
        .map(|(r, ci_total, g)| {
            Ok(AnytimeSnapshot { r: *r, ci_total: *ci_total, edges: g.edge_count(), errors: structural_errors(g, truth)? })
        })
        .collect::<Result<_>>()?;
    Ok(RunResult {
        key,
        algo,
        seed,
        observed: truth.node_count(),
        ci_by_size: d.ci_by_size,
        cache_hits: d.cache_hits,
        errors: structural_errors(&d.graph, truth)?,
        seconds: d.elapsed.as_secs_f64(),
        anytime,
    })
}

/// One unit of parallel work: an instance and, for data runs, a sample size.
#[derive(Debug, Clone, Copy)]
struct Task {
    nodes: usize,
    graph: usize,
    samples: usize,
}

fn tasks(cfg: &ExperimentConfig, regime: Regime) -> Vec<Task> {
    let sizes: &[usize] = match regime {
        Regime::Oracle => &[0],
        Regime::Data => &cfg.sample_sizes,
    };
    let mut out = Vec::new();
    for &nodes in &cfg.node_counts {
        for graph in 0..cfg.graphs_per_size {
            for &samples in sizes {
                out.push(Task { nodes, graph, samples });
            }
        }
    }
    out
}

fn run_task(cfg: &ExperimentConfig, regime: Regime, task: Task) -> Result<Vec<RunResult>> {
    let seed = cfg.instance_seed(task.graph);
    let inst = Instance::generate(task.nodes, cfg.rho, seed)?;
    let truth = true_pag(inst.dag())?;
    let key = RunKey { regime, nodes: task.nodes, graph: task.graph, samples: task.samples };
    let (backend, conflicts): (Box<dyn CiTester>, _) = match regime {
        Regime::Oracle => (Box::new(DSepOracle::new(inst.dag().clone())), ConflictPolicy::Fail),
        Regime::Data => {
            let data_seed = seed ^ ((task.samples as u64) << 32);
            let data = sample_data(&inst.scm, task.samples, data_seed)?;
            (Box::new(FisherZ::new(data, cfg.alpha)?), ConflictPolicy::KeepExisting)
        }
    };
    cfg.algos
        .iter()
        .map(|&algo| score(key, algo, seed, discover(algo, backend.as_ref(), cfg.max_cond, conflicts)?, &truth))
        .collect()
}

fn run(cfg: &ExperimentConfig, regime: Regime) -> Result<Vec<RunResult>> {
    cfg.validate(regime)?;
    let work = tasks(cfg, regime);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let nested: Vec<Vec<RunResult>> =
        pool.install(|| work.par_iter().map(|&t| run_task(cfg, regime, t)).collect::<Result<_>>())?;
    let mut out: Vec<RunResult> = nested.into_iter().flatten().collect();
    out.sort_by_key(|r| (r.key, r.algo));
    Ok(out)
}

/// Both algorithms under the perfect d-separation oracle, scored against
/// the true PAG.
pub fn run_oracle_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunResult>> {
    run(cfg, Regime::Oracle)
}

/// Both algorithms on sampled Gaussian data with Fisher's z-test, for every
/// configured sample size. Data sets are shared between the algorithms.
pub fn run_data_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunResult>> {
    run(cfg, Regime::Data)
}

// ---------------------------------------------------------------------------
// Result files

#[derive(Debug, Serialize, Deserialize)]
struct RunRow {
    regime: Regime,
    nodes: usize,
    graph: usize,
    samples: usize,
    algo: Algo,
    seed: u64,
    observed: usize,
    ci_total: u64,
    cache_hits: u64,
    extra_edges: usize,
    missing_edges: usize,
    wrong_marks: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct SizeRow {
    regime: Regime,
    nodes: usize,
    graph: usize,
    samples: usize,
    algo: Algo,
    cond_size: usize,
    count: u64,
}

#[derive(Debug, Serialize, Deserialize)]
struct AnytimeRow {
    regime: Regime,
    nodes: usize,
    graph: usize,
    samples: usize,
    algo: Algo,
    r: usize,
    ci_total: u64,
    edges: usize,
    extra_edges: usize,
    missing_edges: usize,
    wrong_marks: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct TimingRow {
    regime: Regime,
    nodes: usize,
    graph: usize,
    samples: usize,
    algo: Algo,
    seconds: f64,
}

pub const RUNS_CSV: &str = "runs.csv";
pub const SIZES_CSV: &str = "ci_sizes.csv";
pub const ANYTIME_CSV: &str = "anytime.csv";
pub const TIMINGS_CSV: &str = "timings.csv";
pub const RESULTS_JSON: &str = "results.json";

fn write_csv<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
    for row in rows {
        w.serialize(row).map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
    r.deserialize().collect::<std::result::Result<_, _>>().map_err(|e| Error::csv(path, e))
}

/// Writes results into `dir`, creating it if needed. Rows are sorted by key
/// so the files do not depend on scheduling.
pub fn write_results(dir: &Path, results: &[RunResult], format: OutputFormat) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut sorted: Vec<&RunResult> = results.iter().collect();
    sorted.sort_by_key(|r| (r.key, r.algo));

    match format {
        OutputFormat::Csv => {
            write_csv(&dir.join(RUNS_CSV), sorted.iter().map(|r| RunRow {
                regime: r.key.regime,
                nodes: r.key.nodes,
                graph: r.key.graph,
                samples: r.key.samples,
                algo: r.algo,
                seed: r.seed,
                observed: r.observed,
                ci_total: r.ci_total(),
                cache_hits: r.cache_hits,
                extra_edges: r.errors.extra_edges,
                missing_edges: r.errors.missing_edges,
                wrong_marks: r.errors.wrong_marks,
            }))?;
            write_csv(
                &dir.join(SIZES_CSV),
                sorted.iter().flat_map(|r| {
                    r.ci_by_size.iter().enumerate().map(|(cond_size, &count)| SizeRow {
                        regime: r.key.regime,
                        nodes: r.key.nodes,
                        graph: r.key.graph,
                        samples: r.key.samples,
                        algo: r.algo,
                        cond_size,
                        count,
                    })
                }),
            )?;
            write_csv(
                &dir.join(ANYTIME_CSV),
                sorted.iter().flat_map(|r| {
                    r.anytime.iter().map(|s| AnytimeRow {
                        regime: r.key.regime,
                        nodes: r.key.nodes,
                        graph: r.key.graph,
                        samples: r.key.samples,
                        algo: r.algo,
                        r: s.r,
                        ci_total: s.ci_total,
                        edges: s.edges,
                        extra_edges: s.errors.extra_edges,
                        missing_edges: s.errors.missing_edges,
                        wrong_marks: s.errors.wrong_marks,
                    })
                }),
            )?;
        }
        OutputFormat::Json => {
            let path = dir.join(RESULTS_JSON);
            let text = serde_json::to_string_pretty(&sorted).map_err(|e| Error::Results(format!("{}: {e}", path.display())))?;
            fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
        }
    }
    write_csv(&dir.join(TIMINGS_CSV), sorted.iter().map(|r| TimingRow {
        regime: r.key.regime,
        nodes: r.key.nodes,
        graph: r.key.graph,
        samples: r.key.samples,
        algo: r.algo,
        seconds: r.seconds,
    }))
}

/// Reads a results directory written by [`write_results`], in either format.
pub fn read_results(dir: &Path) -> Result<Vec<RunResult>> {
    if !dir.is_dir() {
        return Err(Error::Results(format!("{}: not a results directory", dir.display())));
    }
    let json = dir.join(RESULTS_JSON);
    let mut results: Vec<RunResult> = if dir.join(RUNS_CSV).is_file() {
        read_csv_results(dir)?
    } else if json.is_file() {
        let text = fs::read_to_string(&json).map_err(|e| Error::io(&json, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Results(format!("{}: {e}", json.display())))?
    } else {
        return Err(Error::Results(format!("{}: no {RUNS_CSV} or {RESULTS_JSON} found", dir.display())));
    };
    if results.is_empty() {
        return Err(Error::Results(format!("{}: results contain no runs", dir.display())));
    }

    let timings = dir.join(TIMINGS_CSV);
    if timings.is_file() {
        let mut index: BTreeMap<(RunKey, Algo), &mut RunResult> =
            results.iter_mut().map(|r| ((r.key, r.algo), r)).collect();
        for t in read_csv::<TimingRow>(&timings)? {
            let key = RunKey { regime: t.regime, nodes: t.nodes, graph: t.graph, samples: t.samples };
            match index.get_mut(&(key, t.algo)) {
                Some(r) => r.seconds = t.seconds,
                None => return Err(Error::Results(format!("{}: timing for unknown run {key:?}", timings.display()))),
            }
        }
    }
    results.sort_by_key(|r| (r.key, r.algo));
    Ok(results)
}

fn read_csv_results(dir: &Path) -> Result<Vec<RunResult>> {
    let runs_path = dir.join(RUNS_CSV);
    let mut runs: BTreeMap<(RunKey, Algo), (RunResult, u64)> = BTreeMap::new();
    for row in read_csv::<RunRow>(&runs_path)? {
        let key = RunKey { regime: row.regime, nodes: row.nodes, graph: row.graph, samples: row.samples };
        let result = RunResult {
            key,
            algo: row.algo,
            seed: row.seed,
            observed: row.observed,
            ci_by_size: Vec::new(),
            cache_hits: row.cache_hits,
            errors: StructuralErrors {
                extra_edges: row.extra_edges,
                missing_edges: row.missing_edges,
                wrong_marks: row.wrong_marks,
            },
            seconds: 0.0,
            anytime: Vec::new(),
        };
        if runs.insert((key, row.algo), (result, row.ci_total)).is_some() {
            return Err(Error::Results(format!("{}: duplicate run {key:?} {}", runs_path.display(), row.algo.name())));
        }
    }

    let unknown = |path: &Path, key: RunKey| Error::Results(format!("{}: row for unknown run {key:?}", path.display()));
    let sizes = dir.join(SIZES_CSV);
    for row in read_csv::<SizeRow>(&sizes)? {
        let key = RunKey { regime: row.regime, nodes: row.nodes, graph: row.graph, samples: row.samples };
        let (r, _) = runs.get_mut(&(key, row.algo)).ok_or_else(|| unknown(&sizes, key))?;
        if r.ci_by_size.len() <= row.cond_size {
            r.ci_by_size.resize(row.cond_size + 1, 0);
        }
        r.ci_by_size[row.cond_size] = row.count;
    }
    let anytime = dir.join(ANYTIME_CSV);
    for row in read_csv::<AnytimeRow>(&anytime)? {
        let key = RunKey { regime: row.regime, nodes: row.nodes, graph: row.graph, samples: row.samples };
        let (r, _) = runs.get_mut(&(key, row.algo)).ok_or_else(|| unknown(&anytime, key))?;
        r.anytime.push(AnytimeSnapshot {
            r: row.r,
            ci_total: row.ci_total,
            edges: row.edges,
            errors: StructuralErrors {
                extra_edges: row.extra_edges,
                missing_edges: row.missing_edges,
                wrong_marks: row.wrong_marks,
            },
        });
    }

    runs.into_values()
        .map(|(r, total)| {
            if r.ci_total() != total {
                return Err(Error::Results(format!(
                    "{}: run {:?} {} has ci_total {total} but its per-size counts sum to {}",
                    sizes.display(),
                    r.key,
                    r.algo.name(),
                    r.ci_total()
                )));
            }
            Ok(r)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Reports

/// Runs sharing regime, node count and sample size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupKey {
    pub regime: Regime,
    pub nodes: usize,
    pub samples: usize,
}

impl GroupKey {
    fn of(k: &RunKey) -> Self {
        GroupKey { regime: k.regime, nodes: k.nodes, samples: k.samples }
    }

    fn slug(&self) -> String {
        match self.regime {
            Regime::Oracle => format!("oracle_n{}", self.nodes),
            Regime::Data => format!("data_n{}_l{}", self.nodes, self.samples),
        }
    }
}

/// Paired FCI-versus-ICD statistics for one group.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub group: GroupKey,
    pub pairs: usize,
    /// Instances where ICD needed strictly fewer unique CI tests.
    pub icd_fewer: usize,
    /// Mean over instances of FCI total / ICD total.
    pub mean_ratio: f64,
    /// FCI 90th-percentile total / ICD 90th-percentile total.
    pub p90_ratio: f64,
    pub ks_statistic: f64,
    pub ks_p_value: f64,
    /// Mean FCI seconds / mean ICD seconds.
    pub runtime_ratio: f64,
}

/// Paired comparisons for every group containing both algorithms.
pub fn compare(results: &[RunResult]) -> Result<Vec<Comparison>> {
    let mut pairs: BTreeMap<GroupKey, Vec<(&RunResult, &RunResult)>> = BTreeMap::new();
    let index: BTreeMap<(RunKey, Algo), &RunResult> = results.iter().map(|r| ((r.key, r.algo), r)).collect();
    for (&(key, algo), &icd) in &index {
        if algo != Algo::Icd {
            continue;
        }
        if let Some(&fci) = index.get(&(key, Algo::Fci)) {
            pairs.entry(GroupKey::of(&key)).or_default().push((icd, fci));
        }
    }
    pairs
        .into_iter()
        .map(|(group, runs)| {
            let icd: Vec<f64> = runs.iter().map(|(a, _)| a.ci_total() as f64).collect();
            let fci: Vec<f64> = runs.iter().map(|(_, b)| b.ci_total() as f64).collect();
            let mean_ratio =
                icd.iter().zip(&fci).map(|(&a, &b)| b / a.max(1.0)).sum::<f64>() / runs.len() as f64;
            let p90_ratio = Ecdf::new(&fci)?.quantile(0.9)? / Ecdf::new(&icd)?.quantile(0.9)?.max(1.0);
            let ks = ks_2sample(&icd, &fci)?;
            let icd_secs: f64 = runs.iter().map(|(a, _)| a.seconds).sum();
            let fci_secs: f64 = runs.iter().map(|(_, b)| b.seconds).sum();
            Ok(Comparison {
                group,
                pairs: runs.len(),
                icd_fewer: icd.iter().zip(&fci).filter(|(a, b)| a < b).count(),
                mean_ratio,
                p90_ratio,
                ks_statistic: ks.statistic,
                ks_p_value: ks.p_value,
                runtime_ratio: if icd_secs > 0.0 { fci_secs / icd_secs } else { f64::NAN },
            })
        })
        .collect()
}

#[derive(Debug, Serialize)]
struct SummaryRow {
    regime: Regime,
    nodes: usize,
    samples: usize,
    algo: Algo,
    runs: usize,
    mean_ci_total: f64,
    median_ci_total: f64,
    p90_ci_total: f64,
    mean_extra_edges: f64,
    mean_missing_edges: f64,
    mean_wrong_marks: f64,
    mean_seconds: f64,
}

#[derive(Debug, Serialize)]
struct HistogramRow {
    regime: Regime,
    nodes: usize,
    samples: usize,
    algo: Algo,
    cond_size: usize,
    count: u64,
}

#[derive(Debug, Serialize)]
struct EcdfRow {
    regime: Regime,
    nodes: usize,
    samples: usize,
    algo: Algo,
    ci_total: f64,
    fraction: f64,
}

#[derive(Debug, Serialize)]
struct ComparisonRow {
    regime: Regime,
    nodes: usize,
    samples: usize,
    pairs: usize,
    icd_fewer: usize,
    mean_ratio: f64,
    p90_ratio: f64,
    ks_statistic: f64,
    ks_p_value: f64,
    runtime_ratio: f64,
}

/// Files produced by [`report`], relative to the report directory.
pub const REPORT_FILES: [&str; 4] = ["summary.csv", "histogram.csv", "ecdf.csv", "comparison.csv"];

/// Reads `results_dir` and writes summary tables and SVG plots into
/// `out_dir`. Everything is computed before the first file is written, so
/// a failure leaves no partial report behind. Returns the written paths.
pub fn report(results_dir: &Path, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let results = read_results(results_dir)?;
    let mut groups: BTreeMap<(GroupKey, Algo), Vec<&RunResult>> = BTreeMap::new();
    for r in &results {
        groups.entry((GroupKey::of(&r.key), r.algo)).or_default().push(r);
    }

    let mut summary = Vec::new();
    let mut histogram = Vec::new();
    let mut ecdf_rows = Vec::new();
    let mut curves: BTreeMap<GroupKey, Vec<(Algo, Ecdf)>> = BTreeMap::new();
    let mut bars: BTreeMap<GroupKey, Vec<(Algo, Vec<f64>)>> = BTreeMap::new();
    for (&(g, algo), runs) in &groups {
        let totals: Vec<f64> = runs.iter().map(|r| r.ci_total() as f64).collect();
        let ecdf = Ecdf::new(&totals)?;
        let count = runs.len() as f64;
        let mean = |f: &dyn Fn(&RunResult) -> f64| runs.iter().map(|r| f(r)).sum::<f64>() / count;
        summary.push(SummaryRow {
            regime: g.regime,
            nodes: g.nodes,
            samples: g.samples,
            algo,
            runs: runs.len(),
            mean_ci_total: mean(&|r| r.ci_total() as f64),
            median_ci_total: ecdf.quantile(0.5)?,
            p90_ci_total: ecdf.quantile(0.9)?,
            mean_extra_edges: mean(&|r| r.errors.extra_edges as f64),
            mean_missing_edges: mean(&|r| r.errors.missing_edges as f64),
            mean_wrong_marks: mean(&|r| r.errors.wrong_marks as f64),
            mean_seconds: mean(&|r| r.seconds),
        });

        let width = runs.iter().map(|r| r.ci_by_size.len()).max().unwrap_or(0);
        let mut per_size = vec![0u64; width];
        for r in runs {
            for (k, &c) in r.ci_by_size.iter().enumerate() {
                per_size[k] += c;
            }
        }
        for (cond_size, &count) in per_size.iter().enumerate() {
            histogram.push(HistogramRow { regime: g.regime, nodes: g.nodes, samples: g.samples, algo, cond_size, count });
        }
        bars.entry(g).or_default().push((algo, per_size.iter().map(|&c| c as f64 / count).collect()));

        for (t, f) in ecdf.steps() {
            ecdf_rows.push(EcdfRow { regime: g.regime, nodes: g.nodes, samples: g.samples, algo, ci_total: t, fraction: f });
        }
        curves.entry(g).or_default().push((algo, ecdf));
    }

    let comparisons = compare(&results)?;
    let comparison_rows: Vec<ComparisonRow> = comparisons
        .iter()
        .map(|c| ComparisonRow {
            regime: c.group.regime,
            nodes: c.group.nodes,
            samples: c.group.samples,
            pairs: c.pairs,
            icd_fewer: c.icd_fewer,
            mean_ratio: c.mean_ratio,
            p90_ratio: c.p90_ratio,
            ks_statistic: c.ks_statistic,
            ks_p_value: c.ks_p_value,
            runtime_ratio: c.runtime_ratio,
        })
        .collect();

    let mut plots: Vec<(String, String)> = Vec::new();
    for (g, c) in &curves {
        plots.push((format!("ecdf_{}.svg", g.slug()), svg::ecdf_plot(&format!("{} CI-test ECDF", g.slug()), c)));
    }
    for (g, b) in &bars {
        plots.push((format!("hist_{}.svg", g.slug()), svg::histogram(&format!("{} mean CI tests by set size", g.slug()), b)));
    }

    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let [s, h, e, c] = REPORT_FILES.map(|f| out_dir.join(f));
    write_csv(&s, summary)?;
    write_csv(&h, histogram)?;
    write_csv(&e, ecdf_rows)?;
    write_csv(&c, comparison_rows)?;
    let mut written = vec![s, h, e, c];
    for (name, body) in plots {
        let path = out_dir.join(name);
        fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

/// Minimal SVG line and bar charts.
mod svg {
    use super::*;

    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const PAD: f64 = 50.0;
    const COLORS: [&str; 2] = ["#1f77b4", "#d62728"];

    fn frame(title: &str, x_label: &str, y_label: &str, x_max: f64, y_max: f64) -> String {
        let mut s = String::new();
        let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#);
        let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{title}</text>"#, W / 2.0);
        let (x0, y0, x1, y1) = (PAD, H - PAD, W - PAD, PAD);
        let _ = writeln!(s, r#"<path d="M{x0},{y1} L{x0},{y0} L{x1},{y0}" stroke="black" fill="none"/>"#);
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{x_label}</text>"#, W / 2.0, H - 12.0);
        let _ = writeln!(s, r#"<text x="14" y="{}" transform="rotate(-90 14 {})" text-anchor="middle">{y_label}</text>"#, H / 2.0, H / 2.0);
        let _ = writeln!(s, r#"<text x="{x0}" y="{}" text-anchor="middle">0</text>"#, y0 + 16.0);
        let _ = writeln!(s, r#"<text x="{x1}" y="{}" text-anchor="middle">{}</text>"#, y0 + 16.0, fmt_num(x_max));
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, x0 - 4.0, y1 + 4.0, fmt_num(y_max));
        s
    }

    fn legend(s: &mut String, names: &[&str]) {
        for (i, name) in names.iter().enumerate() {
            let y = PAD + 16.0 * i as f64;
            let _ = writeln!(s, r#"<rect x="{}" y="{}" width="10" height="10" fill="{}"/>"#, W - PAD - 60.0, y, COLORS[i % 2]);
            let _ = writeln!(s, r#"<text x="{}" y="{}">{name}</text>"#, W - PAD - 45.0, y + 10.0);
        }
    }

    fn fmt_num(v: f64) -> String {
        if v.fract() == 0.0 { format!("{v:.0}") } else { format!("{v:.2}") }
    }

    fn sx(v: f64, max: f64) -> f64 {
        PAD + (W - 2.0 * PAD) * if max > 0.0 { v / max } else { 0.0 }
    }

    fn sy(v: f64, max: f64) -> f64 {
        H - PAD - (H - 2.0 * PAD) * if max > 0.0 { v / max } else { 0.0 }
    }

    pub(super) fn ecdf_plot(title: &str, curves: &[(Algo, Ecdf)]) -> String {
        let x_max = curves.iter().filter_map(|(_, e)| e.sorted().last().copied()).fold(0.0, f64::max);
        let mut s = frame(title, "unique CI tests", "fraction of graphs", x_max, 1.0);
        for (i, (_, e)) in curves.iter().enumerate() {
            let mut d = format!("M{:.2},{:.2}", sx(0.0, x_max), sy(0.0, 1.0));
            let mut prev = 0.0;
            for (t, f) in e.steps() {
                let _ = write!(d, " L{:.2},{:.2} L{:.2},{:.2}", sx(t, x_max), sy(prev, 1.0), sx(t, x_max), sy(f, 1.0));
                prev = f;
            }
            let _ = writeln!(s, r#"<path d="{d}" stroke="{}" fill="none" stroke-width="1.5"/>"#, COLORS[i % 2]);
        }
        legend(&mut s, &curves.iter().map(|(a, _)| a.name()).collect::<Vec<_>>());
        s.push_str("</svg>\n");
        s
    }

    pub(super) fn histogram(title: &str, series: &[(Algo, Vec<f64>)]) -> String {
        let sizes = series.iter().map(|(_, v)| v.len()).max().unwrap_or(0).max(1);
        let y_max = series.iter().flat_map(|(_, v)| v.iter().copied()).fold(0.0, f64::max);
        let mut s = frame(title, "conditioning-set size", "mean CI tests", sizes as f64, y_max);
        let slot = (W - 2.0 * PAD) / sizes as f64;
        let bar = slot / (series.len() as f64 + 1.0);
        for (i, (_, v)) in series.iter().enumerate() {
            for (k, &c) in v.iter().enumerate() {
                let x = PAD + slot * k as f64 + bar * (i as f64 + 0.5);
                let y = sy(c, y_max);
                let _ = writeln!(s, r#"<rect x="{x:.2}" y="{y:.2}" width="{bar:.2}" height="{:.2}" fill="{}"/>"#, H - PAD - y, COLORS[i % 2]);
            }
        }
        for k in 0..sizes {
            let _ = writeln!(s, r#"<text x="{:.2}" y="{}" text-anchor="middle">{k}</text>"#, PAD + slot * (k as f64 + 0.5), H - PAD + 30.0);
        }
        legend(&mut s, &series.iter().map(|(a, _)| a.name()).collect::<Vec<_>>());
        s.push_str("</svg>\n");
        s
    }
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use icd::citest::{CachedTester, CiTester, DataSet, FisherZ};
use icd::experiment::{self, Algo, ExperimentConfig, OutputFormat};
use icd::fci::{fci, FciConfig};
use icd::graph::{parse_dag, write_dag, write_pag, MixedGraph};
use icd::icd::{icd_traced, IcdConfig};
use icd::oracle::{true_pag, DSepOracle};
use icd::orientation::ConflictPolicy;
use icd::simgen::{sample_data, Instance};
use icd::{Error, Result};

/// Causal discovery with latent confounders: ICD and FCI.
#[derive(Parser, Debug)]
#[command(name = "icd", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate one random instance: `<stem>.dag`, `<stem>.pag` and, with
    /// `--samples`, `<stem>.csv`.
    Gen(GenArgs),
    /// Learn a PAG from a DAG file (perfect oracle) or a CSV data file.
    Discover(DiscoverArgs),
    /// Oracle benchmark over random instances.
    BenchOracle(BenchArgs),
    /// Fisher-z benchmark over random instances and sample sizes.
    BenchData(BenchArgs),
    /// Summary tables and SVG plots for a results directory.
    Report(ReportArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AlgoArg {
    Icd,
    Fci,
    Both,
}

impl AlgoArg {
    fn algos(self) -> Vec<Algo> {
        match self {
            AlgoArg::Icd => vec![Algo::Icd],
            AlgoArg::Fci => vec![Algo::Fci],
            AlgoArg::Both => vec![Algo::Icd, Algo::Fci],
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, default_value_t = 15)]
    nodes: usize,
    #[arg(long, default_value_t = 2.0)]
    rho: f64,
    /// Rows of Gaussian data to sample; 0 writes no CSV.
    #[arg(long, default_value_t = 0)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path stem.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct DiscoverArgs {
    /// DAG file; CI tests come from d-separation among its observed nodes.
    #[arg(long, conflicts_with = "data", required_unless_present = "data")]
    dag: Option<PathBuf>,
    /// CSV file with a header row; CI tests use Fisher's z.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "icd")]
    algo: AlgoArg,
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    #[arg(long)]
    max_cond: Option<usize>,
    /// PAG output file, or a directory receiving `icd.pag` and `fci.pag`
    /// with `--algo both`. Standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    /// Write every CI query and its verdict to this CSV file. With
    /// `--algo both`, one file per algorithm (`<stem>.icd.csv`, `<stem>.fci.csv`).
    #[arg(long)]
    audit: Option<PathBuf>,
    /// Write the ICD graph after each iteration as `iter_<r>.pag` here.
    #[arg(long)]
    dump_iterations: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Comma-separated node counts.
    #[arg(long, value_delimiter = ',', default_value = "15")]
    nodes: Vec<usize>,
    #[arg(long, default_value_t = 2.0)]
    rho: f64,
    #[arg(long, default_value_t = 25)]
    graphs: usize,
    /// Comma-separated sample sizes (data benchmark only).
    #[arg(long, value_delimiter = ',', default_value = "1000")]
    samples: Vec<usize>,
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "both")]
    algo: AlgoArg,
    #[arg(long)]
    max_cond: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Results directory.
    #[arg(long)]
    out: PathBuf,
    /// Worker threads (0 = all cores). Use 1 for runtime comparisons.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

#[derive(Args, Debug)]
struct ReportArgs {
    /// Results directory written by a benchmark.
    results: PathBuf,
    /// Report directory; defaults to `<results>/report`.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io { path: path.to_owned(), source: e })
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io { path: path.to_owned(), source: e })
}

fn with_ext(stem: &Path, ext: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn gen(args: GenArgs) -> Result<()> {
    let inst = Instance::generate(args.nodes, args.rho, args.seed)?;
    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.to_owned(), source: e })?;
    }
    write_file(&with_ext(&args.out, "dag"), &write_dag(inst.dag()))?;
    write_file(&with_ext(&args.out, "pag"), &write_pag(&true_pag(inst.dag())?))?;
    if args.samples > 0 {
        let data = sample_data(&inst.scm, args.samples, args.seed)?;
        let path = with_ext(&args.out, "csv");
        let file = fs::File::create(&path).map_err(|e| Error::Io { path: path.clone(), source: e })?;
        data.write_csv(file).map_err(|e| Error::Csv { path, source: e })?;
    }
    Ok(())
}

fn pag_json(g: &MixedGraph, names: &[String]) -> String {
    let edges: Vec<_> = g
        .edges()
        .into_iter()
        .map(|(a, b)| {
            serde_json::json!({
                "from": names[a],
                "to": names[b],
                "mark_at_from": format!("{:?}", g.mark(b, a).expect("edge")).to_lowercase(),
                "mark_at_to": format!("{:?}", g.mark(a, b).expect("edge")).to_lowercase(),
            })
        })
        .collect();
    let doc = serde_json::json!({ "nodes": names, "edges": edges });
    serde_json::to_string_pretty(&doc).expect("json value") + "\n"
}

fn render(g: &MixedGraph, names: &[String], format: FormatArg) -> String {
    match format {
        FormatArg::Csv => write_pag(g),
        FormatArg::Json => pag_json(g, names),
    }
}

fn discover(args: DiscoverArgs) -> Result<()> {
    let (backend, names, conflicts): (Box<dyn CiTester>, Vec<String>, _) = if let Some(path) = &args.dag {
        let dag = parse_dag(&read_file(path)?)?;
        let names = dag.observed().iter().map(ToString::to_string).collect();
        (Box::new(DSepOracle::new(dag)), names, ConflictPolicy::Fail)
    } else {
        let path = args.data.as_ref().expect("clap requires --dag or --data");
        let file = fs::File::open(path).map_err(|e| Error::Io { path: path.clone(), source: e })?;
        let data = DataSet::read_csv(file).map_err(|e| Error::Csv { path: path.clone(), source: e })?;
        if data.sample_count() == 0 {
            return Err(Error::EmptySample);
        }
        let names = data.names().to_vec();
        (Box::new(FisherZ::new(data, args.alpha)?), names, ConflictPolicy::KeepExisting)
    };

    let mut ci = CachedTester::new(backend.as_ref());
    if args.audit.is_some() {
        ci = ci.with_audit();
    }
    let mut outputs = Vec::new();
    for algo in args.algo.algos() {
        let g = match algo {
            Algo::Icd => {
                let cfg = IcdConfig { n_max: args.max_cond, conflicts, ..IcdConfig::default() };
                let mut snapshots = Vec::new();
                let g = icd_traced(&mut ci, &cfg, |v| {
                    if args.dump_iterations.is_some() {
                        snapshots.push((v.r, write_pag(v.graph)));
                    }
                })?;
                if let Some(dir) = &args.dump_iterations {
                    fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.clone(), source: e })?;
                    for (r, text) in snapshots {
                        write_file(&dir.join(format!("iter_{r}.pag")), &text)?;
                    }
                }
                g
            }
            Algo::Fci => fci(&mut ci, &FciConfig { max_cond: args.max_cond, conflicts, ..FciConfig::default() })?,
        };
        eprintln!("{}: {} unique CI tests", algo.name(), ci.stats().total());
        outputs.push((algo, render(&g, &names, args.format)));
        if args.algo.algos().len() > 1 {
            // Count each algorithm separately, as the benchmarks do.
            let audit = ci.audit().is_some();
            if let Some(path) = &args.audit {
                write_audit(&ci, &path.with_extension(format!("{}.csv", algo.name())))?;
            }
            ci = CachedTester::new(backend.as_ref());
            if audit {
                ci = ci.with_audit();
            }
        }
    }
    if args.algo.algos().len() == 1 {
        if let Some(path) = &args.audit {
            write_audit(&ci, path)?;
        }
    }

    match (&args.out, outputs.as_slice()) {
        (None, [(_, text)]) => print!("{text}"),
        (Some(path), [(_, text)]) => write_file(path, text)?,
        (None, _) => unreachable!("checked during argument parsing"),
        (Some(dir), many) => {
            fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.clone(), source: e })?;
            let ext = match args.format {
                FormatArg::Csv => "pag",
                FormatArg::Json => "json",
            };
            for (algo, text) in many {
                write_file(&dir.join(format!("{}.{ext}", algo.name())), text)?;
            }
        }
    }
    Ok(())
}

fn write_audit(ci: &CachedTester<'_>, path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::Io { path: path.to_owned(), source: e })?;
    ci.write_audit_csv(file).map_err(|e| Error::Csv { path: path.to_owned(), source: e })
}

fn bench(args: BenchArgs, data: bool) -> Result<()> {
    let cfg = ExperimentConfig {
        node_counts: args.nodes,
        rho: args.rho,
        graphs_per_size: args.graphs,
        sample_sizes: args.samples,
        alpha: args.alpha,
        algos: args.algo.algos(),
        seed: args.seed,
        max_cond: args.max_cond,
        jobs: args.jobs,
    };
    let results = if data {
        experiment::run_data_experiment(&cfg)?
    } else {
        experiment::run_oracle_experiment(&cfg)?
    };
    let format = match args.format {
        FormatArg::Csv => OutputFormat::Csv,
        FormatArg::Json => OutputFormat::Json,
    };
    experiment::write_results(&args.out, &results, format)?;
    for c in experiment::compare(&results)? {
        eprintln!(
            "n={} samples={}: ICD fewer tests on {}/{}, mean FCI/ICD ratio {:.3}",
            c.group.nodes, c.group.samples, c.icd_fewer, c.pairs, c.mean_ratio
        );
    }
    eprintln!("{} runs written to {}", results.len(), args.out.display());
    Ok(())
}

fn report(args: ReportArgs) -> Result<()> {
    let out = args.out.unwrap_or_else(|| args.results.join("report"));
    let files = experiment::report(&args.results, &out)?;
    for f in files {
        println!("{}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Command::Discover(a) = &cli.command {
        if matches!(a.algo, AlgoArg::Both) && a.out.is_none() {
            let _ = Cli::command()
                .error(ErrorKind::MissingRequiredArgument, "--algo both writes two graphs and needs --out DIR")
                .print();
            return ExitCode::from(1);
        }
    }
    let outcome = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Discover(a) => discover(a),
        Command::BenchOracle(a) => bench(a, false),
        Command::BenchData(a) => bench(a, true),
        Command::Report(a) => report(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

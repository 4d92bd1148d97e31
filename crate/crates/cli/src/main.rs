use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use pathopt::bench::{emit_table, render_table, run_benchmark, BenchConfig};
use pathopt::format::{read_graph, read_partition, write_graph, write_partition};
use pathopt::neargreedy::{estimate_ng, replay_label, Label, NgConfig, Ordering};
use pathopt::rng::rng_from_seed;
use pathopt::{
    AlgoSpec, Budget, GenSpec, Graph, InitMethod, NgFunction, NgProfile, Objective, Side,
};

/// Graph partitioning heuristics for max-cut and min-quotient-cut.
#[derive(Parser, Debug)]
#[command(name = "pathopt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random graph.
    Gen(GenArgs),
    /// Build an initial partitioning.
    Init(InitArgs),
    /// Optimize a partitioning of a graph.
    Run(RunArgs),
    /// Run algorithms on a suite of generated graphs with equal budgets.
    Bench(BenchArgs),
    /// Estimate the ng-function of a graph class.
    Nganalyze(NgArgs),
    /// Label the placements that rebuild a given partitioning.
    Postprocess(PostArgs),
}

#[derive(Args, Debug)]
struct GenArgs {
    /// random, geometric, regular, unbalanced-random or unbalanced-regular.
    #[arg(long)]
    kind: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: Option<f64>,
    /// Geometric distance threshold.
    #[arg(long)]
    d: Option<f64>,
    /// Geometric target average degree (instead of --d).
    #[arg(long)]
    deg: Option<f64>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    p1: Option<f64>,
    #[arg(long)]
    p2: Option<f64>,
    #[arg(long)]
    k1: Option<usize>,
    #[arg(long)]
    k2: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct InitArgs {
    #[arg(long)]
    graph: PathBuf,
    /// random, line or w.
    #[arg(long, default_value = "w")]
    method: String,
    #[arg(long, default_value = "maxcut")]
    objective: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BudgetArgs {
    /// Wall-clock seconds for the optimization loop.
    #[arg(long)]
    time: Option<f64>,
    /// Maximum number of starting partitionings.
    #[arg(long)]
    restarts: Option<usize>,
}

impl BudgetArgs {
    fn budget(&self) -> Result<Budget> {
        let mut b = Budget::default();
        if let Some(t) = self.time {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(usage(format!(
                    "--time must be a non-negative number, got {t}"
                )));
            }
            b = Budget::seconds(t);
        }
        if let Some(r) = self.restarts {
            b = b.with_restarts(r);
        }
        Ok(b)
    }
}

#[derive(Args, Debug)]
struct AlgoArgs {
    /// po, kl, sa, pg or w, optionally prefixed by an initial partitioning
    /// method (line-kl, w-sa, random-po).
    #[arg(long, default_value = "po")]
    algo: String,
    /// Initial partitioning method; overrides the algorithm default.
    #[arg(long)]
    init: Option<String>,
    #[arg(long)]
    k_starts: Option<usize>,
    #[arg(long)]
    stale_iters: Option<usize>,
    /// Halt after this many restarts without a new best.
    #[arg(long)]
    stale_restarts: Option<usize>,
    /// Flip paths that leave the objective unchanged.
    #[arg(long)]
    accept_ties: bool,
    /// Force one stretched annealing run (or, with --no-long-run, disable it).
    #[arg(long, conflicts_with = "no_long_run")]
    long_run: bool,
    #[arg(long)]
    no_long_run: bool,
    /// Imbalance penalty for annealing min-quotient-cut.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    cooling: Option<f64>,
    /// ng profile file for pg.
    #[arg(long)]
    profile: Option<PathBuf>,
    /// Use the fitted curve or the per-index table of the profile.
    #[arg(long, default_value = "fitted")]
    ng: String,
}

impl AlgoArgs {
    fn spec(&self) -> Result<AlgoSpec> {
        let mut a: AlgoSpec = self
            .algo
            .parse()
            .map_err(|e| usage(format!("--algo: {e}")))?;
        if let Some(init) = &self.init {
            a.init = Some(parse_init(init)?);
        }
        if let Some(k) = self.k_starts {
            a.po.k_starts = k;
        }
        if let Some(s) = self.stale_iters {
            a.po.stale_iters = s;
        }
        if self.stale_restarts.is_some() {
            a.po.stale_restarts = self.stale_restarts;
        }
        a.po.accept_ties = self.accept_ties;
        a.po.validate().map_err(|e| usage(e.to_string()))?;
        if self.long_run {
            a.sa_long_run = Some(true);
        } else if self.no_long_run {
            a.sa_long_run = Some(false);
        }
        if let Some(alpha) = self.alpha {
            a.sa.balance_alpha = alpha;
        }
        if let Some(c) = self.cooling {
            a.sa.cooling_ratio = c;
        }
        a.sa.validate().map_err(|e| usage(e.to_string()))?;
        if let Some(path) = &self.profile {
            let profile = NgProfile::read(BufReader::new(open(path)?))
                .with_context(|| format!("reading profile {}", path.display()))?;
            a.ng = match self.ng.as_str() {
                "fitted" => NgFunction::fitted(&profile),
                "empirical" => NgFunction::empirical(&profile),
                other => {
                    return Err(usage(format!(
                        "--ng must be fitted or empirical, got {other}"
                    )))
                }
            };
        }
        Ok(a)
    }
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value = "maxcut")]
    objective: String,
    #[command(flatten)]
    algo: AlgoArgs,
    #[command(flatten)]
    budget: BudgetArgs,
    #[arg(long)]
    seed: Option<u64>,
    /// Partition output file; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// One generator spec per line, e.g. `# genspec kind=random n=500 p=0.5 seed=1`.
    #[arg(long)]
    suite: PathBuf,
    /// Comma-separated algorithm names.
    #[arg(long, default_value = "po,kl,sa")]
    algos: String,
    #[arg(long, default_value = "maxcut")]
    objective: String,
    /// Seconds per algorithm per graph.
    #[arg(long, default_value_t = 1.0)]
    time: f64,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    /// Directory for summary.txt, results.csv and intervals.csv.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// ng profile used by pg.
    #[arg(long)]
    profile: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct NgArgs {
    /// Graph class in generator spec syntax; the seed may be omitted.
    #[arg(long)]
    class: String,
    #[arg(long, default_value_t = 1000)]
    ensemble: usize,
    /// Optimizer producing the partitionings that are replayed.
    #[arg(long, default_value = "kl")]
    oracle: String,
    /// Starts per oracle run.
    #[arg(long, default_value_t = 5)]
    oracle_restarts: usize,
    /// Seconds per oracle run (optional).
    #[arg(long)]
    oracle_time: Option<f64>,
    /// random or maxdiff.
    #[arg(long, default_value = "maxdiff")]
    ordering: String,
    #[arg(long, default_value = "maxcut")]
    objective: String,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV output (index,raw,percentile,fitted); stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the profile file read by `run --algo pg --profile`.
    #[arg(long)]
    profile_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PostArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    partition: PathBuf,
    #[arg(long, default_value = "maxdiff")]
    ordering: String,
    #[arg(long, default_value = "maxcut")]
    objective: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Errors that should exit with status 2.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn parse_objective(s: &str) -> Result<Objective> {
    s.parse().map_err(|e| usage(format!("--objective: {e}")))
}

fn parse_init(s: &str) -> Result<InitMethod> {
    s.parse().map_err(|e: String| usage(format!("--init: {e}")))
}

fn parse_ordering(s: &str) -> Result<Ordering> {
    s.parse()
        .map_err(|_| usage(format!("--ordering must be random or maxdiff, got {s}")))
}

fn open(path: &Path) -> Result<File> {
    if !path.exists() {
        return Err(usage(format!("file not found: {}", path.display())));
    }
    File::open(path).with_context(|| format!("opening {}", path.display()))
}

fn load_graph(path: &Path) -> Result<Graph> {
    read_graph(BufReader::new(open(path)?))
        .with_context(|| format!("reading graph {}", path.display()))
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

/// Prints the command line that reproduces this run, with the seed made
/// explicit, and returns the seed.
fn announce(seed: Option<u64>) -> u64 {
    let seed = seed.unwrap_or_else(rand::random);
    let mut args: Vec<String> = std::env::args().collect();
    args[0] = "pathopt".into();
    if !args
        .iter()
        .any(|a| a == "--seed" || a.starts_with("--seed="))
    {
        args.push("--seed".into());
        args.push(seed.to_string());
    }
    let quoted: Vec<String> = args
        .into_iter()
        .map(|a| if a.contains(' ') { format!("'{a}'") } else { a })
        .collect();
    println!("# {}", quoted.join(" "));
    seed
}

fn cmd_gen(a: GenArgs) -> Result<()> {
    let seed = announce(a.seed);
    let mut spec = format!("kind={} n={} seed={seed}", a.kind, a.n);
    let params: [(&str, Option<String>); 8] = [
        ("p", a.p.map(|x| x.to_string())),
        ("d", a.d.map(|x| x.to_string())),
        ("deg", a.deg.map(|x| x.to_string())),
        ("r", a.r.map(|x| x.to_string())),
        ("p1", a.p1.map(|x| x.to_string())),
        ("p2", a.p2.map(|x| x.to_string())),
        ("k1", a.k1.map(|x| x.to_string())),
        ("k2", a.k2.map(|x| x.to_string())),
    ];
    for (k, v) in params {
        if let Some(v) = v {
            spec.push_str(&format!(" {k}={v}"));
        }
    }
    let spec: GenSpec = spec.parse().map_err(|e: String| usage(e))?;
    let g = spec.generate()?;
    let mut w = output(&a.out)?;
    write_graph(&mut w, &g, Some(&spec))?;
    w.flush()?;
    eprintln!("generated {spec}: {} vertices, {} edges", g.n(), g.m());
    Ok(())
}

fn cmd_init(a: InitArgs) -> Result<()> {
    let seed = announce(a.seed);
    let objective = parse_objective(&a.objective)?;
    let method = parse_init(&a.method)?;
    let g = load_graph(&a.graph)?;
    let p = method.generate(&g, objective, &mut rng_from_seed(seed))?;
    println!(
        "# init method={} cut={} left={} right={}",
        method.name(),
        p.cut(),
        p.size_left(),
        p.size_right()
    );
    let mut w = output(&a.out)?;
    write_partition(&mut w, &p)?;
    w.flush()?;
    Ok(())
}

fn cmd_run(a: RunArgs) -> Result<()> {
    let seed = announce(a.seed);
    let objective = parse_objective(&a.objective)?;
    let spec = a.algo.spec()?;
    let budget = a.budget.budget()?;
    let g = load_graph(&a.graph)?;
    let r = spec.run(&g, objective, budget, seed)?;
    let mut line = format!(
        "# stats algo={spec} objective={objective} cut={} left={} right={} score={} starts={} time_s={:.6}",
        r.best.cut(),
        r.best.size_left(),
        r.best.size_right(),
        r.best.score(objective),
        r.starts,
        r.elapsed.as_secs_f64()
    );
    for (k, v) in &r.extra {
        line.push_str(&format!(" {k}={v}"));
    }
    println!("{line}");
    let mut w = output(&a.out)?;
    write_partition(&mut w, &r.best)?;
    w.flush()?;
    Ok(())
}

fn read_suite(path: &Path) -> Result<Vec<GenSpec>> {
    if !path.exists() {
        return Err(usage(format!("suite file not found: {}", path.display())));
    }
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut suite = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        let is_spec = t.starts_with("# genspec") || t.starts_with("kind=");
        if t.is_empty() || (t.starts_with('#') && !is_spec) {
            continue;
        }
        let spec: GenSpec = t
            .parse()
            .map_err(|e: String| anyhow::anyhow!("{}:{}: {e}", path.display(), i + 1))?;
        suite.push(spec);
    }
    if suite.is_empty() {
        anyhow::bail!("{}: no generator specs", path.display());
    }
    Ok(suite)
}

fn cmd_bench(a: BenchArgs) -> Result<()> {
    let seed = announce(a.seed);
    let objective = parse_objective(&a.objective)?;
    if !(a.time >= 0.0 && a.time.is_finite()) {
        return Err(usage(format!(
            "--time must be a non-negative number, got {}",
            a.time
        )));
    }
    let suite = read_suite(&a.suite)?;
    let profile_args = AlgoArgs {
        algo: "po".into(),
        init: None,
        k_starts: None,
        stale_iters: None,
        stale_restarts: None,
        accept_ties: false,
        long_run: false,
        no_long_run: false,
        alpha: None,
        cooling: None,
        profile: a.profile.clone(),
        ng: "fitted".into(),
    };
    let ng = profile_args.spec()?.ng;
    let algos = a
        .algos
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            let mut spec: AlgoSpec = s.parse().map_err(|e| usage(format!("--algos: {e}")))?;
            spec.ng = ng.clone();
            Ok(spec)
        })
        .collect::<Result<Vec<_>>>()?;
    if algos.is_empty() {
        return Err(usage("--algos is empty"));
    }
    let cfg = BenchConfig {
        objective,
        budget: Budget::seconds(a.time),
        trials_per_graph: a.trials,
        seed,
        jobs: a.jobs,
        ..BenchConfig::default()
    };
    let report = run_benchmark(&suite, &algos, &cfg)?;
    let table = match &a.out {
        Some(dir) => emit_table(&report, dir)?,
        None => render_table(&report),
    };
    print!("{table}");
    for f in &report.failures {
        eprintln!(
            "warning: graph {} algo {} failed: {}",
            f.graph, f.algo, f.message
        );
    }
    Ok(())
}

fn cmd_nganalyze(a: NgArgs) -> Result<()> {
    let seed = announce(a.seed);
    let objective = parse_objective(&a.objective)?;
    let class = if a.class.split_whitespace().any(|t| t.starts_with("seed=")) {
        a.class.clone()
    } else {
        format!("{} seed=0", a.class)
    };
    let spec: GenSpec = class
        .parse()
        .map_err(|e: String| usage(format!("--class: {e}")))?;
    let oracle: AlgoSpec = a
        .oracle
        .parse()
        .map_err(|e| usage(format!("--oracle: {e}")))?;
    let mut budget = Budget::restarts(a.oracle_restarts);
    if let Some(t) = a.oracle_time {
        budget.time = Some(std::time::Duration::from_secs_f64(t.max(0.0)));
    }
    let cfg = NgConfig {
        objective,
        oracle,
        oracle_budget: budget,
        ordering: parse_ordering(&a.ordering)?,
        ensemble_size: a.ensemble,
        seed,
        jobs: a.jobs,
    };
    let p = estimate_ng(&spec, &cfg)?;
    println!(
        "# ng ensemble={} nongreedy_fraction={} a={} b={} r2={} stderr={} first_half_share={}",
        p.ensemble_size,
        p.nongreedy_fraction(),
        p.a,
        p.b,
        p.r_squared,
        p.stderr,
        p.first_half_share
    );
    if let Some(path) = &a.profile_out {
        let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        let mut w = BufWriter::new(f);
        p.write(&mut w)?;
        w.flush()?;
    }
    let mut w = output(&a.out)?;
    p.write_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

fn cmd_postprocess(a: PostArgs) -> Result<()> {
    let seed = announce(a.seed);
    let objective = parse_objective(&a.objective)?;
    let ordering = parse_ordering(&a.ordering)?;
    let g = load_graph(&a.graph)?;
    let target = read_partition(BufReader::new(open(&a.partition)?), &g)
        .with_context(|| format!("reading partition {}", a.partition.display()))?;
    let trace = replay_label(&g, &target, ordering, objective, &mut rng_from_seed(seed))?;
    println!(
        "# postprocess placements={} nongreedy={} fraction={}",
        trace.labels.len(),
        trace.nongreedy_count(),
        trace.nongreedy_fraction()
    );
    let mut w = output(&a.out)?;
    writeln!(w, "step,vertex,side,label,unplaced_avg_degree")?;
    for (i, ((&v, l), d)) in trace
        .order
        .iter()
        .zip(&trace.labels)
        .zip(&trace.unplaced_avg_degree)
        .enumerate()
    {
        let side = match target.side(v) {
            Side::Left => 0,
            Side::Right => 1,
        };
        let label = match l {
            Label::Greedy => "greedy",
            Label::NonGreedy => "nongreedy",
        };
        writeln!(w, "{},{v},{side},{label},{d}", i + 1)?;
    }
    w.flush()?;
    Ok(())
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        let io = match c.downcast_ref::<pathopt::Error>() {
            Some(pathopt::Error::Io(io)) => Some(io),
            _ => c.downcast_ref::<io::Error>(),
        };
        io.is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe)
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Init(a) => cmd_init(a),
        Command::Run(a) => cmd_run(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Nganalyze(a) => cmd_nganalyze(a),
        Command::Postprocess(a) => cmd_postprocess(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

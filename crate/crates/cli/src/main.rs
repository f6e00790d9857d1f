use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use containers_core::engine::{self, render_trace, EngineParams, Mode, ThresholdKind};
use containers_core::iterate::{canonical_zeta, iterate_scheduled, iterate_weak_chain};
use containers_core::lineq::{self, container_count_bound, sparse_random_experiment};
use containers_core::sidon;
use containers_core::verify::{full_harness, random_hypergraph, HarnessConfig};
use containers_core::{Error, VertexSet};

/// Container construction for hypergraphs, with solution-free-set and
/// additive-set applications and brute-force verification harnesses.
#[derive(Parser)]
#[command(name = "hgc", version, max_term_width = 100)]
struct Cli {
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Human,
    Records,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Weak,
    Strong,
}

impl From<KindArg> for ThresholdKind {
    fn from(k: KindArg) -> ThresholdKind {
        match k {
            KindArg::Weak => ThresholdKind::Weak,
            KindArg::Strong => ThresholdKind::Strong,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Prune,
    Build,
}

#[derive(Subcommand)]
enum Command {
    /// Run one prune or build pass over a hypergraph file
    Containers(ContainersArgs),
    /// Run an iterated container chain
    Iterate(IterateArgs),
    /// Analyze a linear system: abundance, density parameter, containers,
    /// exact versus bounded counts
    Lineq(LineqArgs),
    /// Additive 4-graph table: edge counts, exact counts, container bound
    Sidon(SidonArgs),
    /// Monte-Carlo sweep of maximum solution-free subsets of random samples
    Sparse(SparseArgs),
    /// Exhaustive harness over a seeded random hypergraph
    Verify(VerifyArgs),
}

#[derive(Args)]
struct ContainersArgs {
    /// Hypergraph file ("n r" header, one edge per line)
    graph: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Build)]
    mode: ModeArg,
    /// Input set, comma-separated labels (prune: the sparse set; build: the
    /// fingerprint). Empty string for the empty set.
    #[arg(long, default_value = "")]
    input_set: String,
    #[arg(long, default_value_t = 0.25)]
    tau: f64,
    /// Low-degree cutoff; defaults to 1/(12 r!) for strong runs and 0.25
    /// for weak runs
    #[arg(long)]
    zeta: Option<f64>,
    #[arg(long, value_enum, default_value_t = KindArg::Weak)]
    kind: KindArg,
    /// Emit the full decision/insertion trace
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct IterateArgs {
    /// Hypergraph file
    graph: PathBuf,
    /// Weak chain at tau/ell per stage until `e(G[C]) <= epsilon e(G)`
    #[arg(long, conflicts_with = "edge_target")]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    tau: f64,
    /// Scheduled strong chain until `e(G[C]) <=` this target
    #[arg(long)]
    edge_target: Option<u64>,
    /// Constant tau for the scheduled chain (default: the additive
    /// quadruple schedule, 4-graphs only)
    #[arg(long)]
    tau_const: Option<f64>,
    #[arg(long)]
    zeta: Option<f64>,
    #[arg(long, default_value = "")]
    input_set: String,
}

#[derive(Args)]
struct LineqArgs {
    /// System file ("k r <Fp p | ZN n | AB n1 ...>", matrix rows, b, Z)
    system: PathBuf,
    #[arg(long, default_value_t = 0.3)]
    epsilon: f64,
    /// Scale factor for tau = |F|^(-1/m)/gamma (default: the chain
    /// constant, almost always vacuous at desk scale)
    #[arg(long)]
    gamma: Option<f64>,
    /// Skip the container collection (counting oracles only)
    #[arg(long)]
    no_containers: bool,
}

#[derive(Args)]
struct SidonArgs {
    /// Range sizes to tabulate
    #[arg(long = "n", required = true)]
    n: Vec<u64>,
    /// Chain edge target (default: the nominal beta^4 n / 20, replaced by a
    /// tenth of the edge count whenever the nominal target is vacuous, as
    /// it always is at desk scale)
    #[arg(long)]
    edge_target: Option<u64>,
    #[arg(long, default_value_t = sidon::BETA_DEFAULT)]
    beta: f64,
}

#[derive(Args)]
struct SparseArgs {
    /// System file
    system: PathBuf,
    /// Comma-separated inclusion probabilities
    #[arg(long, default_value = "0.1,0.2,0.4,0.8,1.0")]
    p_grid: String,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 10)]
    n: u32,
    #[arg(long, default_value_t = 3)]
    r: u32,
    #[arg(long, default_value_t = 15)]
    edges: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = KindArg::Weak)]
    kind: KindArg,
    #[arg(long, default_value_t = 0.25)]
    tau: f64,
    #[arg(long)]
    zeta: Option<f64>,
    /// Sparse non-independent inputs to add to the exhaustive family
    #[arg(long, default_value_t = 50)]
    sparse_inputs: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .ok();
    }
    match dispatch(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::ScaleGuard(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn dispatch(cli: &Cli) -> Result<bool, Error> {
    match &cli.command {
        Command::Containers(args) => cmd_containers(args),
        Command::Iterate(args) => cmd_iterate(args),
        Command::Lineq(args) => cmd_lineq(args, cli.format),
        Command::Sidon(args) => cmd_sidon(args),
        Command::Sparse(args) => cmd_sparse(args, cli.format),
        Command::Verify(args) => cmd_verify(args, cli.format),
    }
}

fn read(path: &PathBuf) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))
}

fn default_zeta(kind: ThresholdKind, r: u32, zeta: Option<f64>) -> f64 {
    zeta.unwrap_or(match kind {
        ThresholdKind::Strong => canonical_zeta::<f64>(r),
        ThresholdKind::Weak => 0.25,
    })
}

fn cmd_containers(args: &ContainersArgs) -> Result<bool, Error> {
    let graph = containers_core::io::parse_hypergraph(&read(&args.graph)?)?;
    let kind: ThresholdKind = args.kind.into();
    let zeta = default_zeta(kind, graph.uniformity(), args.zeta);
    let params = EngineParams::new(args.tau, zeta, kind)?;
    let input = VertexSet::parse(&args.input_set)?;
    let mode = match args.mode {
        ModeArg::Prune => Mode::Prune,
        ModeArg::Build => Mode::Build,
    };
    let trace = engine::run(&graph, &params, mode, &input)?;
    if args.trace {
        print!("{}", render_trace(&trace));
    } else {
        match mode {
            Mode::Prune => println!("T={}", trace.t),
            Mode::Build => println!("C={}", trace.output()),
        }
    }
    Ok(true)
}

fn cmd_iterate(args: &IterateArgs) -> Result<bool, Error> {
    let graph = containers_core::io::parse_hypergraph(&read(&args.graph)?)?;
    let input = VertexSet::parse(&args.input_set)?;
    let outcome = if let Some(target) = args.edge_target {
        let zeta = args
            .zeta
            .unwrap_or(canonical_zeta::<f64>(graph.uniformity()));
        match args.tau_const {
            Some(tau) => iterate_scheduled(&graph, target, zeta, |_| Ok(tau), &input)?,
            None => {
                if graph.uniformity() != 4 {
                    return Err(Error::invalid(
                        "the additive schedule applies to 4-graphs; pass --tau-const".to_string(),
                    ));
                }
                iterate_scheduled(
                    &graph,
                    target,
                    zeta,
                    |g| sidon::tau_schedule(g).map(|t| t.value()),
                    &input,
                )?
            }
        }
    } else {
        let epsilon = args.epsilon.ok_or_else(|| {
            Error::invalid("pass --epsilon (weak chain) or --edge-target (scheduled)".to_string())
        })?;
        iterate_weak_chain(&graph, args.tau, epsilon, &input)?
    };
    for stage in &outcome.stages {
        println!(
            "stage {} vertices={} edges={}->{} tau={} T={}",
            stage.index,
            stage.vertices,
            stage.edges_before,
            stage.edges_after,
            stage.tau,
            stage.fingerprint
        );
    }
    println!(
        "chain completed={} iterations={} T={} C={}",
        outcome.completed, outcome.iterations, outcome.t_union, outcome.container
    );
    print!("{}", outcome.report.render());
    Ok(outcome.report.all_ok())
}

fn cmd_lineq(args: &LineqArgs, format: Format) -> Result<bool, Error> {
    let sys = lineq::parse_system(&read(&args.system)?)?;
    println!(
        "system k={} r={} ground=\"{}\" discounts={}",
        sys.k, sys.r, sys.ground, sys.z
    );
    let rank = sys.rank_report();
    match &rank {
        lineq::RankReport::Field { rank, full } => println!("rank={rank} full={full}"),
        lineq::RankReport::Abelian {
            invariant_factors,
            full,
        } => {
            let fs: Vec<String> = invariant_factors.iter().map(|f| f.to_string()).collect();
            println!("invariant-factors={} full={full}", fs.join(","));
        }
    }
    if !sys.is_abundant() {
        println!("abundant=false");
        println!("diagnostic: container machinery needs an abundant matrix");
        return Ok(false);
    }
    let m = sys.m_value()?;
    println!("abundant=true m={}", m.value);
    let sols = sys.enumerate_solutions()?;
    println!(
        "solutions kept={} discounted={}",
        sols.kept.len(),
        sols.discounted
    );
    let degree_report = sys.verify_degree_bound(args.gamma.unwrap_or(1.0))?;
    print!("{}", degree_report.render());
    let mut ok = degree_report.all_ok();
    if !args.no_containers {
        let (cmp, containers) = container_count_bound(&sys, args.epsilon, args.gamma)?;
        print!("{}", containers.report.render());
        if matches!(format, Format::Records) {
            print!("{}", containers.collection.render());
            print!("{}", containers.render_ground(&sys.ground));
        }
        println!(
            "count exact={} max-free={} containers={} max-container={} log2-count={} log2-bound={} ordering-ok={}",
            cmp.exact_count,
            cmp.max_free_size,
            cmp.collection_size,
            cmp.max_container_size,
            cmp.log2_exact,
            cmp.log2_bound,
            cmp.ordering_ok
        );
        ok = ok && containers.report.all_ok() && cmp.ordering_ok;
    }
    Ok(ok)
}

fn cmd_sidon(args: &SidonArgs) -> Result<bool, Error> {
    let mut all_ok = true;
    println!("n edges exact-count log2-bound containers max-container target");
    for &n in &args.n {
        let graph_edges = sidon::build_sidon_graph(n)?.edge_count();
        let target = match args.edge_target {
            Some(t) => t,
            None => {
                let nominal = sidon::default_edge_target(n, args.beta);
                if nominal >= graph_edges as f64 {
                    (graph_edges / 10).max(1)
                } else {
                    nominal as u64
                }
            }
        };
        let out = sidon::sidon_container_pipeline(n, target)?;
        let count = out
            .exact_count
            .map(|c| c.to_string())
            .unwrap_or_else(|| "-".to_string());
        let bound = out
            .log2_count_bound
            .map(|b| format!("{b}"))
            .unwrap_or_else(|| "-".to_string());
        println!(
            "{n} {} {count} {bound} {} {} {}",
            out.edge_count,
            out.collection.len(),
            out.collection.max_container_size(),
            out.edge_target
        );
        for flag in &out.report.flags {
            println!("# flag n={n}: {flag}");
        }
        all_ok = all_ok && out.report.all_ok();
    }
    Ok(all_ok)
}

fn cmd_sparse(args: &SparseArgs, format: Format) -> Result<bool, Error> {
    let sys = lineq::parse_system(&read(&args.system)?)?;
    let ps: Vec<f64> = args
        .p_grid
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::invalid(format!("bad probability '{s}'")))
        })
        .collect::<Result<_, _>>()?;
    println!("p mean-sample mean-max-free normalized");
    for p in ps {
        let summary = sparse_random_experiment(&sys, p, args.trials, args.seed)?;
        println!(
            "{p} {} {} {}",
            summary.mean_sample, summary.mean_max_free, summary.normalized_mean
        );
        if matches!(format, Format::Records) {
            for (i, t) in summary.trials.iter().enumerate() {
                println!(
                    "trial p={p} index={i} sample={} max-free={}",
                    t.sample_size, t.max_free
                );
            }
        }
    }
    Ok(true)
}

fn cmd_verify(args: &VerifyArgs, format: Format) -> Result<bool, Error> {
    let graph = random_hypergraph(args.n, args.r, args.edges, args.seed)?;
    let kind: ThresholdKind = args.kind.into();
    let config = HarnessConfig {
        tau: args.tau,
        zeta: default_zeta(kind, args.r, args.zeta),
        kind,
        seed: args.seed,
        random_sparse_inputs: args.sparse_inputs,
        ..Default::default()
    };
    let report = full_harness(&graph, &config)?;
    match format {
        Format::Records => print!("{}", report.render()),
        Format::Human => {
            println!("{}", report.header);
            for flag in &report.flags {
                println!("flag {flag}");
            }
            for line in report.failures() {
                println!("input={} {}", line.input, line.check);
            }
            println!(
                "inputs={} checks={} failures={}",
                report.inputs_checked,
                report.lines.len(),
                report.failures().count()
            );
        }
    }
    Ok(report.all_ok())
}

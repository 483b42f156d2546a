use std::fs;
use std::io::Write as _;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use intervene::bench::{load_graph, run_grid, summarize_delta, write_csv, GridSpec};
use intervene::formats::{dump_lp, save_edge_list, PkgDocument};
use intervene_core::generate::{erdos_renyi_dag, structural_stats};
use intervene_core::ip::{build_instance, CostModel, IpConfig, Objective};
use intervene_core::planner::{simulate, PlanError, PlannerConfig, Strategy};

/// Adaptive intervention planning for causal structure discovery.
#[derive(Parser)]
#[command(name = "intervene", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an Erdős–Rényi DAG as an edge list.
    Gen {
        /// Number of vertices.
        #[arg(long)]
        n: usize,
        /// Edge probability in [0, 1].
        #[arg(long, value_parser = probability)]
        p: f64,
        /// Generator seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print structural statistics of a graph.
    Stats {
        /// Edge-list or .bif file, or a bundled name (asia, sachs, chain, collider).
        graph: String,
    },
    /// Run the discovery loop against a known truth.
    Simulate(SimulateArgs),
    /// Run an experiment grid and write results.csv and summary.json.
    Bench {
        /// Grid spec, TOML.
        grid: PathBuf,
        /// Output directory.
        #[arg(long, default_value = "bench-out")]
        out: PathBuf,
        /// Overrides the grid's master seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Start the HTTP advisor.
    Serve {
        /// Listen address.
        #[arg(long, env = "INTERVENE_ADDR", default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        /// Session storage; in-memory when omitted.
        #[arg(long, env = "INTERVENE_DATA_DIR")]
        data_dir: Option<PathBuf>,
    },
    /// Write the selection program for a PKG document in LP format.
    DumpIp {
        /// PKG document, JSON or TOML.
        pkg: PathBuf,
        /// Most vertices manipulated in one experiment.
        #[arg(long, default_value_t = 1)]
        kmax: usize,
        /// Cost budget per experiment; unbounded when omitted.
        #[arg(long)]
        budget: Option<f64>,
        /// `plain`, `cost-penalty=<lambda>`, or a JSON/TOML objective file.
        #[arg(long, default_value = "plain")]
        objective: String,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SimulateArgs {
    /// Truth graph: file or bundled name. Generated from --n/--p when omitted.
    #[arg(long)]
    graph: Option<String>,
    /// Vertices of the generated truth.
    #[arg(long, required_unless_present = "graph")]
    n: Option<usize>,
    /// Edge probability of the generated truth.
    #[arg(long, value_parser = probability, required_unless_present = "graph")]
    p: Option<f64>,
    /// Planning strategy.
    #[arg(long, value_enum, default_value_t = StrategyArg::Ip)]
    strategy: StrategyArg,
    /// Most vertices manipulated per round.
    #[arg(long, default_value_t = 1)]
    kmax: usize,
    /// Cost budget per round; unbounded when omitted.
    #[arg(long)]
    budget: Option<f64>,
    /// `plain`, `cost-penalty=<lambda>`, or a JSON/TOML objective file.
    #[arg(long, default_value = "plain")]
    objective: String,
    /// Seeds both the generated truth and the planner.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Writes the full run record here as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    /// Optimal selection program each round.
    Ip,
    /// Uniformly drawn intervention sets.
    Random,
}

fn probability(s: &str) -> Result<f64, String> {
    let p: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(format!("{p} is outside [0, 1]"))
    }
}

fn objective(spec: &str) -> Result<Objective> {
    if spec == "plain" {
        return Ok(Objective::Plain);
    }
    if let Some(l) = spec.strip_prefix("cost-penalty=") {
        let lambda: f64 = l.parse().with_context(|| format!("bad lambda {l:?}"))?;
        return Ok(Objective::CostPenalty { lambda, weights: None });
    }
    let text = fs::read_to_string(spec).with_context(|| format!("reading objective {spec}"))?;
    let obj: Objective = if text.trim_start().starts_with('{') {
        serde_json::from_str(&text)?
    } else {
        toml::from_str(&text)?
    };
    obj.validate()?;
    Ok(obj)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Gen { n, p, seed, out } => {
            let dag = erdos_renyi_dag(n, p, seed)?;
            emit(out.as_deref(), &save_edge_list(&dag))
        }
        Command::Stats { graph } => {
            let s = structural_stats(&load_graph(&graph)?);
            println!("nodes {}", s.nodes);
            println!("edges {}", s.edges);
            println!("min degree {}", s.min_degree);
            println!("avg degree {:.2}", s.avg_degree);
            println!("max degree {}", s.max_degree);
            println!("degree stdev {:.2}", s.degree_std);
            println!("v-structures {}", s.v_structures);
            Ok(())
        }
        Command::Simulate(args) => run_simulate(args),
        Command::Bench { grid, out, seed } => {
            let text = fs::read_to_string(&grid).with_context(|| format!("reading {}", grid.display()))?;
            let mut spec: GridSpec = toml::from_str(&text)?;
            if let Some(seed) = seed {
                spec.master_seed = seed;
            }
            fs::create_dir_all(&out)?;
            let rows = match run_grid(&spec) {
                Ok(rows) => rows,
                Err(intervene::bench::BenchError::Run { partial, source, .. }) => {
                    write_csv(&partial, fs::File::create(out.join("results.partial.csv"))?)?;
                    bail!("grid stopped after {} rows: {source}", partial.len());
                }
                Err(e) => return Err(e.into()),
            };
            write_csv(&rows, fs::File::create(out.join("results.csv"))?)?;
            let both = spec.strategies.contains(&Strategy::Ip) && spec.strategies.contains(&Strategy::Random);
            println!("{} runs", rows.len());
            if both {
                let cells = summarize_delta(&rows)?;
                fs::write(out.join("summary.json"), serde_json::to_string_pretty(&cells)?)?;
                println!("n\tgraph\tk_max\tpairs\tmedian d_rounds\tmedian d_variables");
                for c in &cells {
                    println!(
                        "{}\t{}\t{}\t{}\t{}\t{}",
                        c.n, c.graph, c.k_max, c.pairs, c.rounds.median, c.variables.median
                    );
                }
            }
            Ok(())
        }
        Command::Serve { addr, data_dir } => {
            let rt = tokio::runtime::Builder::new_current_thread().enable_all().build()?;
            rt.block_on(intervene::service::serve(addr, data_dir))
        }
        Command::DumpIp {
            pkg,
            kmax,
            budget,
            objective: obj,
            out,
        } => {
            let text = fs::read_to_string(&pkg).with_context(|| format!("reading {}", pkg.display()))?;
            let pkg = PkgDocument::parse(&text)?;
            let cfg = IpConfig {
                budget,
                objective: objective(&obj)?,
                ..IpConfig::with_k_max(kmax)
            };
            let inst = build_instance(&pkg, &CostModel::zero(pkg.n()), &cfg)?;
            emit(out.as_deref(), &dump_lp(&inst))
        }
    }
}

fn run_simulate(args: SimulateArgs) -> Result<()> {
    let truth = match (&args.graph, args.n, args.p) {
        (Some(g), _, _) => load_graph(g)?,
        (None, Some(n), Some(p)) => erdos_renyi_dag(n, p, args.seed)?,
        _ => bail!("give --graph or both --n and --p"),
    };
    let strategy = match args.strategy {
        StrategyArg::Ip => Strategy::Ip,
        StrategyArg::Random => Strategy::Random,
    };
    let mut cfg = PlannerConfig::new(strategy, args.kmax, args.seed);
    cfg.budget = args.budget;
    cfg.objective = objective(&args.objective)?;
    let record = match simulate(&truth, &cfg) {
        Ok(r) => r,
        Err(PlanError::RoundCap { record, cap }) => {
            eprintln!("stopped at the round cap of {cap}");
            *record
        }
        Err(e) => return Err(e.into()),
    };
    if let Some(path) = &args.out {
        let doc = serde_json::json!({ "config": cfg, "truth_edges": truth.edges(), "record": record });
        fs::write(path, serde_json::to_string_pretty(&doc)?)?;
    }
    let recovered = record.final_edges == truth.edges();
    println!(
        "rounds: {}, manipulations: {}",
        record.rounds, record.total_manipulations
    );
    println!(
        "terminated: {}, recovered truth: {}",
        if record.terminated { "success" } else { "round-cap" },
        recovered
    );
    Ok(())
}

//! The `pdnet` command line: `gen`, `run`, `batch` and `report`.
//!
//! Exit status is 0 on success, 1 when a run fails and 2 for bad flags,
//! manifests or input files.

use std::ffi::OsString;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand};

use crate::dynamics::Simulation;
use crate::error::{Error, Result};
use crate::experiment::{
    read_summary_csv, run_plan, summarize_plan, write_raw_csv, write_summary_csv, SummaryRow,
};
use crate::generators::generate_network;
use crate::graph::{save_edge_list, Graph};
use crate::manifest::{NetworkFields, RunManifest};
use crate::metrics::{census, render_grid_ppm, trace_row, TRACE_HEADER};

/// Overrides the output directory of `run` and `batch` unless `--out-dir` is given.
pub const OUT_DIR_ENV: &str = "PDNET_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "pdnet", version, about = "Four-strategy prisoner's dilemma on networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a network and write it as an edge list.
    Gen(GenArgs),
    /// Simulate one configuration, writing a census trace and optional grid frames.
    Run(RunArgs),
    /// Run a replicated (p, mu) sweep and write summary and raw CSVs.
    Batch(BatchArgs),
    /// Print a summary CSV as a table.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("family").required(true).args([
    "grid", "ring", "er", "cellular", "core_periphery", "scale_free", "small_world",
])))]
#[command(group(ArgGroup::new("stencil").args(["moore", "von_neumann"])))]
struct GenArgs {
    /// Torus grid of WIDTHxHEIGHT cells.
    #[arg(long, value_name = "WxH", value_parser = parse_dims)]
    grid: Option<(usize, usize)>,
    /// Eight-neighbor grid stencil (default).
    #[arg(long, requires = "grid")]
    moore: bool,
    /// Four-neighbor grid stencil.
    #[arg(long, requires = "grid")]
    von_neumann: bool,
    #[arg(long)]
    ring: bool,
    /// Uniform random graph with an exact edge count.
    #[arg(long)]
    er: bool,
    #[arg(long)]
    cellular: bool,
    #[arg(long)]
    core_periphery: bool,
    #[arg(long)]
    scale_free: bool,
    #[arg(long)]
    small_world: bool,

    #[arg(long)]
    n: Option<usize>,
    /// Ring degree (even).
    #[arg(long)]
    k: Option<usize>,
    /// Target edge count.
    #[arg(long)]
    edges: Option<usize>,
    #[arg(long)]
    cells: Option<usize>,
    #[arg(long)]
    inner_density: Option<f64>,
    #[arg(long)]
    core_fraction: Option<f64>,
    #[arg(long)]
    core_density: Option<f64>,
    #[arg(long)]
    seed_core: Option<usize>,
    #[arg(long)]
    seed_density: Option<f64>,
    #[arg(long)]
    attach: Option<usize>,
    #[arg(long)]
    isolated: Option<usize>,
    #[arg(long)]
    rewire: Option<f64>,
    #[arg(long)]
    add: Option<f64>,

    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Edge list destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RunArgs {
    manifest: PathBuf,
    /// Write a PPM frame every T ticks (grid networks only).
    #[arg(long, value_name = "T", value_parser = clap::value_parser!(u64).range(1..))]
    snapshot_every: Option<u64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    ticks: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BatchArgs {
    manifest: PathBuf,
    /// Worker threads; defaults to all cores.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: Option<u64>,
    #[arg(long)]
    replications: Option<usize>,
    #[arg(long)]
    ticks: Option<u64>,
    #[arg(long)]
    base_seed: Option<u64>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    summary: PathBuf,
}

fn parse_dims(text: &str) -> std::result::Result<(usize, usize), String> {
    let (w, h) = text.split_once(['x', 'X']).ok_or_else(|| format!("expected WIDTHxHEIGHT, got {text:?}"))?;
    let w = w.parse().map_err(|_| format!("bad width {w:?}"))?;
    let h = h.parse().map_err(|_| format!("bad height {h:?}"))?;
    Ok((w, h))
}

/// Parse `args` (including the program name) and run the command. Returns the exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Run(args) => cmd_run(args),
        Command::Batch(args) => cmd_batch(args),
        Command::Report(args) => cmd_report(args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("pdnet: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    if e.is_usage() || matches!(e, Error::Parse { .. }) {
        2
    } else {
        1
    }
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let kind = if args.grid.is_some() {
        if args.von_neumann {
            "grid_von_neumann"
        } else {
            "grid_moore"
        }
    } else if args.ring {
        "ring_lattice"
    } else if args.er {
        "erdos_renyi"
    } else if args.cellular {
        "cellular"
    } else if args.core_periphery {
        "core_periphery"
    } else if args.scale_free {
        "scale_free"
    } else {
        "small_world"
    };
    let fields = NetworkFields {
        width: args.grid.map(|d| d.0),
        height: args.grid.map(|d| d.1),
        n: args.n,
        k: args.k,
        edges: args.edges,
        cells: args.cells,
        inner_density: args.inner_density,
        core_fraction: args.core_fraction,
        core_density: args.core_density,
        seed_core: args.seed_core,
        seed_density: args.seed_density,
        attach: args.attach,
        isolated: args.isolated,
        rewire: args.rewire,
        add: args.add,
    };
    let spec = fields.build(kind)?;
    let graph = generate_network(&spec, args.seed)?;
    let text = save_edge_list(&graph);
    let summary = graph_summary(&graph);
    match args.out {
        Some(path) => {
            fs::write(&path, text)?;
            println!("{summary}");
        }
        None => {
            print!("{text}");
            eprintln!("{summary}");
        }
    }
    Ok(())
}

fn graph_summary(graph: &Graph) -> String {
    format!(
        "nodes={} edges={} mean_degree={:.3} max_degree={} isolated={}",
        graph.node_count(),
        graph.edge_count(),
        graph.mean_degree(),
        graph.max_degree(),
        graph.isolated_count()
    )
}

fn output_dir(flag: Option<PathBuf>, manifest: &RunManifest) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .or_else(|| manifest.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."))
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let manifest = RunManifest::load(&args.manifest)?;
    let mut config = manifest.sim.ok_or_else(|| Error::Manifest("`run` needs a [sim] section".into()))?;
    if let Some(p) = args.p {
        config.participation_rate = p;
    }
    if let Some(mu) = args.mu {
        config.mutation_rate = mu;
    }
    if let Some(ticks) = args.ticks {
        config.ticks = ticks;
    }
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    config.validate().map_err(|e| Error::Argument(e.to_string()))?;
    let dims = match args.snapshot_every {
        None => None,
        Some(every) => match manifest.grid_dims() {
            Some(dims) => Some((every, dims)),
            None => return Err(Error::Argument("--snapshot-every needs a grid network".into())),
        },
    };

    let graph = manifest.build_graph()?;
    let dir = output_dir(args.out_dir, &manifest);
    fs::create_dir_all(&dir)?;
    let mut trace = BufWriter::new(fs::File::create(dir.join("trace.csv"))?);
    writeln!(trace, "{TRACE_HEADER}")?;

    let mut sim = Simulation::new(&graph, config)?;
    let mut record = |sim: &Simulation, last: bool| -> Result<()> {
        let state = sim.state();
        writeln!(trace, "{}", trace_row(&census(&graph, state)?))?;
        if let Some((every, (w, h))) = dims {
            if state.tick.is_multiple_of(every) || last {
                fs::write(dir.join(format!("frame_{}.ppm", state.tick)), render_grid_ppm(state, w, h)?)?;
            }
        }
        Ok(())
    };
    record(&sim, config.ticks == 0)?;
    for t in 1..=config.ticks {
        sim.step(&graph);
        record(&sim, t == config.ticks)?;
    }
    trace.flush()?;
    let last = census(&graph, sim.state())?;
    println!(
        "tick={} C={} D={} L={} P={} phi={:.3}",
        last.tick, last.counts[0], last.counts[1], last.counts[2], last.counts[3], last.phi
    );
    Ok(())
}

fn cmd_batch(args: BatchArgs) -> Result<()> {
    let manifest = RunManifest::load(&args.manifest)?;
    let mut plan =
        manifest.plan.clone().ok_or_else(|| Error::Manifest("`batch` needs a [plan] section".into()))?;
    if let Some(r) = args.replications {
        plan.replications = r;
    }
    if let Some(t) = args.ticks {
        plan.ticks = t;
    }
    if let Some(s) = args.base_seed {
        plan.base_seed = s;
    }
    plan.validate()?;

    let graph = manifest.build_graph()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs.unwrap_or(0) as usize)
        .build()
        .map_err(|e| Error::Plan(e.to_string()))?;
    let results = pool.install(|| run_plan(&graph, &plan))?;
    let summaries = summarize_plan(&results, &plan)?;

    let dir = output_dir(args.out_dir, &manifest);
    let summary_path = dir.join("summary.csv");
    let raw_path = dir.join("raw.csv");
    let written = fs::create_dir_all(&dir)
        .and_then(|_| fs::write(&summary_path, write_summary_csv(&summaries)))
        .and_then(|_| fs::write(&raw_path, write_raw_csv(&results)));
    if let Err(e) = written {
        let _ = fs::remove_file(&summary_path);
        let _ = fs::remove_file(&raw_path);
        return Err(e.into());
    }

    let (np, nmu) = plan.null_condition;
    let null = summaries
        .iter()
        .find(|s| s.p == np && s.mu == nmu)
        .expect("null condition is part of the validated sweep");
    print!("{}", write_summary_csv(std::slice::from_ref(null)));
    Ok(())
}

fn cmd_report(args: ReportArgs) -> Result<()> {
    let text = read_input(&args.summary)?;
    let rows = read_summary_csv(&text)?;
    print!("{}", format_report(&rows));
    Ok(())
}

fn read_input(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Argument(format!("cannot read {}: {e}", path.display())))
}

/// Fixed-width table of summary rows: header, rule, one line per row.
pub fn format_report(rows: &[SummaryRow]) -> String {
    if rows.is_empty() {
        return "no conditions in summary\n".to_string();
    }
    let mut header = format!("{:>7} {:>7}", "p", "mu");
    for s in ["C", "D", "L", "P"] {
        header.push_str(&format!(" {:>8} {:>9}", format!("{s} mean"), format!("{s} t")));
    }
    header.push_str(&format!(" {:>8}", "phi"));
    let mut out = header.clone();
    out.push('\n');
    out.push_str(&"-".repeat(header.len()));
    out.push('\n');
    for r in rows {
        out.push_str(&format!("{:>7} {:>7}", r.p, r.mu));
        for i in 0..4 {
            let t = format!("{:.1}{}", r.t[i], r.flag[i]);
            out.push_str(&format!(" {:>8.1} {:>9}", r.mean[i], t));
        }
        out.push_str(&format!(" {:>8.1}\n", r.phi));
    }
    out
}

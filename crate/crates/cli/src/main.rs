//! `groupcast`: rate bounds, rate curves, delivery verification and a
//! standalone local chromatic solver.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use groupcast::bounds::{rate_report, Demands, ExactOptions, RateReport};
use groupcast::coloring::{exact_local_chromatic, fractional_local_chromatic, SolverLimits};
use groupcast::conflict::{build_conflict_graph, Digraph};
use groupcast::formats::{read_requests, report_to_json, write_curve_csv};
use groupcast::model::{place_caches, RequestMatrix, SystemParams};
use groupcast::rational::{self, Rational};
use groupcast::sweep::{all_demands, random_demands, verify_round_trips, worst_case_exact};
use groupcast::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const THREADS_ENV: &str = "CODED_GROUPCAST_THREADS";

#[derive(Parser)]
#[command(name = "groupcast", version, about = "Coded caching with multiple groupcast requests")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// All rates and the gap for one configuration.
    Bounds {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        demands: DemandArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// One row per grid point while varying L or M.
    Curve {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, value_enum)]
        vary: Vary,
        /// Comma-separated grid; defaults to L = 1..=m or the integer-t memory points.
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<String>>,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Encode random packets, decode at every user and compare.
    Verify {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        demands: DemandArgs,
        /// Random matrices to draw when exhaustive enumeration is too large.
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Random symbol assignments per matrix.
        #[arg(long, default_value_t = 4)]
        trials: usize,
        /// Minimum field degree for the delivery code.
        #[arg(long, default_value_t = 8)]
        q: u32,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact and fractional local chromatic numbers of an edge-list graph.
    SolveGraph {
        file: PathBuf,
        /// Give every vertex class a single color.
        #[arg(long)]
        packet_consistent: bool,
        #[arg(long, default_value_t = 48)]
        max_vertices: usize,
        /// Vertex limit for the fractional relaxation.
        #[arg(long, default_value_t = 20)]
        max_lp_vertices: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Conflict graph of a request matrix (or the worst case) as an edge list.
    ExportGraph {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        demands: DemandArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SystemArgs {
    /// Users.
    #[arg(long)]
    n: usize,
    /// Files in the library.
    #[arg(long)]
    m: usize,
    /// Cache size in file units (integer, p/q or decimal).
    #[arg(long = "M", default_value = "0")]
    memory: String,
    /// Requests per user.
    #[arg(long = "L", default_value_t = 1)]
    requests: usize,
}

impl SystemArgs {
    fn params(&self) -> Result<SystemParams> {
        let memory = rational::parse(&self.memory)?;
        Ok(SystemParams::new(self.n, self.m, memory, self.requests)?)
    }
}

#[derive(Args)]
struct DemandArgs {
    /// Request matrix file (.json, else CSV with one line per user); implies
    /// exact rates for that matrix.
    #[arg(long, conflicts_with = "random")]
    demands: Option<PathBuf>,
    /// Draw one request matrix from --seed instead of the worst case.
    #[arg(long)]
    random: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SolverArgs {
    /// Compute exact rates (worst-case sweep unless a matrix is given).
    #[arg(long)]
    exact: bool,
    /// Give all copies of a packet one color.
    #[arg(long)]
    packet_consistent: bool,
    /// Vertex limit for the exact coloring search.
    #[arg(long, default_value_t = 48)]
    max_vertices: usize,
    /// Limit on enumerated request matrices.
    #[arg(long, default_value_t = 1_000_000)]
    max_demands: usize,
    /// Trials per length for the random linear baseline; 0 skips it.
    #[arg(long, default_value_t = 4)]
    random_trials: usize,
    /// Field degree for the random linear baseline.
    #[arg(long, default_value_t = 16)]
    random_q: u32,
}

impl SolverArgs {
    fn options(&self, seed: u64) -> ExactOptions {
        ExactOptions {
            limits: SolverLimits {
                exact_items: self.max_vertices,
                ..SolverLimits::default()
            },
            packet_consistent: self.packet_consistent,
            max_demands: self.max_demands,
            random_trials: self.random_trials,
            random_degree: self.random_q,
            seed,
            ..ExactOptions::default()
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Vary {
    #[value(name = "L")]
    L,
    #[value(name = "M")]
    M,
}

/// A verification run that found mismatches.
#[derive(Debug)]
struct VerificationFailed(usize);

impl std::fmt::Display for VerificationFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "verification failed for {} user decodes", self.0)
    }
}

impl std::error::Error for VerificationFailed {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<VerificationFailed>().is_some() {
        return 4;
    }
    match err.downcast_ref::<Error>() {
        Some(Error::TooLarge { .. }) => 3,
        Some(Error::Undecodable { .. } | Error::GapViolation { .. } | Error::MissingSymbol(_)) => 4,
        Some(Error::Io(_)) => 1,
        Some(_) => 2,
        None => 1,
    }
}

fn emit(output: &OutputArgs, text: &str) -> Result<()> {
    match &output.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn load_demands(args: &DemandArgs, params: &SystemParams) -> Result<Option<RequestMatrix>> {
    if let Some(path) = &args.demands {
        return Ok(Some(read_requests(path, params)?));
    }
    if args.random {
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
        return Ok(Some(random_demands(params, &mut rng)?));
    }
    Ok(None)
}

fn reports_to_text(reports: &[RateReport], format: Format, comments: &[String]) -> Result<String> {
    match format {
        Format::Json => {
            let body = if reports.len() == 1 {
                report_to_json(&reports[0])?
            } else {
                serde_json::to_string_pretty(reports)?
            };
            Ok(body + "\n")
        }
        Format::Csv => {
            let mut buf = Vec::new();
            write_curve_csv(&mut buf, reports, comments)?;
            Ok(String::from_utf8(buf)?)
        }
    }
}

fn cmd_bounds(system: &SystemArgs, demand_args: &DemandArgs, solver: &SolverArgs, output: &OutputArgs) -> Result<()> {
    let params = system.params()?;
    let options = solver.options(demand_args.seed);
    let fixed = load_demands(demand_args, &params)?;
    let demands = match fixed {
        Some(f) => Some(Demands::Single(f)),
        None if solver.exact => Some(Demands::WorstCase),
        None => None,
    };
    let report = rate_report(&params, demands.as_ref(), &options)?;
    let mut comments = vec![format!("n={} m={} M={} L={}", params.users, params.files, rational::format(&params.memory), params.requests)];
    if demand_args.random {
        comments.push(format!("random demands seed={}", demand_args.seed));
    }
    emit(output, &reports_to_text(&[report], output.format.unwrap_or(Format::Json), &comments)?)
}

fn curve_grid(params: &SystemParams, vary: Vary, values: Option<&[String]>) -> Result<Vec<SystemParams>> {
    match (vary, values) {
        (Vary::L, None) => (1..=params.files).map(|l| Ok(params.with_requests(l)?)).collect(),
        (Vary::M, None) => (0..=params.users)
            .map(|t| Ok(params.with_memory(params.memory_at(t))?))
            .collect(),
        (Vary::L, Some(vals)) => vals
            .iter()
            .map(|v| {
                let l: usize = v.trim().parse().map_err(|_| Error::Parse(format!("L value {v:?}")))?;
                Ok(params.with_requests(l)?)
            })
            .collect(),
        (Vary::M, Some(vals)) => vals
            .iter()
            .map(|v| Ok(params.with_memory(rational::parse(v)?)?))
            .collect(),
    }
}

fn cmd_curve(system: &SystemArgs, vary: Vary, values: Option<&[String]>, solver: &SolverArgs, output: &OutputArgs) -> Result<()> {
    let params = system.params()?;
    let options = solver.options(0);
    let grid = curve_grid(&params, vary, values)?;
    let demands = solver.exact.then_some(Demands::WorstCase);
    let reports = grid
        .iter()
        .map(|p| rate_report(p, demands.as_ref(), &options))
        .collect::<groupcast::Result<Vec<_>>>()?;
    let axis = match vary {
        Vary::L => "L",
        Vary::M => "M",
    };
    let comments = vec![format!(
        "n={} m={} M={} L={} varying {axis}",
        params.users,
        params.files,
        rational::format(&params.memory),
        params.requests
    )];
    emit(output, &reports_to_text(&reports, output.format.unwrap_or(Format::Csv), &comments)?)
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    system: &SystemArgs,
    demand_args: &DemandArgs,
    samples: usize,
    trials: usize,
    q: u32,
    solver: &SolverArgs,
    output: &OutputArgs,
) -> Result<()> {
    let params = system.params()?;
    params.require_integer_t()?;
    let options = solver.options(demand_args.seed);
    let (matrices, mode) = match load_demands(demand_args, &params)? {
        Some(f) => (vec![f], "given".to_string()),
        None => match all_demands(&params, solver.max_demands.min(100_000)) {
            Ok(all) => (all, "exhaustive".to_string()),
            Err(Error::TooLarge { .. }) => {
                let mut rng = ChaCha8Rng::seed_from_u64(demand_args.seed);
                let drawn = (0..samples)
                    .map(|_| random_demands(&params, &mut rng))
                    .collect::<groupcast::Result<Vec<_>>>()?;
                (drawn, format!("random seed={}", demand_args.seed))
            }
            Err(e) => return Err(e.into()),
        },
    };
    let report = verify_round_trips(&params, &matrices, &options, trials, 1, q)?;
    let text = match output.format.unwrap_or(Format::Csv) {
        Format::Json => {
            let value = serde_json::json!({
                "params": params,
                "mode": mode,
                "matrices": report.matrices,
                "decodes": report.decodes,
                "field_degree": report.max_degree,
                "failures": report.failures,
                "passed": report.passed(),
            });
            serde_json::to_string_pretty(&value)? + "\n"
        }
        Format::Csv => format!(
            "mode,matrices,decodes,field_degree,failures,result\n{mode},{},{},{},{},{}\n",
            report.matrices,
            report.decodes,
            report.max_degree,
            report.failures.len(),
            if report.passed() { "pass" } else { "fail" }
        ),
    };
    emit(output, &text)?;
    for failure in report.failures.iter().take(10) {
        eprintln!("{failure}");
    }
    if !report.passed() {
        return Err(VerificationFailed(report.failures.len()).into());
    }
    Ok(())
}

fn cmd_solve_graph(
    file: &Path,
    packet_consistent: bool,
    max_vertices: usize,
    max_lp_vertices: usize,
    output: &OutputArgs,
) -> Result<()> {
    let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let graph = Digraph::parse_edge_list(&text)?;
    let limits = SolverLimits {
        exact_items: max_vertices,
        lp_vertices: max_lp_vertices,
    };
    let exact = exact_local_chromatic(&graph, packet_consistent, &limits)?;
    let fractional: Option<Rational> = match fractional_local_chromatic(&graph, &limits) {
        Ok(r) => Some(r.value),
        Err(Error::TooLarge { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let frac_text = fractional.as_ref().map(rational::format).unwrap_or_default();
    let out = match output.format {
        Some(Format::Json) => {
            let value = serde_json::json!({
                "vertices": graph.order(),
                "chi_l": exact.chi_l,
                "palette": exact.coloring.palette_size(),
                "colors": exact.coloring.colors(),
                "fractional": fractional.as_ref().map(rational::format),
            });
            serde_json::to_string_pretty(&value)? + "\n"
        }
        Some(Format::Csv) => format!("vertices,chi_l,palette,fractional\n{},{},{},{frac_text}\n", graph.order(), exact.chi_l, exact.coloring.palette_size()),
        None => {
            let frac = if fractional.is_some() { frac_text } else { "skipped (too large)".into() };
            format!("chi_l = {}\nfractional = {frac}\n", exact.chi_l)
        }
    };
    emit(output, &out)
}

fn cmd_export_graph(system: &SystemArgs, demand_args: &DemandArgs, solver: &SolverArgs, out: Option<&Path>) -> Result<()> {
    let params = system.params()?;
    let demands = match load_demands(demand_args, &params)? {
        Some(f) => f,
        None => worst_case_exact(&params, &solver.options(demand_args.seed))?.demands,
    };
    let placement = place_caches(&params)?;
    let graph = build_conflict_graph(&placement, &demands)?;
    let mut text = format!("# demands {}\n", serde_json::to_string(demands.rows())?);
    text.push_str(&graph.to_edge_list());
    let output = OutputArgs {
        format: None,
        out: out.map(Path::to_path_buf),
    };
    emit(&output, &text)
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| anyhow!(Error::Parse(format!("{THREADS_ENV}={value:?} is not a positive integer"))))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| anyhow!("thread pool: {e}"))
}

fn run(cli: Cli) -> Result<()> {
    configure_threads()?;
    match &cli.command {
        Command::Bounds {
            system,
            demands,
            solver,
            output,
        } => cmd_bounds(system, demands, solver, output),
        Command::Curve {
            system,
            vary,
            values,
            solver,
            output,
        } => cmd_curve(system, *vary, values.as_deref(), solver, output),
        Command::Verify {
            system,
            demands,
            samples,
            trials,
            q,
            solver,
            output,
        } => cmd_verify(system, demands, *samples, *trials, *q, solver, output),
        Command::SolveGraph {
            file,
            packet_consistent,
            max_vertices,
            max_lp_vertices,
            output,
        } => {
            if !file.exists() {
                bail!(Error::Parse(format!("no such graph file: {}", file.display())));
            }
            cmd_solve_graph(file, *packet_consistent, *max_vertices, *max_lp_vertices, output)
        }
        Command::ExportGraph {
            system,
            demands,
            solver,
            out,
        } => cmd_export_graph(system, demands, solver, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

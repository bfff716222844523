//! Batch-analysis command line for the chained-Zeno interferometer engine.
//!
//! Verbs: `simulate` (detector statistics), `trace` / `weakvalues` (presence
//! traces), `monitor` (Monte Carlo projective monitoring), `eve`
//! (eavesdropper pointer analysis), `sweep` (parameter grids). Outputs are
//! byte-deterministic given identical invocations and seeds. Exit codes:
//! 0 success, 1 engine error (single-line JSON on stderr), 2 usage error.

mod config;
mod emit;

use std::collections::BTreeSet;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use config::FileConfig;
use zeno_core::monitor::MonitorPlacement;
use zeno_core::schedule::SliceLocator;
use zeno_core::{
    backward_evolve, build_schedule, eve_analysis, forward_evolve, monitored_batch, LogicBit,
    PointerModel, ProtocolParams, Schedule, SinkId, ZenoError,
};

const DEFAULT_SWEEP_CAP: u64 = 1_000_000;
const JOBS_ENV: &str = "ZENO_TSVF_JOBS";

#[derive(Parser)]
#[command(
    name = "zeno-tsvf",
    version,
    about = "Chained-Zeno interferometer analysis: detector statistics, two-state traces, \
             weak measurements, channel monitoring, eavesdropper metrics, sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detector and absorption probabilities for one run
    Simulate(SimulateArgs),
    /// Presence trace: forward and backward amplitudes, weak values, channel ABL (CSV)
    Trace(TraceArgs),
    /// Weak-value columns of the presence trace (CSV)
    Weakvalues(TraceArgs),
    /// Monte Carlo projective monitoring of the channel (JSON summary)
    Monitor(MonitorArgs),
    /// Pointer-based bit discrimination: mutual information and TV distance
    Eve(EveArgs),
    /// Parameter sweep in long-format CSV
    Sweep(SweepArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Outer interferometer cycles
    #[arg(long = "M", value_parser = clap::value_parser!(u32).range(1..))]
    m: Option<u32>,
    /// Inner chain steps per outer cycle
    #[arg(long = "N", value_parser = clap::value_parser!(u32).range(1..))]
    n: Option<u32>,
    /// Logical bit: 0 leaves the channel open, 1 blocks it
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
    bit: Option<u8>,
    /// JSON config file mirroring the flags; explicit flags win
    #[arg(long)]
    config: Option<String>,
    /// Output path, or '-' for stdout
    #[arg(long)]
    output: Option<String>,
    /// Output format where a verb supports more than one
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct TraceArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Post-selected outcome: D1, D2, D3:<m> or BOB:<m>:<n>
    #[arg(long)]
    post: Option<String>,
}

#[derive(Args)]
struct MonitorArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Batch seed (trajectory i draws from stream i)
    #[arg(long)]
    seed: Option<u64>,
    /// Number of trajectories
    #[arg(long = "n-runs", value_parser = clap::value_parser!(u64).range(1..))]
    n_runs: Option<u64>,
    /// Monitored slices: 'all' or a comma list of m:n pairs
    #[arg(long)]
    monitor: Option<String>,
    /// Monitor position relative to the blockade: before-absorb | after-absorb
    #[arg(long)]
    placement: Option<String>,
}

#[derive(Args)]
struct EveArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Coupling point m:n (slice after that inner beam splitter)
    #[arg(long = "couple-at")]
    couple_at: Option<String>,
    /// Pointer displacement per unit channel occupation
    #[arg(long)]
    g: Option<f64>,
    /// Pointer Gaussian width
    #[arg(long)]
    sigma: Option<f64>,
    /// Prior probability of bit 1
    #[arg(long)]
    prior: Option<f64>,
    /// Optional CSV output of the two densities (x, p0, p1)
    #[arg(long = "density-output")]
    density_output: Option<String>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// M values: comma list and/or a..b inclusive ranges
    #[arg(long = "m-list")]
    m_list: Option<String>,
    /// N values: comma list and/or a..b inclusive ranges
    #[arg(long = "n-list")]
    n_list: Option<String>,
    /// Coupling values for eavesdropper sweeps
    #[arg(long = "g-list")]
    g_list: Option<String>,
    /// Sweep eavesdropper metrics instead of detector statistics
    #[arg(long)]
    eve: bool,
    #[arg(long = "couple-at")]
    couple_at: Option<String>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    prior: Option<f64>,
    /// Maximum number of grid points
    #[arg(long = "max-points")]
    max_points: Option<u64>,
    /// Worker threads (default: ZENO_TSVF_JOBS, then all cores)
    #[arg(long)]
    jobs: Option<usize>,
}

enum CliError {
    Usage(String),
    Engine(ZenoError),
    Io(std::io::Error),
}

impl From<ZenoError> for CliError {
    fn from(e: ZenoError) -> Self {
        CliError::Engine(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn main() {
    let cli = Cli::parse();
    let status = match dispatch(cli) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(CliError::Engine(e)) => {
            eprintln!("{}", emit::error_json(e.code(), &e.to_string()));
            1
        }
        Err(CliError::Io(e)) => {
            eprintln!("{}", emit::error_json("io_error", &e.to_string()));
            1
        }
    };
    std::process::exit(status);
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(args) => run_simulate(args),
        Command::Trace(args) => run_trace(args, TraceFlavor::Full),
        Command::Weakvalues(args) => run_trace(args, TraceFlavor::WeakValues),
        Command::Monitor(args) => run_monitor(args),
        Command::Eve(args) => run_eve(args),
        Command::Sweep(args) => run_sweep(args),
    }
}

/// Effective per-run settings after merging flags over the config file.
struct Effective {
    cfg: FileConfig,
    output: String,
    format: Option<String>,
}

fn merge_common(common: &CommonArgs) -> Result<Effective, CliError> {
    let cfg = FileConfig::load(common.config.as_deref()).map_err(CliError::Usage)?;
    let output = common
        .output
        .clone()
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| "-".to_string());
    let format = common.format.clone().or_else(|| cfg.format.clone());
    Ok(Effective { cfg, output, format })
}

fn require_params(common: &CommonArgs, cfg: &FileConfig) -> Result<ProtocolParams, CliError> {
    let m = common.m.or(cfg.m).ok_or_else(|| CliError::Usage("--M is required".into()))?;
    let n = common.n.or(cfg.n).ok_or_else(|| CliError::Usage("--N is required".into()))?;
    if m < 1 || n < 1 {
        return Err(CliError::Usage(format!("M and N must be >= 1, got M={m}, N={n}")));
    }
    let bit_raw = common.bit.or(cfg.bit).unwrap_or(0);
    let bit = LogicBit::from_u8(bit_raw)
        .map_err(|_| CliError::Usage(format!("bit must be 0 or 1, got {bit_raw}")))?;
    Ok(ProtocolParams::new(m, n, bit))
}

fn parse_post(text: &str) -> Result<SinkId, CliError> {
    let lower = text.to_ascii_lowercase();
    let parts: Vec<&str> = lower.split(':').collect();
    let parse_idx = |s: &str| {
        s.parse::<u32>()
            .map_err(|_| CliError::Usage(format!("bad index '{s}' in post-selection '{text}'")))
    };
    match parts.as_slice() {
        ["d1"] => Ok(SinkId::D1),
        ["d2"] => Ok(SinkId::D2),
        ["d3", m] => Ok(SinkId::D3 { cycle: parse_idx(m)? }),
        ["bob", m, n] => Ok(SinkId::BobAbsorb { cycle: parse_idx(m)?, step: parse_idx(n)? }),
        _ => Err(CliError::Usage(format!(
            "post-selection must be D1, D2, D3:<m> or BOB:<m>:<n>, got '{text}'"
        ))),
    }
}

fn parse_inner_point(text: &str) -> Result<(u32, u32), CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    if let [m, n] = parts.as_slice() {
        if let (Ok(m), Ok(n)) = (m.parse::<u32>(), n.parse::<u32>()) {
            return Ok((m, n));
        }
    }
    Err(CliError::Usage(format!("expected m:n, got '{text}'")))
}

fn parse_u32_list(text: &str) -> Result<Vec<u32>, CliError> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((lo, hi)) = part.split_once("..") {
            let lo: u32 = lo
                .parse()
                .map_err(|_| CliError::Usage(format!("bad range start '{lo}'")))?;
            let hi: u32 = hi
                .parse()
                .map_err(|_| CliError::Usage(format!("bad range end '{hi}'")))?;
            if lo > hi {
                return Err(CliError::Usage(format!("empty range '{part}'")));
            }
            out.extend(lo..=hi);
        } else {
            out.push(
                part.parse()
                    .map_err(|_| CliError::Usage(format!("bad integer '{part}'")))?,
            );
        }
    }
    if out.is_empty() {
        return Err(CliError::Usage(format!("empty list '{text}'")));
    }
    Ok(out)
}

fn parse_f64_list(text: &str) -> Result<Vec<f64>, CliError> {
    let out: Vec<f64> = text
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<f64>().map_err(|_| CliError::Usage(format!("bad number '{p}'"))))
        .collect::<Result<_, _>>()?;
    if out.is_empty() {
        return Err(CliError::Usage(format!("empty list '{text}'")));
    }
    Ok(out)
}

fn parse_format(
    format: Option<&str>,
    allowed: &[&str],
    default: &str,
) -> Result<String, CliError> {
    let chosen = format.unwrap_or(default).to_ascii_lowercase();
    if allowed.contains(&chosen.as_str()) {
        Ok(chosen)
    } else {
        Err(CliError::Usage(format!(
            "format '{chosen}' not supported here (allowed: {})",
            allowed.join(", ")
        )))
    }
}

fn run_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let eff = merge_common(&args.common)?;
    let params = require_params(&args.common, &eff.cfg)?;
    let format = parse_format(eff.format.as_deref(), &["json", "csv"], "json")?;
    let schedule = build_schedule(&params)?;
    let report = forward_evolve(&schedule).report;
    let bytes = match format.as_str() {
        "json" => emit::json_pretty(&report),
        _ => emit::report_csv(&report),
    };
    emit::write_output(&eff.output, &bytes)?;
    Ok(())
}

enum TraceFlavor {
    Full,
    WeakValues,
}

fn run_trace(args: TraceArgs, flavor: TraceFlavor) -> Result<(), CliError> {
    let eff = merge_common(&args.common)?;
    let params = require_params(&args.common, &eff.cfg)?;
    parse_format(eff.format.as_deref(), &["csv"], "csv")?;
    let post_text = args
        .post
        .or_else(|| eff.cfg.post.clone())
        .unwrap_or_else(|| "d1".to_string());
    let post = parse_post(&post_text)?;

    let schedule = build_schedule(&params)?;
    let run = forward_evolve(&schedule);
    let trace = backward_evolve(&schedule, &run, post)?;
    let rows = trace.export_rows();
    let bytes = match flavor {
        TraceFlavor::Full => emit::trace_csv(&rows),
        TraceFlavor::WeakValues => emit::weakvalues_csv(&rows),
    };
    emit::write_output(&eff.output, &bytes)?;
    Ok(())
}

/// Resolve a monitor request ('all' or m:n pairs) against a schedule,
/// warning about rejected points on stderr.
fn resolve_monitor_set(
    schedule: &Schedule,
    request: &str,
) -> Result<BTreeSet<SliceLocator>, CliError> {
    if request.eq_ignore_ascii_case("all") {
        return Ok(schedule.inner_slices().into_iter().collect());
    }
    let mut accepted = BTreeSet::new();
    let mut rejected = Vec::new();
    for part in request.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (m, n) = parse_inner_point(part)?;
        match schedule.slice_after_inner_bs(m, n) {
            Some(loc) => {
                accepted.insert(loc);
            }
            None => rejected.push(part.to_string()),
        }
    }
    if !rejected.is_empty() {
        eprintln!(
            "warning: monitor points outside the schedule were dropped: {}",
            rejected.join(", ")
        );
    }
    if accepted.is_empty() {
        eprintln!("warning: no valid monitor slices remain; running unmonitored");
    }
    Ok(accepted)
}

#[derive(Serialize)]
struct MonitorReportDoc<'a> {
    params: ProtocolParams,
    #[serde(flatten)]
    summary: &'a zeno_core::MonitorSummary,
}

fn run_monitor(args: MonitorArgs) -> Result<(), CliError> {
    let eff = merge_common(&args.common)?;
    let params = require_params(&args.common, &eff.cfg)?;
    parse_format(eff.format.as_deref(), &["json"], "json")?;
    let seed = args
        .seed
        .or(eff.cfg.seed)
        .ok_or_else(|| CliError::Usage("monitor requires --seed".into()))?;
    let n_runs = args
        .n_runs
        .or(eff.cfg.n_runs)
        .ok_or_else(|| CliError::Usage("monitor requires --n-runs".into()))?;
    if n_runs < 1 {
        return Err(CliError::Usage("--n-runs must be >= 1".into()));
    }
    let placement_text = args
        .placement
        .or_else(|| eff.cfg.placement.clone())
        .unwrap_or_else(|| "before-absorb".to_string());
    let placement = match placement_text.as_str() {
        "before-absorb" => MonitorPlacement::BeforeAbsorb,
        "after-absorb" => MonitorPlacement::AfterAbsorb,
        other => {
            return Err(CliError::Usage(format!(
                "placement must be before-absorb or after-absorb, got '{other}'"
            )))
        }
    };
    let monitor_text = args
        .monitor
        .or_else(|| eff.cfg.monitor.clone())
        .unwrap_or_else(|| "all".to_string());

    let schedule = build_schedule(&params)?;
    let monitor = resolve_monitor_set(&schedule, &monitor_text)?;
    let summary = monitored_batch(&schedule, &monitor, placement, seed, n_runs);
    let doc = MonitorReportDoc { params, summary: &summary };
    emit::write_output(&eff.output, &emit::json_pretty(&doc))?;
    Ok(())
}

#[derive(Serialize)]
struct EveMetricsDoc {
    #[serde(rename = "M")]
    m: u32,
    #[serde(rename = "N")]
    n: u32,
    couple_at: String,
    g: f64,
    sigma: f64,
    prior: f64,
    mutual_information_bits: f64,
    tv_distance: f64,
}

fn run_eve(args: EveArgs) -> Result<(), CliError> {
    let eff = merge_common(&args.common)?;
    if args.common.bit.or(eff.cfg.bit).is_some() {
        return Err(CliError::Usage(
            "eve compares both bit values; --bit has no meaning here".into(),
        ));
    }
    let m = args.common.m.or(eff.cfg.m).ok_or_else(|| CliError::Usage("--M is required".into()))?;
    let n = args.common.n.or(eff.cfg.n).ok_or_else(|| CliError::Usage("--N is required".into()))?;
    parse_format(eff.format.as_deref(), &["json"], "json")?;
    let couple_text = args
        .couple_at
        .or_else(|| eff.cfg.couple_at.clone())
        .ok_or_else(|| CliError::Usage("eve requires --couple-at m:n".into()))?;
    let couple_at = parse_inner_point(&couple_text)?;
    let g = args
        .g
        .or(eff.cfg.g)
        .ok_or_else(|| CliError::Usage("eve requires --g".into()))?;
    let sigma = args
        .sigma
        .or(eff.cfg.sigma)
        .ok_or_else(|| CliError::Usage("eve requires --sigma".into()))?;
    let prior = args.prior.or(eff.cfg.prior).unwrap_or(0.5);
    let density_output = args.density_output.or_else(|| eff.cfg.density_output.clone());

    let unblocked = build_schedule(&ProtocolParams::new(m, n, LogicBit::Zero))?;
    let blocked = build_schedule(&ProtocolParams::new(m, n, LogicBit::One))?;
    let model = PointerModel::new(g, sigma)?;
    let analysis = eve_analysis(&unblocked, &blocked, couple_at, &model, prior)?;

    let doc = EveMetricsDoc {
        m,
        n,
        couple_at: format!("{}:{}", couple_at.0, couple_at.1),
        g,
        sigma,
        prior,
        mutual_information_bits: analysis.metrics.mutual_information_bits,
        tv_distance: analysis.metrics.tv_distance,
    };
    emit::write_output(&eff.output, &emit::json_pretty(&doc))?;
    if let Some(path) = density_output {
        emit::write_output(&path, &emit::density_csv(&analysis.xs, &analysis.p0, &analysis.p1))?;
    }
    Ok(())
}

fn run_sweep(args: SweepArgs) -> Result<(), CliError> {
    let eff = merge_common(&args.common)?;
    parse_format(eff.format.as_deref(), &["csv"], "csv")?;
    let m_text = args
        .m_list
        .or_else(|| eff.cfg.m_list.clone())
        .ok_or_else(|| CliError::Usage("sweep requires --m-list".into()))?;
    let n_text = args
        .n_list
        .or_else(|| eff.cfg.n_list.clone())
        .ok_or_else(|| CliError::Usage("sweep requires --n-list".into()))?;
    let ms = parse_u32_list(&m_text)?;
    let ns = parse_u32_list(&n_text)?;
    if ms.iter().chain(ns.iter()).any(|&v| v < 1) {
        return Err(CliError::Usage("sweep lists must contain values >= 1".into()));
    }
    let eve_mode = args.eve || eff.cfg.eve.unwrap_or(false);
    let max_points = args.max_points.or(eff.cfg.max_points).unwrap_or(DEFAULT_SWEEP_CAP);
    let jobs = args.jobs.or(eff.cfg.jobs).or_else(|| {
        std::env::var(JOBS_ENV).ok().and_then(|v| v.parse::<usize>().ok())
    });

    let bytes = if eve_mode {
        if args.common.bit.or(eff.cfg.bit).is_some() {
            return Err(CliError::Usage(
                "eve sweeps compare both bit values; --bit has no meaning here".into(),
            ));
        }
        let g_text = args
            .g_list
            .or_else(|| eff.cfg.g_list.clone())
            .ok_or_else(|| CliError::Usage("eve sweeps require --g-list".into()))?;
        let gs = parse_f64_list(&g_text)?;
        let sigma = args
            .sigma
            .or(eff.cfg.sigma)
            .ok_or_else(|| CliError::Usage("eve sweeps require --sigma".into()))?;
        let couple_text = args
            .couple_at
            .or_else(|| eff.cfg.couple_at.clone())
            .ok_or_else(|| CliError::Usage("eve sweeps require --couple-at m:n".into()))?;
        let couple_at = parse_inner_point(&couple_text)?;
        let prior = args.prior.or(eff.cfg.prior).unwrap_or(0.5);
        check_cap(ms.len() as u64 * ns.len() as u64 * gs.len() as u64, max_points)?;
        let rows = with_pool(jobs, || zeno_core::eve_sweep(&ms, &ns, &gs, sigma, couple_at, prior))??;
        emit::eve_sweep_csv(&rows)
    } else {
        let bit = LogicBit::from_u8(args.common.bit.or(eff.cfg.bit).unwrap_or(0))
            .map_err(|e| CliError::Usage(e.to_string()))?;
        check_cap(ms.len() as u64 * ns.len() as u64, max_points)?;
        let rows = with_pool(jobs, || zeno_core::detector_sweep(&ms, &ns, bit))??;
        emit::detector_sweep_csv(&rows)
    };
    emit::write_output(&eff.output, &bytes)?;
    Ok(())
}

fn check_cap(points: u64, cap: u64) -> Result<(), CliError> {
    if points > cap {
        return Err(CliError::Usage(format!(
            "sweep has {points} points, above the cap of {cap} (raise --max-points if intended)"
        )));
    }
    Ok(())
}

/// Run a sweep on a bounded rayon pool when a job count is given; the default
/// global pool otherwise. Row order is position-based either way.
fn with_pool<T: Send>(
    jobs: Option<usize>,
    work: impl FnOnce() -> T + Send,
) -> Result<T, CliError> {
    match jobs {
        Some(j) if j >= 1 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(j)
                .build()
                .map_err(|e| CliError::Usage(format!("cannot build a {j}-thread pool: {e}")))?;
            Ok(pool.install(work))
        }
        Some(_) => Err(CliError::Usage("--jobs must be >= 1".into())),
        None => Ok(work()),
    }
}

//! Command-line front end: reads a run configuration, drives the walk and
//! classical engines and writes CSV (optionally with an SVG plot).

pub mod config;
pub mod plot;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use hdwalk_core::{
    build_initial_state, capital_game_trajectory, classical_mean_trajectory, linear_grid, monte_carlo_trajectory,
    run_sequence, scan_sequences, smoothed_peaks, sweep_parameter, ChainDistribution, GameSpec, MonteCarloModel,
    WalkError,
};
use thiserror::Error;

use config::{parse_config, ConfigError, Engine, RunConfig};
use plot::{render_svg, Series, Style};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Validation(format!("config: {e}"))
    }
}

impl From<WalkError> for CliError {
    fn from(e: WalkError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "hdwalk",
    version,
    about = "History-dependent quantum walks and Parrondo games"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Quantum walk experiments.
    #[command(subcommand)]
    Walk(WalkCommand),
    /// Classical Markov-chain and capital-game experiments.
    #[command(subcommand)]
    Classical(ClassicalCommand),
    /// Plot one or more CSV files as an SVG.
    Plot(PlotArgs),
}

#[derive(Debug, Subcommand)]
pub enum WalkCommand {
    /// Mean and standard deviation of the position at every step.
    Run(Common),
    /// Final position distribution.
    Dist(Common),
    /// Peaks of the smoothed final distribution.
    Peaks(Common),
    /// Final moments while one history entry of a game is varied.
    Sweep(SweepArgs),
    /// Final mean for every game pattern up to a given length.
    Scan(ScanArgs),
}

#[derive(Debug, Subcommand)]
pub enum ClassicalCommand {
    /// Expected capital (or position) at every step.
    Run(ClassicalArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// CSV output path (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write an SVG plot of the output.
    #[arg(long = "emit-plot")]
    pub emit_plot: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set games.B.rho.RR=0.6`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub prominence: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    /// History entry to vary, e.g. `RR`.
    #[arg(long)]
    pub param: String,
    /// Game whose table is varied (default: first letter of the pattern).
    #[arg(long)]
    pub game: Option<char>,
    #[arg(long)]
    pub from: f64,
    #[arg(long)]
    pub to: f64,
    /// Number of grid points, endpoints included.
    #[arg(long)]
    pub steps: usize,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long = "max-len", default_value_t = 4)]
    pub max_len: usize,
}

#[derive(Debug, Args)]
pub struct ClassicalArgs {
    #[command(flatten)]
    pub common: Common,
    /// Estimate by sampling this many trajectories instead of exact evolution.
    #[arg(long = "monte-carlo")]
    pub monte_carlo: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// CSV files, one series each.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// x column name (default: first column).
    #[arg(long)]
    pub x: Option<String>,
    /// y column name (default: second column).
    #[arg(long)]
    pub y: Option<String>,
    /// Draw points instead of lines.
    #[arg(long)]
    pub scatter: bool,
}

/// Fixed 12-decimal formatting; negative zero prints as zero.
pub fn fmt_num(v: f64) -> String {
    let s = format!("{v:.12}");
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => s,
    }
}

struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    style: Style,
    /// Columns plotted by `--emit-plot`.
    plot_cols: (usize, usize),
}

impl Table {
    fn new(header: &[&'static str], style: Style) -> Self {
        Table {
            header: header.to_vec(),
            rows: Vec::new(),
            style,
            plot_cols: (0, 1),
        }
    }

    fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| CliError::Runtime(e.to_string()))
    }

    fn to_svg(&self, label: &str) -> Result<String, CliError> {
        let (xi, yi) = self.plot_cols;
        let points = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let x = r[xi].parse().unwrap_or(i as f64);
                (x, r[yi].parse().unwrap_or(f64::NAN))
            })
            .collect();
        let series = Series {
            label: label.to_string(),
            points,
        };
        render_svg(&[series], self.style, self.header[xi], self.header[yi])
    }
}

fn load(common: &Common) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(&common.config)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", common.config.display())))?;
    let mut overrides = Vec::new();
    for s in &common.set {
        let (k, v) = s
            .split_once('=')
            .ok_or_else(|| CliError::Validation(format!("--set expects KEY=VALUE, got {s:?}")))?;
        overrides.push((k.trim().to_string(), v.trim().to_string()));
    }
    if let Some(s) = common.seed {
        overrides.push(("seed".into(), s.to_string()));
    }
    if let Some(w) = common.window {
        overrides.push(("window".into(), w.to_string()));
    }
    if let Some(p) = common.prominence {
        overrides.push(("prominence".into(), p.to_string()));
    }
    if let Some(o) = &common.out {
        overrides.push(("out".into(), o.display().to_string()));
    }
    if let Some(p) = &common.emit_plot {
        overrides.push(("plot".into(), p.display().to_string()));
    }
    Ok(parse_config(&text, &overrides)?)
}

fn emit(table: &Table, cfg: &RunConfig, label: &str) -> Result<(), CliError> {
    let csv = table.to_csv()?;
    // render before writing anything so a bad plot leaves no partial output
    let svg = cfg.plot.as_ref().map(|_| table.to_svg(label)).transpose()?;
    match &cfg.out {
        Some(path) => write_file(path, &csv)?,
        None => std::io::stdout().write_all(&csv)?,
    }
    if let (Some(path), Some(svg)) = (&cfg.plot, svg) {
        write_file(path, svg.as_bytes())?;
    }
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

fn walk_run(common: &Common) -> Result<(), CliError> {
    let cfg = load(common)?;
    let init = build_initial_state(cfg.coins()?, &cfg.initial, cfg.horizon)?;
    let traj = run_sequence(&init, &cfg.quantum_games, &cfg.pattern, cfg.steps, &[])?;
    let mut table = Table::new(&["t", "mean", "std"], Style::Line);
    for (t, (m, s)) in traj.means.iter().zip(&traj.stds).enumerate() {
        table.rows.push(vec![t.to_string(), fmt_num(*m), fmt_num(*s)]);
    }
    emit(&table, &cfg, &cfg.pattern.to_string())
}

fn final_distribution(cfg: &RunConfig) -> Result<hdwalk_core::ProbabilityDistribution, CliError> {
    let init = build_initial_state(cfg.coins()?, &cfg.initial, cfg.horizon)?;
    let mut traj = run_sequence(&init, &cfg.quantum_games, &cfg.pattern, cfg.steps, &[cfg.steps])?;
    Ok(traj.snapshots.remove(&cfg.steps).expect("snapshot requested"))
}

fn walk_dist(common: &Common) -> Result<(), CliError> {
    let cfg = load(common)?;
    let dist = final_distribution(&cfg)?;
    let mut table = Table::new(&["x", "p"], Style::Scatter);
    for (x, p) in dist.iter() {
        table.rows.push(vec![x.to_string(), fmt_num(p)]);
    }
    emit(&table, &cfg, &format!("t = {}", cfg.steps))
}

fn walk_peaks(common: &Common) -> Result<(), CliError> {
    let cfg = load(common)?;
    let dist = final_distribution(&cfg)?;
    let report = smoothed_peaks(&dist, cfg.window, cfg.prominence)?;
    let mut table = Table::new(&["x", "height"], Style::Scatter);
    for p in &report.peaks {
        table.rows.push(vec![p.position.to_string(), fmt_num(p.height)]);
    }
    emit(&table, &cfg, "peaks")
}

fn walk_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let cfg = load(&args.common)?;
    let coins = cfg.coins()?;
    let name = args.game.unwrap_or(cfg.pattern.letters()[0]);
    let table = cfg
        .quantum_games
        .get(name)
        .ok_or_else(|| CliError::Validation(format!("game {name:?} has no rho table")))?;
    let history = table
        .parse_history(&args.param)
        .map_err(|e| CliError::Validation(format!("--param: {e}")))?;
    if args.steps == 0 {
        return Err(CliError::Validation("--steps must be at least 1".into()));
    }
    let grid = linear_grid(args.from, args.to, args.steps);
    let base = GameSpec::new(name, table.clone());
    let rows = sweep_parameter(&base, &history, &grid, coins, cfg.steps, &cfg.initial)?;
    let mut out = Table::new(&["rho", "mean", "std"], Style::Line);
    for r in rows {
        out.rows
            .push(vec![fmt_num(r.rho), fmt_num(r.moments.mean), fmt_num(r.moments.std)]);
    }
    emit(&out, &cfg, &format!("rho_{}", args.param))
}

fn walk_scan(args: &ScanArgs) -> Result<(), CliError> {
    let cfg = load(&args.common)?;
    let rows = scan_sequences(&cfg.quantum_games, args.max_len, cfg.coins()?, cfg.steps, &cfg.initial)?;
    let mut out = Table::new(&["pattern", "mean", "positive"], Style::Scatter);
    for r in rows {
        let positive = if r.is_positive() { "1" } else { "0" };
        out.rows
            .push(vec![r.pattern.to_string(), fmt_num(r.mean), positive.to_string()]);
    }
    emit(&out, &cfg, "patterns")
}

fn classical_run(args: &ClassicalArgs) -> Result<(), CliError> {
    let cfg = load(&args.common)?;
    let walk_table;
    let uniform;
    let model = match cfg.engine {
        Engine::Capital => MonteCarloModel::Capital {
            games: &cfg.capital_games,
            pattern: &cfg.pattern,
        },
        Engine::HistoryWalk => {
            let letters = cfg.pattern.letters();
            if letters.iter().any(|&c| c != letters[0]) {
                return Err(CliError::Validation(
                    "history_walk engine plays a single game; pattern must use one letter".into(),
                ));
            }
            walk_table = cfg
                .quantum_games
                .get(letters[0])
                .ok_or_else(|| CliError::Validation(format!("game {:?} has no rho table", letters[0])))?;
            uniform = ChainDistribution::uniform(1 << walk_table.coin_count());
            MonteCarloModel::HistoryWalk {
                table: walk_table,
                initial: &uniform,
            }
        }
    };

    let table = match args.monte_carlo {
        Some(n) => {
            let est = monte_carlo_trajectory(model, cfg.steps, n, cfg.seed)?;
            let mut table = Table::new(&["t", "mean", "stderr"], Style::Line);
            for (t, e) in est.iter().enumerate() {
                table
                    .rows
                    .push(vec![t.to_string(), fmt_num(e.mean), fmt_num(e.std_error)]);
            }
            table
        }
        None => {
            let means = match model {
                MonteCarloModel::Capital { games, pattern } => capital_game_trajectory(games, pattern, cfg.steps)?,
                MonteCarloModel::HistoryWalk { table, initial } => {
                    classical_mean_trajectory(table, cfg.steps, initial)?
                }
            };
            let mut table = Table::new(&["t", "mean"], Style::Line);
            for (t, m) in means.iter().enumerate() {
                table.rows.push(vec![t.to_string(), fmt_num(*m)]);
            }
            table
        }
    };
    emit(&table, &cfg, &cfg.pattern.to_string())
}

fn plot(args: &PlotArgs) -> Result<(), CliError> {
    let series = args
        .inputs
        .iter()
        .map(|p| plot::read_series(p, args.x.as_deref(), args.y.as_deref()))
        .collect::<Result<Vec<_>, _>>()?;
    let style = if args.scatter { Style::Scatter } else { Style::Line };
    let x_label = args.x.clone().unwrap_or_else(|| "x".into());
    let y_label = args.y.clone().unwrap_or_else(|| "y".into());
    let svg = render_svg(&series, style, &x_label, &y_label)?;
    write_file(&args.out, svg.as_bytes())
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Walk(WalkCommand::Run(c)) => walk_run(&c),
        Command::Walk(WalkCommand::Dist(c)) => walk_dist(&c),
        Command::Walk(WalkCommand::Peaks(c)) => walk_peaks(&c),
        Command::Walk(WalkCommand::Sweep(a)) => walk_sweep(&a),
        Command::Walk(WalkCommand::Scan(a)) => walk_scan(&a),
        Command::Classical(ClassicalCommand::Run(a)) => classical_run(&a),
        Command::Plot(a) => plot(&a),
    }
}

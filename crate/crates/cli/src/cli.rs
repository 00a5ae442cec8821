//! Argument parsing and dispatch.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage or configuration error,
//! 3 domain error (the engine rejected the inputs), 4 internal invariant
//! violation.

use std::fmt::Display;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cpamm_core::analytics::{
    hold_value_relative, impermanent_loss, relative_evolution_collected, relative_evolution_compounded, GrowthParams,
    PriceScenario,
};
use cpamm_core::compounding::{integrate_lc, lc_implicit_solve, RoiParams, DEFAULT_STEP};
use cpamm_core::scenario::run_scenario;
use cpamm_core::{Direction, FeeModel, PoolState, ProviderId, Rational, Scalar, Spread};
use num_bigint::BigInt;

use crate::figures::{emit_figure, FigureError, FigureId, FigureParams, FigureSpec, Grid};
use crate::scenario_file::{write_snapshots, ScenarioFile, ScenarioFileError};

/// Largest relative gap tolerated between the RK4 trajectory and the
/// implicit solution before `roi` reports an invariant violation.
pub const ROI_CROSS_CHECK_RTOL: f64 = 1e-8;
/// Relative drift of `x * y` tolerated by `swap` when no fee is compounded.
pub const PRODUCT_RTOL: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(
    name = "cpamm",
    version,
    about = "Constant-product AMM engine and liquidity-provider analytics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Price a swap without executing it.
    Quote(SwapArgs),
    /// Execute a swap and report the post-trade pool.
    Swap(SwapArgs),
    /// Liquidity, rate and value of a pool.
    PoolInfo(PoolInfoArgs),
    /// Impermanent loss after a price move.
    Il(IlArgs),
    /// Relative portfolio value under both fee models.
    Evolve(EvolveArgs),
    /// Return on liquidity of compounding and non-compounding providers.
    Roi(RoiArgs),
    /// Replay a TOML scenario and print its snapshots.
    RunScenario(RunScenarioArgs),
    /// Emit the data behind one of the figures.
    EmitFigure(EmitFigureArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirArg {
    /// Send Y, receive X.
    Y2x,
    /// Send X, receive Y.
    X2y,
}

impl From<DirArg> for Direction {
    fn from(d: DirArg) -> Self {
        match d {
            DirArg::Y2x => Direction::YforX,
            DirArg::X2y => Direction::XforY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FeeModelArg {
    AutoCompound,
    CollectSeparately,
}

impl From<FeeModelArg> for FeeModel {
    fn from(m: FeeModelArg) -> Self {
        match m {
            FeeModelArg::AutoCompound => FeeModel::AutoCompound,
            FeeModelArg::CollectSeparately => FeeModel::CollectSeparately,
        }
    }
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SwapArgs {
    /// Reserve of X. Decimal, or `n/d` with --exact.
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub y: String,
    #[arg(long, value_enum)]
    pub dir: DirArg,
    #[arg(long)]
    pub amount: String,
    #[arg(long, default_value = "0")]
    pub fee: String,
    #[arg(long, value_enum, default_value = "auto-compound")]
    pub fee_model: FeeModelArg,
    /// Maximum relative rate movement.
    #[arg(long)]
    pub spread: Option<String>,
    /// Exact rational arithmetic.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct PoolInfoArgs {
    #[arg(long)]
    pub x: f64,
    #[arg(long)]
    pub y: f64,
    #[arg(long, default_value_t = 1.0)]
    pub px: f64,
    #[arg(long, default_value_t = 1.0)]
    pub py: f64,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct IlArgs {
    /// Price factor of X.
    #[arg(long)]
    pub dx: f64,
    /// Price factor of Y.
    #[arg(long)]
    pub dy: f64,
    #[arg(long, default_value_t = 1.0)]
    pub px: f64,
    #[arg(long, default_value_t = 1.0)]
    pub py: f64,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct EvolveArgs {
    #[arg(long)]
    pub dx: f64,
    #[arg(long)]
    pub dy: f64,
    /// Yearly liquidity growth from fees.
    #[arg(long)]
    pub alpha: f64,
    /// Years.
    #[arg(long)]
    pub t: f64,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct RoiArgs {
    /// Fraction of liquidity that compounds, in [0, 1].
    #[arg(long)]
    pub frac: f64,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub t: f64,
    #[arg(long, default_value_t = DEFAULT_STEP)]
    pub step: f64,
    /// Print every integration step instead of the final row.
    #[arg(long)]
    pub trajectory: bool,
}

#[derive(Debug, Args)]
pub struct RunScenarioArgs {
    pub file: PathBuf,
    /// Replay in exact rational arithmetic.
    #[arg(long)]
    pub exact: bool,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct EmitFigureArgs {
    /// il_one_coin, portfolio_one_coin, fee_model_comparison, roi_comparison
    /// or corrected_fee_model_comparison.
    pub figure: FigureId,
    #[arg(long)]
    pub min: Option<f64>,
    #[arg(long)]
    pub max: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub frac: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    /// Compounding ROI in percent.
    #[arg(long)]
    pub roi_c: Option<f64>,
    /// Non-compounding ROI in percent.
    #[arg(long)]
    pub roi_nc: Option<f64>,
    /// Take both ROI values from the simulator.
    #[arg(long, conflicts_with_all = ["roi_c", "roi_nc"])]
    pub roi_from_sim: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("{0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Invariant(_) => 4,
        }
    }

    fn domain(e: impl Display) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => CliError::Io(io),
            other => CliError::Io(io::Error::other(format!("{other:?}"))),
        }
    }
}

impl From<ScenarioFileError> for CliError {
    fn from(e: ScenarioFileError) -> Self {
        match e {
            ScenarioFileError::Read { source, .. } => CliError::Io(source),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<FigureError> for CliError {
    fn from(e: FigureError) -> Self {
        match e {
            FigureError::Io(io) => CliError::Io(io),
            FigureError::Csv(csv) => csv.into(),
            FigureError::TooFewSamples | FigureError::BadBounds | FigureError::Domain(_) => {
                CliError::Usage(e.to_string())
            }
            FigureError::Analytics(_) | FigureError::Simulation(_) => CliError::domain(e),
        }
    }
}

/// Parses and runs one invocation. `args` includes the program name.
pub fn run<I, S, O, E>(args: I, out: &mut O, err: &mut E) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
    O: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn dispatch<O: Write>(command: Command, out: &mut O) -> Result<(), CliError> {
    match command {
        Command::Quote(a) if a.exact => swap_cmd::<Rational, _>(&a, false, out),
        Command::Quote(a) => swap_cmd::<f64, _>(&a, false, out),
        Command::Swap(a) if a.exact => swap_cmd::<Rational, _>(&a, true, out),
        Command::Swap(a) => swap_cmd::<f64, _>(&a, true, out),
        Command::PoolInfo(a) => pool_info(&a, out),
        Command::Il(a) => il(&a, out),
        Command::Evolve(a) => evolve(&a, out),
        Command::Roi(a) => roi(&a, out),
        Command::RunScenario(a) => run_scenario_cmd(&a, out),
        Command::EmitFigure(a) => emit_figure_cmd(&a, out),
    }
}

/// Numbers as typed on the command line.
pub trait CliNumber: Scalar + Display {
    fn parse_cli(text: &str) -> Option<Self>;
}

impl CliNumber for f64 {
    fn parse_cli(text: &str) -> Option<Self> {
        text.trim().parse::<f64>().ok().filter(|v| v.is_finite())
    }
}

/// Accepts `n/d` or a decimal such as `-1.25e3`, read exactly.
impl CliNumber for Rational {
    fn parse_cli(text: &str) -> Option<Self> {
        let text = text.trim();
        if text.contains('/') {
            return text.parse().ok();
        }
        let (mantissa, exponent) = match text.find(['e', 'E']) {
            Some(i) => (&text[..i], text[i + 1..].parse::<i32>().ok()?),
            None => (text, 0),
        };
        let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
        let digits = format!("{int}{frac}");
        if digits.is_empty() || digits == "-" || digits == "+" || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let numer: BigInt = digits.parse().ok()?;
        let scale = exponent - i32::try_from(frac.len()).ok()?;
        let ten = BigInt::from(10u8);
        Some(if scale >= 0 {
            Rational::from_integer(numer * ten.pow(scale.unsigned_abs()))
        } else {
            Rational::new(numer, ten.pow(scale.unsigned_abs()))
        })
    }
}

fn parse_num<N: CliNumber>(flag: &str, text: &str) -> Result<N, CliError> {
    N::parse_cli(text).ok_or_else(|| CliError::Usage(format!("--{flag}: `{text}` is not a number")))
}

fn write_row<O: Write>(out: &mut O, header: &[&str], row: &[String]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    w.write_record(row)?;
    w.flush()?;
    Ok(())
}

fn swap_cmd<N, O>(a: &SwapArgs, execute: bool, out: &mut O) -> Result<(), CliError>
where
    N: CliNumber,
    O: Write,
{
    let x: N = parse_num("x", &a.x)?;
    let y: N = parse_num("y", &a.y)?;
    let amount: N = parse_num("amount", &a.amount)?;
    let fee: N = parse_num("fee", &a.fee)?;
    let spread = match &a.spread {
        Some(s) => Spread::Max(parse_num::<N>("spread", s)?),
        None => Spread::Unbounded,
    };
    let model: FeeModel = a.fee_model.into();
    let mut pool = PoolState::create(x, y, fee, model, ProviderId::from("cli")).map_err(CliError::domain)?;
    let product_before = pool.reserve_x().clone() * pool.reserve_y().clone();
    let direction: Direction = a.dir.into();
    let q = if execute {
        pool.execute_swap(direction, &amount, &spread)
    } else {
        pool.quote(direction, &amount, &spread)
    }
    .map_err(CliError::domain)?;

    let mut header = vec![
        "direction",
        "requested_in",
        "capped_in",
        "net_in",
        "amount_out",
        "realized_rate",
        "spread_applied",
        "fee_paid",
    ];
    let dir = match a.dir {
        DirArg::Y2x => "y2x",
        DirArg::X2y => "x2y",
    };
    let mut row = vec![
        dir.to_string(),
        q.requested_in.to_string(),
        q.capped_in.to_string(),
        q.net_in.to_string(),
        q.amount_out.to_string(),
        q.realized_rate.to_string(),
        q.spread_applied.to_string(),
        q.fee_paid.to_string(),
    ];
    if execute {
        let product_after = pool.reserve_x().clone() * pool.reserve_y().clone();
        let fee_compounds = model == FeeModel::AutoCompound && q.fee_paid.is_positive();
        let held = if fee_compounds {
            product_after.approx_eq_rel(&product_before, PRODUCT_RTOL) || product_after > product_before
        } else {
            product_after.approx_eq_rel(&product_before, PRODUCT_RTOL)
        };
        if !held {
            return Err(CliError::Invariant(format!(
                "reserve product moved from {product_before} to {product_after}"
            )));
        }
        header.extend(["reserve_x", "reserve_y", "rate"]);
        row.extend([
            pool.reserve_x().to_string(),
            pool.reserve_y().to_string(),
            pool.rate().to_string(),
        ]);
    }
    write_row(out, &header, &row)
}

fn pool_info<O: Write>(a: &PoolInfoArgs, out: &mut O) -> Result<(), CliError> {
    let pool =
        PoolState::create(a.x, a.y, 0.0, FeeModel::AutoCompound, ProviderId::from("cli")).map_err(CliError::domain)?;
    let value = pool.value(&a.px, &a.py).map_err(CliError::domain)?;
    write_row(
        out,
        &["reserve_x", "reserve_y", "liquidity", "rate", "value"],
        &[a.x, a.y, pool.liquidity(), pool.rate(), value].map(|v| v.to_string()),
    )
}

fn il<O: Write>(a: &IlArgs, out: &mut O) -> Result<(), CliError> {
    let scenario = PriceScenario::new(a.px, a.py, a.dx, a.dy).map_err(CliError::domain)?;
    let r = impermanent_loss(&scenario).map_err(CliError::domain)?;
    write_row(
        out,
        &["delta_x", "delta_y", "v_pooled", "v_held", "lambda"],
        &[a.dx, a.dy, r.v_pooled, r.v_held, r.lambda].map(|v| v.to_string()),
    )
}

fn evolve<O: Write>(a: &EvolveArgs, out: &mut O) -> Result<(), CliError> {
    let s = PriceScenario::from_deltas(a.dx, a.dy).map_err(CliError::domain)?;
    let g = GrowthParams::new(a.alpha, a.t).map_err(CliError::domain)?;
    let hold = hold_value_relative(&s).map_err(CliError::domain)?;
    let compounded = relative_evolution_compounded(&s, &g).map_err(CliError::domain)?;
    let collected = relative_evolution_collected(&s, &g).map_err(CliError::domain)?;
    write_row(
        out,
        &[
            "delta_x",
            "delta_y",
            "alpha",
            "t",
            "not_investing",
            "compounded",
            "collected",
        ],
        &[a.dx, a.dy, a.alpha, a.t, hold, compounded, collected].map(|v| v.to_string()),
    )
}

fn roi<O: Write>(a: &RoiArgs, out: &mut O) -> Result<(), CliError> {
    let params = RoiParams {
        step: a.step,
        ..RoiParams::new(a.frac, a.alpha, a.t).map_err(|e| CliError::Usage(e.to_string()))?
    }
    .validated()
    .map_err(|e| CliError::Usage(e.to_string()))?;
    let trajectory = integrate_lc(&params).map_err(CliError::domain)?;
    let last = trajectory.last();
    if params.l_c0() > 0.0 {
        let implicit = lc_implicit_solve(&params, last.t).map_err(CliError::domain)?;
        let gap = (last.l_c - implicit).abs() / implicit;
        if gap.is_nan() || gap > ROI_CROSS_CHECK_RTOL {
            return Err(CliError::Invariant(format!(
                "RK4 and implicit solutions differ by {gap:e} at t = {}",
                last.t
            )));
        }
    }
    let mut w = csv::Writer::from_writer(out);
    if a.trajectory {
        w.write_record([
            "t",
            "l_c",
            "rho_compounding",
            "rho_not_compounding",
            "fees_not_compounding",
        ])?;
        for s in &trajectory.samples {
            w.write_record([s.t, s.l_c, s.rho_c, s.rho_nc, s.fees_nc].map(|v| v.to_string()))?;
        }
    } else {
        w.write_record(["t", "rho_compounding", "rho_not_compounding"])?;
        w.write_record([last.t, last.rho_c, last.rho_nc].map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

fn output(path: &Option<PathBuf>) -> Result<Option<File>, CliError> {
    Ok(match path {
        Some(p) => Some(File::create(p)?),
        None => None,
    })
}

fn run_scenario_cmd<O: Write>(a: &RunScenarioArgs, out: &mut O) -> Result<(), CliError> {
    let file = ScenarioFile::load(&a.file)?;
    let target = output(&a.out)?;
    macro_rules! replay {
        ($n:ty) => {{
            let script = file.to_script::<$n>()?;
            let snaps = run_scenario(&script).map_err(CliError::domain)?;
            match target {
                Some(f) => write_snapshots(&snaps, f)?,
                None => write_snapshots(&snaps, out)?,
            }
        }};
    }
    if a.exact {
        replay!(Rational)
    } else {
        replay!(f64)
    }
    Ok(())
}

fn emit_figure_cmd<O: Write>(a: &EmitFigureArgs, out: &mut O) -> Result<(), CliError> {
    let defaults = a.figure.default_grid();
    let base = FigureParams::default();
    let mut params = FigureParams {
        alpha: a.alpha.unwrap_or(base.alpha),
        t: a.t.unwrap_or(base.t),
        frac_compounding: a.frac.unwrap_or(base.frac_compounding),
        step: a.step.unwrap_or(base.step),
        compounding_roi_pct: a.roi_c.unwrap_or(base.compounding_roi_pct),
        not_compounding_roi_pct: a.roi_nc.unwrap_or(base.not_compounding_roi_pct),
    };
    if a.roi_from_sim {
        params = params.with_simulated_roi()?;
    }
    let spec = FigureSpec {
        figure: a.figure,
        grid: Grid {
            min: a.min.unwrap_or(defaults.min),
            max: a.max.unwrap_or(defaults.max),
            samples: a.samples.unwrap_or(defaults.samples),
        },
        params,
    };
    let table = emit_figure(&spec)?;
    match output(&a.out)? {
        Some(f) => table.write_csv(f)?,
        None => table.write_csv(out)?,
    }
    Ok(())
}

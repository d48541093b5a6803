//! `ammlab` — quoting, invariant derivation, analytics curves, and
//! simulation from the command line.
//!
//! Exit codes: 0 on success, 1 on domain errors (pool exhausted, invalid
//! config values), 2 on usage errors (bad flags, missing files).

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ammlab_core::analytics::{depth_loss, impermanent_loss, price_impact, Direction};
use ammlab_core::cfmm::{quote_input_for_exact_output, swap};
use ammlab_core::invariant_lab::{derive_curve, implied_price, DEFAULT_STEPS};
use ammlab_core::sim::{
    load_replay_series, run_simulation, volatility_sweep, write_events_jsonl, write_summary_csv,
    SimConfig,
};
use ammlab_core::{Amount, FeeParam, PoolState};

const OUT_DIR_ENV: &str = "AMMLAB_OUT_DIR";

#[derive(Parser)]
#[command(name = "ammlab", version, about = "AMM microstructure laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Quote a swap against a pool config
    Quote(QuoteArgs),
    /// Integrate a pricing rule into its trading curve (CSV: x,y,implied_price)
    DeriveInvariant(DeriveArgs),
    /// Impermanent-loss grid (CSV: xi,pct_loss)
    IlCurve(IlCurveArgs),
    /// Price-impact grid (CSV: f,pct_change)
    ImpactCurve(FractionCurveArgs),
    /// Depth-loss grid (CSV: f,pct_loss)
    DepthCurve(FractionCurveArgs),
    /// Run a simulation config, writing events.jsonl and summary.csv
    Simulate(SimulateArgs),
    /// Volatility sweep (CSV: sigma,mean_abs_il_pct)
    Sweep(SweepArgs),
}

#[derive(Args)]
struct QuoteArgs {
    /// Pool config JSON file
    #[arg(long)]
    pool: PathBuf,
    /// Sell an exact input: <asset>=<amount>
    #[arg(long, conflicts_with = "buy")]
    sell: Option<String>,
    /// Buy an exact output: <asset>=<amount>
    #[arg(long)]
    buy: Option<String>,
    /// Counter asset (required for pools with more than two assets)
    #[arg(long)]
    counter: Option<String>,
    /// Emit the full quote as JSON
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct DeriveArgs {
    /// Pricing rule: "constant:<p>", "ratio" (y/x), or "weighted:<w_x>"
    #[arg(long)]
    rule: String,
    /// Start point <x>,<y>
    #[arg(long)]
    start: String,
    /// Integration endpoint in x
    #[arg(long)]
    x_end: f64,
    #[arg(long, default_value_t = DEFAULT_STEPS)]
    steps: usize,
    /// Output CSV file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct IlCurveArgs {
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 0.1)]
    xi_min: f64,
    #[arg(long, default_value_t = 10.0)]
    xi_max: f64,
    #[arg(long, default_value_t = 100)]
    points: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FractionCurveArgs {
    #[arg(long, value_enum, default_value_t = CurveDirection::Buy)]
    direction: CurveDirection,
    #[arg(long, default_value_t = 0.95)]
    f_max: f64,
    #[arg(long, default_value_t = 95)]
    points: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CurveDirection {
    Buy,
    Sell,
}

impl From<CurveDirection> for Direction {
    fn from(d: CurveDirection) -> Direction {
        match d {
            CurveDirection::Buy => Direction::BuyFromPool,
            CurveDirection::Sell => Direction::SellToPool,
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// Simulation config JSON file
    #[arg(long)]
    config: PathBuf,
    /// Output directory (default: $AMMLAB_OUT_DIR or ".")
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the config seed
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    /// Comma-separated per-step volatilities, sorted ascending
    #[arg(long)]
    sigmas: String,
    #[arg(long, default_value_t = 100)]
    runs: u32,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum CliError {
    Usage(String),
    Domain(String),
}

impl From<ammlab_core::AmmError> for CliError {
    fn from(e: ammlab_core::AmmError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Quote(args) => cmd_quote(args),
        Command::DeriveInvariant(args) => cmd_derive(args),
        Command::IlCurve(args) => cmd_il_curve(args),
        Command::ImpactCurve(args) => cmd_fraction_curve(args, false),
        Command::DepthCurve(args) => cmd_fraction_curve(args, true),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Sweep(args) => cmd_sweep(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn read_to_string(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load_pool(path: &Path) -> Result<PoolState, CliError> {
    let text = read_to_string(path)?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("bad pool config {}: {e}", path.display())))
}

/// Parse "<asset>=<amount>" with a strictly positive amount.
fn parse_asset_amount(spec: &str) -> Result<(String, f64), CliError> {
    let (asset, amount) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("expected <asset>=<amount>, got '{spec}'")))?;
    let amount: f64 = amount
        .parse()
        .map_err(|_| CliError::Usage(format!("bad amount in '{spec}'")))?;
    if !(amount > 0.0) {
        return Err(CliError::Usage(format!(
            "amount must be positive, got {amount}"
        )));
    }
    Ok((asset.to_string(), amount))
}

fn counter_asset(pool: &PoolState, asset: &str, counter: Option<&str>) -> Result<String, CliError> {
    if let Some(c) = counter {
        return Ok(c.to_string());
    }
    let others: Vec<&str> = pool.asset_ids().filter(|a| *a != asset).collect();
    match others.as_slice() {
        [only] => Ok(only.to_string()),
        _ => Err(CliError::Usage(
            "pool has more than two assets; pass --counter".into(),
        )),
    }
}

fn cmd_quote(args: QuoteArgs) -> Result<(), CliError> {
    let pool = load_pool(&args.pool)?;
    let quote = match (&args.sell, &args.buy) {
        (Some(sell), None) => {
            let (asset, amount) = parse_asset_amount(sell)?;
            let output = counter_asset(&pool, &asset, args.counter.as_deref())?;
            swap(&pool, &asset, &output, Amount::new(amount)?)?
        }
        (None, Some(buy)) => {
            let (asset, amount) = parse_asset_amount(buy)?;
            let input = counter_asset(&pool, &asset, args.counter.as_deref())?;
            let needed =
                quote_input_for_exact_output(&pool, &input, &asset, Amount::new(amount)?)?;
            swap(&pool, &input, &asset, needed)?
        }
        _ => {
            return Err(CliError::Usage(
                "pass exactly one of --sell or --buy".into(),
            ))
        }
    };
    if args.json {
        println!("{}", serde_json::to_string_pretty(&quote).unwrap());
    } else {
        println!(
            "input:       {:.9} {}",
            quote.input_amount.value(),
            quote.input_asset
        );
        println!(
            "output:      {:.9} {}",
            quote.output_amount.value(),
            quote.output_asset
        );
        println!(
            "fee:         {:.9} {}",
            quote.fee_paid.value(),
            quote.input_asset
        );
        println!("spot before: {:.9}", quote.spot_before.value());
        println!("spot after:  {:.9}", quote.spot_after.value());
        println!("impact:      {:.9}%", quote.impact_pct());
    }
    Ok(())
}

fn parse_rule(spec: &str) -> Result<Box<dyn Fn(f64, f64) -> f64>, CliError> {
    if spec == "ratio" {
        return Ok(Box::new(|x, y| y / x));
    }
    if let Some(p) = spec.strip_prefix("constant:") {
        let p: f64 = p
            .parse()
            .map_err(|_| CliError::Usage(format!("bad constant price '{spec}'")))?;
        return Ok(Box::new(move |_, _| p));
    }
    if let Some(w) = spec.strip_prefix("weighted:") {
        let w_x: f64 = w
            .parse()
            .map_err(|_| CliError::Usage(format!("bad weight '{spec}'")))?;
        if !(0.0 < w_x && w_x < 1.0) {
            return Err(CliError::Usage("weight must lie in (0, 1)".into()));
        }
        let ratio = w_x / (1.0 - w_x);
        return Ok(Box::new(move |x, y| ratio * y / x));
    }
    Err(CliError::Usage(format!(
        "unknown rule '{spec}'; expected constant:<p>, ratio, or weighted:<w_x>"
    )))
}

fn open_out(out: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(path) => Box::new(std::fs::File::create(path)?),
        None => Box::new(std::io::stdout()),
    })
}

fn cmd_derive(args: DeriveArgs) -> Result<(), CliError> {
    let rule = parse_rule(&args.rule)?;
    let (x0, y0) = args
        .start
        .split_once(',')
        .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
        .ok_or_else(|| CliError::Usage(format!("bad start point '{}'", args.start)))?;
    let sample = derive_curve(&rule, (x0, y0), args.x_end, args.steps)?;
    let mut out = open_out(&args.out)?;
    writeln!(out, "x,y,implied_price")?;
    for &(x, y) in sample.points() {
        let price = implied_price(&sample, x).map(|p| p.value()).unwrap_or(rule(x, y));
        writeln!(out, "{x:.9},{y:.9},{price:.9}")?;
    }
    if sample.domain_exit() {
        eprintln!("note: integration stopped early (y reached the domain boundary)");
    }
    Ok(())
}

fn cmd_il_curve(args: IlCurveArgs) -> Result<(), CliError> {
    if !(args.xi_min > 0.0 && args.xi_max > args.xi_min && args.points >= 2) {
        return Err(CliError::Usage(
            "need 0 < xi-min < xi-max and at least 2 points".into(),
        ));
    }
    let gamma = FeeParam::new(args.gamma)?;
    let mut out = open_out(&args.out)?;
    writeln!(out, "xi,pct_loss")?;
    // Log-spaced grid: xi is a price ratio.
    let (lo, hi) = (args.xi_min.ln(), args.xi_max.ln());
    for i in 0..args.points {
        let xi = (lo + (hi - lo) * i as f64 / (args.points - 1) as f64).exp();
        writeln!(out, "{xi:.9},{:.9}", impermanent_loss(xi, gamma)?)?;
    }
    Ok(())
}

fn cmd_fraction_curve(args: FractionCurveArgs, depth: bool) -> Result<(), CliError> {
    if !(args.f_max > 0.0 && args.points >= 1) {
        return Err(CliError::Usage("need f-max > 0 and at least 1 point".into()));
    }
    let direction: Direction = args.direction.into();
    let mut out = open_out(&args.out)?;
    writeln!(out, "f,{}", if depth { "pct_loss" } else { "pct_change" })?;
    for i in 0..=args.points {
        let f = args.f_max * i as f64 / args.points as f64;
        let pct = if depth {
            depth_loss(f, direction)?
        } else {
            price_impact(f, direction)?
        };
        writeln!(out, "{f:.9},{pct:.9}")?;
    }
    Ok(())
}

fn load_sim_config(path: &Path, seed: Option<u64>) -> Result<SimConfig, CliError> {
    let text = read_to_string(path)?;
    let mut value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))?;
    // A csv_replay process may reference a price file instead of inlining
    // the series; resolve it relative to the config.
    if let Some(process) = value.get_mut("price_process") {
        if process.get("kind").and_then(|k| k.as_str()) == Some("csv_replay") {
            if let Some(series_path) = process.get("path").and_then(|p| p.as_str()) {
                let resolved = path.parent().unwrap_or(Path::new(".")).join(series_path);
                let values = load_replay_series(&resolved)?;
                let obj = process.as_object_mut().unwrap();
                obj.remove("path");
                obj.insert("values".into(), serde_json::json!(values));
            }
        }
    }
    let mut config: SimConfig = serde_json::from_value(value)
        .map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    Ok(config)
}

fn out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let config = load_sim_config(&args.config, args.seed)?;
    let run = run_simulation(&config)?;
    let dir = out_dir(args.out);
    std::fs::create_dir_all(&dir)?;
    let events_path = dir.join("events.jsonl");
    let summary_path = dir.join("summary.csv");
    write_events_jsonl(&run, &events_path)?;
    write_summary_csv(&run, &summary_path)?;
    println!(
        "ran {} ticks: final IL {:.9}%, fees accrued {:.9}",
        config.ticks, run.final_il_pct, run.fees_accrued
    );
    println!("wrote {}", events_path.display());
    println!("wrote {}", summary_path.display());
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    let config = load_sim_config(&args.config, args.seed)?;
    let sigmas: Vec<f64> = args
        .sigmas
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("bad sigma list '{}'", args.sigmas)))?;
    let table = volatility_sweep(&config, &sigmas, args.runs)?;
    let mut out = open_out(&args.out)?;
    writeln!(out, "sigma,mean_abs_il_pct")?;
    for (sigma, il) in table {
        writeln!(out, "{sigma:.9},{il:.9}")?;
    }
    Ok(())
}

//! The `wiretap-cc` command-line front end.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::capacity::{
    less_noisy_capacity, maximize_single_aux, maximize_two_aux, sweep_budget, AuxJoint,
    OptimizerOptions,
};
use crate::channel::{check_less_noisy, ChannelSpec, NoiseOrder, WiretapChannel, LESS_NOISY_DEFAULT_STARTS};
use crate::coding::{simulate, RateTriple, SimulationConfig, DEFAULT_DELTA, DEFAULT_MAX_STATES, DEFAULT_MAX_SYMBOLS};
use crate::error::Error;
use crate::prop1;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "WIRETAP_CC_THREADS";

#[derive(Debug, Parser)]
#[command(name = "wiretap-cc", version, about = "Secrecy capacity of cost-constrained wiretap channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Two-auxiliary secrecy capacity at the channel's budget.
    Capacity(OptimizeArgs),
    /// Single-auxiliary benchmark value at the channel's budget.
    SingleAux(OptimizeArgs),
    /// Capacity formula for channels with a less-noisy ordering.
    LessNoisy {
        #[command(flatten)]
        opt: OptimizeArgs,
        /// Which output is asserted to be less noisy.
        #[arg(long, value_enum, default_value_t = Order::YOverZ)]
        order: Order,
    },
    /// Two-auxiliary capacity over a grid of budgets, as CSV `b,value,converged`.
    Sweep {
        #[command(flatten)]
        opt: OptimizeArgs,
        /// Explicit comma-separated budgets (ascending).
        #[arg(long, value_delimiter = ',', conflicts_with_all = ["b_min", "b_max", "points"])]
        grid: Option<Vec<f64>>,
        /// First budget of an evenly spaced grid.
        #[arg(long)]
        b_min: Option<f64>,
        /// Last budget of an evenly spaced grid.
        #[arg(long)]
        b_max: Option<f64>,
        /// Number of evenly spaced budgets.
        #[arg(long)]
        points: Option<usize>,
    },
    /// Built-in examples.
    Example {
        #[command(subcommand)]
        which: Example,
    },
    /// Samples a superposition code and measures error, cost and leakage.
    Simulate(SimulateArgs),
    /// Randomized search for a violation of a less-noisy ordering.
    LessnoisyCheck {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long, value_enum, default_value_t = Order::YOverZ)]
        order: Order,
        /// Optimizer starts used by the search.
        #[arg(long, default_value_t = LESS_NOISY_DEFAULT_STARTS)]
        samples: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Subcommand)]
pub enum Example {
    /// The four-input channel on which two auxiliaries beat one.
    Prop1 {
        #[command(flatten)]
        opt: OptimizerArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Order {
    YOverZ,
    ZOverY,
}

impl From<Order> for NoiseOrder {
    fn from(o: Order) -> Self {
        match o {
            Order::YOverZ => NoiseOrder::YOverZ,
            Order::ZOverY => NoiseOrder::ZOverY,
        }
    }
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Master seed; drawn from entropy and recorded when omitted.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Treat a missing --seed as an error.
    #[arg(long)]
    pub strict: bool,
    /// Output file (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OptimizerArgs {
    /// Random starts of the multi-start ascent.
    #[arg(long, default_value_t = 64)]
    pub starts: usize,
    #[arg(long, default_value_t = 2000)]
    pub max_iters: usize,
    /// Stop when the projected gradient step is at most this long.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// `|U|` (default `|X|`).
    #[arg(long)]
    pub u_size: Option<usize>,
    /// `|V|` (default `|X|²` with two auxiliaries, `|X|` with one).
    #[arg(long)]
    pub v_size: Option<usize>,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    /// Channel specification (JSON).
    #[arg(long)]
    pub channel: PathBuf,
    #[command(flatten)]
    pub opt: OptimizerArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub channel: PathBuf,
    /// Auxiliary distribution (JSON with `u_size`, `v_size`, `p_uv`, `p_x_given_v`).
    #[arg(long)]
    pub dist: PathBuf,
    /// Blocklength.
    #[arg(long)]
    pub n: usize,
    /// Message rate.
    #[arg(long = "R")]
    pub r: f64,
    /// Inner (confusion) rate.
    #[arg(long = "R1")]
    pub r1: f64,
    /// Outer (binning) rate.
    #[arg(long = "R2")]
    pub r2: f64,
    /// Monte Carlo trials per message.
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Typicality slack of the decoder.
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    pub delta: f64,
    /// Bound on `|Z|^n` for exact leakage.
    #[arg(long, default_value_t = DEFAULT_MAX_STATES)]
    pub max_states: u128,
    /// Bound on stored codebook symbols.
    #[arg(long, default_value_t = DEFAULT_MAX_SYMBOLS)]
    pub max_symbols: u128,
    #[command(flatten)]
    pub common: CommonArgs,
}

/// A failed run: the exit code and a one-line diagnostic.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::GapNotEstablished { .. } => 3,
            Error::BudgetBelowMinCost { .. } => 4,
            Error::SizeOverflow { .. } | Error::StateSpaceTooLarge { .. } => 5,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: 1,
        message: format!("{}: {e}", path.display()),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure {
        code: 2,
        message: format!("cannot read {}: {e}", path.display()),
    })
}

fn load_channel(path: &Path) -> Result<WiretapChannel, Failure> {
    Ok(WiretapChannel::from_json(&read(path)?)?)
}

fn resolve_seed(common: &CommonArgs) -> Result<u64, Failure> {
    match (common.seed, common.strict) {
        (Some(s), _) => Ok(s),
        (None, true) => Err(Failure {
            code: 2,
            message: "--seed is required in --strict mode".into(),
        }),
        (None, false) => {
            let s = rand::random::<u64>();
            eprintln!("seed: {s}");
            Ok(s)
        }
    }
}

fn options(o: &OptimizerArgs, seed: u64) -> Result<OptimizerOptions, Failure> {
    if o.starts == 0 {
        return Err(Error::InvalidArgument("--starts must be at least 1".into()).into());
    }
    if !(o.tol >= 0.0) {
        return Err(Error::InvalidArgument("--tol must be nonnegative".into()).into());
    }
    Ok(OptimizerOptions {
        starts: o.starts,
        max_iters: o.max_iters,
        tol: o.tol,
        seed,
        u_size: o.u_size,
        v_size: o.v_size,
    })
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| io_failure(p, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| io_failure(Path::new("<stdout>"), e))
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable output");
    s.push('\n');
    s
}

/// `%.12g`: 12 significant digits, shortest of fixed or exponent form.
pub fn format_g12(x: f64) -> String {
    const P: i32 = 12;
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-4..P).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa), exp.abs())
    } else {
        trim(&format!("{:.*}", (P - 1 - exp) as usize, x))
    }
}

#[derive(Serialize)]
struct Tagged<'a, T: Serialize> {
    seed: u64,
    options: &'a OptimizerOptions,
    result: T,
}

fn sweep_grid(grid: &Option<Vec<f64>>, b_min: Option<f64>, b_max: Option<f64>, points: Option<usize>) -> Result<Vec<f64>, Failure> {
    let bad = |m: &str| Failure::from(Error::InvalidArgument(m.into()));
    let g = match (grid, b_min, b_max, points) {
        (Some(g), ..) => g.clone(),
        (None, Some(lo), Some(hi), Some(k)) => {
            if k == 0 || hi < lo {
                return Err(bad("need --points >= 1 and --b-max >= --b-min"));
            }
            if k == 1 {
                vec![lo]
            } else {
                (0..k).map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64).collect()
            }
        }
        _ => return Err(bad("give --grid or all of --b-min, --b-max, --points")),
    };
    if g.is_empty() || g.iter().any(|b| !b.is_finite()) {
        return Err(bad("budget grid must be nonempty and finite"));
    }
    Ok(g)
}

/// Runs one parsed command, writing its artifact.
pub fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Capacity(a) => {
            let ch = load_channel(&a.channel)?;
            let seed = resolve_seed(&a.common)?;
            let opts = options(&a.opt, seed)?;
            let r = maximize_two_aux(&ch, &opts)?;
            emit(&a.common.out, &to_json(&Tagged { seed, options: &opts, result: r }))
        }
        Command::SingleAux(a) => {
            let ch = load_channel(&a.channel)?;
            let seed = resolve_seed(&a.common)?;
            let opts = options(&a.opt, seed)?;
            let r = maximize_single_aux(&ch, &opts)?;
            emit(&a.common.out, &to_json(&Tagged { seed, options: &opts, result: r }))
        }
        Command::LessNoisy { opt: a, order } => {
            let ch = load_channel(&a.channel)?;
            let seed = resolve_seed(&a.common)?;
            let opts = options(&a.opt, seed)?;
            let r = less_noisy_capacity(&ch, order.into(), &opts)?;
            emit(&a.common.out, &to_json(&Tagged { seed, options: &opts, result: r }))
        }
        Command::Sweep {
            opt: a,
            grid,
            b_min,
            b_max,
            points,
        } => {
            let ch = load_channel(&a.channel)?;
            let grid = sweep_grid(&grid, b_min, b_max, points)?;
            let seed = resolve_seed(&a.common)?;
            let opts = options(&a.opt, seed)?;
            let pts = sweep_budget(&ch, &grid, &opts)?;
            let mut csv = String::from("b,value,converged\n");
            for p in &pts {
                csv.push_str(&format!(
                    "{},{},{}\n",
                    format_g12(p.budget),
                    format_g12(p.result.value),
                    p.result.converged
                ));
            }
            emit(&a.common.out, &csv)
        }
        Command::Example {
            which: Example::Prop1 { opt, common },
        } => {
            let seed = resolve_seed(&common)?;
            let opts = options(&opt, seed)?;
            #[derive(Serialize)]
            struct Out<'a> {
                seed: u64,
                options: &'a OptimizerOptions,
                channel: ChannelSpec,
                report: prop1::GapReport,
            }
            let report = prop1::verify_gap(&opts)?;
            let out = Out {
                seed,
                options: &opts,
                channel: prop1::build_channel().to_spec(),
                report,
            };
            emit(&common.out, &to_json(&out))
        }
        Command::Simulate(a) => {
            let ch = load_channel(&a.channel)?;
            let dist = AuxJoint::from_json(&read(&a.dist)?)?;
            let seed = resolve_seed(&a.common)?;
            let rates = RateTriple::new(a.r, a.r1, a.r2)?;
            if a.trials == 0 {
                return Err(Error::InvalidArgument("--trials must be at least 1".into()).into());
            }
            let cfg = SimulationConfig {
                delta: a.delta,
                max_symbols: a.max_symbols,
                max_states: a.max_states,
                ..SimulationConfig::new(a.n, rates, a.trials, seed)
            };
            let report = simulate(&ch, &dist, &cfg)?;
            emit(&a.common.out, &to_json(&report))
        }
        Command::LessnoisyCheck {
            channel,
            order,
            samples,
            common,
        } => {
            let ch = load_channel(&channel)?;
            let seed = resolve_seed(&common)?;
            #[derive(Serialize)]
            struct Out {
                seed: u64,
                order: NoiseOrder,
                result: crate::channel::LessNoisyVerdict,
            }
            let result = check_less_noisy(&ch, order.into(), samples, seed)?;
            emit(
                &common.out,
                &to_json(&Out {
                    seed,
                    order: order.into(),
                    result,
                }),
            )
        }
    }
}

/// Applies the [`THREADS_ENV`] cap to the global worker pool.
pub fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| Failure {
        code: 2,
        message: format!("{THREADS_ENV} must be a positive integer, got {v:?}"),
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure {
            code: 1,
            message: format!("cannot configure thread pool: {e}"),
        })
}

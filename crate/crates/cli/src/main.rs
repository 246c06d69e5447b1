use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nerf_cli::curve::{self, SweepMode, SweepSpec};
use nerf_cli::simulate::{simulate, SimulateSpec};
use nerf_cli::verify::{self, Check, VerifyOptions};
use nerf_cli::{enumeration_cap, exit, exit_code, json};
use nerf_core::bounds::{nerf_certificate, NerfQuery};
use nerf_core::erasure::ErasureMode;
use nerf_core::{ConstantConvention, Error, Field};

/// Certificates, sweeps and simulations for numerically erasure-robust frames.
#[derive(Parser)]
#[command(name = "nerf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the certificate for one query as JSON.
    Bounds(BoundsArgs),
    /// Sweep the certificate over the erasure proportion and print CSV.
    Curve(CurveArgs),
    /// Sample frames and check every retained subset against (α, β).
    Simulate(SimulateArgs),
    /// Run the self-checks and print one line per check.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FieldArg {
    Real,
    Complex,
}

impl From<FieldArg> for Field {
    fn from(f: FieldArg) -> Self {
        match f {
            FieldArg::Real => Field::Real,
            FieldArg::Complex => Field::Complex,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    Derivation,
    Theorem,
}

impl From<ConventionArg> for ConstantConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Derivation => ConstantConvention::Derivation,
            ConventionArg::Theorem => ConstantConvention::Theorem,
        }
    }
}

#[derive(Args)]
struct Constants {
    /// Exponent in the failure probability `3 e^{-τ0 n}`.
    #[arg(long, default_value_t = 0.25)]
    tau0: f64,
    #[arg(long, value_enum, default_value = "real")]
    field: FieldArg,
    #[arg(long, value_enum, default_value = "derivation")]
    convention: ConventionArg,
}

#[derive(Args)]
struct Shape {
    /// Frame dimension.
    #[arg(long)]
    n: u64,
    /// Number of frame vectors.
    #[arg(long = "N")]
    n_cols: u64,
    /// Number of retained vectors.
    #[arg(long = "K")]
    k: u64,
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    shape: Shape,
    #[command(flatten)]
    constants: Constants,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepArg {
    /// K = ratio·n, N varies.
    FixedK,
    /// N = ratio·n, K varies.
    FixedN,
}

#[derive(Args)]
struct CurveArgs {
    #[arg(long, value_enum)]
    mode: SweepArg,
    /// K/n in fixed-k mode, N/n in fixed-n mode.
    #[arg(long)]
    ratio: f64,
    #[arg(long, default_value_t = curve::DEFAULT_POINTS)]
    points: usize,
    #[arg(long, default_value_t = curve::DEFAULT_S_MAX)]
    s_max: f64,
    #[command(flatten)]
    constants: Constants,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Sampled,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    shape: Shape,
    #[command(flatten)]
    constants: Constants,
    #[arg(long, value_enum, default_value = "exhaustive")]
    mode: ModeArg,
    #[arg(long, default_value_t = 1)]
    frames: u64,
    /// Subsets drawn per frame in sampled mode.
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Lower singular-value threshold; replaces the certificate's α.
    #[arg(long, requires = "beta")]
    alpha: Option<f64>,
    /// Upper singular-value threshold; replaces the certificate's β.
    #[arg(long, requires = "alpha")]
    beta: Option<f64>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Run only these checks (repeatable); all by default.
    #[arg(long, value_enum)]
    check: Vec<Check>,
    /// Largest N for the binomial check.
    #[arg(long, default_value_t = 30)]
    max_n: u64,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long = "N")]
    n_cols: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, default_value_t = VerifyOptions::default().seed)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE as u8 } else { 0 });
        }
    };
    let code = match cli.command {
        Command::Bounds(a) => bounds(a),
        Command::Curve(a) => curve_cmd(a),
        Command::Simulate(a) => simulate_cmd(a),
        Command::Verify(a) => verify_cmd(a),
    };
    ExitCode::from(code as u8)
}

fn fail(err: &Error) -> i32 {
    eprintln!("error: {err}");
    exit_code(err)
}

fn emit(text: &str) -> i32 {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Ok(()) => exit::OK,
        Err(e) => fail(&e.into()),
    }
}

fn bounds(a: BoundsArgs) -> i32 {
    let q = NerfQuery::new(
        a.shape.n,
        a.shape.n_cols,
        a.shape.k,
        a.constants.tau0,
        a.constants.field.into(),
    )
    .with_convention(a.constants.convention.into());
    let cert = match nerf_certificate(&q) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    eprintln!(
        "alpha = {:.6e}, beta = {:.6}, beta/alpha = {:.6e}, failure probability <= {:.3e}",
        cert.alpha(),
        cert.beta(),
        cert.condition_bound(),
        cert.failure_probability()
    );
    match json::to_string_pretty(&cert) {
        Ok(s) => emit(&(s + "\n")),
        Err(e) => fail(&Error::Format(e.to_string())),
    }
}

fn curve_cmd(a: CurveArgs) -> i32 {
    let spec = SweepSpec {
        mode: match a.mode {
            SweepArg::FixedK => SweepMode::FixedK,
            SweepArg::FixedN => SweepMode::FixedN,
        },
        ratio: a.ratio,
        points: a.points,
        s_max: a.s_max,
        tau0: a.constants.tau0,
        field: a.constants.field.into(),
        convention: a.constants.convention.into(),
    };
    match curve::sweep(&spec) {
        Ok(points) => emit(&curve::to_csv(&points)),
        Err(e) => fail(&e),
    }
}

fn simulate_cmd(a: SimulateArgs) -> i32 {
    let cap = match enumeration_cap() {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return exit::USAGE;
        }
    };
    let spec = SimulateSpec {
        n: a.shape.n,
        n_cols: a.shape.n_cols,
        k: a.shape.k,
        tau0: a.constants.tau0,
        field: a.constants.field.into(),
        convention: a.constants.convention.into(),
        mode: match a.mode {
            ModeArg::Exhaustive => ErasureMode::Exhaustive,
            ModeArg::Sampled => ErasureMode::Sampled,
        },
        frames: a.frames,
        trials: a.trials,
        seed: a.seed,
        window: a.alpha.zip(a.beta),
        cap,
    };
    let out = match simulate(&spec) {
        Ok(o) => o,
        Err(e) => return fail(&e),
    };
    eprintln!(
        "{} of {} frames violate beta/alpha = {:.6e}; worst condition {:.6e}",
        out.aggregate.violating_frames,
        out.aggregate.frames,
        out.condition_bound,
        out.aggregate.worst_condition
    );
    match json::to_string_pretty(&out) {
        Ok(s) => emit(&(s + "\n")),
        Err(e) => fail(&Error::Format(e.to_string())),
    }
}

fn verify_cmd(a: VerifyArgs) -> i32 {
    let opts = VerifyOptions {
        checks: a.check,
        max_n: a.max_n,
        n: a.n,
        n_cols: a.n_cols,
        trials: a.trials,
        seed: a.seed,
    };
    let results = match verify::run(&opts) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return exit::CHECK_FAILED;
        }
    };
    let mut text = String::new();
    for r in &results {
        text.push_str(&r.to_string());
        text.push('\n');
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    text.push_str(&format!(
        "{} of {} checks passed\n",
        results.len() - failed,
        results.len()
    ));
    let code = emit(&text);
    if failed > 0 {
        exit::CHECK_FAILED
    } else {
        code
    }
}

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use boltzmann_core::cli_io::{run, CliError, Command, Format, Grid, RunConfig, View};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Collision map of a Kepler particle reflected at the wall x2 = 1.
///
/// Exit status: 0 on success, 1 when a check fails (selftest, aborted orbit),
/// 2 on usage or numerical errors. Set BOLTZMANN_LOG (e.g. `debug`) for
/// diagnostics on stderr.
#[derive(Parser, Debug)]
#[command(name = "boltzmann", version, about, long_about)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Real-locus class and derived parameters (R, k2, s0, C2, alpha).
    Classify(Opts),
    /// Iterate the collision map.
    ///
    /// CSV columns: step, x, A1, A2, L, D_resid, E_check, theta, eps. D_resid
    /// is D recomputed from the point minus its nominal value, E_check the
    /// defect of 2 E L^2 = |A|^2 - 1; theta and eps are the angle coordinate
    /// and the component index.
    ///
    /// With --format svg, --view physical draws the wall, the centre and one
    /// arc per step; --view level-set draws the real locus in the (A1, L)
    /// plane with the iterates.
    Orbit(Opts),
    /// Analytic and empirical rotation numbers.
    ///
    /// CSV columns: D, E, class, alpha, alpha_empirical, difference. With
    /// --grid one row per cell; degenerate cells have empty fields.
    Rotation(Opts),
    /// Parameters D at fixed E where the orbits have a given period.
    ///
    /// CSV columns: E, p, D_root, period3_residual (relative value of the
    /// period-three polynomial at the root).
    PeriodScan(Opts),
    /// Class map of the (D, E) plane (SVG, or CSV with columns D, E, class).
    Render(Opts),
    /// Run the built-in invariant suite.
    Selftest(Opts),
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
    Svg,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ViewArg {
    Physical,
    LevelSet,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct Opts {
    /// D and E as positional values (alternative to --D/--E).
    #[arg(num_args = 0..=2, value_name = "D E")]
    positional: Vec<f64>,
    /// Second integral D = L^2 - 2 A2.
    #[arg(long = "D")]
    d: Option<f64>,
    /// Energy E.
    #[arg(long = "E")]
    e: Option<f64>,
    /// Number of collision steps.
    #[arg(long)]
    steps: Option<usize>,
    /// Number of sampled start points.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    #[arg(long, value_enum, default_value = "physical")]
    view: ViewArg,
    /// Parameter grid Dmin:Dmax:Emin:Emax:n.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Comma-separated periods for period-scan.
    #[arg(long, value_delimiter = ',', default_value = "3")]
    p_list: Vec<usize>,
    /// Tolerance for rationality and root refinement.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Make selftest fail (for checking the failure path).
    #[arg(long)]
    force_fail: bool,
}

fn config(command: Command, o: Opts) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::new(command);
    let (pd, pe) = (o.positional.first().copied(), o.positional.get(1).copied());
    cfg.d = o.d.or(pd);
    cfg.e = o.e.or(pe);
    cfg.n_steps = o.steps;
    cfg.n_samples = o.samples;
    cfg.seed = o.seed;
    cfg.out_path = o.out;
    cfg.format = match o.format {
        Some(FormatArg::Json) => Format::Json,
        Some(FormatArg::Svg) => Format::Svg,
        Some(FormatArg::Csv) => Format::Csv,
        None if command == Command::Render => Format::Svg,
        None => Format::Csv,
    };
    cfg.view = match o.view {
        ViewArg::Physical => View::Physical,
        ViewArg::LevelSet => View::LevelSet,
    };
    cfg.grid = o.grid.as_deref().map(Grid::parse).transpose()?;
    cfg.p_list = o.p_list;
    cfg.tol = o.tol;
    cfg.force_fail = o.force_fail;
    Ok(cfg)
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    let (command, opts) = match cli.command {
        Cmd::Classify(o) => (Command::Classify, o),
        Cmd::Orbit(o) => (Command::Orbit, o),
        Cmd::Rotation(o) => (Command::Rotation, o),
        Cmd::PeriodScan(o) => (Command::PeriodScan, o),
        Cmd::Render(o) => (Command::Render, o),
        Cmd::Selftest(o) => (Command::Selftest, o),
    };
    let cfg = config(command, opts)?;
    cfg.validate()?;
    let mut sink: Box<dyn Write> = match &cfg.out_path {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let outcome = run(&cfg, &mut sink)?;
    sink.flush()?;
    if let boltzmann_core::cli_io::Outcome::CheckFailed(msg) = &outcome {
        eprintln!("boltzmann: {msg}");
    }
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("BOLTZMANN_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 2 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("boltzmann: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

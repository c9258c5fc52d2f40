use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod run;

/// Exact travelling-wave and self-similar solutions of the two-phase
/// evaporation/melting problem, invariance checks, and a finite-difference
/// cross-check.
#[derive(Debug, Parser)]
#[command(name = "stefan", version)]
struct Cli {
    /// Material file (flat `key = value`, SI units; see docs/config.md).
    #[arg(long, global = true, default_value = "materials/aluminium.conf")]
    material: PathBuf,

    /// Directory for artifacts; created if missing.
    #[arg(long, global = true, env = "STEFAN_OUT_DIR", default_value = "out")]
    out_dir: PathBuf,

    /// Override one material constant, `KEY=VALUE` in the file's units
    /// (e.g. `--set Tinf=293`). Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE", value_parser = parse_override)]
    overrides: Vec<(String, f64)>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Flux {
    /// Incident laser flux q0, W/m^2 (overrides the material file).
    #[arg(long, allow_hyphen_values = true)]
    q0: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Travelling wave under a steady flux: writes tw_profile.csv and tw_summary.csv.
    SolveTw {
        #[command(flatten)]
        flux: Flux,
        /// Profile samples (count).
        #[arg(long, default_value_t = 201)]
        points: usize,
        /// Profile extent past the surface, in melt-layer thicknesses delta (dimensionless).
        #[arg(long, default_value_t = 3.0)]
        span: f64,
    },
    /// Similarity solution under a flux decaying as 1/sqrt(t): writes ss_profile.csv and ss_summary.csv.
    SolveSs {
        #[command(flatten)]
        flux: Flux,
        /// Profile samples (count).
        #[arg(long, default_value_t = 201)]
        points: usize,
        /// Profile extent past the surface, in multiples of omega2 (dimensionless).
        #[arg(long, default_value_t = 3.0)]
        span: f64,
        /// Shooting convergence tolerance on the normalized boundary residuals (dimensionless).
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Invariance check of a problem under its candidate group families:
    /// writes check_<scenario>.txt and check_<scenario>_residuals.csv.
    Check {
        /// `rod`, `stefan`, or `table2-case-N` with N in 1..=9.
        scenario: Scenario,
        /// Rod: exponent k of the diffusivity in u_t = (u^k u_x)_x (dimensionless).
        #[arg(long, allow_hyphen_values = true, default_value_t = -2.0)]
        k: f64,
        /// Rod: angular frequency gamma of the surface flux q0 cos(gamma t), in inverse nondimensional time.
        #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
        gamma: f64,
        /// Rod: amplitude q0 of the surface flux u^k u_x = q0 cos(gamma t) (dimensionless).
        #[arg(long, allow_hyphen_values = true, default_value_t = 1.0)]
        q0: f64,
        /// Stefan: time dependence of the surface flux and evaporation laws.
        #[arg(long, value_enum, default_value_t = Law::Autonomous)]
        law: Law,
    },
    /// Finite-difference front-tracking run seeded from an exact solution:
    /// writes fd_report.txt, fd_fronts.csv and fd_snapshots.csv.
    VerifyFd {
        #[command(flatten)]
        flux: Flux,
        /// Which exact solution to seed from and compare against.
        #[arg(long, value_enum, default_value_t = Mode::Tw)]
        mode: Mode,
        /// Liquid-layer cells (count).
        #[arg(long, default_value_t = 20)]
        n: usize,
        /// Solid-region cells (count); default matches the liquid spacing.
        #[arg(long)]
        n_solid: Option<usize>,
        /// Time step as a fraction of the explicit stability bound (dimensionless, in (0, 1]).
        #[arg(long, default_value_t = 1.0)]
        dt_fraction: f64,
        /// tw: run length in units of delta/mu (dimensionless).
        #[arg(long, default_value_t = 10.0)]
        periods: f64,
        /// ss: start time, s.
        #[arg(long, default_value_t = 1.0)]
        t0: f64,
        /// ss: end time, s.
        #[arg(long, default_value_t = 1.5)]
        t_end: f64,
        /// Steps between profile snapshots (count).
        #[arg(long, default_value_t = 500)]
        snapshot_every: usize,
        /// Relative tolerance on the front velocity (tw) or omega2 (ss); exceeded -> exit 1 (dimensionless).
        #[arg(long, default_value_t = 0.02)]
        tol: f64,
    },
    /// Aluminium at q0 = 1e10 and 5e10 W/m^2: published and computed (mu, delta)
    /// in reproduce_summary.csv, plus temperature profiles.
    ReproducePaper {
        /// Profile samples per case (count).
        #[arg(long, default_value_t = 201)]
        points: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Scenario {
    Rod,
    Stefan,
    GeneratorCase(u8),
}

impl std::str::FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rod" => Ok(Self::Rod),
            "stefan" => Ok(Self::Stefan),
            _ => s
                .strip_prefix("table2-case-")
                .and_then(|n| n.parse().ok())
                .map(Self::GeneratorCase)
                .ok_or_else(|| format!("unknown scenario `{s}`; expected rod, stefan or table2-case-N")),
        }
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Rod => f.write_str("rod"),
            Self::Stefan => f.write_str("stefan"),
            Self::GeneratorCase(n) => write!(f, "table2-case-{n}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Law {
    /// q(t, u), h(t, u).
    General,
    /// q(u), h(u).
    Autonomous,
    /// q(u)/sqrt(t), h(u)/sqrt(t).
    InverseSqrt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Tw,
    Ss,
}

fn parse_override(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or("expected KEY=VALUE")?;
    let v: f64 = v.trim().parse().map_err(|_| format!("`{}` is not a number", v.trim()))?;
    Ok((k.trim().to_string(), v))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("stefan: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

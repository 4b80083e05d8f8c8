use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use macroball::config::{Config, Format};
use macroball::hypgeom::Dim;
use macroball::kernel::KernelParams;
use macroball::report::{self, Curve};
use macroball::verify::{self, Suite};
use macroball::Error;

/// Explicit constants, kernel bounds and verification for macroscopic-ball
/// volume thresholds.
#[derive(Parser)]
#[command(name = "macroball", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum CurveArg {
    F,
    G,
    LambdaIntegrand,
    VHyp,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    All,
    Hypgeom,
    Kernel,
    Constants,
    Asymptotics,
}

#[derive(clap::Args)]
struct Common {
    /// Configuration file (default: $MACROBALL_CONFIG, then ./macroball.toml).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output path; `-` writes to standard output.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Constant pipeline report for one dimension.
    Constants {
        #[arg(long)]
        dim: usize,
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
    },
    /// Volume thresholds for a closed manifold of the given volume data.
    Thresholds {
        #[arg(long)]
        dim: usize,
        /// Volume of the hyperbolic metric.
        #[arg(long)]
        vol_hyp: Option<f64>,
        /// Simplicial volume, if known directly.
        #[arg(long)]
        simplicial_volume: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Samples f, g, the λ_n integrand or v_hyp at geometric radii.
    Curve {
        #[arg(long, value_enum)]
        which: CurveArg,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        r_min: f64,
        #[arg(long)]
        r_max: f64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
    },
    /// Chain inequalities and finite-difference check at one point.
    KernelCheck {
        #[arg(long)]
        dim: usize,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        #[arg(long = "R", visible_alias = "radius", allow_hyphen_values = true)]
        r: f64,
        #[arg(long, default_value_t = 1e-3)]
        fd_step: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Runs the acceptance checks.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> macroball::Result<u8> {
    match cli.command {
        Command::Constants {
            dim,
            common,
            format,
        } => {
            let cfg = Config::load(common.config.as_deref())?;
            require_json(format)?;
            let report = cfg
                .pipeline()
                .compute_beta_n(Dim::new(dim)?, &cfg.externals()?)?;
            emit(
                &common,
                &cfg,
                &report::constants_json(&report, &cfg.digest()),
            )?;
            Ok(0)
        }
        Command::Thresholds {
            dim,
            vol_hyp,
            simplicial_volume,
            common,
        } => {
            let cfg = Config::load(common.config.as_deref())?;
            let t = cfg.pipeline().volume_thresholds(
                Dim::new(dim)?,
                &cfg.externals()?,
                vol_hyp,
                simplicial_volume,
            )?;
            emit(&common, &cfg, &report::thresholds_json(&t))?;
            Ok(0)
        }
        Command::Curve {
            which,
            dim,
            r_min,
            r_max,
            samples,
            common,
            format,
        } => {
            let cfg = Config::load(common.config.as_deref())?;
            let curve = match which {
                CurveArg::F => Curve::F,
                CurveArg::G => Curve::G,
                CurveArg::LambdaIntegrand => Curve::LambdaIntegrand,
                CurveArg::VHyp => Curve::VHyp,
            };
            let radii = report::geometric_radii(r_min, r_max, samples)?;
            let rows = report::sample_curve(
                curve,
                Dim::new(dim)?,
                &radii,
                &cfg.pipeline(),
                &cfg.externals()?,
            )?;
            let format = match format {
                Some(FormatArg::Json) => Format::Json,
                Some(FormatArg::Csv) => Format::Csv,
                None => cfg.output.format,
            };
            let text = match format {
                Format::Json => report::curve_json(&rows),
                Format::Csv => {
                    let mut buf = Vec::new();
                    report::write_curve_csv(&rows, &mut buf)?;
                    String::from_utf8(buf).expect("csv output is UTF-8")
                }
            };
            emit(&common, &cfg, &text)?;
            Ok(0)
        }
        Command::KernelCheck {
            dim,
            lambda,
            r,
            fd_step,
            common,
        } => {
            let cfg = Config::load(common.config.as_deref())?;
            let params = KernelParams::new(Dim::new(dim)?, lambda, r)?;
            let outcome = verify::kernel_check(&params, fd_step, &cfg.quad_tolerance())?;
            eprint!("{}", outcome.table());
            emit(&common, &cfg, &outcome.to_json())?;
            Ok(if outcome.passed() { 0 } else { 1 })
        }
        Command::Verify { suite, common } => {
            let cfg = Config::load(common.config.as_deref())?;
            let suite = match suite {
                SuiteArg::All => Suite::All,
                SuiteArg::Hypgeom => Suite::Hypgeom,
                SuiteArg::Kernel => Suite::Kernel,
                SuiteArg::Constants => Suite::Constants,
                SuiteArg::Asymptotics => Suite::Asymptotics,
            };
            let outcome = verify::run(&cfg, suite);
            eprint!("{}", outcome.table());
            emit(&common, &cfg, &outcome.to_json())?;
            Ok(if outcome.passed() { 0 } else { 1 })
        }
    }
}

fn require_json(format: Option<FormatArg>) -> macroball::Result<()> {
    match format {
        Some(FormatArg::Csv) => Err(Error::InvalidArgument(
            "the constants report is JSON only; CSV is available for curves".into(),
        )),
        _ => Ok(()),
    }
}

fn emit(common: &Common, cfg: &Config, text: &str) -> macroball::Result<()> {
    let target = common
        .out
        .as_deref()
        .or(cfg.output.path.as_deref())
        .unwrap_or("-");
    if target == "-" {
        let mut stdout = io::stdout().lock();
        stdout.write_all(text.as_bytes())?;
        stdout.flush()?;
    } else {
        fs::write(Path::new(target), text).map_err(|e| Error::Io(format!("{target}: {e}")))?;
    }
    Ok(())
}

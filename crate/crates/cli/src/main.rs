//! `rlab`: runs restriction-lab experiments and writes their reports.
//!
//! Exit status: 0 when every assertion passes, 1 when one fails, 2 for
//! usage and configuration errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use restriction_lab::harness::families::{make_family, Family};
use restriction_lab::harness::suite::{
    closed_form_report, exponent_summary, run_suite, suite_exit_code,
};
use restriction_lab::harness::{
    identity_suite, knapp_slope, ratio_sweep, run_lebesgue, run_sweep, ExperimentConfig, Report,
    SweepOperator,
};
use restriction_lab::ops::maximal_restrict;
use restriction_lab::{Error, Rational};

/// Environment variable that overrides the default report directory.
const REPORT_DIR_ENV: &str = "RLAB_REPORT_DIR";

#[derive(Parser)]
#[command(
    name = "rlab",
    version,
    about = "Maximal Fourier restriction experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML experiment config; defaults apply to omitted keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Report directory [default: $RLAB_REPORT_DIR, else ./reports].
    #[arg(long)]
    report_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Range verdicts and exponent bookkeeping for (d, p, q), printed as JSON.
    Exponents {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
    },
    /// Closed-form restriction and extension values.
    Extension(Common),
    /// Ratio sweep of the maximal operator over the configured family; also
    /// writes the maximal function of the first member.
    Maximal(Common),
    /// Knapp cap scaling exponents.
    Knapp(Common),
    /// Lebesgue-point oscillation experiment.
    Lebesgue(Common),
    /// The seven identity checks.
    Identities(Common),
    /// Ratio sweep with the configured operator.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Overrides the configured p.
        #[arg(long)]
        p: Option<String>,
        /// Overrides the configured q.
        #[arg(long)]
        q: Option<String>,
    },
    /// Everything, at the configured (by default acceptance) resolution.
    Suite(Common),
}

/// Anything that stops a command before its reports are complete.
struct Failure(String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(e.to_string())
    }
}

fn load(common: &Common) -> Result<ExperimentConfig, Failure> {
    match &common.config {
        Some(path) => Ok(ExperimentConfig::from_path(path)?),
        None => Ok(ExperimentConfig::default()),
    }
}

fn report_dir(common: &Common) -> PathBuf {
    common
        .report_dir
        .clone()
        .or_else(|| std::env::var_os(REPORT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("reports"))
}

fn emit(reports: &[Report], dir: &Path) -> Result<i32, Failure> {
    for r in reports {
        r.write(dir)?;
        let failed: Vec<&str> = r
            .assertions
            .iter()
            .filter(|a| !a.passed)
            .map(|a| a.name.as_str())
            .collect();
        let status = if r.passed { "PASS" } else { "FAIL" };
        println!(
            "{status} {} ({} assertions) -> {}.json",
            r.experiment,
            r.assertions.len(),
            r.stem(dir).display()
        );
        for name in failed {
            println!("  failed: {name}");
        }
    }
    Ok(suite_exit_code(reports))
}

fn parse_rational(s: &str) -> Result<Rational, Failure> {
    s.parse::<Rational>().map_err(|e| Failure(e.to_string()))
}

fn run(cli: Cli) -> Result<i32, Failure> {
    match cli.command {
        Command::Exponents { d, p, q } => {
            let summary = exponent_summary(d, parse_rational(&p)?, parse_rational(&q)?)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&summary).expect("summary serializes")
            );
            Ok(0)
        }
        Command::Extension(c) => emit(&[closed_form_report(&load(&c)?)], &report_dir(&c)),
        Command::Maximal(c) => {
            let cfg = load(&c)?;
            let dir = report_dir(&c);
            let members = match make_family(&cfg)? {
                Family::Grid(m) => m,
                Family::Sphere(_) => {
                    return Err(Failure(format!(
                        "family `{}` is not a grid family",
                        cfg.family.name
                    )))
                }
            };
            let report = ratio_sweep(
                &cfg,
                SweepOperator::Maximal,
                &members,
                cfg.exponents.p,
                cfg.exponents.q,
            );
            let code = emit(
                &[Report {
                    experiment: "maximal".into(),
                    ..report
                }],
                &dir,
            )?;
            if let Some(first) = members.first() {
                let rule = std::sync::Arc::new(cfg.rule()?);
                let m = maximal_restrict(&first.value, &rule, &cfg.ladder()?)?;
                let path = dir.join(format!("{}-maximal-values.json", cfg.id));
                let text = serde_json::to_string(&m.values).expect("sphere functions serialize");
                std::fs::write(&path, text)
                    .map_err(|e| Failure(format!("{}: {e}", path.display())))?;
            }
            Ok(code)
        }
        Command::Knapp(c) => emit(&[knapp_slope(&load(&c)?)], &report_dir(&c)),
        Command::Lebesgue(c) => emit(&[run_lebesgue(&load(&c)?)], &report_dir(&c)),
        Command::Identities(c) => emit(&[identity_suite(&load(&c)?)], &report_dir(&c)),
        Command::Sweep { common, p, q } => {
            let mut cfg = load(&common)?;
            if let Some(p) = p {
                cfg.exponents.p = parse_rational(&p)?;
            }
            if let Some(q) = q {
                cfg.exponents.q = parse_rational(&q)?;
            }
            if cfg.exponents.p < Rational::integer(1) || cfg.exponents.q < Rational::integer(1) {
                return Err(Failure("exponents must be at least 1".into()));
            }
            emit(&[run_sweep(&cfg)?], &report_dir(&common))
        }
        Command::Suite(c) => emit(&run_suite(&load(&c)?), &report_dir(&c)),
    }
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
        Ok(code) => ExitCode::from(code as u8),
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

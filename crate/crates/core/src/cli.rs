//! Command-line front end.
//!
//! Exit codes: 0 pass, 1 criteria failed (or hypotheses violated for
//! `validate`), 2 configuration error, 3 resource limit.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::RunConfig;
use crate::error::Error;
use crate::harness::{self, ExperimentSpec};
use crate::limits::estimate_gamma;
use crate::walks::{IncrementLaw, Theorem};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

const DEFAULT_OUTPUT: &str = "rwrs-out";

#[derive(Debug, Parser)]
#[command(
    name = "rwrs",
    version,
    about = "Random walks in random scenery: quenched limit experiments"
)]
pub struct Cli {
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, env = "RWRS_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// `key.path=value`, applied in order.
    #[arg(long = "override", value_name = "K=V")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the walk against every theorem's hypotheses.
    Validate(ConfigArgs),
    /// Run the configured experiment and write the report files.
    Run {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Estimate the escape probability.
    Gamma(GammaArgs),
    /// Run an intersection or growth suite config.
    Intersections {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum WalkKind {
    Simple,
    Stable,
    Renewal,
}

#[derive(Debug, Args)]
pub struct GammaArgs {
    /// Take the walk from this config instead of the walk flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub walk: Option<WalkKind>,
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub support: Vec<i64>,
    #[arg(long, value_delimiter = ',')]
    pub probs: Vec<f64>,
    /// Horizon T.
    #[arg(long = "horizon", short = 'T', default_value_t = 100_000)]
    pub horizon: u64,
    /// Number of paths M.
    #[arg(long = "samples", short = 'M', default_value_t = 10_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also run at 2T and print the change.
    #[arg(long)]
    pub double: bool,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Resource { .. } => EXIT_RESOURCE,
        _ => EXIT_CONFIG,
    }
}

fn report_error(err: &mut dyn Write, e: &Error) -> i32 {
    let _ = writeln!(err, "error: {e}");
    exit_code(e)
}

fn init_threads(flag: Option<usize>, config: Option<usize>) {
    let n = flag.or(config).unwrap_or(0);
    // A second initialization (tests calling in-process) keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
}

/// Parses `args` and runs; returns the process exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_CONFIG;
            }
            let _ = write!(out, "{e}");
            return EXIT_PASS;
        }
    };
    match cli.command {
        Command::Validate(args) => cmd_validate(&args, out, err),
        Command::Run { config, output } => {
            cmd_run(&config, output.as_deref(), cli.threads, false, out, err)
        }
        Command::Intersections { config, output } => {
            cmd_run(&config, output.as_deref(), cli.threads, true, out, err)
        }
        Command::Gamma(args) => cmd_gamma(&args, cli.threads, out, err),
    }
}

fn cmd_validate(args: &ConfigArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let config = match RunConfig::load(&args.config, &args.overrides) {
        Ok(c) => c,
        Err(e) => return report_error(err, &e),
    };
    let walk = &config.walk;
    let _ = writeln!(
        out,
        "walk: {}",
        serde_json::to_string(walk).unwrap_or_default()
    );
    let _ = writeln!(out, "{:<10} {:<8} details", "theorem", "status");
    for t in Theorem::ALL {
        let v = walk.validate_for(t);
        let status = if v.is_empty() { "ok" } else { "violated" };
        let details: Vec<String> = v
            .iter()
            .map(|x| format!("{:?}: {}", x.hypothesis, x.message))
            .collect();
        let _ = writeln!(
            out,
            "{:<10} {:<8} {}",
            t.to_string(),
            status,
            details.join("; ")
        );
    }
    let target = match config.experiment.theorem {
        Some(t) => t,
        None => walk.target_theorem(),
    };
    let violations = walk.validate_for(target);
    if let Err(e) = config.to_spec() {
        return report_error(err, &e);
    }
    if violations.is_empty() {
        let _ = writeln!(out, "admissible for the {target} theorem");
        EXIT_PASS
    } else {
        for v in &violations {
            let _ = writeln!(err, "not admissible: {v}");
        }
        EXIT_FAIL
    }
}

fn cmd_run(
    args: &ConfigArgs,
    output: Option<&Path>,
    threads: Option<usize>,
    suites_only: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let config = match RunConfig::load(&args.config, &args.overrides) {
        Ok(c) => c,
        Err(e) => return report_error(err, &e),
    };
    let spec = match config.to_spec() {
        Ok(s) => s,
        Err(e) => return report_error(err, &e),
    };
    if suites_only && !matches!(spec, ExperimentSpec::Suite(_)) {
        let _ = writeln!(
            err,
            "error: `intersections` runs suite configs; use `run` for theorem experiments"
        );
        return EXIT_CONFIG;
    }
    init_threads(threads, config.execution.threads);
    let report = match harness::run(&spec) {
        Ok(r) => r,
        Err(e) => return report_error(err, &e),
    };
    let dir = output
        .map(Path::to_path_buf)
        .or_else(|| config.execution.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT));
    let written = match harness::write_report(&report, &dir) {
        Ok(w) => w,
        Err(e) => return report_error(err, &e),
    };
    for line in report.verdict_lines() {
        let _ = writeln!(out, "{line}");
    }
    for note in &report.notes {
        let _ = writeln!(out, "note: {note}");
    }
    if report.underpowered {
        let _ = writeln!(
            out,
            "warning: underpowered run, criteria are flagged low-power"
        );
    }
    let _ = writeln!(out, "wrote {} files to {}", written.len(), dir.display());
    if report.passed() || report.underpowered {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn gamma_walk(args: &GammaArgs) -> Result<IncrementLaw, Error> {
    if let Some(path) = &args.config {
        return Ok(RunConfig::load(path, &[])?.walk);
    }
    match args.walk {
        None => Err(Error::Config("give --config or --walk".into())),
        Some(WalkKind::Simple) => Ok(IncrementLaw::SimpleWalk { dim: args.dim }),
        Some(WalkKind::Stable) => Ok(IncrementLaw::StableTail {
            dim: args.dim,
            alpha: args
                .alpha
                .ok_or_else(|| Error::Config("--walk stable needs --alpha".into()))?,
        }),
        Some(WalkKind::Renewal) => Ok(IncrementLaw::RenewalFinite {
            support: args.support.clone(),
            probs: args.probs.clone(),
        }),
    }
}

fn cmd_gamma(
    args: &GammaArgs,
    threads: Option<usize>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let walk = match gamma_walk(args) {
        Ok(w) => w,
        Err(e) => return report_error(err, &e),
    };
    init_threads(threads, None);
    let est = match estimate_gamma(&walk, args.horizon, args.samples, args.seed) {
        Ok(g) => g,
        Err(e) => return report_error(err, &e),
    };
    let mut doc = serde_json::json!({ "walk": walk, "estimate": est });
    if args.double {
        match estimate_gamma(&walk, 2 * args.horizon, args.samples, args.seed) {
            Ok(g2) => {
                doc["stability_delta"] = serde_json::json!(g2.estimate - est.estimate);
                doc["doubled"] = serde_json::to_value(g2).unwrap_or_default();
            }
            Err(e) => return report_error(err, &e),
        }
    }
    let _ = writeln!(
        out,
        "{}",
        serde_json::to_string_pretty(&doc).unwrap_or_default()
    );
    EXIT_PASS
}

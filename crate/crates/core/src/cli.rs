//! The `affine-bv` command line.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 verification failure,
//! 3 resource guard.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::algorithms::{majority_vote, Mode, RunConfig, VariantPolicy, DEFAULT_TRIALS_PER_ORACLE};
use crate::analysis::{
    affine_class_threshold, completion_report, gammas, in_affine_class, in_linear_class,
    linear_class_threshold, p_affine, p_linear, sweep_landscape, write_sweep_csv, DcFractions,
    SweepMode,
};
use crate::boolfn::{consistent_affine_completions, parse_function_file, DcSplit, PartialFunction};
use crate::error::Error;
use crate::rng::DEFAULT_SEED;
use crate::verify::{run_verification, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

/// Environment variable that supplies the default `--seed`.
pub const SEED_ENV: &str = "AFFINE_BV_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "affine-bv",
    version,
    about = "Identify linear and affine Boolean functions with one- and two-query circuits"
)]
pub struct Cli {
    /// Worker threads for shots, sweeps and searches (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Recover C (and c_n) from a .bfn file by majority vote over seeded shots.
    Identify(IdentifyArgs),
    /// Compare closed-form and simulated success probabilities for every affine completion.
    Prob(ProbArgs),
    /// Write the (D, D1) success landscape as CSV.
    Sweep(SweepArgs),
    /// Report class membership for given don't-care counts.
    Classify(ClassifyArgs),
    /// Run the exhaustive verification suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Linear,
    Affine,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OracleArg {
    Auto,
    Plus,
    Minus,
    Vote,
}

#[derive(Debug, Args)]
pub struct IdentifyArgs {
    pub file: PathBuf,
    #[arg(long, value_enum, default_value = "affine")]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value = "auto")]
    pub oracle: OracleArg,
    /// Shots per oracle.
    #[arg(long, default_value_t = DEFAULT_TRIALS_PER_ORACLE)]
    pub trials: usize,
    #[arg(long, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ProbArgs {
    pub file: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value = "linear")]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d0: usize,
    #[arg(long)]
    pub d1: usize,
    #[arg(long, value_enum, default_value = "affine")]
    pub mode: ModeArg,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 4)]
    pub max_n: usize,
    #[arg(long, default_value_t = 50)]
    pub masks: usize,
    #[arg(long, default_value_t = 10_000)]
    pub shots: usize,
    #[arg(long, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Some(threads) = cli.threads {
        // Only the first call in a process can size the global pool.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let result = match &cli.command {
        Command::Identify(a) => cmd_identify(a, out, err),
        Command::Prob(a) => cmd_prob(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
        Command::Classify(a) => cmd_classify(a, out),
        Command::Verify(a) => cmd_verify(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                CliError::Core(Error::RegisterLimit { .. }) => EXIT_RESOURCE,
                _ => EXIT_USAGE,
            }
        }
    }
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

type CliResult = std::result::Result<i32, CliError>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn load(path: &Path) -> std::result::Result<PartialFunction, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    Ok(parse_function_file(&text)?)
}

fn cmd_identify(a: &IdentifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let partial = load(&a.file)?;
    let config = RunConfig {
        mode: match a.mode {
            ModeArg::Linear => Mode::LinearOnly,
            ModeArg::Affine => Mode::Affine,
        },
        variant_policy: match a.oracle {
            OracleArg::Auto => VariantPolicy::Auto,
            OracleArg::Plus => VariantPolicy::ForcePlus,
            OracleArg::Minus => VariantPolicy::ForceMinus,
            OracleArg::Vote => VariantPolicy::BothWithVote,
        },
        trials_per_oracle: a.trials,
        rng_seed: a.seed,
    };
    let result = majority_vote(&partial, &config)?;
    if result.ambiguous {
        writeln!(
            err,
            "warning: d = {} >= N/2 = {}; several linear completions may fit and the result is ambiguous",
            partial.dc_count(),
            partial.len() / 2
        )
        .ok();
    }
    if result.variant_anomaly && config.variant_policy == VariantPolicy::Auto {
        writeln!(
            err,
            "warning: n0' or n1' exceeds N/2, so no balanced completion exists; using the plus oracle"
        )
        .ok();
    }
    let w = |e| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source: e,
    };
    writeln!(out, "{}", result.winner()).map_err(w)?;
    writeln!(out, "oracle: {}", result.variant_used).map_err(w)?;
    writeln!(out, "shots: {}", result.shots).map_err(w)?;
    writeln!(out, "seed: {}", result.seed).map_err(w)?;
    writeln!(out, "votes:").map_err(w)?;
    let mut ranked: Vec<_> = result.vote_table.iter().collect();
    ranked.sort_by(|x, y| y.1.cmp(x.1).then(x.0.cmp(y.0)));
    for (cand, count) in ranked {
        writeln!(out, "  {cand}  {count}").map_err(w)?;
    }
    Ok(EXIT_OK)
}

fn cmd_prob(a: &ProbArgs, out: &mut dyn Write) -> CliResult {
    let partial = load(&a.file)?;
    let completions = consistent_affine_completions(&partial)?;
    let w = |e| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source: e,
    };
    writeln!(
        out,
        "n={} N={} d={} completions={}",
        partial.n(),
        partial.len(),
        partial.dc_count(),
        completions.len()
    )
    .map_err(w)?;
    if completions.is_empty() {
        writeln!(
            out,
            "no affine completion is consistent with {}",
            a.file.display()
        )
        .map_err(w)?;
        return Ok(EXIT_VERIFY);
    }
    for spec in &completions {
        let r = completion_report(&partial, spec)?;
        writeln!(out, "completion {spec}").map_err(w)?;
        writeln!(out, "  d0={} d1={}", r.split.d0, r.split.d1).map_err(w)?;
        match r.gammas {
            Some(g) => {
                writeln!(out, "  gamma0={:.9} gamma1={:.9}", g.gamma0, g.gamma1).map_err(w)?;
                for (label, analytic, simulated) in [
                    ("P_L", g.p_linear(), r.simulated.p_linear),
                    ("P_A", g.p_affine(), r.simulated.p_affine),
                ] {
                    writeln!(
                        out,
                        "  {label} analytic={analytic:.9} simulated={simulated:.9} delta={:.3e}",
                        (analytic - simulated).abs()
                    )
                    .map_err(w)?;
                }
            }
            None => {
                writeln!(out, "  gamma0=n/a gamma1=n/a (d >= N/2)").map_err(w)?;
                writeln!(
                    out,
                    "  P_L analytic=n/a simulated={:.9}",
                    r.simulated.p_linear
                )
                .map_err(w)?;
                writeln!(
                    out,
                    "  P_A analytic=n/a simulated={:.9}",
                    r.simulated.p_affine
                )
                .map_err(w)?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write) -> CliResult {
    let mode = match a.mode {
        ModeArg::Linear => SweepMode::Linear,
        ModeArg::Affine => SweepMode::Affine,
    };
    let rows = sweep_landscape(mode, a.steps)?;
    let dir = match a.out.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(io_err(&a.out))?;
    write_sweep_csv(&rows, std::io::BufWriter::new(tmp.as_file_mut())).map_err(io_err(&a.out))?;
    tmp.persist(&a.out).map_err(|e| CliError::Io {
        path: a.out.clone(),
        source: e.error,
    })?;
    writeln!(out, "wrote {} rows to {}", rows.len(), a.out.display()).map_err(io_err(&a.out))?;
    Ok(EXIT_OK)
}

fn cmd_classify(a: &ClassifyArgs, out: &mut dyn Write) -> CliResult {
    // Validates d0 + d1 < N/2.
    gammas(a.n, a.d0, a.d1)?;
    let fr = DcFractions::from_counts(a.n, DcSplit { d0: a.d0, d1: a.d1 })?;
    let w = |e| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source: e,
    };
    writeln!(out, "D={:.9} D0={:.9} D1={:.9}", fr.d(), fr.d0(), fr.d1()).map_err(w)?;
    let (name, p, inside, threshold) = match a.mode {
        ModeArg::Linear => (
            "linear",
            p_linear(&fr),
            in_linear_class(&fr),
            linear_class_threshold(fr.d()),
        ),
        ModeArg::Affine => (
            "affine",
            p_affine(&fr),
            in_affine_class(&fr),
            Some(affine_class_threshold(fr.d())),
        ),
    };
    writeln!(out, "mode={name} P={p:.9}").map_err(w)?;
    match threshold {
        Some(t) => writeln!(out, "threshold D1>={t:.9}").map_err(w)?,
        None => writeln!(out, "threshold none (no real root; P >= 2/3 for every D1)").map_err(w)?,
    }
    writeln!(
        out,
        "verdict: {}",
        if inside { "in class" } else { "out of class" }
    )
    .map_err(w)?;
    Ok(EXIT_OK)
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> CliResult {
    let config = VerifyConfig {
        max_n: a.max_n,
        masks: a.masks,
        shots: a.shots,
        seed: a.seed,
        ..VerifyConfig::default()
    };
    let report = run_verification(&config)?;
    let w = |e| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source: e,
    };
    for check in &report.checks {
        if check.passed() {
            writeln!(out, "PASS {} ({} cases)", check.name, check.cases).map_err(w)?;
        } else {
            writeln!(
                out,
                "FAIL {} ({} of {} cases)",
                check.name, check.failures, check.cases
            )
            .map_err(w)?;
            if let Some(c) = &check.counterexample {
                writeln!(out, "  first counterexample: {c}").map_err(w)?;
            }
        }
    }
    let verdict = report.passed();
    writeln!(
        out,
        "{}",
        if verdict {
            "verify: pass"
        } else {
            "verify: FAIL"
        }
    )
    .map_err(w)?;
    Ok(if verdict { EXIT_OK } else { EXIT_VERIFY })
}

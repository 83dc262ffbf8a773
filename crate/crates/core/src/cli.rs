//! Command-line front end. [`run`] takes the arguments and output streams and
//! returns the process exit code, so it can be driven from tests.
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | a property check or invariance experiment failed |
//! | 2 | unreadable or malformed input, bad arguments |
//! | 3 | degenerate configuration |
//! | 4 | warp moves the horizon through the image support |

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use num_rational::Rational64;

use crate::checks::{faulty_multiplier, run_suite, CheckConfig, Suite};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::image::{
    integral_invariant_with_workers, invariance_experiment, load_pgm, warp_image, IntegralSpec, SignPolicy,
};
use crate::invariants::{invariant_vector, relative_invariant, weight_factor};
use crate::projective::{apply_config, total_jacobian, Homography, PointConfig};
use crate::sampling::InstanceSampler;

#[derive(Debug, Parser)]
#[command(name = "relinv", version, about = "Relative and absolute projective invariants")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Joint invariants of a point file (one "x y" pair per line, '#' comments).
    Invariants {
        points: PathBuf,
        /// Re-check invariance under this many seeded random homographies.
        #[arg(long, default_value_t = 0)]
        verify: usize,
        #[arg(long, default_value = "0xC0FFEE", value_parser = parse_seed)]
        seed: u64,
        /// Also evaluate jinv^(-weight) * EXPR, EXPR over I1_i, I2_i.
        #[arg(long, value_name = "EXPR")]
        relative: Option<String>,
        /// Weight of --relative, an integer or p/q.
        #[arg(long, default_value = "0", value_parser = parse_weight)]
        weight: Rational64,
    },
    /// Run a seeded property suite.
    Check {
        #[arg(value_parser = parse_suite)]
        suite: Suite,
        #[arg(long, default_value = "0xC0FFEE", value_parser = parse_seed)]
        seed: u64,
        /// Trials per property.
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Replace the multiplier under test by det(g)*(1+x1) (negative control).
        #[arg(long, hide = true)]
        inject_faulty_multiplier: bool,
    },
    /// Monte-Carlo estimate of the integral invariant of a PGM image.
    ImageInvariant {
        image: PathBuf,
        /// Points per tuple.
        #[arg(long, default_value_t = 4)]
        n: usize,
        /// Comma-separated exponents of I1_i for every point (first four 0); default all 0.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        alpha: Vec<i32>,
        /// Comma-separated exponents of I2_i for every point (first four 0); default all 0.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        beta: Vec<i32>,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value = "0xC0FFEE", value_parser = parse_seed)]
        seed: u64,
        /// File with nine matrix entries (row-major); runs the invariance experiment.
        #[arg(long, value_name = "G_FILE")]
        warp: Option<PathBuf>,
        /// Worker threads; the estimate does not depend on this.
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Use the signed invariantized Jacobian instead of its absolute value.
        #[arg(long)]
        signed: bool,
    },
    /// Pull-back warp of a PGM image by a homography.
    Warp {
        image: PathBuf,
        /// File with nine matrix entries (row-major).
        homography: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Output width; defaults to the input width.
        #[arg(long)]
        width: Option<usize>,
        /// Output height; defaults to the input height.
        #[arg(long)]
        height: Option<usize>,
        #[arg(long, default_value_t = 255)]
        maxval: u16,
    },
}

fn parse_seed(s: &str) -> std::result::Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("invalid seed {s:?}: {e}"))
}

fn parse_weight(s: &str) -> std::result::Result<Rational64, String> {
    s.trim().parse().map_err(|e| format!("invalid weight {s:?}: {e}"))
}

fn parse_suite(s: &str) -> std::result::Result<Suite, String> {
    s.parse().map_err(|_| format!("expected one of {}", Suite::NAMES.join(", ")))
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ParseError { .. } | Error::UnsupportedFormat(_) | Error::Io(_) | Error::InvalidSpec(_) => 2,
        Error::DegenerateConfiguration { .. }
        | Error::PointAtInfinity { .. }
        | Error::SingularSystem { .. }
        | Error::SingularHomography { .. }
        | Error::FrameSolveFailure(_)
        | Error::TooFewPoints { .. }
        | Error::DivisionByZero(_) => 3,
        Error::HorizonCrossesSupport => 4,
        _ => 1,
    }
}

fn read_to_string(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn load_homography(path: &PathBuf) -> Result<Homography> {
    read_to_string(path)?.parse()
}

fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        (a - b).abs() / b.abs()
    }
}

fn cmd_invariants(
    out: &mut dyn Write,
    points: &PathBuf,
    verify: usize,
    seed: u64,
    relative: Option<&str>,
    weight: Rational64,
) -> Result<i32> {
    let cfg: PointConfig = read_to_string(points)?.parse()?;
    let expr: Option<Expr> = relative.map(str::parse).transpose()?;
    let v = invariant_vector(&cfg)?;
    write!(out, "{v}")?;
    let eval = |e: &Expr, c: &PointConfig| relative_invariant(weight, |v| e.eval(v), c);
    if let Some(e) = &expr {
        writeln!(out, "weight: {weight}")?;
        writeln!(out, "relative_invariant: {:.16e}", eval(e, &cfg)?)?;
    }
    if verify > 0 {
        let mut sampler = InstanceSampler::new(seed);
        let (mut drift, mut weight_drift) = (0.0_f64, 0.0_f64);
        for _ in 0..verify {
            let g = sampler.homography_for(&cfg);
            let moved = apply_config(&g, &cfg)?;
            let w = invariant_vector(&moved)?;
            for ((_, a), (_, b)) in w.named().iter().zip(v.named()) {
                drift = drift.max(rel(*a, b));
            }
            let j = total_jacobian(&g, &cfg)?.value();
            weight_drift = weight_drift.max(rel(w.jinv * j, v.jinv));
            if let Some(e) = &expr {
                let expected = weight_factor(1.0 / j, weight)? * eval(e, &cfg)?;
                weight_drift = weight_drift.max(rel(eval(e, &moved)?, expected));
            }
        }
        writeln!(out, "verify_trials: {verify}")?;
        writeln!(out, "verify_seed: {seed}")?;
        writeln!(out, "max_drift: {drift:e}")?;
        writeln!(out, "max_weight_drift: {weight_drift:e}")?;
    }
    Ok(0)
}

fn cmd_check(out: &mut dyn Write, suite: Suite, seed: u64, trials: usize, faulty: bool) -> Result<i32> {
    let mut cfg = CheckConfig::new(seed, trials);
    if faulty {
        cfg = cfg.with_multiplier(faulty_multiplier());
    }
    let reports = run_suite(suite, &cfg);
    let mut first_failure = None;
    for r in &reports {
        writeln!(out, "{r}")?;
        if !r.pass && first_failure.is_none() {
            first_failure = Some(r);
        }
    }
    writeln!(out, "suite: {suite}")?;
    writeln!(out, "properties: {}", reports.len())?;
    writeln!(out, "failed: {}", reports.iter().filter(|r| !r.pass).count())?;
    writeln!(out, "pass: {}", first_failure.is_none())?;
    if let Some(r) = first_failure {
        writeln!(out, "first_failure: {}", r.name)?;
        if let Some(c) = &r.counterexample {
            writeln!(out, "first_counterexample: {c}")?;
        }
        return Ok(1);
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_image_invariant(
    out: &mut dyn Write,
    image: &PathBuf,
    n: usize,
    alpha: Vec<i32>,
    beta: Vec<i32>,
    samples: u64,
    seed: u64,
    warp: Option<&PathBuf>,
    workers: usize,
    signed: bool,
) -> Result<i32> {
    let img = load_pgm(image)?;
    let fill = |v: Vec<i32>| if v.is_empty() { vec![0; n] } else { v };
    let spec = IntegralSpec {
        n,
        alpha: fill(alpha),
        beta: fill(beta),
        samples,
        seed,
        sign_policy: if signed { SignPolicy::Signed } else { SignPolicy::Absolute },
    };
    spec.validate()?;
    match warp {
        None => {
            write!(out, "{}", integral_invariant_with_workers(&img, &spec, workers)?)?;
            Ok(0)
        }
        Some(path) => {
            let g = load_homography(path)?;
            let report = invariance_experiment(&img, &spec, &g, workers)?;
            write!(out, "{report}")?;
            Ok(if report.pass { 0 } else { 1 })
        }
    }
}

fn cmd_warp(
    image: &PathBuf,
    homography: &PathBuf,
    output: &PathBuf,
    dims: (Option<usize>, Option<usize>),
    maxval: u16,
) -> Result<i32> {
    let img = load_pgm(image)?;
    let g = load_homography(homography)?;
    let warped = warp_image(&img, &g, (dims.0.unwrap_or(img.width()), dims.1.unwrap_or(img.height())))?;
    std::fs::write(output, warped.to_pgm(maxval))?;
    Ok(0)
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
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    let result = match cli.command {
        Command::Invariants { points, verify, seed, relative, weight } => {
            cmd_invariants(out, &points, verify, seed, relative.as_deref(), weight)
        }
        Command::Check { suite, seed, trials, inject_faulty_multiplier } => {
            cmd_check(out, suite, seed, trials, inject_faulty_multiplier)
        }
        Command::ImageInvariant { image, n, alpha, beta, samples, seed, warp, workers, signed } => {
            cmd_image_invariant(out, &image, n, alpha, beta, samples, seed, warp.as_ref(), workers, signed)
        }
        Command::Warp { image, homography, output, width, height, maxval } => {
            cmd_warp(&image, &homography, &output, (width, height), maxval)
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

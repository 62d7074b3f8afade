//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when `verify` reports failures, 2 on usage
//! errors, 3 on I/O, schema or input-validation errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::carleson::{diagnose, DiagnoseConfig};
use crate::error::Error;
use crate::geometry::CPoint;
use crate::integrate::RegionSpec;
use crate::kernel::{bergman_kernel, kernel_norm, normalized_kernel};
use crate::measures::{averaging, berezin, MeasureSpec};
use crate::metric::{bergman_distance, build_lattice};
use crate::verify::{verify, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Bergman-space geometry and Carleson-measure diagnostics on the Siegel
/// upper half-space.
///
/// Points, regions and measures are JSON, given inline or as a file path.
#[derive(Clone, Debug, PartialEq, Parser)]
#[command(name = "siegel-bergman", version)]
pub struct CliConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Debug, PartialEq, Subcommand)]
pub enum Command {
    /// K(z, w), k_z(w) and the A^p norm of K_z.
    Kernel(KernelArgs),
    /// Bergman distance between two points.
    Metric(MetricArgs),
    /// r-lattice of a bounded region.
    Lattice(LatticeArgs),
    /// Berezin transform of a measure at a point.
    Berezin(BerezinArgs),
    /// Averaging function mu(D(z, r)) / |D(z, r)|.
    Averaging(AveragingArgs),
    /// Carleson / vanishing-Carleson diagnostics for a measure.
    Diagnose(DiagnoseArgs),
    /// Numerical identity suite.
    Verify(VerifyArgs),
}

#[derive(Clone, Debug, PartialEq, Args)]
pub struct Output {
    /// Write the result here instead of standard output.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Args)]
pub struct KernelArgs {
    #[arg(long, value_name = "POINT")]
    pub z: String,
    #[arg(long, value_name = "POINT")]
    pub w: String,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Clone, Debug, PartialEq, Args)]
pub struct MetricArgs {
    #[arg(long, value_name = "POINT")]
    pub from: String,
    #[arg(long, value_name = "POINT")]
    pub to: String,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Clone, Debug, PartialEq, Args)]
pub struct LatticeArgs {
    #[arg(long, value_name = "REGION")]
    pub region: String,
    #[arg(long, default_value_t = 1, value_parser = dimension)]
    pub dim: usize,
    #[arg(long)]
    pub r: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Clone, Debug, PartialEq, Args)]
pub struct BerezinArgs {
    #[arg(long, value_name = "MEASURE")]
    pub measure: String,
    #[arg(long, value_name = "POINT")]
    pub z: String,
    #[arg(long, default_value_t = 200_000, value_parser = positive)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Clone, Debug, PartialEq, Args)]
pub struct AveragingArgs {
    #[arg(long, value_name = "MEASURE")]
    pub measure: String,
    #[arg(long, value_name = "POINT")]
    pub z: String,
    #[arg(long)]
    pub r: f64,
    #[arg(long, default_value_t = 200_000, value_parser = positive)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Args)]
pub struct DiagnoseArgs {
    #[arg(long, value_name = "MEASURE")]
    pub measure: String,
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 200_000, value_parser = positive)]
    pub samples: usize,
    /// Full diagnostics config as JSON; --r, --seed and --samples override it.
    #[arg(long, value_name = "CONFIG")]
    pub config: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Emit the shell-trend table as CSV (same as --format csv).
    #[arg(long, conflicts_with = "format")]
    pub csv: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Clone, Debug, PartialEq, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 1_000_000, value_parser = positive)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Random points per algebraic identity.
    #[arg(long, default_value_t = 10_000, value_parser = positive)]
    pub checks: usize,
    /// Randomized trials per inequality.
    #[arg(long, default_value_t = 100_000, value_parser = positive)]
    pub trials: usize,
    #[arg(long, default_value_t = 200_000, value_parser = positive)]
    pub duality_samples: usize,
    #[command(flatten)]
    pub output: Output,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

fn dimension(s: &str) -> Result<usize, String> {
    match positive(s)? {
        v @ 1..=20 => Ok(v),
        _ => Err("dimension must be between 1 and 20".into()),
    }
}

/// Parses arguments without the program name.
pub fn parse_args<I, T>(argv: I) -> Result<CliConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = std::iter::once(OsString::from("siegel-bergman")).chain(argv.into_iter().map(Into::into));
    CliConfig::try_parse_from(args)
}

#[derive(Debug)]
enum Failure {
    Io(String),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

/// Inline JSON if the argument looks like an object, otherwise a file path.
fn load_json<T: serde::de::DeserializeOwned>(arg: &str, what: &str) -> Result<T, Failure> {
    let trimmed = arg.trim_start();
    let text = if trimmed.starts_with('{') || trimmed.starts_with('[') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(|e| Failure::Io(format!("cannot read {what} file {arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("schema error in {what}: {e}")))
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("output serializes");
    s.push('\n');
    s
}

fn emit(text: &str, output: &Output, stdout: &mut dyn Write) -> Result<(), Failure> {
    match &output.out {
        Some(path) => write_file(path, text),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(format!("cannot write to standard output: {e}"))),
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))
}

fn execute(cfg: &CliConfig, stdout: &mut dyn Write) -> Result<i32, Failure> {
    match &cfg.command {
        Command::Kernel(a) => {
            let z: CPoint = load_json(&a.z, "point --z")?;
            let w: CPoint = load_json(&a.w, "point --w")?;
            let k = bergman_kernel(&z, &w)?;
            let nk = normalized_kernel(&z, &w)?;
            let norm = kernel_norm(&z, a.p)?;
            let v = json!({
                "z": z,
                "w": w,
                "p": a.p,
                "kernel": k,
                "normalized_kernel": nk,
                "kernel_norm": norm,
            });
            emit(&pretty(&v), &a.output, stdout)?;
        }
        Command::Metric(a) => {
            let from: CPoint = load_json(&a.from, "point --from")?;
            let to: CPoint = load_json(&a.to, "point --to")?;
            let beta = bergman_distance(&from, &to)?;
            let v = json!({ "from": from, "to": to, "beta": beta });
            emit(&pretty(&v), &a.output, stdout)?;
        }
        Command::Lattice(a) => {
            let region: RegionSpec = load_json(&a.region, "region")?;
            let lattice = build_lattice(a.dim, &region, a.r, a.seed)?;
            emit(&pretty(&lattice), &a.output, stdout)?;
        }
        Command::Berezin(a) => {
            let mu: MeasureSpec = load_json(&a.measure, "measure")?;
            let z: CPoint = load_json(&a.z, "point --z")?;
            let res = berezin(&mu, &z, a.samples, a.seed)?;
            let v = json!({ "z": z, "berezin": res });
            emit(&pretty(&v), &a.output, stdout)?;
        }
        Command::Averaging(a) => {
            let mu: MeasureSpec = load_json(&a.measure, "measure")?;
            let z: CPoint = load_json(&a.z, "point --z")?;
            let res = averaging(&mu, &z, a.r, a.samples, a.seed)?;
            let v = json!({ "z": z, "r": a.r, "averaging": res });
            emit(&pretty(&v), &a.output, stdout)?;
        }
        Command::Diagnose(a) => {
            let mu: MeasureSpec = load_json(&a.measure, "measure")?;
            let mut dc = match &a.config {
                Some(c) => load_json::<DiagnoseConfig>(c, "diagnose config")?,
                None => DiagnoseConfig::default(),
            };
            dc.r = a.r;
            dc.seed = a.seed;
            dc.lattice_seed = a.seed;
            dc.samples = a.samples;
            let report = diagnose(&mu, &dc)?;
            let text = if a.csv || a.format == Format::Csv {
                report.shell_trend_csv()
            } else {
                let mut s = report.to_json();
                s.push('\n');
                s
            };
            emit(&text, &a.output, stdout)?;
        }
        Command::Verify(a) => {
            let vc = VerifyConfig {
                samples: a.samples,
                seed: a.seed,
                checks: a.checks,
                trials: a.trials,
                duality_samples: a.duality_samples,
                ..VerifyConfig::default()
            };
            let report = verify(&vc)?;
            emit(&pretty(&report), &a.output, stdout)?;
            if !report.all_passed() {
                return Ok(EXIT_FAILED);
            }
        }
    }
    Ok(EXIT_OK)
}

/// Runs a parsed command, writing results to `stdout` and messages to `stderr`.
pub fn run_with(cfg: &CliConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    match execute(cfg, stdout) {
        Ok(code) => code,
        Err(Failure::Io(msg)) | Err(Failure::Input(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_IO
        }
    }
}

pub fn run(cfg: &CliConfig) -> i32 {
    run_with(cfg, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

/// Entry point for the binary: `argv` includes the program name.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match CliConfig::try_parse_from(argv) {
        Ok(cfg) => run(&cfg),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_OK
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagnose_defaults_filled() {
        let cfg = parse_args(["diagnose", "--measure", "m.json", "--r", "1.0", "--seed", "7"]).unwrap();
        let Command::Diagnose(a) = cfg.command else {
            panic!("wrong subcommand");
        };
        assert_eq!(a.measure, "m.json");
        assert_eq!(a.r, 1.0);
        assert_eq!(a.seed, 7);
        assert_eq!(a.samples, 200_000);
        assert_eq!(a.format, Format::Json);
        assert!(!a.csv);
        assert_eq!(a.output.out, None);
    }

    #[test]
    fn metric_needs_both_points() {
        let e = parse_args(["metric"]).unwrap_err();
        assert_eq!(e.exit_code(), EXIT_USAGE);
        assert!(e.to_string().contains("--from"));
    }

    #[test]
    fn verify_samples() {
        let cfg = parse_args(["verify", "--samples", "1000000"]).unwrap();
        let Command::Verify(a) = cfg.command else {
            panic!("wrong subcommand");
        };
        assert_eq!(a.samples, 1_000_000);
        assert_eq!(a.seed, 1);
    }

    #[test]
    fn unknown_and_conflicting_flags_rejected() {
        assert!(parse_args(["verify", "--bogus"]).is_err());
        assert!(parse_args(["diagnose", "--measure", "m", "--csv", "--format", "json"]).is_err());
        assert!(parse_args(["verify", "--samples", "0"]).is_err());
        assert!(parse_args(["lattice", "--region", "{}", "--r", "1", "--dim", "0"]).is_err());
    }

    #[test]
    fn metric_inline_points() {
        let cfg = parse_args([
            "metric",
            "--from",
            r#"{"zprime":[],"zn":[0,1]}"#,
            "--to",
            r#"{"zprime":[],"zn":[0,2]}"#,
        ])
        .unwrap();
        let mut out = Vec::new();
        let mut err = Vec::new();
        assert_eq!(run_with(&cfg, &mut out, &mut err), EXIT_OK);
        let v: serde_json::Value = serde_json::from_slice(&out).unwrap();
        let beta = v["beta"].as_f64().unwrap();
        assert!((beta - 0.5 * 2f64.ln()).abs() < 1e-14, "{beta}");
    }

    #[test]
    fn bad_point_is_input_error() {
        let cfg = parse_args(["metric", "--from", r#"{"zn":[0,1]}"#, "--to", r#"{"zprime":[],"zn":[0,2]}"#]).unwrap();
        let mut out = Vec::new();
        let mut err = Vec::new();
        assert_eq!(run_with(&cfg, &mut out, &mut err), EXIT_IO);
        assert!(String::from_utf8(err).unwrap().contains("schema error"));
    }
}

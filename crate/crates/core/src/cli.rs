//! Command-line front end. [`run`] returns the process exit status:
//! 2 malformed input or usage, 3 boundary or tie problems in the data,
//! 4 numerical inversion failure, 5 bad study configuration.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gofstats::{component_scores, two_sample_permutation, Family, TestSpec, BOUNDARY_EPS};
use crate::io::{parse_null_spec, parse_sample_lines, to_json, write_critical_table, write_power_curve, CriticalRow, NullSpec};
use crate::mcharness::{estimate_critical_many, run_power_study, PowerStudyConfig};
use crate::nulldist::{critical_value, mgf, null_cdf, null_pdf, p_value, MgfMethod};

/// Study configurations shipped with the binary, addressable by name.
pub const BUNDLED_CONFIGS: [(&str, &str); 1] = [("fig_normal1", include_str!("../configs/fig_normal1.toml"))];

#[derive(Parser, Debug, Serialize)]
#[command(name = "iemgof", version, about = "Goodness-of-fit tests from m-fold integrated empirical processes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Test a sample (or two samples) and print a JSON report.
    Test(TestArgs),
    /// Write a table of critical values as CSV.
    Table(TableArgs),
    /// Run power studies from a config file or a bundled config name.
    Power(PowerArgs),
    /// Evaluate the limiting null law.
    Null(NullArgs),
}

fn parse_family(s: &str) -> std::result::Result<Family, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_null(s: &str) -> std::result::Result<NullSpec, String> {
    parse_null_spec(s).map_err(|e| e.to_string())
}

fn family_help() -> &'static str {
    "gad | gw | gw-star | gcvm | gcvm-star"
}

#[derive(Args, Debug, Serialize)]
pub struct TestArgs {
    /// Sample file: one value per line, '#' starts a comment.
    pub input: PathBuf,
    #[arg(long, value_parser = parse_family, help = family_help())]
    pub family: Family,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    /// `uniform` or `normal(MU,SIGMA)`; data are mapped through this CDF.
    #[arg(long, value_parser = parse_null, default_value = "uniform")]
    pub null: NullSpec,
    /// Second sample for the two-sample rank test (GAD family only).
    #[arg(long)]
    pub two_sample: Option<PathBuf>,
    #[arg(long, default_value_t = 9999)]
    pub permutations: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Move observations on 0 or 1 to within 1e-12 of the boundary instead
    /// of failing (GAD only needs this).
    #[arg(long)]
    pub clamp_boundary: bool,
    /// Number of component scores to report.
    #[arg(long, default_value_t = 6)]
    pub components: usize,
    /// Record wall time in the manifest (makes output run-dependent).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TableMethod {
    Analytic,
    Mc,
}

#[derive(Args, Debug, Serialize)]
pub struct TableArgs {
    #[arg(long, value_parser = parse_family, help = family_help())]
    pub family: Family,
    #[arg(long = "m-list", value_delimiter = ',', default_value = "1,2,3")]
    pub m_list: Vec<usize>,
    #[arg(long = "alpha-list", value_delimiter = ',', default_value = "0.1,0.05,0.01")]
    pub alpha_list: Vec<f64>,
    #[arg(long, value_enum, default_value_t = TableMethod::Analytic)]
    pub method: TableMethod,
    /// Sample size for the Monte Carlo method.
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 10000)]
    pub replicates: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output CSV path; stdout when absent. A manifest is written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub timing: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct PowerArgs {
    /// Path to a study config, or the name of a bundled config.
    #[arg(long)]
    pub config: String,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub timing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NullEval {
    Cdf,
    Pdf,
    Mgf,
    /// Upper tail probability.
    Sf,
    /// Upper critical value at level `--at`.
    Quantile,
}

#[derive(Args, Debug, Serialize)]
pub struct NullArgs {
    #[arg(long, value_parser = parse_family, help = family_help())]
    pub family: Family,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    #[arg(long, value_enum)]
    pub eval: NullEval,
    #[arg(long, allow_hyphen_values = true)]
    pub at: f64,
}

/// Everything needed to reproduce an output.
#[derive(Debug, Serialize)]
pub struct RunManifest<'a> {
    pub command: &'static str,
    pub config: &'a Command,
    pub seed: Option<u64>,
    pub version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_seconds: Option<f64>,
}

fn manifest<'a>(command: &'static str, config: &'a Command, seed: Option<u64>, timing: Option<Instant>) -> RunManifest<'a> {
    RunManifest {
        command,
        config,
        seed,
        version: env!("CARGO_PKG_VERSION"),
        wall_time_seconds: timing.map(|t| t.elapsed().as_secs_f64()),
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err.root() {
        Error::Boundary { .. } | Error::Tie { .. } | Error::OutOfDomain { .. } => 3,
        Error::Inversion(_) | Error::NonConvergence(_) | Error::Pole { .. } => 4,
        Error::Config(_) => 5,
        _ => 2,
    }
}

/// Observations of one input file with their source lines.
struct SampleFile {
    path: String,
    values: Vec<f64>,
    lines: Vec<usize>,
}

impl SampleFile {
    fn read(path: &Path) -> Result<Self> {
        let name = path.display().to_string();
        let text = fs::read_to_string(path)?;
        let (values, lines) = parse_sample_lines(&text).map_err(|e| match e {
            Error::Parse { line, .. } => Error::AtLine { path: name.clone(), line, source: Box::new(e) },
            e => e,
        })?;
        Ok(Self { path: name, values, lines })
    }

    /// Attach the source line to errors that point at one observation.
    fn locate(&self, err: Error) -> Error {
        let index = match &err {
            Error::Boundary { index, .. } | Error::NonFinite { index } => Some(*index),
            Error::OutOfDomain { value, .. } => self.values.iter().position(|v| v == value),
            Error::Tie { value } => self.values.iter().position(|v| v == value),
            _ => None,
        };
        match index {
            Some(i) => Error::AtLine { path: self.path.clone(), line: self.lines[i], source: Box::new(err) },
            None => err,
        }
    }
}

#[derive(Serialize)]
struct TestReport<'a> {
    family: Family,
    m: usize,
    n: usize,
    statistic: f64,
    p_value: f64,
    components: Vec<f64>,
    method: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    asymptotic_p_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sizes: Option<[usize; 2]>,
    manifest: RunManifest<'a>,
}

fn cmd_test(args: &TestArgs, command: &Command, out: &mut dyn Write) -> Result<()> {
    let start = args.timing.then(Instant::now);
    let spec = TestSpec::new(args.family, args.m)?;
    let xf = SampleFile::read(&args.input)?;
    let x = &xf.values;
    let report = if let Some(path) = &args.two_sample {
        if args.family != Family::Gad {
            return Err(Error::InvalidArgument("the two-sample test is defined for the gad family".into()));
        }
        let yf = SampleFile::read(path)?;
        let y = &yf.values;
        let perm = two_sample_permutation(x, y, args.m, args.permutations, args.seed)
            .map_err(|e| xf.locate(e))?;
        TestReport {
            family: args.family,
            m: args.m,
            n: x.len() + y.len(),
            statistic: perm.statistic,
            p_value: perm.p_value,
            components: Vec::new(),
            method: "permutation",
            // The rank statistic shares the one-sample limit law.
            asymptotic_p_value: Some(p_value(args.family, args.m, perm.statistic)?),
            sizes: Some([x.len(), y.len()]),
            manifest: manifest("test", command, Some(args.seed), start),
        }
    } else {
        let mut sample = args.null.transform(x).map_err(|e| xf.locate(e))?;
        if args.clamp_boundary {
            sample = sample.clamped(BOUNDARY_EPS);
        }
        let statistic = spec.statistic(&sample).map_err(|e| xf.locate(e))?;
        TestReport {
            family: args.family,
            m: args.m,
            n: sample.len(),
            statistic,
            p_value: p_value(args.family, args.m, statistic)?,
            components: component_scores(sample.values(), args.family, args.components)?,
            method: "asymptotic",
            asymptotic_p_value: None,
            sizes: None,
            manifest: manifest("test", command, None, start),
        }
    };
    writeln!(out, "{}", to_json(&report)?)?;
    Ok(())
}

fn cmd_table(args: &TableArgs, command: &Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let start = args.timing.then(Instant::now);
    let base = args.family.untruncated();
    let truncated = args.family.is_truncated();
    let mut rows = Vec::new();
    for &alpha in &args.alpha_list {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")));
        }
    }
    match args.method {
        TableMethod::Analytic => {
            for &m in &args.m_list {
                for &alpha in &args.alpha_list {
                    rows.push(CriticalRow {
                        family: base.name().into(),
                        m,
                        truncated,
                        alpha,
                        critical_value: critical_value(args.family, m, alpha)?,
                        method: "analytic".into(),
                        tolerance: 1e-8,
                    });
                }
            }
        }
        TableMethod::Mc => {
            let specs = args.m_list.iter().map(|&m| TestSpec::new(args.family, m)).collect::<Result<Vec<_>>>()?;
            for &alpha in &args.alpha_list {
                let est = estimate_critical_many(&specs, args.n, alpha, args.replicates, args.seed)?;
                for (spec, e) in specs.iter().zip(est) {
                    rows.push(CriticalRow {
                        family: base.name().into(),
                        m: spec.m,
                        truncated,
                        alpha,
                        critical_value: e.value,
                        method: "mc".into(),
                        tolerance: e.bootstrap_se,
                    });
                }
            }
        }
    }
    let man = to_json(&manifest("table", command, Some(args.seed), start))?;
    match &args.out {
        Some(path) => {
            write_critical_table(&rows, fs::File::create(path)?)?;
            fs::write(sidecar(path), man + "\n")?;
        }
        None => {
            write_critical_table(&rows, &mut *out)?;
            writeln!(err, "{man}")?;
        }
    }
    Ok(())
}

fn sidecar(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    path.with_file_name(name)
}

fn load_config(name: &str) -> Result<PowerStudyConfig> {
    let path = Path::new(name);
    let text = if path.exists() {
        fs::read_to_string(path).map_err(|e| Error::Config(format!("{name}: {e}")))?
    } else if let Some((_, text)) = BUNDLED_CONFIGS.iter().find(|(n, _)| *n == name) {
        (*text).to_string()
    } else {
        return Err(Error::Config(format!("no config file or bundled config named '{name}'")));
    };
    PowerStudyConfig::from_toml_str(&text)
}

#[derive(Serialize)]
struct PowerManifest<'a> {
    #[serde(flatten)]
    run: RunManifest<'a>,
    studies: &'a PowerStudyConfig,
    outputs: Vec<String>,
}

fn cmd_power(args: &PowerArgs, command: &Command, out: &mut dyn Write) -> Result<()> {
    let start = args.timing.then(Instant::now);
    let config = load_config(&args.config)?;
    let curves = run_power_study(&config)?;
    fs::create_dir_all(&args.out)?;
    let mut outputs = Vec::new();
    for curve in &curves {
        let file = format!("{}_{}_m{}.csv", curve.study, curve.family.name(), curve.m);
        write_power_curve(curve, fs::File::create(args.out.join(&file))?)?;
        outputs.push(file);
    }
    let man = PowerManifest { run: manifest("power", command, None, start), studies: &config, outputs };
    fs::write(args.out.join("manifest.json"), to_json(&man)? + "\n")?;
    for file in &man.outputs {
        writeln!(out, "{}", args.out.join(file).display())?;
    }
    Ok(())
}

fn cmd_null(args: &NullArgs, out: &mut dyn Write) -> Result<()> {
    TestSpec::new(args.family, args.m)?;
    let v = match args.eval {
        NullEval::Cdf => null_cdf(args.family, args.m, args.at)?,
        NullEval::Sf => p_value(args.family, args.m, args.at)?,
        NullEval::Pdf => null_pdf(args.family, args.m, args.at)?.value,
        NullEval::Mgf => mgf(args.family, args.m, Complex64::new(args.at, 0.0), MgfMethod::FiniteProduct)?.value.re,
        NullEval::Quantile => critical_value(args.family, args.m, args.at)?,
    };
    writeln!(out, "{v:.16e}")?;
    Ok(())
}

// Usage of the subcommand named on the command line, else of the whole tool.
fn usage_for(argv: &[std::ffi::OsString]) -> String {
    let mut cmd = Cli::command();
    cmd.build();
    let sub = argv.get(1).and_then(|a| a.to_str()).and_then(|name| cmd.find_subcommand_mut(name).cloned());
    let usage = match sub {
        Some(mut s) => s.render_usage(),
        None => cmd.render_usage(),
    };
    format!("{usage}\nFamilies: {}\n", family_help())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
                if !text.contains("Usage:") {
                    let _ = write!(err, "\n{}", usage_for(&argv));
                }
            } else {
                let _ = write!(out, "{text}");
            }
            return e.exit_code();
        }
    };
    let result = match &cli.command {
        Command::Test(a) => cmd_test(a, &cli.command, out),
        Command::Table(a) => cmd_table(a, &cli.command, out, err),
        Command::Power(a) => cmd_power(a, &cli.command, out),
        Command::Null(a) => cmd_null(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

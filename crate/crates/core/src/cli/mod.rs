//! The `retract-iter` command line: `run`, `certify`, `compare`, `demo` and
//! `validate`.
//!
//! Exit codes: 0 success, 1 configuration or input error, 2 numerical
//! failure during a run, 3 certification failure under `--strict` (and
//! in `demo`, which is always strict).

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::certify::{self, SampleSpec, MARGIN_TOL, RETRACTION_TOL};
use crate::diagnostics::{compute_bn_cn, rate_estimate};
use crate::iterate::{compare_schemes, run_scheme, IterTrace};
use crate::mappings::{apply, RetractionKind, DOMAIN_TOL};
use crate::space::{norm, Vector};
use crate::Error;

pub use config::{ConfigError, Experiment, NamedRun};
use output::{CertifyLine, SummaryLine};

/// Retraction checks compare every pair of points, so they use at most this
/// many samples.
pub const RETRACTION_SAMPLE_CAP: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExitStatus {
    Success,
    ConfigError,
    NumericalFailure,
    CertificationFailure,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Success => 0,
            ExitStatus::ConfigError => 1,
            ExitStatus::NumericalFailure => 2,
            ExitStatus::CertificationFailure => 3,
        }
    }
}

/// A failed command: the exit status plus a message for stderr.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandError {
    pub status: ExitStatus,
    pub message: String,
}

impl CommandError {
    fn config(message: impl Into<String>) -> Self {
        CommandError {
            status: ExitStatus::ConfigError,
            message: message.into(),
        }
    }
}

impl std::fmt::Display for CommandError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<ConfigError> for CommandError {
    fn from(e: ConfigError) -> Self {
        CommandError::config(e.0)
    }
}

/// Input problems exit 1; anything raised while evaluating mappings exits 2.
pub fn status_of(e: &Error) -> ExitStatus {
    match e {
        Error::InvalidInput(_)
        | Error::DimensionMismatch { .. }
        | Error::NotFound { .. }
        | Error::UnsupportedDimension(_)
        | Error::Parse(_) => ExitStatus::ConfigError,
        _ => ExitStatus::NumericalFailure,
    }
}

impl From<Error> for CommandError {
    fn from(e: Error) -> Self {
        CommandError {
            status: status_of(&e),
            message: e.to_string(),
        }
    }
}

type CmdResult<T> = std::result::Result<T, CommandError>;

fn io(message: String) -> CommandError {
    CommandError::config(message)
}

fn prepare_dir(dir: &Path) -> CmdResult<()> {
    fs::create_dir_all(dir).map_err(|e| io(format!("cannot create {}: {e}", dir.display())))
}

fn load(config: &Path, out: Option<&Path>) -> CmdResult<Experiment> {
    let mut exp = Experiment::load(config)?;
    if let Some(out) = out {
        exp.output.dir = out.to_path_buf();
    }
    Ok(exp)
}

fn single_run(exp: &Experiment) -> CmdResult<&NamedRun> {
    match exp.runs.as_slice() {
        [run] => Ok(run),
        runs => Err(CommandError::config(format!(
            "scheme: expected a single [scheme] table, found {}; use `compare` for several",
            runs.len()
        ))),
    }
}

fn write_trace(exp: &Experiment, trace: &IterTrace, stem: &str) -> CmdResult<Vec<PathBuf>> {
    let mut written = Vec::new();
    if exp.output.emit_csv {
        let p = exp.output.dir.join(format!("{stem}.csv"));
        output::write_trace_csv(&p, trace).map_err(io)?;
        written.push(p);
    }
    if exp.output.emit_svg {
        let p = exp.output.dir.join(format!("{stem}.svg"));
        output::write_trace_svg(&p, trace).map_err(io)?;
        written.push(p);
    }
    Ok(written)
}

/// What `run` produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub trace: IterTrace,
    pub certification: Option<Vec<CertifyLine>>,
    pub written: Vec<PathBuf>,
}

/// Runs the single scheme of `config`, writing `trace.csv` and `trace.svg`
/// (and `certify.csv` when `certify.enabled`) into the output directory.
pub fn cmd_run(config: &Path, out: Option<&Path>) -> CmdResult<RunOutcome> {
    let exp = load(config, out)?;
    run_experiment(&exp)
}

pub fn run_experiment(exp: &Experiment) -> CmdResult<RunOutcome> {
    let run = single_run(exp)?;
    let trace = run_scheme(&run.cfg, &exp.pair, run.reference_p.as_ref())?;
    prepare_dir(&exp.output.dir)?;
    let mut written = write_trace(exp, &trace, "trace")?;
    let certification = if exp.certify.enabled {
        let lines = certify_experiment(exp)?;
        let p = exp.output.dir.join("certify.csv");
        output::write_certify_csv(&p, &lines).map_err(io)?;
        written.push(p);
        Some(lines)
    } else {
        None
    };
    Ok(RunOutcome {
        trace,
        certification,
        written,
    })
}

fn witness_cols(w: Option<certify::Witness>) -> (Option<Vector>, Option<Vector>) {
    match w {
        Some(w) => (Some(w.x), w.y),
        None => (None, None),
    }
}

fn per_n_lines(
    name: &str,
    report: certify::CertReport,
    pass_row: impl Fn(f64) -> bool,
) -> Vec<CertifyLine> {
    report
        .per_n
        .into_iter()
        .map(|row| {
            let (worst_x, worst_y) = witness_cols(row.worst);
            CertifyLine {
                check: name.to_string(),
                n: Some(row.n),
                pass: pass_row(row.value),
                value: row.value,
                worst_x,
                worst_y,
            }
        })
        .collect()
}

fn summary_line(name: &str, report: certify::CertReport) -> CertifyLine {
    let (worst_x, worst_y) = witness_cols(report.worst);
    CertifyLine {
        check: name.to_string(),
        n: None,
        value: report.margin,
        worst_x,
        worst_y,
        pass: report.verdict.passed(),
    }
}

/// Points for the retraction checks. An identity-on retraction is only
/// ever applied to `K` and the images `T₁(K)`, `T₂(K)`, so those are the
/// points checked; other retractions are probed on an enlarged box.
fn retraction_points(exp: &Experiment, spec: &SampleSpec) -> crate::Result<Vec<Vector>> {
    let capped = SampleSpec {
        count: spec.count.min(RETRACTION_SAMPLE_CAP),
        ..spec.clone()
    };
    if exp.pair.p.kind != RetractionKind::IdentityOn {
        return capped.exterior()?.points();
    }
    let base = SampleSpec {
        count: (capped.count / 3).max(2),
        ..capped
    }
    .points()?;
    let mut pts = base.clone();
    for m in [&exp.pair.t1, &exp.pair.t2] {
        for x in &base {
            pts.push(apply(m, x)?);
        }
    }
    Ok(pts)
}

/// Every sampled check applicable to the experiment, as `certify.csv` rows.
pub fn certify_experiment(exp: &Experiment) -> crate::Result<Vec<CertifyLine>> {
    let c = &exp.certify;
    let pair = &exp.pair;
    let spec = SampleSpec::new(c.samples, c.seed, pair.domain().clone()).with_norm(pair.norm);
    let mut lines = Vec::new();

    let retraction = certify::check_retraction_on(
        &pair.p,
        &retraction_points(exp, &spec)?,
        &c.t_grid,
        pair.norm,
    )?;
    for (name, metric) in retraction.metrics() {
        let (worst_x, worst_y) = witness_cols(metric.worst.clone());
        lines.push(CertifyLine {
            check: format!("retraction.{name}"),
            n: None,
            value: metric.value,
            worst_x,
            worst_y,
            pass: metric.value <= RETRACTION_TOL,
        });
    }

    for (label, m) in [("t1", &pair.t1), ("t2", &pair.t2)] {
        let kn = certify::estimate_kn(m, &pair.p, &spec, c.n_max)?;
        let settles = kn.verdict.passed();
        lines.extend(per_n_lines(&format!("{label}.estimate_kn"), kn, |_| {
            settles
        }));
        let total = certify::check_total(m, &pair.p, &c.mu, &c.lambda, c.phi, &spec, c.n_max)?;
        lines.extend(per_n_lines(&format!("{label}.check_total"), total, |v| {
            v <= MARGIN_TOL
        }));
        if pair.dim() == 1 {
            let r = certify::check_weakly_inward_1d(m)?;
            let (excess, at) = if r.lo - r.t_lo >= r.t_hi - r.hi {
                (r.lo - r.t_lo, r.lo)
            } else {
                (r.t_hi - r.hi, r.hi)
            };
            lines.push(CertifyLine {
                check: format!("{label}.weakly_inward"),
                n: None,
                value: excess,
                worst_x: Some(Vector::scalar(at)?),
                worst_y: None,
                pass: r.verdict.passed(),
            });
        }
        if let Some(f) = &c.fixed_points {
            for row in certify::check_fixed_transfer(m, &pair.p, f, DOMAIN_TOL)? {
                lines.push(CertifyLine {
                    check: format!("{label}.fixed_transfer"),
                    n: None,
                    value: row.t_residual,
                    pass: row.agree(),
                    worst_x: Some(row.x),
                    worst_y: None,
                });
            }
        }
    }

    lines.push(summary_line(
        "phi_growth",
        certify::check_phi_growth(c.phi, c.m_const, c.m_star)?,
    ));
    if let Some(f) = &c.fixed_points {
        lines.push(summary_line(
            "condition_aprime",
            certify::check_condition_aprime(pair, c.condition_f, f, &spec)?,
        ));
    }

    for run in &exp.runs {
        let Some(p) = &run.reference_p else { continue };
        let trace = run_scheme(&run.cfg, pair, Some(p))?;
        lines.push(recursive_bound_line(&run.name, &trace, exp)?);
    }
    Ok(lines)
}

/// Largest excess of `a_{n+1}` over `(1 + b_n) a_n + c_n`, with
/// `a_n = ‖x_n − p‖`.
fn recursive_bound_line(
    name: &str,
    trace: &IterTrace,
    exp: &Experiment,
) -> crate::Result<CertifyLine> {
    let c = &exp.certify;
    let a = trace.dist_p().unwrap_or_default();
    let mut worst = f64::NEG_INFINITY;
    let mut at = None;
    for n in 1..a.len() {
        let (b, cn) = compute_bn_cn(&c.mu, &c.lambda, c.m_const, c.m_star, c.phi, n)?;
        let excess = a[n] - ((1.0 + b) * a[n - 1] + cn);
        if excess > worst {
            worst = excess;
            at = Some(n);
        }
    }
    let worst = if at.is_some() { worst } else { 0.0 };
    Ok(CertifyLine {
        check: format!("{name}.recursive_bound"),
        n: at,
        value: worst,
        worst_x: at.map(|n| trace.rows[n - 1].x.clone()),
        worst_y: None,
        pass: worst <= MARGIN_TOL,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertifyOutcome {
    pub lines: Vec<CertifyLine>,
    pub path: PathBuf,
}

impl CertifyOutcome {
    pub fn failures(&self) -> usize {
        self.lines.iter().filter(|l| !l.pass).count()
    }
}

/// Runs every check and writes `certify.csv`. Failures are reported in the
/// file; under `strict` they also produce exit status 3.
pub fn cmd_certify(config: &Path, out: Option<&Path>, strict: bool) -> CmdResult<CertifyOutcome> {
    let exp = load(config, out)?;
    let lines = certify_experiment(&exp)?;
    prepare_dir(&exp.output.dir)?;
    let path = exp.output.dir.join("certify.csv");
    output::write_certify_csv(&path, &lines).map_err(io)?;
    let outcome = CertifyOutcome { lines, path };
    if strict && outcome.failures() > 0 {
        return Err(CommandError {
            status: ExitStatus::CertificationFailure,
            message: format!(
                "{} of {} certification rows failed; see {}",
                outcome.failures(),
                outcome.lines.len(),
                outcome.path.display()
            ),
        });
    }
    Ok(outcome)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareOutcome {
    pub summary: Vec<SummaryLine>,
    pub traces: Vec<Option<IterTrace>>,
    /// Worst status over all schemes.
    pub status: ExitStatus,
}

/// Runs every `[[scheme]]` block from the same `x1`. Writes
/// `trace_<name>.csv` per scheme and `summary.csv`; a failed scheme is
/// recorded in the summary without stopping the others.
pub fn cmd_compare(config: &Path, out: Option<&Path>) -> CmdResult<CompareOutcome> {
    let exp = load(config, out)?;
    if exp.runs.len() < 2 {
        return Err(CommandError::config(format!(
            "scheme: compare needs at least two [[scheme]] blocks, found {}",
            exp.runs.len()
        )));
    }
    let first = &exp.runs[0];
    for (i, r) in exp.runs.iter().enumerate().skip(1) {
        if r.cfg.x1 != first.cfg.x1 {
            return Err(CommandError::config(format!(
                "scheme[{i}].x1: compared schemes must share x1 ([{}] vs [{}])",
                r.cfg.x1, first.cfg.x1
            )));
        }
        if r.reference_p != first.reference_p {
            return Err(CommandError::config(format!(
                "scheme[{i}].reference_p: compared schemes must share reference_p"
            )));
        }
    }
    let cfgs: Vec<_> = exp.runs.iter().map(|r| r.cfg.clone()).collect();
    let results = compare_schemes(&cfgs, &exp.pair, first.reference_p.as_ref());
    prepare_dir(&exp.output.dir)?;

    let mut summary = Vec::new();
    let mut traces = Vec::new();
    let mut status = ExitStatus::Success;
    for (run, result) in exp.runs.iter().zip(results) {
        match result {
            Ok(trace) => {
                write_trace(&exp, &trace, &format!("trace_{}", run.name))?;
                summary.push(SummaryLine {
                    scheme: run.name.clone(),
                    iterations: Some(trace.len()),
                    terminal_reason: trace.terminal.to_string(),
                    final_r_max: Some(trace.final_r_max()),
                    rate_rho: rate_estimate(&trace).ok().and_then(|r| r.rho()),
                });
                traces.push(Some(trace));
            }
            Err(e) => {
                let s = status_of(&e);
                eprintln!("{}: {e}", run.name);
                status = status.max(s);
                summary.push(SummaryLine {
                    scheme: run.name.clone(),
                    iterations: None,
                    terminal_reason: if s == ExitStatus::ConfigError {
                        "invalid-input"
                    } else {
                        "numerical-failure"
                    }
                    .into(),
                    final_r_max: None,
                    rate_rho: None,
                });
                traces.push(None);
            }
        }
    }
    output::write_summary_csv(&exp.output.dir.join("summary.csv"), &summary).map_err(io)?;
    Ok(CompareOutcome {
        summary,
        traces,
        status,
    })
}

/// The built-in demonstration: the two Example mappings on `[−1, 1]` with
/// `P` the identity on `K`, started from `x₁ = 1`.
pub const DEMO_CONFIG: &str = r#"[space]
dim = 1
norm = "euclidean"

[domain]
kind = "interval"
lo = -1.0
hi = 1.0

[mappings]
t1 = { builtin = "paper_t1" }
t2 = { builtin = "paper_t2" }
retraction = { kind = "identity" }

[scheme]
kind = "paper_b"
alpha = { constant = 0.5 }
beta = { constant = 0.5 }
x1 = [1.0]
max_iter = 500
residual_tol = 1e-8

[certify]
enabled = true
samples = 2000
seed = 42
n_max = 10
fixed_points = [[0.0]]

[output]
dir = "."
"#;

pub const DEMO_DIR: &str = "retract-iter-demo";

#[derive(Debug, Clone, PartialEq)]
pub struct DemoOutcome {
    pub run: RunOutcome,
    pub dir: PathBuf,
}

/// Writes `config.toml`, `trace.csv`, `trace.svg` and `certify.csv` for the
/// built-in demonstration into `out` (default [`DEMO_DIR`]).
pub fn cmd_demo(out: Option<&Path>) -> CmdResult<DemoOutcome> {
    let dir = out.map_or_else(|| PathBuf::from(DEMO_DIR), Path::to_path_buf);
    let exp = Experiment::from_toml(DEMO_CONFIG, &dir)?;
    prepare_dir(&dir)?;
    fs::write(dir.join("config.toml"), DEMO_CONFIG)
        .map_err(|e| io(format!("cannot write {}: {e}", dir.display())))?;
    let run = run_experiment(&exp)?;
    Ok(DemoOutcome { run, dir })
}

/// Checks a CSV written by this tool.
pub fn cmd_validate(csv: &Path) -> CmdResult<(output::CsvKind, usize)> {
    output::validate_csv(csv).map_err(CommandError::config)
}

#[derive(Debug, Parser)]
#[command(
    name = "retract-iter",
    version,
    about = "Two-mapping retraction iterations and their certificates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the configured scheme and write its trace.
    Run {
        config: PathBuf,
        /// Output directory, overriding `output.dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the sampled certification checks.
    Certify {
        config: PathBuf,
        /// Exit with status 3 when any check fails.
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run several [[scheme]] blocks from the same start and summarise.
    Compare {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run and certify the built-in two-mapping example.
    Demo {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a trace, certify or summary CSV.
    Validate { csv: PathBuf },
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |v| format!("{v:.3e}"))
}

fn print_trace(trace: &IterTrace) {
    let last = trace.rows.last();
    println!(
        "{}: {} iterations, terminal {}, final r_max {:.3e}",
        trace.scheme.name(),
        trace.len(),
        trace.terminal,
        trace.final_r_max()
    );
    println!(
        "x_N = [{}]",
        last.map_or_else(|| trace.final_x.clone(), |r| r.x.clone())
    );
}

fn print_certification(lines: &[CertifyLine]) {
    let failed: Vec<&CertifyLine> = lines.iter().filter(|l| !l.pass).collect();
    println!(
        "certification: {} rows, {} failed",
        lines.len(),
        failed.len()
    );
    for l in failed {
        let n = l.n.map(|n| format!(" n={n}")).unwrap_or_default();
        println!("  fail {}{n}: {:.6e}", l.check, l.value);
    }
}

fn print_kn(lines: &[CertifyLine]) {
    for label in ["t1", "t2"] {
        let check = format!("{label}.estimate_kn");
        let vals: Vec<String> = lines
            .iter()
            .filter(|l| l.check == check)
            .map(|l| format!("{:.4}", l.value))
            .collect();
        if !vals.is_empty() {
            println!("k_n estimate for {label}: [{}]", vals.join(", "));
        }
    }
}

fn report(result: CmdResult<ExitStatus>) -> ExitStatus {
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.status
    })
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> ExitStatus
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitStatus::ConfigError
            } else {
                ExitStatus::Success
            };
        }
    };
    report(match cli.command {
        Command::Run { config, out } => cmd_run(&config, out.as_deref()).map(|o| {
            print_trace(&o.trace);
            if let Some(lines) = &o.certification {
                print_certification(lines);
            }
            for p in &o.written {
                println!("wrote {}", p.display());
            }
            ExitStatus::Success
        }),
        Command::Certify {
            config,
            strict,
            out,
        } => cmd_certify(&config, out.as_deref(), strict).map(|o| {
            print_certification(&o.lines);
            println!("wrote {}", o.path.display());
            ExitStatus::Success
        }),
        Command::Compare { config, out } => cmd_compare(&config, out.as_deref()).map(|o| {
            println!(
                "{:<16} {:>10} {:<18} {:>12} {:>10}",
                "scheme", "iterations", "terminal", "final_r_max", "rho"
            );
            for s in &o.summary {
                println!(
                    "{:<16} {:>10} {:<18} {:>12} {:>10}",
                    s.scheme,
                    s.iterations.map_or_else(|| "-".into(), |n| n.to_string()),
                    s.terminal_reason,
                    fmt_opt(s.final_r_max),
                    fmt_opt(s.rate_rho)
                );
            }
            o.status
        }),
        Command::Demo { out } => cmd_demo(out.as_deref()).and_then(|o| {
            print_trace(&o.run.trace);
            let x_n = o.run.trace.rows.last().map_or(f64::NAN, |r| {
                norm(&r.x, o.run.trace.norm).unwrap_or(f64::NAN)
            });
            println!("|x_N| = {x_n:e}");
            let lines = o.run.certification.unwrap_or_default();
            print_kn(&lines);
            print_certification(&lines);
            println!("wrote {}", o.dir.display());
            if lines.iter().all(|l| l.pass) {
                Ok(ExitStatus::Success)
            } else {
                Err(CommandError {
                    status: ExitStatus::CertificationFailure,
                    message: "demo certification failed".into(),
                })
            }
        }),
        Command::Validate { csv } => cmd_validate(&csv).map(|(kind, rows)| {
            println!("{}: valid {} csv, {rows} rows", csv.display(), kind.name());
            ExitStatus::Success
        }),
    })
}

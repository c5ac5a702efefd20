//! The `hybrid-ep` command line: declarative experiment runs, scheme
//! comparison, contract checkers, one-off resolvent solves, and
//! certification of saved traces.
//!
//! Exit codes: 0 success, 1 spec or usage error, 2 iteration cap reached,
//! 3 inner solver failure, 4 a checked property is violated.

mod output;
mod spec;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::diagnostics::{certify, CertificateReport, CertifyOptions};
use crate::equilibrium::{check_axioms, ResolventRequest};
use crate::error::{Error, Result};
use crate::hilbert::Vector;
use crate::mappings::{classify, is_quasi_nonexpansive, ClassReport, OperatorClass};
use crate::schemes::{compare, run_with_mode, Scheme, TerminalStatus, Trace};

pub use output::{compare_csv, float, plotdata_csv, to_json, trace_csv, trace_header, write_atomic};
pub use spec::{load, BifunctionCheckSpec, ExperimentSpec, MappingCheckSpec, Output, ResolventSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SPEC_ERROR: i32 = 1;
pub const EXIT_MAX_ITER: i32 = 2;
pub const EXIT_SOLVER_FAILURE: i32 = 3;
pub const EXIT_VIOLATION: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "hybrid-ep", version, about = "Modified Ishikawa iteration for equilibrium problems and generalized hybrid mappings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scheme and write the requested outputs.
    Run(CommonArgs),
    /// Run several schemes from the same start and write a comparison table.
    Compare(CommonArgs),
    /// Sample a mapping against operator-class inequalities.
    CheckMapping(CommonArgs),
    /// Sample a bifunction against conditions A1-A4.
    CheckBifunction(CommonArgs),
    /// Evaluate the resolvent T_r x.
    Resolvent(ResolventArgs),
    /// Apply the diagnostics suite to a saved JSON trace.
    Certify(CertifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Trace file format for run/compare; report format on stdout otherwise.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct ResolventArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub r: Option<f64>,
    /// Comma-separated coordinates.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Trace written by `run` with the trace-json output.
    #[arg(long)]
    pub trace: PathBuf,
}

struct Io<'a> {
    stdout: &'a mut dyn Write,
}

impl Io<'_> {
    fn print(&mut self, text: &str) -> Result<()> {
        self.stdout
            .write_all(text.as_bytes())
            .map_err(|e| Error::InvalidParameter(format!("cannot write to stdout: {e}")))
    }
}

/// Parses `args` (including the program name) and executes the command.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let informational = matches!(
                err.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let rendered = err.render().to_string();
            if informational {
                let _ = stdout.write_all(rendered.as_bytes());
                return EXIT_OK;
            }
            let _ = stderr.write_all(rendered.as_bytes());
            return EXIT_SPEC_ERROR;
        }
    };
    execute(&cli, stdout, stderr)
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let mut io = Io { stdout };
    let result = match &cli.command {
        Command::Run(args) => cmd_run(args, &mut io),
        Command::Compare(args) => cmd_compare(args, &mut io),
        Command::CheckMapping(args) => cmd_check_mapping(args, &mut io),
        Command::CheckBifunction(args) => cmd_check_bifunction(args, &mut io),
        Command::Resolvent(args) => cmd_resolvent(args, &mut io),
        Command::Certify(args) => cmd_certify(args, &mut io),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            let _ = stderr.write_all(error_json(&err).as_bytes());
            match err {
                Error::InnerSolver { .. } | Error::ProjectionNotConverged { .. } | Error::SingularSystem => {
                    EXIT_SOLVER_FAILURE
                }
                _ => EXIT_SPEC_ERROR,
            }
        }
    }
}

fn error_kind(err: &Error) -> &'static str {
    match err {
        Error::DimensionMismatch { .. } => "dimension_mismatch",
        Error::EmptyVector => "empty_vector",
        Error::NonFinite { .. } => "non_finite",
        Error::InvalidSet(_) => "invalid_set",
        Error::InvalidParameter(_) => "invalid_parameter",
        Error::ProjectionNotConverged { .. } => "projection_not_converged",
        Error::OutsideDomain { .. } => "outside_domain",
        Error::SamplerFailure { .. } => "sampler_failure",
        Error::InnerSolver { .. } => "inner_solver_failure",
        Error::StrategyMismatch { .. } => "strategy_mismatch",
        Error::SingularSystem => "singular_system",
        Error::NotFixedPoint { .. } => "not_fixed_point",
        Error::NotCertified(_) => "not_certified",
        Error::NeedsFixedPoint(_) => "needs_fixed_point",
        Error::Schedule(_) => "schedule_violation",
        Error::SchemeNotApplicable { .. } => "scheme_not_applicable",
        Error::MissingIterates => "missing_iterates",
    }
}

/// Machine-readable error for stderr.
pub fn error_json(err: &Error) -> String {
    let mut value = json!({ "error": error_kind(err), "message": err.to_string() });
    if let Error::Schedule(violation) = err {
        value["condition"] = serde_json::to_value(violation.condition).expect("serializable");
        value["statement"] = json!(violation.condition.statement());
        value["n"] = json!(violation.n);
    }
    let mut text = value.to_string();
    text.push('\n');
    text
}

fn out_dir(args: &CommonArgs) -> &Path {
    args.out.as_deref().unwrap_or(Path::new("."))
}

fn outputs_for(spec: &ExperimentSpec, format: Option<Format>) -> Vec<Output> {
    let mut outputs = spec.outputs.clone();
    if let Some(format) = format {
        outputs.retain(|o| !matches!(o, Output::TraceCsv | Output::TraceJson));
        outputs.insert(0, if format == Format::Csv { Output::TraceCsv } else { Output::TraceJson });
    }
    outputs
}

fn certify_options(spec: &ExperimentSpec) -> CertifyOptions {
    CertifyOptions {
        seed: spec.seed,
        stop_tol: Some(spec.stop.residual_tol),
        ..CertifyOptions::default()
    }
}

/// Writes `outputs` for one trace; `stem` prefixes every file name.
fn write_trace_outputs(
    dir: &Path,
    stem: &str,
    trace: &Trace,
    spec: &ExperimentSpec,
    outputs: &[Output],
) -> Result<Vec<String>> {
    let mut written = Vec::new();
    for output in outputs {
        let (name, contents) = match output {
            Output::TraceCsv => (format!("{stem}.csv"), trace_csv(trace)),
            Output::TraceJson => (format!("{stem}.json"), to_json(trace)),
            Output::PlotdataCsv => (format!("{stem}_plotdata.csv"), plotdata_csv(trace)),
            Output::ReportJson => {
                let report = certify(trace, &spec.problem, &certify_options(spec));
                (format!("{stem}_report.json"), to_json(&report))
            }
        };
        write_atomic(&dir.join(&name), &contents)?;
        written.push(name);
    }
    Ok(written)
}

fn status_code(status: TerminalStatus) -> i32 {
    match status {
        TerminalStatus::Converged => EXIT_OK,
        TerminalStatus::MaxIter => EXIT_MAX_ITER,
        TerminalStatus::InnerSolverFailure => EXIT_SOLVER_FAILURE,
    }
}

fn cmd_run(args: &CommonArgs, io: &mut Io) -> Result<i32> {
    let mut spec: ExperimentSpec = load(&args.spec)?;
    spec.apply_overrides(args.seed, args.max_iter, args.tol);
    let scheme = spec
        .scheme
        .ok_or_else(|| Error::InvalidParameter("run needs a `scheme`".into()))?;
    let trace = run_with_mode(&spec.problem, scheme, &spec.schedule, &spec.stop, &spec.x1, spec.trace_mode)?;
    let files = write_trace_outputs(out_dir(args), "trace", &trace, &spec, &outputs_for(&spec, args.format))?;
    io.print(&to_json(&json!({
        "scheme": scheme,
        "status": trace.status,
        "iterations": trace.len(),
        "final_x": trace.final_x,
        "failure": trace.failure,
        "advisories": trace.advisories,
        "files": files,
    })))?;
    Ok(status_code(trace.status))
}

fn cmd_compare(args: &CommonArgs, io: &mut Io) -> Result<i32> {
    let mut spec: ExperimentSpec = load(&args.spec)?;
    spec.apply_overrides(args.seed, args.max_iter, args.tol);
    let schemes = if spec.schemes.is_empty() {
        Scheme::ALL.to_vec()
    } else {
        spec.schemes.clone()
    };
    let (rows, traces) = compare(&spec.problem, &schemes, &spec.schedule, &spec.stop, &spec.x1);
    let dir = out_dir(args);
    let outputs = outputs_for(&spec, args.format);
    for (i, trace) in traces.iter().enumerate() {
        if let Some(trace) = trace {
            let stem = format!("trace_{:02}_{}", i + 1, trace.scheme.name());
            write_trace_outputs(dir, &stem, trace, &spec, &outputs)?;
        }
    }
    write_atomic(&dir.join("comparison.csv"), &compare_csv(&rows, spec.x1.dim()))?;
    io.print(&to_json(&rows))?;
    Ok(EXIT_OK)
}

fn write_report(args: &CommonArgs, name: &str, json_text: &str) -> Result<()> {
    match &args.out {
        Some(dir) => write_atomic(&dir.join(name), json_text),
        None => Ok(()),
    }
}

fn class_reports_csv(reports: &[ClassReport]) -> String {
    let mut out = String::from("class,pairs_tested,worst_residual,worst_violation,tol,consistent\n");
    for r in reports {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.class_name,
            r.pairs_tested,
            float(r.worst_residual),
            float(r.worst_violation),
            float(r.tol),
            r.is_consistent()
        ));
    }
    out
}

fn cmd_check_mapping(args: &CommonArgs, io: &mut Io) -> Result<i32> {
    let spec: MappingCheckSpec = load(&args.spec)?;
    let seed = args.seed.unwrap_or(spec.seed);
    let tol = args.tol.unwrap_or(spec.tol);
    let mut reports = Vec::with_capacity(spec.classes.len());
    for class in &spec.classes {
        let report = match class {
            OperatorClass::QuasiNonexpansive => {
                let p = spec
                    .fixed_point
                    .as_ref()
                    .ok_or(Error::NeedsFixedPoint("quasi-nonexpansive"))?;
                is_quasi_nonexpansive(&spec.mapping, p, seed, spec.n_pairs, tol)?
            }
            class => classify(&spec.mapping, class, seed, spec.n_pairs, tol)?,
        };
        reports.push(report);
    }
    let json_text = to_json(&reports);
    write_report(args, "mapping_check.json", &json_text)?;
    match args.format {
        Some(Format::Csv) => io.print(&class_reports_csv(&reports))?,
        _ => io.print(&json_text)?,
    }
    Ok(if reports.iter().all(ClassReport::is_consistent) { EXIT_OK } else { EXIT_VIOLATION })
}

fn cmd_check_bifunction(args: &CommonArgs, io: &mut Io) -> Result<i32> {
    let spec: BifunctionCheckSpec = load(&args.spec)?;
    let seed = args.seed.unwrap_or(spec.seed);
    let tol = args.tol.unwrap_or(spec.tol);
    let report = check_axioms(&spec.bifunction, seed, spec.n_samples, &spec.t_grid, tol)?;
    let json_text = to_json(&report);
    write_report(args, "bifunction_check.json", &json_text)?;
    match args.format {
        Some(Format::Csv) => {
            let mut out = String::from("axiom,passed,worst_excess\n");
            for c in &report.checks {
                out.push_str(&format!("{:?},{},{}\n", c.axiom, c.passed, float(c.worst_excess)));
            }
            io.print(&out)?;
        }
        _ => io.print(&json_text)?,
    }
    Ok(if report.all_passed() { EXIT_OK } else { EXIT_VIOLATION })
}

fn cmd_resolvent(args: &ResolventArgs, io: &mut Io) -> Result<i32> {
    let spec: ResolventSpec = load(&args.common.spec)?;
    let r = args
        .r
        .or(spec.r)
        .ok_or_else(|| Error::InvalidParameter("resolvent needs `r`".into()))?;
    let x = match &args.x {
        Some(coords) => Vector::new(coords.clone())?,
        None => spec
            .x
            .clone()
            .ok_or_else(|| Error::InvalidParameter("resolvent needs `x`".into()))?,
    };
    let set = spec.set.clone().unwrap_or_else(|| spec.bifunction.domain.clone());
    let mut request = ResolventRequest::new(spec.bifunction.clone(), set, r, x);
    request.strategy = spec.strategy.clone();
    request.verify = spec.verify;
    if let Some(seed) = args.common.seed {
        let mut verify = request.verify.unwrap_or_default();
        verify.seed = seed;
        request.verify = Some(verify);
    }
    let result = request.solve()?;
    let json_text = to_json(&json!({
        "z": result.z,
        "achieved_residual": result.achieved_residual,
        "error_bound": result.error_bound,
        "strategy": result.strategy_used,
        "inner_iterations": result.inner_iterations,
    }));
    write_report(&args.common, "resolvent.json", &json_text)?;
    match args.common.format {
        Some(Format::Csv) => {
            let mut header = (1..=result.z.dim()).map(|i| format!("z_{i}")).collect::<Vec<_>>();
            header.extend(["error_bound", "inner_iterations"].map(String::from));
            let mut line = result.z.as_slice().iter().map(|v| float(*v)).collect::<Vec<_>>();
            line.push(float(result.error_bound));
            line.push(result.inner_iterations.to_string());
            io.print(&format!("{}\n{}\n", header.join(","), line.join(",")))?;
        }
        _ => io.print(&json_text)?,
    }
    Ok(EXIT_OK)
}

fn report_csv(report: &CertificateReport) -> String {
    let mut out = String::from("check,passed,worst_index,worst_margin\n");
    for c in &report.checks {
        let index = c.worst_index.map(|i| i.to_string()).unwrap_or_default();
        out.push_str(&format!("{},{},{},{}\n", c.name, c.passed, index, float(c.worst_margin)));
    }
    out
}

fn cmd_certify(args: &CertifyArgs, io: &mut Io) -> Result<i32> {
    let mut spec: ExperimentSpec = load(&args.common.spec)?;
    spec.apply_overrides(args.common.seed, None, args.common.tol);
    let trace: Trace = load(&args.trace)?;
    let report = certify(&trace, &spec.problem, &certify_options(&spec));
    let json_text = to_json(&report);
    write_report(&args.common, "report.json", &json_text)?;
    match args.common.format {
        Some(Format::Csv) => io.print(&report_csv(&report))?,
        _ => io.print(&json_text)?,
    }
    Ok(if report.verdict { EXIT_OK } else { EXIT_VIOLATION })
}

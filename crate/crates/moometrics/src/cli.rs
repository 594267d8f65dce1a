//! Command-line front end: argument parsing, input loading, report
//! emission, and exit codes.
//!
//! Exit codes: 0 when every configured gate passes, 1 when the report
//! contains violations, 2 for any input, parse, or config problem.
//! Diagnostics and violation summaries go to the error stream; the
//! rendered report goes to the output stream or to `--out`. Nothing else
//! is written to disk apart from the optional symbol-listing sidecar.
//!
//! [`run`] takes the argument vector and both streams explicitly, so
//! tests can drive the whole binary in memory.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::coverage::{entry_warnings, ChecklistError, CoverageError};
use crate::design::WmcWeighting;
use crate::frontend::{lower, parse_unit, symbol_listing, SourceUnit};
use crate::ingest::{
    read_checklist_facts, read_requirements, read_trace, read_usecases, IngestError,
};
use crate::model::{CoverageTrace, DesignModel};
use crate::report::{
    checklist_section, coverage_section, design_section, evaluate, read_config, render,
    requirements_section, AnalysisResults, DesignOptions, ReportFormat, ThresholdConfig, Verdict,
};
use crate::value::MetricError;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VIOLATIONS: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;

#[derive(Parser)]
#[command(
    name = "moometrics",
    version,
    about = "Quality metrics and gates for MiniOO projects"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse MiniOO sources and report the design metrics.
    Analyze(AnalyzeArgs),
    /// Report requirement-set metrics, plus use-case counts with --ucm.
    Requirements(RequirementsArgs),
    /// Report execution coverage of MiniOO sources from trace files.
    Coverage(CoverageArgs),
    /// Full run over all supplied inputs, gated by a threshold config.
    Check(CheckArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Markdown,
}

impl From<Format> for ReportFormat {
    fn from(format: Format) -> Self {
        match format {
            Format::Json => ReportFormat::Json,
            Format::Csv => ReportFormat::Csv,
            Format::Markdown => ReportFormat::Markdown,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum WmcWeight {
    Cyclomatic,
    Unit,
}

impl From<WmcWeight> for WmcWeighting {
    fn from(weight: WmcWeight) -> Self {
        match weight {
            WmcWeight::Cyclomatic => WmcWeighting::Cyclomatic,
            WmcWeight::Unit => WmcWeighting::Unit,
        }
    }
}

#[derive(Args)]
struct OutputOptions {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Treat gated metrics that are not applicable as violations.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// MiniOO files or directories (searched recursively for `.moo`).
    #[arg(required = true)]
    sources: Vec<PathBuf>,
    /// Weight per method in WMC: decision-point count plus one, or one.
    #[arg(long, value_enum, default_value_t = WmcWeight::Cyclomatic)]
    wmc_weight: WmcWeight,
    /// Count incoming references in CBO as well as outgoing ones.
    #[arg(long)]
    cbo_fan_in: bool,
    /// Write the id-to-source symbol listing to this file.
    /// Defaults to `<out>.symbols` when --out is given.
    #[arg(long)]
    symbols: Option<PathBuf>,
    /// Threshold config; violations set the exit code.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    output: OutputOptions,
}

#[derive(Args)]
struct RequirementsArgs {
    /// Requirement set (`.req`).
    req: PathBuf,
    /// Use-case model (`.ucm`) for per-use-case counts.
    #[arg(long)]
    ucm: Option<PathBuf>,
    /// Threshold config; violations set the exit code.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    output: OutputOptions,
}

#[derive(Args)]
struct CoverageArgs {
    /// MiniOO files or directories (searched recursively for `.moo`).
    #[arg(required = true)]
    sources: Vec<PathBuf>,
    /// Trace file (`.trc`); repeat for multiple runs.
    #[arg(long = "trace", required = true)]
    traces: Vec<PathBuf>,
    /// Threshold config; violations set the exit code.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    output: OutputOptions,
}

#[derive(Args)]
struct CheckArgs {
    /// MiniOO files or directories (searched recursively for `.moo`).
    sources: Vec<PathBuf>,
    /// Requirement set (`.req`).
    #[arg(long)]
    req: Option<PathBuf>,
    /// Use-case model (`.ucm`).
    #[arg(long)]
    ucm: Option<PathBuf>,
    /// Trace file (`.trc`); repeat for multiple runs.
    #[arg(long = "trace")]
    traces: Vec<PathBuf>,
    /// Checklist facts (`.chk`).
    #[arg(long)]
    facts: Option<PathBuf>,
    /// Threshold config with the gates to enforce.
    #[arg(long)]
    config: PathBuf,
    /// Weight per method in WMC: decision-point count plus one, or one.
    #[arg(long, value_enum, default_value_t = WmcWeight::Cyclomatic)]
    wmc_weight: WmcWeight,
    /// Count incoming references in CBO as well as outgoing ones.
    #[arg(long)]
    cbo_fan_in: bool,
    #[command(flatten)]
    output: OutputOptions,
}

/// One or more already-formatted diagnostic lines; always exit code 2.
struct Failure(Vec<String>);

impl Failure {
    fn of(message: impl Into<String>) -> Self {
        Failure(vec![message.into()])
    }
}

impl From<IngestError> for Failure {
    fn from(err: IngestError) -> Self {
        Failure::of(err.to_string())
    }
}

impl From<MetricError> for Failure {
    fn from(err: MetricError) -> Self {
        Failure::of(format!("error: {err}"))
    }
}

impl From<CoverageError> for Failure {
    fn from(err: CoverageError) -> Self {
        Failure::of(format!("error: {err}"))
    }
}

impl From<ChecklistError> for Failure {
    fn from(err: ChecklistError) -> Self {
        Failure::of(format!("error: {err}"))
    }
}

/// Run the command line against explicit streams and return the exit
/// code. `args` includes the program name in position zero.
pub fn run(args: Vec<OsString>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            // --help and --version arrive as "errors" that exit zero.
            return if err.use_stderr() {
                let _ = write!(stderr, "{err}");
                EXIT_INPUT_ERROR
            } else {
                let _ = write!(stdout, "{err}");
                EXIT_PASS
            };
        }
    };
    let outcome = match cli.command {
        Command::Analyze(args) => run_analyze(args, stdout, stderr),
        Command::Requirements(args) => run_requirements(args, stdout, stderr),
        Command::Coverage(args) => run_coverage(args, stdout, stderr),
        Command::Check(args) => run_check(args, stdout, stderr),
    };
    match outcome {
        Ok(code) => code,
        Err(Failure(lines)) => {
            for line in lines {
                let _ = writeln!(stderr, "{line}");
            }
            EXIT_INPUT_ERROR
        }
    }
}

// ---------------------------------------------------------------------------
// Input loading
// ---------------------------------------------------------------------------

/// Expand files and directories into a source list. Directory contents
/// are sorted so the same tree always yields the same order; explicit
/// file arguments keep their command-line positions.
fn expand_sources(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, Failure> {
    let mut files = Vec::new();
    for input in inputs {
        let metadata = std::fs::metadata(input).map_err(|e| {
            Failure::of(format!("{}: error: cannot read: {e}", input.display()))
        })?;
        if metadata.is_dir() {
            collect_moo_files(input, &mut files)?;
        } else {
            files.push(input.clone());
        }
    }
    Ok(files)
}

fn collect_moo_files(dir: &Path, out: &mut Vec<PathBuf>) -> Result<(), Failure> {
    let mut entries = Vec::new();
    let reader = std::fs::read_dir(dir)
        .map_err(|e| Failure::of(format!("{}: error: cannot read: {e}", dir.display())))?;
    for entry in reader {
        let entry = entry
            .map_err(|e| Failure::of(format!("{}: error: cannot read: {e}", dir.display())))?;
        entries.push(entry.path());
    }
    entries.sort();
    for path in entries {
        if path.is_dir() {
            collect_moo_files(&path, out)?;
        } else if path.extension().is_some_and(|ext| ext == "moo") {
            out.push(path);
        }
    }
    Ok(())
}

fn load_model(inputs: &[PathBuf]) -> Result<(DesignModel, Vec<SourceUnit>), Failure> {
    let files = expand_sources(inputs)?;
    if files.is_empty() {
        return Err(Failure::of("error: no `.moo` sources found"));
    }
    let mut units = Vec::new();
    let mut diagnostics = Vec::new();
    for file in &files {
        let text = std::fs::read_to_string(file).map_err(|e| {
            Failure::of(format!("{}:1: error: cannot read file: {e}", file.display()))
        })?;
        match parse_unit(&text, &file.display().to_string()) {
            Ok(unit) => units.push(unit),
            Err(diags) => diagnostics.extend(diags.iter().map(|d| d.to_string())),
        }
    }
    if !diagnostics.is_empty() {
        return Err(Failure(diagnostics));
    }
    let model = lower(&units)
        .map_err(|errors| Failure(errors.iter().map(|e| e.to_string()).collect()))?;
    Ok((model, units))
}

fn load_config(path: Option<&Path>, strict: bool) -> Result<ThresholdConfig, Failure> {
    let mut config = match path {
        Some(path) => read_config(path)?,
        None => ThresholdConfig::default(),
    };
    if strict {
        config.fail_on_not_applicable = true;
    }
    Ok(config)
}

fn load_traces(paths: &[PathBuf]) -> Result<Vec<CoverageTrace>, Failure> {
    paths
        .iter()
        .map(|path| read_trace(path).map_err(Failure::from))
        .collect()
}

// ---------------------------------------------------------------------------
// Report emission
// ---------------------------------------------------------------------------

fn finish(
    results: AnalysisResults,
    config: &ThresholdConfig,
    output: &OutputOptions,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, Failure> {
    let report = evaluate(&results, config);
    let text = render(&report, output.format.into());
    match &output.out {
        Some(path) => std::fs::write(path, &text).map_err(|e| {
            Failure::of(format!("{}: error: cannot write report: {e}", path.display()))
        })?,
        None => {
            let _ = stdout.write_all(text.as_bytes());
        }
    }
    for violation in &report.violations {
        let _ = writeln!(
            stderr,
            "violation: {} at {}: observed {}, limit {}",
            violation.metric, violation.scope, violation.observed, violation.threshold
        );
    }
    Ok(match report.verdict {
        Verdict::Pass => EXIT_PASS,
        Verdict::Fail => EXIT_VIOLATIONS,
    })
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn run_analyze(
    args: AnalyzeArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, Failure> {
    let (model, units) = load_model(&args.sources)?;
    let config = load_config(args.config.as_deref(), args.output.strict)?;
    let options = DesignOptions {
        wmc_weighting: args.wmc_weight.into(),
        cbo_fan_in: args.cbo_fan_in,
    };
    let results = AnalysisResults {
        sections: vec![design_section(&model, &options)],
        gated_wmc: options.gated_wmc_metric(),
    };

    let sidecar = args.symbols.clone().or_else(|| {
        args.output.out.as_ref().map(|out| {
            let mut path = out.as_os_str().to_owned();
            path.push(".symbols");
            PathBuf::from(path)
        })
    });
    if let Some(path) = sidecar {
        std::fs::write(&path, symbol_listing(&model, &units)).map_err(|e| {
            Failure::of(format!(
                "{}: error: cannot write symbol listing: {e}",
                path.display()
            ))
        })?;
    }

    finish(results, &config, &args.output, stdout, stderr)
}

fn run_requirements(
    args: RequirementsArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, Failure> {
    let reqs = read_requirements(&args.req)?;
    let usecases = args.ucm.as_deref().map(read_usecases).transpose()?;
    let config = load_config(args.config.as_deref(), args.output.strict)?;
    let results = AnalysisResults {
        sections: vec![requirements_section(Some(&reqs), usecases.as_ref())?],
        ..AnalysisResults::default()
    };
    finish(results, &config, &args.output, stdout, stderr)
}

fn run_coverage(
    args: CoverageArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, Failure> {
    let (model, _units) = load_model(&args.sources)?;
    let traces = load_traces(&args.traces)?;
    let config = load_config(args.config.as_deref(), args.output.strict)?;
    let results = AnalysisResults {
        sections: vec![coverage_section(&model, &traces)?],
        ..AnalysisResults::default()
    };
    for warning in entry_warnings(&model, &traces) {
        let _ = writeln!(stderr, "warning: {warning}");
    }
    finish(results, &config, &args.output, stdout, stderr)
}

fn run_check(
    args: CheckArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, Failure> {
    let config = load_config(Some(&args.config), args.output.strict)?;
    let options = DesignOptions {
        wmc_weighting: args.wmc_weight.into(),
        cbo_fan_in: args.cbo_fan_in,
    };
    let mut sections = Vec::new();

    let reqs = args.req.as_deref().map(read_requirements).transpose()?;
    let usecases = args.ucm.as_deref().map(read_usecases).transpose()?;
    if reqs.is_some() || usecases.is_some() {
        sections.push(requirements_section(reqs.as_ref(), usecases.as_ref())?);
    }

    if args.sources.is_empty() {
        if !args.traces.is_empty() {
            return Err(Failure::of("error: --trace requires MiniOO sources"));
        }
        if args.facts.is_some() {
            return Err(Failure::of("error: --facts requires MiniOO sources"));
        }
    } else {
        let (model, _units) = load_model(&args.sources)?;
        sections.push(design_section(&model, &options));
        if !args.traces.is_empty() {
            let traces = load_traces(&args.traces)?;
            sections.push(coverage_section(&model, &traces)?);
            for warning in entry_warnings(&model, &traces) {
                let _ = writeln!(stderr, "warning: {warning}");
            }
        }
        if let Some(facts_path) = &args.facts {
            let facts = read_checklist_facts(facts_path)?;
            sections.push(checklist_section(&model, &facts, &config.checklist_params())?);
        }
    }

    if sections.is_empty() {
        return Err(Failure::of(
            "error: nothing to check; give sources, --req, or --ucm",
        ));
    }
    let results = AnalysisResults {
        sections,
        gated_wmc: options.gated_wmc_metric(),
    };
    finish(results, &config, &args.output, stdout, stderr)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut stdout = Vec::new();
        let mut stderr = Vec::new();
        let argv = std::iter::once("moometrics")
            .chain(args.iter().copied())
            .map(OsString::from)
            .collect();
        let code = run(argv, &mut stdout, &mut stderr);
        (
            code,
            String::from_utf8(stdout).expect("stdout is utf-8"),
            String::from_utf8(stderr).expect("stderr is utf-8"),
        )
    }

    fn write_file(dir: &std::path::Path, name: &str, content: &str) -> PathBuf {
        let path = dir.join(name);
        std::fs::write(&path, content).expect("fixture write");
        path
    }

    #[test]
    fn analyze_reports_json_to_stdout_and_exits_zero() {
        let dir = tempfile::tempdir().unwrap();
        let source = write_file(
            dir.path(),
            "a.moo",
            "package p;\nclass A {\n  field x;\n  m() { assign x; }\n}\n",
        );
        let (code, stdout, stderr) = run_str(&["analyze", source.to_str().unwrap()]);
        assert_eq!(code, EXIT_PASS, "stderr: {stderr}");
        assert!(stdout.contains("\"metric\": \"lcom\""));
        assert!(stdout.contains("\"verdict\": \"pass\""));
    }

    #[test]
    fn analyze_on_a_directory_finds_nested_sources() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::create_dir(dir.path().join("sub")).unwrap();
        write_file(dir.path(), "a.moo", "package p; class A { }");
        write_file(&dir.path().join("sub"), "b.moo", "package q; class B { }");
        write_file(dir.path(), "ignored.txt", "not a source");
        let (code, stdout, _) = run_str(&["analyze", dir.path().to_str().unwrap()]);
        assert_eq!(code, EXIT_PASS);
        assert!(stdout.contains("class:p.A"));
        assert!(stdout.contains("class:q.B"));
    }

    #[test]
    fn analyze_reports_parse_errors_on_stderr_with_exit_two() {
        let dir = tempfile::tempdir().unwrap();
        let source = write_file(dir.path(), "bad.moo", "package p; class { }");
        let (code, stdout, stderr) = run_str(&["analyze", source.to_str().unwrap()]);
        assert_eq!(code, EXIT_INPUT_ERROR);
        assert!(stdout.is_empty());
        assert!(stderr.contains("error"));
        assert!(stderr.contains("bad.moo"));
    }

    #[test]
    fn analyze_writes_report_and_symbol_sidecar_with_out() {
        let dir = tempfile::tempdir().unwrap();
        let source = write_file(
            dir.path(),
            "a.moo",
            "package p;\nclass A {\n  m() { return; }\n}\n",
        );
        let out = dir.path().join("report.json");
        let (code, stdout, _) = run_str(&[
            "analyze",
            source.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, EXIT_PASS);
        assert!(stdout.is_empty());
        assert!(std::fs::read_to_string(&out).unwrap().contains("\"verdict\""));
        let sidecar = std::fs::read_to_string(dir.path().join("report.json.symbols")).unwrap();
        assert!(sidecar.contains("sp1"));
    }

    #[test]
    fn missing_source_file_is_an_input_error() {
        let (code, _, stderr) = run_str(&["analyze", "/nonexistent/x.moo"]);
        assert_eq!(code, EXIT_INPUT_ERROR);
        assert!(stderr.contains("cannot read"));
    }

    #[test]
    fn requirements_subcommand_reports_the_set() {
        let dir = tempfile::tempdir().unwrap();
        let req = write_file(
            dir.path(),
            "s.req",
            "reviewer alice\nreq R1 \"a\" valid\nverdict R1 alice \"ok\"\n",
        );
        let (code, stdout, _) = run_str(&["requirements", req.to_str().unwrap()]);
        assert_eq!(code, EXIT_PASS);
        assert!(stdout.contains("\"metric\": \"qua\""));
        assert!(stdout.contains("\"1.000000\""));
    }

    #[test]
    fn check_gates_and_exit_codes_follow_the_config() {
        let dir = tempfile::tempdir().unwrap();
        // LCOM of p.A is 1.
        let source = write_file(
            dir.path(),
            "a.moo",
            "package p; class A { field x; field y; m() { assign x; } n() { assign y; } }",
        );
        let tight = write_file(dir.path(), "tight.cfg", "max_lcom = 0\n");
        let loose = write_file(dir.path(), "loose.cfg", "max_lcom = 1\n");

        let (code, stdout, stderr) = run_str(&[
            "check",
            source.to_str().unwrap(),
            "--config",
            tight.to_str().unwrap(),
        ]);
        assert_eq!(code, EXIT_VIOLATIONS);
        assert!(stdout.contains("\"verdict\": \"fail\""));
        assert!(stderr.contains("violation: lcom at class:p.A"));

        let (code, stdout, _) = run_str(&[
            "check",
            source.to_str().unwrap(),
            "--config",
            loose.to_str().unwrap(),
        ]);
        assert_eq!(code, EXIT_PASS);
        assert!(stdout.contains("\"verdict\": \"pass\""));
    }

    #[test]
    fn unknown_config_key_is_exit_two_before_any_report() {
        let dir = tempfile::tempdir().unwrap();
        let source = write_file(dir.path(), "a.moo", "package p; class A { }");
        let config = write_file(dir.path(), "bad.cfg", "max_loc = 10\n");
        let (code, stdout, stderr) = run_str(&[
            "check",
            source.to_str().unwrap(),
            "--config",
            config.to_str().unwrap(),
        ]);
        assert_eq!(code, EXIT_INPUT_ERROR);
        assert!(stdout.is_empty());
        assert!(stderr.contains("unknown config key"));
    }

    #[test]
    fn coverage_subcommand_reports_ratios_and_entry_warnings() {
        let dir = tempfile::tempdir().unwrap();
        let source = write_file(
            dir.path(),
            "a.moo",
            "package p;\nclass A {\n  field x;\n  m() { assign x; }\n  n() { assign x; }\n}\n",
        );
        // sp1 is m's assign; executing it without entering m is suspicious.
        let trace = write_file(dir.path(), "run.trc", "S sp1\n");
        let (code, stdout, stderr) = run_str(&[
            "coverage",
            source.to_str().unwrap(),
            "--trace",
            trace.to_str().unwrap(),
        ]);
        assert_eq!(code, EXIT_PASS);
        assert!(stdout.contains("\"metric\": \"symbol_coverage\""));
        assert!(stdout.contains("\"0.500000\""));
        assert!(stderr.contains("warning:"));
    }

    #[test]
    fn csv_and_markdown_formats_are_available() {
        let dir = tempfile::tempdir().unwrap();
        let source = write_file(dir.path(), "a.moo", "package p; class A { }");
        let (code, csv, _) = run_str(&["analyze", source.to_str().unwrap(), "--format", "csv"]);
        assert_eq!(code, EXIT_PASS);
        assert!(csv.starts_with("metric,scope,value,status\n"));
        let (code, markdown, _) =
            run_str(&["analyze", source.to_str().unwrap(), "--format", "markdown"]);
        assert_eq!(code, EXIT_PASS);
        assert!(markdown.starts_with("# Quality Report"));
    }

    #[test]
    fn repeated_runs_are_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let source = write_file(
            dir.path(),
            "a.moo",
            "package p;\nclass A {\n  field x;\n  m() { if (x) { return; } }\n}\n",
        );
        let first = run_str(&["analyze", source.to_str().unwrap()]);
        let second = run_str(&["analyze", source.to_str().unwrap()]);
        assert_eq!(first, second);
    }

    #[test]
    fn help_exits_zero_and_usage_errors_exit_two() {
        let (code, stdout, _) = run_str(&["--help"]);
        assert_eq!(code, EXIT_PASS);
        assert!(stdout.contains("analyze"));
        let (code, _, stderr) = run_str(&["analyze"]);
        assert_eq!(code, EXIT_INPUT_ERROR);
        assert!(!stderr.is_empty());
    }
}

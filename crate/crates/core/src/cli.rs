//! The `tm` command line.
//!
//! Exit codes: 0 on success, 1 when error diagnostics were reported, 2 on
//! usage errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{error::ErrorKind, Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analyze::{check_bundle, classify_elements, OntClass};
use crate::bundle::{ModelBundle, Scenario};
use crate::diag::{has_errors, Code, Diagnostic, Severity};
use crate::export::{export_dot, DotView};
use crate::parse::parse_model;
use crate::sim::{derive_behavior, simulate, timeline, Trace};

#[derive(Debug, Parser)]
#[command(name = "tm", version, about = "Check, classify, simulate and draw thinging machine models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Report diagnostics for a model file.
    Check(Common),
    /// Classify every element as existent, subsistent or neither.
    Classify {
        #[command(flatten)]
        common: Common,
        /// Simulate this scenario and classify against its trace.
        #[arg(long)]
        scenario: Option<String>,
        /// Classify against a saved trace instead of simulating.
        #[arg(long, conflicts_with = "scenario")]
        trace: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run a scenario and write its trace.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Write a Graphviz diagram.
    ExportDot {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = View::Static)]
        view: View,
        /// Events to shade in the dynamic view.
        #[arg(long, value_delimiter = ',')]
        events: Vec<String>,
    },
    /// Run a scenario and write its timeline table.
    ExportTimeline {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// Model file (`.tm`).
    input: PathBuf,
    /// Write output here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum View {
    Static,
    Dynamic,
    Behavior,
}

/// Result of a subcommand before anything is written.
enum Failure {
    Usage(String),
    Diagnostics(Vec<Diagnostic>),
}

struct Ctx<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    file: String,
}

impl Ctx<'_> {
    fn report(&mut self, diags: &[Diagnostic]) {
        for d in diags {
            let _ = writeln!(self.err, "{}", d.render(&self.file));
        }
    }

    fn emit(&mut self, target: Option<&Path>, text: &str) -> Result<(), Failure> {
        match target {
            Some(path) => fs::write(path, text).map_err(|e| {
                Failure::Usage(format!("cannot write `{}`: {e}", path.display()))
            }),
            None => self
                .out
                .write_all(text.as_bytes())
                .map_err(|e| Failure::Usage(format!("cannot write output: {e}"))),
        }
    }
}

/// Runs `tm` with `args` (program name first). Output goes to `out`,
/// diagnostics and usage messages to `err`.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let _ = writeln!(err, "{}", e.render());
                    let _ = writeln!(err, "{}", Cli::command().render_help());
                    2
                }
            };
        }
    };
    let input = match &cli.command {
        Command::Check(c) => &c.input,
        Command::Classify { common, .. }
        | Command::Simulate { common, .. }
        | Command::ExportDot { common, .. }
        | Command::ExportTimeline { common, .. } => &common.input,
    };
    let mut ctx = Ctx {
        out,
        err,
        file: input.display().to_string(),
    };
    let result = run(&cli.command, &mut ctx);
    let _ = ctx.out.flush();
    let code = match result {
        Ok(()) => 0,
        Err(Failure::Diagnostics(diags)) => {
            ctx.report(&diags);
            1
        }
        Err(Failure::Usage(message)) => {
            let _ = writeln!(ctx.err, "error: {message}");
            2
        }
    };
    let _ = ctx.err.flush();
    code
}

fn load(path: &Path) -> Result<ModelBundle, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read `{}`: {e}", path.display())))?;
    parse_model(&text).map_err(Failure::Diagnostics)
}

/// Loads and checks a bundle, reporting warnings; errors abort.
fn load_checked(path: &Path, ctx: &mut Ctx<'_>) -> Result<ModelBundle, Failure> {
    let bundle = load(path)?;
    let diags = all_diagnostics(&bundle);
    if has_errors(&diags) {
        return Err(Failure::Diagnostics(diags));
    }
    ctx.report(&diags);
    Ok(bundle)
}

fn all_diagnostics(bundle: &ModelBundle) -> Vec<Diagnostic> {
    let mut diags = check_bundle(bundle);
    if !has_errors(&diags) {
        if let Err(behavior) = derive_behavior(bundle) {
            diags.extend(behavior);
        }
    }
    diags
}

fn pick_scenario(bundle: &ModelBundle, name: Option<&str>) -> Result<Scenario, Failure> {
    match name {
        Some(name) => bundle.scenario(name).cloned().ok_or_else(|| {
            Failure::Diagnostics(vec![Diagnostic::new(
                Code::UnknownScenario,
                format!("no scenario named `{name}`"),
            )])
        }),
        None => Ok(bundle
            .scenarios
            .first()
            .cloned()
            .unwrap_or_else(|| Scenario::named("default"))),
    }
}

fn run_scenario(
    bundle: &ModelBundle,
    name: Option<&str>,
    ctx: &mut Ctx<'_>,
) -> Result<Trace, Failure> {
    let scenario = pick_scenario(bundle, name)?;
    let outcome =
        simulate(bundle, &scenario).map_err(|e| Failure::Diagnostics(e.to_diagnostics()))?;
    ctx.report(&outcome.warnings);
    Ok(outcome.trace)
}

fn require(format: Format, allowed: &[Format], command: &str) -> Result<(), Failure> {
    if allowed.contains(&format) {
        return Ok(());
    }
    let names: Vec<&str> = allowed
        .iter()
        .map(|f| match f {
            Format::Text => "text",
            Format::Csv => "csv",
            Format::Json => "json",
        })
        .collect();
    Err(Failure::Usage(format!(
        "`{command}` supports --format {}",
        names.join("|")
    )))
}

#[derive(Serialize)]
struct ClassRecord {
    id: u32,
    path: String,
    element: &'static str,
    class: &'static str,
    intervals: Vec<[u32; 2]>,
}

fn run(command: &Command, ctx: &mut Ctx<'_>) -> Result<(), Failure> {
    match command {
        Command::Check(common) => {
            let bundle = load(&common.input)?;
            let diags = all_diagnostics(&bundle);
            ctx.report(&diags);
            let errors = diags.iter().filter(|d| d.severity == Severity::Error).count();
            let warnings = diags.len() - errors;
            let summary = format!("{errors} errors, {warnings} warnings\n");
            ctx.emit(common.out.as_deref(), &summary)?;
            if errors > 0 {
                return Err(Failure::Diagnostics(Vec::new()));
            }
            Ok(())
        }
        Command::Classify {
            common,
            scenario,
            trace,
            format,
        } => {
            require(*format, &[Format::Text, Format::Json], "classify")?;
            let bundle = load_checked(&common.input, ctx)?;
            let trace = match (scenario, trace) {
                (Some(name), _) => Some(run_scenario(&bundle, Some(name), ctx)?),
                (None, Some(path)) => {
                    let text = fs::read_to_string(path).map_err(|e| {
                        Failure::Usage(format!("cannot read `{}`: {e}", path.display()))
                    })?;
                    Some(Trace::from_json(&text).map_err(|e| {
                        Failure::Diagnostics(vec![Diagnostic::new(
                            Code::TraceMismatch,
                            format!("`{}` is not a trace: {e}", path.display()),
                        )])
                    })?)
                }
                (None, None) => None,
            };
            let classes = classify_elements(&bundle, trace.as_ref())
                .map_err(|e| Failure::Diagnostics(vec![e.to_diagnostic()]))?;
            let model = &bundle.static_model;
            let records: Vec<ClassRecord> = classes
                .iter()
                .map(|(&id, class)| ClassRecord {
                    id: id.0,
                    path: model.path(id),
                    element: model.get(id).map_or("element", |e| e.kind_name()),
                    class: class.name(),
                    intervals: match class {
                        OntClass::Existent(spans) => spans.iter().map(|s| [s.0, s.1]).collect(),
                        _ => Vec::new(),
                    },
                })
                .collect();
            let text = match format {
                Format::Json => {
                    let mut json = serde_json::to_string_pretty(&records).expect("serializes");
                    json.push('\n');
                    json
                }
                _ => {
                    let width = records.iter().map(|r| r.path.len()).max().unwrap_or(0);
                    let mut text = String::new();
                    for r in &records {
                        let spans: Vec<String> =
                            r.intervals.iter().map(|[s, e]| format!("[{s},{e})")).collect();
                        let line = format!(
                            "{:<5} {:<width$}  {:<10} {}",
                            format!("#{}", r.id),
                            r.path,
                            r.class,
                            spans.join(" ")
                        );
                        text.push_str(line.trim_end());
                        text.push('\n');
                    }
                    text
                }
            };
            ctx.emit(common.out.as_deref(), &text)
        }
        Command::Simulate {
            common,
            scenario,
            format,
        } => {
            require(*format, &[Format::Json, Format::Text], "simulate")?;
            let bundle = load_checked(&common.input, ctx)?;
            let trace = run_scenario(&bundle, scenario.as_deref(), ctx)?;
            let text = match format {
                Format::Json => trace.to_json(),
                _ => timeline(&trace).to_text(),
            };
            ctx.emit(common.out.as_deref(), &text)
        }
        Command::ExportDot {
            common,
            view,
            events,
        } => {
            let bundle = load_checked(&common.input, ctx)?;
            let view = match view {
                View::Static => DotView::Static,
                View::Dynamic => DotView::Dynamic(events.clone()),
                View::Behavior => DotView::Behavior,
            };
            let dot = export_dot(&bundle, &view)
                .map_err(|e| Failure::Diagnostics(vec![e.to_diagnostic()]))?;
            ctx.emit(common.out.as_deref(), &dot)
        }
        Command::ExportTimeline {
            common,
            scenario,
            format,
        } => {
            require(*format, &[Format::Text, Format::Csv], "export-timeline")?;
            let bundle = load_checked(&common.input, ctx)?;
            let trace = run_scenario(&bundle, scenario.as_deref(), ctx)?;
            let table = timeline(&trace);
            let text = match format {
                Format::Csv => table.to_csv(),
                _ => table.to_text(),
            };
            ctx.emit(common.out.as_deref(), &text)
        }
    }
}

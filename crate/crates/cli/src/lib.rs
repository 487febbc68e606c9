//! `tm` command implementation, kept separate from `main` so it can be
//! driven in-process with captured output.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use tm_core::check::{has_errors, validate};
use tm_core::dot::{export_chronology_dot, export_dot};
use tm_core::engine::{check_chronology, detect_events, init_simulation, Scenario, SimError, Trace};
use tm_core::model::Model;
use tm_core::text::{emit, parse};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CHRONOLOGY: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "tm", version, about = "Parse, check, simulate and draw Thinging Machine models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a model and print it in canonical form.
    Parse {
        model: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Report well-formedness problems.
    Validate { model: PathBuf },
    /// Run a scenario and print the trace.
    Simulate(RunArgs),
    /// Print the model (or its chronology) as a diagram.
    Export {
        model: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        format: Format,
        /// Export the event chronology instead of the machines.
        #[arg(long)]
        chronology: bool,
    },
    /// Run a scenario and print only the detected events.
    Events(RunArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    model: PathBuf,
    scenario: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    max_ticks: u64,
    /// Append detected events to the trace.
    #[arg(long)]
    events: bool,
    /// Check events against the chronology; exit 3 on violation.
    #[arg(long)]
    chronology: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Dot,
}

/// Failure that ends a command with the given exit code after its message
/// has been written to stderr.
struct Exit(i32);

type CmdResult = Result<i32, Exit>;

/// Runs `tm` with `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Parse { model, format } => cmd_parse(model, *format, out, err),
        Command::Validate { model } => cmd_validate(model, out, err),
        Command::Simulate(a) => cmd_run(a, true, out, err),
        Command::Events(a) => cmd_run(a, false, out, err),
        Command::Export {
            model,
            format,
            chronology,
        } => cmd_export(model, *format, *chronology, out, err),
    };
    result.unwrap_or_else(|Exit(code)| code)
}

fn read(path: &Path, err: &mut dyn Write) -> Result<String, Exit> {
    std::fs::read_to_string(path).map_err(|e| {
        let _ = writeln!(err, "tm: cannot read {}: {e}", path.display());
        Exit(EXIT_USAGE)
    })
}

fn load_model(path: &Path, err: &mut dyn Write) -> Result<Model, Exit> {
    let text = read(path, err)?;
    parse(&text).map_err(|diags| {
        for d in diags {
            let _ = writeln!(err, "{}:{d}", path.display());
        }
        Exit(EXIT_USAGE)
    })
}

fn cmd_parse(path: &Path, format: Format, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let model = load_model(path, err)?;
    let text = match format {
        Format::Text => emit(&model),
        Format::Dot => export_dot(&model),
    };
    let _ = out.write_all(text.as_bytes());
    Ok(EXIT_OK)
}

fn cmd_validate(path: &Path, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let model = load_model(path, err)?;
    let findings = validate(&model);
    for f in &findings {
        let _ = writeln!(out, "{f}");
    }
    Ok(if has_errors(&findings) { EXIT_INVALID } else { EXIT_OK })
}

fn cmd_export(path: &Path, format: Format, chronology: bool, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let model = load_model(path, err)?;
    let text = match (format, chronology) {
        (Format::Dot, false) => export_dot(&model),
        (Format::Dot, true) => export_chronology_dot(&model.chronology),
        (Format::Text, _) => emit(&model),
    };
    let _ = out.write_all(text.as_bytes());
    Ok(EXIT_OK)
}

fn cmd_run(args: &RunArgs, print_trace: bool, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let model = load_model(&args.model, err)?;
    let scenario = Scenario::parse(&read(&args.scenario, err)?).map_err(|e| {
        let _ = writeln!(err, "{}: {e}", args.scenario.display());
        Exit(EXIT_USAGE)
    })?;
    let mut sim = init_simulation(&model, &scenario).map_err(|e| match e {
        SimError::InvalidModel(findings) => {
            for f in findings {
                let _ = writeln!(out, "{f}");
            }
            Exit(EXIT_INVALID)
        }
        other => {
            let _ = writeln!(err, "tm: {other}");
            Exit(EXIT_USAGE)
        }
    })?;
    let trace = sim.run(args.max_ticks);
    if print_trace {
        let _ = out.write_all(trace.render(&model).as_bytes());
    }
    if !print_trace || args.events || args.chronology {
        write_events(&model, &trace, args.chronology, out)
    } else {
        Ok(EXIT_OK)
    }
}

fn write_events(model: &Model, trace: &Trace, chronology: bool, out: &mut dyn Write) -> CmdResult {
    let occurrences = detect_events(model, trace);
    for o in &occurrences {
        let description = model.event(&o.event).map(|e| e.description.as_str()).unwrap_or("");
        let _ = writeln!(out, "event {} t={} {description}", o.event, o.time);
    }
    if !chronology {
        return Ok(EXIT_OK);
    }
    let violations = check_chronology(&model.chronology, &occurrences);
    for v in &violations {
        let _ = writeln!(out, "violation {v}");
    }
    Ok(if violations.is_empty() { EXIT_OK } else { EXIT_CHRONOLOGY })
}

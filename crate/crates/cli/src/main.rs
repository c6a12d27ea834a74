mod report;
mod text;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use report::{Options, Outcome, SpliceInput, Status};
use resgraph_core::cycle::Lattice;
use resgraph_core::graph::ResolutionGraph;
use resgraph_core::nws::{parse_delta, CoefficientScheme};
use resgraph_core::splice::SpliceDiagram;
use resgraph_core::Error;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

const EXIT_DOMAIN: u8 = 1;
const EXIT_INPUT: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "resgraph", version, about = "Resolution graph invariants, conditions and Neumann-Wahl systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the output here instead of stdout.
    #[arg(short = 'o', long, global = true)]
    output: Option<PathBuf>,
    /// Exit with status 1 when a checked condition fails.
    #[arg(long, global = true)]
    strict: bool,
    /// Include construction sequences in condition reports.
    #[arg(long, global = true)]
    trace: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check that each file is a negative definite plumbing tree.
    Validate(Files),
    /// Determinant, discriminant group, fundamental cycle, genus, class.
    Invariants(Files),
    /// Conditions A and C with witnesses.
    Conditions(Files),
    /// Neumann-Wahl system and weights.
    Nws(NwsArgs),
    /// Splice diagram and semigroup condition (graph or diagram input).
    Splice(Files),
    /// Group generators, action table and grading of the system.
    Action(SchemeArgs),
    /// Full JSON bundle for external verification.
    VerifyExport(SchemeArgs),
}

#[derive(Args, Debug)]
struct Files {
    #[arg(required = true)]
    files: Vec<PathBuf>,
}

#[derive(Args, Debug)]
struct SchemeArgs {
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// unit-index or random
    #[arg(long, default_value = "unit-index")]
    coeff_scheme: String,
    /// Seed for the random scheme; NWS_SEED takes precedence.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct NwsArgs {
    #[command(flatten)]
    scheme: SchemeArgs,
    /// Comma-separated positive integers, one per end.
    #[arg(long)]
    delta: Option<String>,
}

enum Produced {
    Report(Outcome),
    Bundle(String),
}

/// What one input file produced.
struct FileResult {
    body: Value,
    /// Set for verify-export, whose output is the bundle itself.
    raw: Option<String>,
    exit: u8,
}

fn input_error(code: &str, message: String) -> (String, String, u8) {
    (code.to_string(), message, EXIT_INPUT)
}

fn classify(e: &Error) -> (String, String, u8) {
    let exit = if e.is_input_error() { EXIT_INPUT } else { EXIT_DOMAIN };
    (e.code().to_string(), e.to_string(), exit)
}

fn read(path: &Path) -> Result<(String, String), (String, String, u8)> {
    let bytes = std::fs::read(path).map_err(|e| input_error("io_error", format!("{}: {e}", path.display())))?;
    let digest = hex::encode(Sha256::digest(&bytes));
    let text = String::from_utf8(bytes).map_err(|_| input_error("malformed_input", "file is not UTF-8".into()))?;
    Ok((text, digest))
}

fn lattice(text: &str) -> Result<Lattice, (String, String, u8)> {
    let g = ResolutionGraph::parse(text).map_err(|e| classify(&e))?;
    Lattice::new(g).map_err(|e| classify(&e))
}

fn splice_input(text: &str) -> Result<SpliceInput, (String, String, u8)> {
    match ResolutionGraph::parse(text) {
        Ok(g) => Ok(SpliceInput::Graph(Box::new(Lattice::new(g).map_err(|e| classify(&e))?))),
        Err(graph_err) => match SpliceDiagram::parse(text) {
            Ok(d) => Ok(SpliceInput::Diagram(d)),
            // report the graph error unless the file looks like a diagram
            Err(diagram_err) if text.contains("\"kind\"") => Err(classify(&diagram_err)),
            Err(_) => Err(classify(&graph_err)),
        },
    }
}

fn run_one(cli: &Cli, opts: &Options, path: &Path) -> FileResult {
    let name = command_name(&cli.command);
    let mut digest = String::new();
    let result = (|| {
        let (text, d) = read(path)?;
        digest = d;
        let wrap = |r: resgraph_core::Result<Outcome>| r.map(Produced::Report).map_err(|e| classify(&e));
        match &cli.command {
            Command::Validate(_) => {
                let g = ResolutionGraph::parse(&text).map_err(|e| classify(&e))?;
                Ok(Produced::Report(report::validate(&g)))
            }
            Command::Invariants(_) => wrap(report::invariants(&lattice(&text)?)),
            Command::Conditions(_) => wrap(report::conditions(&lattice(&text)?, opts)),
            Command::Nws(_) => wrap(report::nws(&lattice(&text)?, opts)),
            Command::Splice(_) => wrap(report::splice(&splice_input(&text)?)),
            Command::Action(_) => wrap(report::action(&lattice(&text)?, opts)),
            Command::VerifyExport(_) => {
                report::export(&lattice(&text)?, opts).map(Produced::Bundle).map_err(|e| classify(&e))
            }
        }
    })();
    let input = json!({"path": path.display().to_string(), "sha256": digest});
    match result {
        Ok(Produced::Report(out)) => {
            let exit = if out.status == Status::Fail && cli.strict { EXIT_DOMAIN } else { 0 };
            FileResult {
                body: json!({
                    "command": name,
                    "input": input,
                    "status": out.status.name(),
                    "sections": out.sections,
                    "warnings": out.warnings,
                    "assumptions": out.assumptions,
                }),
                raw: None,
                exit,
            }
        }
        Ok(Produced::Bundle(bundle)) => FileResult { body: Value::Null, raw: Some(bundle), exit: 0 },
        Err((code, message, exit)) => {
            eprintln!("resgraph: {}: {code}: {message}", path.display());
            FileResult {
                body: json!({
                    "command": name,
                    "input": input,
                    "status": "error",
                    "error": {"code": code, "message": message},
                }),
                raw: None,
                exit,
            }
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Validate(_) => "validate",
        Command::Invariants(_) => "invariants",
        Command::Conditions(_) => "conditions",
        Command::Nws(_) => "nws",
        Command::Splice(_) => "splice",
        Command::Action(_) => "action",
        Command::VerifyExport(_) => "verify-export",
    }
}

fn options(cli: &Cli) -> Result<(Vec<PathBuf>, Options), String> {
    let scheme_args = match &cli.command {
        Command::Nws(a) => Some(&a.scheme),
        Command::Action(a) | Command::VerifyExport(a) => Some(a),
        _ => None,
    };
    let files = match &cli.command {
        Command::Validate(f) | Command::Invariants(f) | Command::Conditions(f) | Command::Splice(f) => f.files.clone(),
        _ => scheme_args.expect("scheme commands").files.clone(),
    };
    let scheme = match scheme_args {
        None => CoefficientScheme::UnitIndex,
        Some(a) => {
            let seed = match std::env::var("NWS_SEED") {
                Ok(s) => Some(s.trim().parse::<u64>().map_err(|_| format!("NWS_SEED `{s}` is not an unsigned integer"))?),
                Err(_) => a.seed,
            };
            CoefficientScheme::parse(&a.coeff_scheme, seed).map_err(|e| e.to_string())?
        }
    };
    let delta = match &cli.command {
        Command::Nws(NwsArgs { delta: Some(d), .. }) => Some(parse_delta(d).map_err(|e| e.to_string())?),
        _ => None,
    };
    Ok((files, Options { trace: cli.trace, scheme, delta }))
}

fn render(cli: &Cli, results: &[(PathBuf, FileResult)]) -> String {
    if let [(_, r)] = results {
        if let Some(raw) = &r.raw {
            return format!("{raw}\n");
        }
    }
    match cli.format {
        Format::Json => {
            let values: Vec<Value> = results
                .iter()
                .map(|(_, r)| match &r.raw {
                    Some(raw) => serde_json::from_str(raw).expect("bundle is valid JSON"),
                    None => r.body.clone(),
                })
                .collect();
            let doc = if values.len() == 1 { values.into_iter().next().unwrap() } else { Value::Array(values) };
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("report serializes"))
        }
        Format::Text => {
            let many = results.len() > 1;
            let mut out = String::new();
            for (path, r) in results {
                if many {
                    out.push_str(&format!("== {} ==\n", path.display()));
                }
                match &r.raw {
                    Some(raw) => {
                        out.push_str(raw);
                        out.push('\n');
                    }
                    None => out.push_str(&text::render_report(&r.body)),
                }
            }
            out
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let (files, opts) = match options(&cli) {
        Ok(x) => x,
        Err(msg) => {
            eprintln!("resgraph: {msg}");
            return ExitCode::from(EXIT_INPUT);
        }
    };
    // one worker per file; each result is buffered and printed in input order
    let results: Vec<(PathBuf, FileResult)> = std::thread::scope(|s| {
        let handles: Vec<_> = files.iter().map(|p| s.spawn(|| run_one(&cli, &opts, p))).collect();
        files.iter().cloned().zip(handles.into_iter().map(|h| h.join().expect("worker panicked"))).collect()
    });
    let output = render(&cli, &results);
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &output).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().write_all(output.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(msg) = written {
        eprintln!("resgraph: {msg}");
        return ExitCode::from(EXIT_INPUT);
    }
    ExitCode::from(results.iter().map(|(_, r)| r.exit).max().unwrap_or(0))
}

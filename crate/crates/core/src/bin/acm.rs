use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use acm_core::classifier::{
    classify_point, classify_tensor, ClassLabel, LabelKind, DEFAULT_TOL_ALGEBRAIC, DEFAULT_TOL_GEOMETRY,
};
use acm_core::decomposition::{spectrum, ComponentSpectrum};
use acm_core::geometry::{chart_by_name, DEFAULT_STEP};
use acm_core::io::{parse_structure, parse_tensor};
use acm_core::selftest::{self, DEFAULT_SEED};
use acm_core::structure::{AcmStructure, TAU_ALG};
use acm_core::Error;

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "acm", version, about = "Decompose and classify almost contact metric tensors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the structure axioms of a structure file or the standard structure
    Validate {
        /// Half-dimension of the standard structure
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..), conflicts_with = "input")]
        n: Option<u64>,
        /// Structure JSON file; omitted fields default to the standard structure
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = TAU_ALG)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Print the component norms of a tensor file
    Decompose {
        /// Tensor JSON file
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Classify a builtin chart at a point, or a tensor file
    Classify {
        #[arg(long, required_unless_present = "input", conflicts_with = "input")]
        chart: Option<String>,
        /// Comma-separated coordinates; defaults to the origin
        #[arg(long, allow_hyphen_values = true, requires = "chart")]
        point: Option<String>,
        /// Finite-difference step
        #[arg(long, default_value_t = DEFAULT_STEP, requires = "chart")]
        step: f64,
        /// Relative tolerance; 1e-6 for tensor files, 1e-3 for charts
        #[arg(long)]
        tol: Option<f64>,
        /// Tensor JSON file
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
    /// Run every invariant check on random tensors
    Selftest {
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args, Clone, Copy)]
struct Output {
    /// Compact single-line JSON instead of pretty-printed
    #[arg(long)]
    json: bool,
}

impl Output {
    fn emit<T: Serialize>(self, value: &T) -> Result<(), Failure> {
        let text = if self.json {
            serde_json::to_string(value)
        } else {
            serde_json::to_string_pretty(value)
        };
        println!("{}", text.map_err(Error::from)?);
        Ok(())
    }
}

enum Failure {
    Check,
    Lib(Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidStructure { .. }
        | Error::NotInSpace { .. }
        | Error::SingularMetric
        | Error::DomainViolation { .. }
        | Error::RankNotStabilized { .. } => EXIT_FAILURE,
        _ => EXIT_USAGE,
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn parse_point(text: &str, dim: usize) -> Result<Vec<f64>, Failure> {
    let point = text
        .split(',')
        .map(|c| c.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::Usage(format!("bad point `{text}`: {e}")))?;
    if point.len() != dim {
        return Err(Failure::Usage(format!(
            "point has {} coordinates, chart needs {dim}",
            point.len()
        )));
    }
    Ok(point)
}

fn fmt_norm(v: Option<f64>) -> String {
    v.map_or_else(|| "absent".to_string(), |v| format!("{v:.6e}"))
}

fn report_spectrum(spec: &ComponentSpectrum) {
    eprintln!("n = {}, membership residual {:.3e}", spec.n, spec.membership);
    for (i, v) in spec.norms.iter().enumerate() {
        eprintln!("  |p{:<2}| = {}", i + 1, fmt_norm(*v));
    }
    eprintln!("  residual = {:.3e}", spec.residual);
}

fn report_label(label: &ClassLabel) {
    let classes: Vec<String> = label.classes.iter().map(|i| format!("W{i}")).collect();
    let kind = serde_json::to_value(label.kind).ok();
    let kind = kind.as_ref().and_then(|v| v.as_str()).unwrap_or("?");
    eprintln!("verdict: {kind} {{{}}}", classes.join(", "));
    for note in &label.diagnostics.notes {
        eprintln!("  note: {note}");
    }
}

fn label_status(label: &ClassLabel) -> Result<(), Failure> {
    if label.kind == LabelKind::UnclassifiedN1Gap {
        Err(Failure::Check)
    } else {
        Ok(())
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Validate { n, input, tol, out } => {
            let s = match input {
                Some(path) => parse_structure(&read(&path)?)?,
                None => AcmStructure::standard(n.unwrap_or(1) as usize)?,
            };
            let report = s.validate_with(tol);
            eprintln!(
                "n = {}: {} (max residual {:.3e})",
                s.n(),
                if report.ok { "valid" } else { "invalid" },
                report.max_residual
            );
            for axiom in &report.violated_axioms {
                eprintln!("  violated: {axiom}");
            }
            out.emit(&report)?;
            if report.ok {
                Ok(())
            } else {
                Err(Failure::Check)
            }
        }
        Command::Decompose { input, out } => {
            let t = parse_tensor(&read(&input)?)?;
            let s = AcmStructure::standard(t.n())?;
            let spec = spectrum(&s, &t)?;
            report_spectrum(&spec);
            out.emit(&spec)
        }
        Command::Classify {
            chart,
            point,
            step,
            tol,
            input,
            out,
        } => {
            if let Some(path) = input {
                let t = parse_tensor(&read(&path)?)?;
                let s = AcmStructure::standard(t.n())?;
                let (spec, label) = classify_tensor(&s, &t, tol.unwrap_or(DEFAULT_TOL_ALGEBRAIC))?;
                report_spectrum(&spec);
                report_label(&label);
                out.emit(&label)?;
                return label_status(&label);
            }
            let name = chart.expect("clap requires chart or input");
            let chart = chart_by_name(&name)?;
            let p = match point {
                Some(text) => parse_point(&text, chart.dim())?,
                None => vec![0.0; chart.dim()],
            };
            let result = classify_point(&chart, &p, step, tol.unwrap_or(DEFAULT_TOL_GEOMETRY))?;
            eprintln!("chart {} at {:?}, step {step:e}", chart.name, p);
            report_spectrum(&result.spectrum);
            report_label(&result.label);
            out.emit(&result.label)?;
            label_status(&result.label)
        }
        Command::Selftest { n, trials, seed, out } => {
            let report = selftest::run(n as usize, trials as usize, seed)?;
            eprintln!(
                "selftest n = {}, trials = {}, seed = {}, dim = {}",
                report.n, report.trials, report.seed, report.space_dimension
            );
            for c in &report.checks {
                eprintln!(
                    "  {}  {:<36} max {:.3e}  tol {:.1e}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.max_residual,
                    c.tolerance
                );
            }
            if !report.absent_components.is_empty() {
                eprintln!("  components {:?} absent for n = {}", report.absent_components, report.n);
            }
            out.emit(&report)?;
            if report.pass {
                Ok(())
            } else {
                Err(Failure::Check)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(EXIT_FAILURE),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

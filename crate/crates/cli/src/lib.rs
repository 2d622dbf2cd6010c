//! Command dispatch for the `superpoint` binary.
//!
//! [`run`] reads one JSON assignment document and renders a report. It never
//! exits the process, so tests can drive it directly.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::Serialize;
use superpoint::azumaya::{self, AdmissibilityReport, HomomorphismReport, MapHandle, ValidationReport};
use superpoint::serial::{self, InputFile};
use superpoint::{Backend, Error, MergeConvention, SmoothFunction, SpectralOptions, SuperFunction, SuperMatrix};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Check the commutation relations and real spectra
    Validate,
    /// Idempotents, adapted basis and conjugated blocks
    Decompose,
    /// Joint eigenvalues, block ranks and nilpotency indices
    Spectral,
    /// Image of the document's `function`
    Eval,
    /// Ring-homomorphism residuals on sample pairs
    Verify,
    /// Smooth functional calculus on the even matrices
    Hull,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Exact,
    Numeric,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Backend {
        match b {
            BackendArg::Exact => Backend::Exact,
            BackendArg::Numeric => Backend::Numeric,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MergeArg {
    Anticommute,
    Commute,
}

impl From<MergeArg> for MergeConvention {
    fn from(m: MergeArg) -> MergeConvention {
        match m {
            MergeArg::Anticommute => MergeConvention::Anticommute,
            MergeArg::Commute => MergeConvention::Commute,
        }
    }
}

/// `superpoint <COMMAND> <INPUT> [flags]`
#[derive(Debug, Parser)]
#[command(name = "superpoint", version, about = "Maps from superpoints into matrix superpoints")]
pub struct RunArgs {
    #[arg(value_enum)]
    pub command: Command,
    /// Assignment document (JSON)
    pub input: PathBuf,
    /// Arithmetic backend; overrides the document and SUPERPOINT_BACKEND
    #[arg(long, value_enum)]
    pub backend: Option<BackendArg>,
    /// Zero threshold and clustering radius on the numeric backend
    #[arg(long, default_value_t = superpoint::DEFAULT_TOLERANCE)]
    pub tol: f64,
    /// Relation between generators of merged Grassmann algebras
    #[arg(long, value_enum, default_value = "anticommute")]
    pub merge: MergeArg,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Write the report here instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Everything [`run`] needs, with the environment already consulted.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub input: PathBuf,
    pub backend: Option<Backend>,
    /// Backend used when neither the flag nor the document chooses one.
    pub default_backend: Backend,
    pub tol: f64,
    pub merge: MergeConvention,
    pub format: Format,
}

impl RunConfig {
    pub fn new(command: Command, input: impl Into<PathBuf>) -> Self {
        RunConfig {
            command,
            input: input.into(),
            backend: None,
            default_backend: Backend::Exact,
            tol: superpoint::DEFAULT_TOLERANCE,
            merge: MergeConvention::Anticommute,
            format: Format::Text,
        }
    }

    /// Reads `SUPERPOINT_BACKEND` for the default backend.
    pub fn from_args(args: &RunArgs) -> Result<Self, String> {
        let default_backend = match std::env::var("SUPERPOINT_BACKEND") {
            Ok(v) if v == "exact" => Backend::Exact,
            Ok(v) if v == "numeric" => Backend::Numeric,
            Ok(v) => return Err(format!("SUPERPOINT_BACKEND must be `exact` or `numeric`, got `{v}`")),
            Err(_) => Backend::Exact,
        };
        Ok(RunConfig {
            command: args.command,
            input: args.input.clone(),
            backend: args.backend.map(Backend::from),
            default_backend,
            tol: args.tol,
            merge: args.merge.into(),
            format: args.format,
        })
    }
}

/// Exit status plus the rendered report (or error message).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub output: String,
}

#[derive(Serialize)]
struct Header {
    tool: &'static str,
    version: &'static str,
    command: Command,
    input: String,
    backend: Backend,
    tol: f64,
    merge: MergeConvention,
}

#[derive(Serialize)]
struct Document<T: Serialize> {
    header: Header,
    status: &'static str,
    report: T,
}

#[derive(Serialize)]
struct ErrorReport {
    kind: &'static str,
    message: String,
}

fn backend_name(b: Backend) -> &'static str {
    match b {
        Backend::Exact => "exact",
        Backend::Numeric => "numeric",
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::Schema { .. } | Error::Shape(_) | Error::Structure(_) | Error::Domain(_) | Error::Parity(_) => {
            EXIT_INPUT
        }
        Error::NeedsHint { .. } | Error::NonRealSpectrum { .. } | Error::Precondition(_) | Error::EigenData(_) => EXIT_VALIDATION,
        Error::NotInvertible { .. } | Error::NotCoprime { .. } | Error::Inconsistent(_) => EXIT_INTERNAL,
    }
}

fn load(path: &Path) -> Result<InputFile, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}:{}:{}: {e}", path.display(), e.line(), e.column()))
}

/// Runs one command. The output is byte-stable for a given input on the exact backend.
pub fn run(config: &RunConfig) -> Outcome {
    let input = match load(&config.input) {
        Ok(i) => i,
        Err(msg) => return Outcome { code: EXIT_INPUT, output: format!("error: {msg}\n") },
    };
    let backend = config.backend.or(input.backend).unwrap_or(config.default_backend);
    let header = Header {
        tool: "superpoint",
        version: env!("CARGO_PKG_VERSION"),
        command: config.command,
        input: config.input.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
        backend,
        tol: config.tol,
        merge: config.merge,
    };
    let opts = SpectralOptions { tol: config.tol, ..SpectralOptions::default() };
    match dispatch(config.command, &input, backend, &opts) {
        Ok((code, report)) => render(config.format, header, code, report),
        Err(e) => {
            let code = exit_code(&e);
            match config.format {
                Format::Text => Outcome { code, output: format!("{}error: {e}\n", text_header(&header)) },
                Format::Json => {
                    let kind = if code == EXIT_INTERNAL { "internal" } else if code == EXIT_VALIDATION { "validation" } else { "input" };
                    let doc = Document { header, status: "error", report: ErrorReport { kind, message: e.to_string() } };
                    Outcome { code, output: to_json(&doc) }
                }
            }
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn text_header(h: &Header) -> String {
    format!(
        "# {} {} {} input={} backend={} tol={:e} merge={}\n",
        h.tool,
        h.version,
        command_name(h.command),
        h.input,
        backend_name(h.backend),
        h.tol,
        h.merge
    )
}

/// A report in both renderings.
enum Report {
    Validation(ValidationReport),
    Decomposition(Box<MapHandle>),
    Locus(Box<MapHandle>),
    Matrix(SuperMatrix),
    Homomorphism(HomomorphismReport),
    Hull { value: Option<SuperMatrix>, axioms: Option<AdmissibilityReport> },
}

fn render(format: Format, header: Header, code: i32, report: Report) -> Outcome {
    let status = if code == EXIT_OK { "ok" } else { "fail" };
    let output = match format {
        Format::Json => match &report {
            Report::Validation(v) => to_json(&Document { header, status, report: serial::validation_json(v) }),
            Report::Decomposition(h) => to_json(&Document { header, status, report: serial::decomposition_json(h) }),
            Report::Locus(h) => to_json(&Document { header, status, report: serial::locus_json(&h.spectral_locus()) }),
            Report::Matrix(m) => to_json(&Document { header, status, report: serial::encode_matrix(m) }),
            Report::Homomorphism(r) => to_json(&Document { header, status, report: r }),
            Report::Hull { value, axioms } => {
                #[derive(Serialize)]
                struct HullJson<'a> {
                    value: Option<serial::SuperMatrixJson>,
                    axioms: Option<&'a AdmissibilityReport>,
                }
                let report = HullJson { value: value.as_ref().map(serial::encode_matrix), axioms: axioms.as_ref() };
                to_json(&Document { header, status, report })
            }
        },
        Format::Text => {
            let mut out = text_header(&header);
            write_text(&mut out, &report);
            out
        }
    };
    Outcome { code, output }
}

fn write_text(out: &mut String, report: &Report) {
    match report {
        Report::Validation(v) => {
            let _ = writeln!(out, "validation: {}", if v.passed() { "pass" } else { "FAIL" });
            for x in v.violations() {
                let _ = writeln!(out, "  condition {} ({}): {x}", x.condition(), x.relation());
            }
        }
        Report::Decomposition(h) => {
            for (i, e) in h.eigen().iter().enumerate() {
                let parts: Vec<String> =
                    e.eigenvalues().iter().zip(e.multiplicities()).map(|(l, d)| format!("{l} (x{d})")).collect();
                let _ = writeln!(out, "eigenvalues y{}: {}", i + 1, parts.join(", "));
            }
            let pd = h.decomposition();
            let sys = pd.system();
            for (j, ((label, rank), e)) in sys.labels().iter().zip(sys.ranks()).zip(sys.idempotents()).enumerate() {
                let q: Vec<String> = label.iter().map(ToString::to_string).collect();
                let _ = writeln!(out, "block {}: q=({}) rank {} offset {}", j + 1, q.join(", "), rank, pd.offsets()[j]);
                let _ = writeln!(out, "  idempotent: {e}");
            }
            let _ = writeln!(out, "basis: {}", pd.basis());
            for (i, c) in pd.conjugated().iter().enumerate() {
                let _ = writeln!(out, "conjugated y{}: {c}", i + 1);
            }
        }
        Report::Locus(h) => {
            let locus = h.spectral_locus();
            let _ = writeln!(out, "{locus}");
            let _ = writeln!(out, "rank sum: {}", locus.rank_sum());
            for (j, p) in locus.points.iter().enumerate() {
                let _ = writeln!(out, "taylor degree {}: {}", j + 1, p.taylor_degree);
            }
            let _ = writeln!(out, "nilpotency <= r_j(s1+1): {}", locus.within_block_bound);
            let _ = writeln!(out, "nilpotency <= (r-1)(s1+1): {}", locus.within_caption_bound);
        }
        Report::Matrix(m) => {
            let _ = writeln!(out, "{m}");
        }
        Report::Homomorphism(r) => {
            let _ = writeln!(out, "samples: {} ({} exact)", r.samples, r.exact_samples);
            let _ = writeln!(out, "max additive residual: {:e}", r.max_additive);
            let _ = writeln!(out, "max multiplicative residual: {:e}", r.max_multiplicative);
            let _ = writeln!(out, "homomorphism: {}", if r.passed() { "pass" } else { "FAIL" });
        }
        Report::Hull { value, axioms } => {
            if let Some(v) = value {
                let _ = writeln!(out, "value: {v}");
            }
            if let Some(a) = axioms {
                for c in &a.checks {
                    let how = if c.exact { "exact" } else { "numeric" };
                    let verdict = if c.passed { "pass" } else { "FAIL" };
                    let _ = writeln!(out, "axiom {} ({}): {verdict} residual {:e} [{how}]", c.axiom, c.name, c.residual);
                }
            }
        }
    }
}

fn validated(input: &InputFile, backend: Backend, opts: &SpectralOptions) -> Result<Result<MapHandle, ValidationReport>, Error> {
    let eta = input.assignment(backend)?;
    let report = azumaya::validate(&eta, opts)?;
    if !report.passed() {
        return Ok(Err(report));
    }
    azumaya::build(&eta, opts).map(Ok)
}

/// Samples used by `verify` when the document gives none: every pair of coordinates.
fn default_pairs(n: usize, s2: u32) -> Result<Vec<(SuperFunction, SuperFunction)>, Error> {
    let mut coords: Vec<SuperFunction> = (1..=n).map(|j| SuperFunction::y(j, n, s2)).collect();
    for l in 1..=s2 {
        coords.push(SuperFunction::theta(l, n, s2)?);
    }
    let mut pairs = Vec::new();
    for a in &coords {
        for b in &coords {
            pairs.push((a.clone(), b.clone()));
        }
    }
    Ok(pairs)
}

fn dispatch(command: Command, input: &InputFile, backend: Backend, opts: &SpectralOptions) -> Result<(i32, Report), Error> {
    let missing = |field: &str| Error::Schema { field: field.into(), message: format!("required by `{}`", command_name(command)) };
    if command == Command::Validate {
        let eta = input.assignment(backend)?;
        let report = azumaya::validate(&eta, opts)?;
        let code = if report.passed() { EXIT_OK } else { EXIT_VALIDATION };
        return Ok((code, Report::Validation(report)));
    }
    if command == Command::Hull {
        let eta = input.assignment(backend)?;
        let f = input.hull_function()?;
        let samples = input.hull_samples()?;
        if f.is_none() && samples.is_none() {
            return Err(missing("hull_function"));
        }
        let value = f.as_ref().map(|f| azumaya::cinfty_hull_eval(eta.ys(), f, opts)).transpose()?;
        let axioms = samples.map(|s: Vec<SmoothFunction>| azumaya::check_admissibility_axioms(eta.ys(), &s, opts)).transpose()?;
        let code = if axioms.as_ref().is_some_and(|a| !a.passed()) { EXIT_VALIDATION } else { EXIT_OK };
        return Ok((code, Report::Hull { value, axioms }));
    }
    let handle = match validated(input, backend, opts)? {
        Ok(h) => h,
        Err(report) => return Ok((EXIT_VALIDATION, Report::Validation(report))),
    };
    match command {
        Command::Decompose => Ok((EXIT_OK, Report::Decomposition(Box::new(handle)))),
        Command::Spectral => Ok((EXIT_OK, Report::Locus(Box::new(handle)))),
        Command::Eval => {
            let f = input.super_function()?.ok_or_else(|| missing("function"))?;
            Ok((EXIT_OK, Report::Matrix(handle.apply(&f)?)))
        }
        Command::Verify => {
            let pairs = match input.sample_pairs()? {
                Some(p) => p,
                None => default_pairs(input.n, input.s2)?,
            };
            let report = handle.verify_homomorphism(&pairs)?;
            let code = if report.passed() { EXIT_OK } else { EXIT_VALIDATION };
            Ok((code, Report::Homomorphism(report)))
        }
        Command::Validate | Command::Hull => unreachable!("handled above"),
    }
}

fn command_name(c: Command) -> &'static str {
    match c {
        Command::Validate => "validate",
        Command::Decompose => "decompose",
        Command::Spectral => "spectral",
        Command::Eval => "eval",
        Command::Verify => "verify",
        Command::Hull => "hull",
    }
}

/// Writes the outcome to `out` or standard output and returns the exit code.
pub fn emit(outcome: &Outcome, out: Option<&Path>) -> i32 {
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &outcome.output) {
                eprintln!("error: {}: {e}", path.display());
                return EXIT_INPUT;
            }
        }
        None => print!("{}", outcome.output),
    }
    outcome.code
}

//! Command-line front end: classify state sets, run the disentanglement
//! machines, verify input/output pairs, and reproduce the catalog verdicts.
//!
//! Exit codes are stable and documented: 0 success, 1 a demo claim was
//! contradicted, 10 I/O error, 11 parse error, 12 invalid state,
//! 13 precondition violated. (Argument errors exit with clap's usual 2.)

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use qdisent::catalog::{self, CatalogEntry, Expectation};
use qdisent::disentangle::{
    self, broadcast_party, classify, Classification, Machine, StateSet,
};
use qdisent::entanglement::{self, BipartiteState};
use qdisent::linalg::Tolerance;

pub mod format;
pub mod report;

use report::{
    ClaimDto, ClassificationDto, Report, StateReportDto, STATUS_CONSISTENT, STATUS_CONTRADICTED,
    STATUS_REPRODUCED,
};

pub mod exit_code {
    pub const SUCCESS: i32 = 0;
    pub const CLAIM_CONTRADICTED: i32 = 1;
    pub const IO: i32 = 10;
    pub const PARSE: i32 = 11;
    pub const INVALID_STATE: i32 = 12;
    pub const PRECONDITION: i32 = 13;
}

#[derive(Debug)]
pub enum CliError {
    Io {
        path: String,
        message: String,
    },
    Parse {
        origin: String,
        message: String,
    },
    InvalidState {
        origin: String,
        message: String,
    },
    Precondition {
        message: String,
    },
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io { path, message } => write!(f, "i/o error on {path}: {message}"),
            CliError::Parse { origin, message } => write!(f, "parse error in {origin}: {message}"),
            CliError::InvalidState { origin, message } => {
                write!(f, "invalid state in {origin}: {message}")
            }
            CliError::Precondition { message } => write!(f, "precondition violated: {message}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => exit_code::IO,
            CliError::Parse { .. } => exit_code::PARSE,
            CliError::InvalidState { .. } => exit_code::INVALID_STATE,
            CliError::Precondition { .. } => exit_code::PRECONDITION,
        }
    }

    fn precondition(err: qdisent::Error) -> CliError {
        // the core variant already carries the "precondition violated" prefix
        let message = match err {
            qdisent::Error::PreconditionViolated(inner) => inner,
            other => other.to_string(),
        };
        CliError::Precondition { message }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(
    name = "qdisent",
    version,
    about = "Classify sets of bipartite quantum states and run disentanglement machines",
    long_about = "Classify sets of bipartite quantum states by the sufficient conditions for \
                  exact disentanglement, run the matching machine (measure-and-prepare, bilocal \
                  preparation, or local broadcasting) on chosen members, and verify that outputs \
                  keep both marginals while being product or separable.\n\n\
                  Inputs are catalog names (eq3, eq4, eq5, bell, maxent) or state-set files; a \
                  'file:' prefix forces path interpretation.\n\n\
                  Exit codes: 0 success, 1 demo claim contradicted, 10 i/o error, 11 parse \
                  error, 12 invalid state, 13 precondition violated."
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate the sufficient conditions for a state set and select a machine
    Classify {
        /// Catalog name or state-set file path
        input: String,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Run a disentanglement machine on set members and verify the outputs
    Disentangle {
        /// Catalog name or state-set file path
        input: String,
        /// Member label to disentangle; all members when omitted
        #[arg(long)]
        state: Option<String>,
        /// Machine to use; auto follows the classification
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Compare an input state against a proposed disentangled output
    Verify {
        /// File holding exactly one state: the original
        input_state: String,
        /// File holding exactly one state: the candidate output
        output_state: String,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Classify and disentangle every catalog entry, checking recorded claims
    Demo {
        #[command(flatten)]
        common: CommonOpts,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    /// Follow the classification's machine selection
    Auto,
    /// Force measure-and-prepare (requires perfectly distinguishable members)
    #[value(name = "prop1a")]
    Prop1a,
    /// Force bilocal preparation (requires identical marginals)
    #[value(name = "prop1b")]
    Prop1b,
    /// Force local broadcasting (requires a commuting-marginal party)
    #[value(name = "prop2")]
    Prop2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    /// Human-readable; matrices at fixed six-decimal precision
    Text,
    /// JSON mirroring the report fields at full precision
    Structured,
}

#[derive(Args, Debug)]
struct CommonOpts {
    /// Absolute and relative tolerance for every numerical check
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Report format
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    /// Write the report to this path instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Parse arguments from the process environment and run. Returns the exit
/// code; errors are printed to stderr.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

fn execute(cli: Cli) -> CliResult<i32> {
    match cli.command {
        Command::Classify { input, common } => {
            let tol = parse_tol(common.tol)?;
            let report = cmd_classify(&input, &tol)?;
            emit(&report, &common)?;
            Ok(exit_code::SUCCESS)
        }
        Command::Disentangle {
            input,
            state,
            method,
            common,
        } => {
            let tol = parse_tol(common.tol)?;
            let report = cmd_disentangle(&input, state.as_deref(), method, &tol)?;
            emit(&report, &common)?;
            Ok(exit_code::SUCCESS)
        }
        Command::Verify {
            input_state,
            output_state,
            common,
        } => {
            let tol = parse_tol(common.tol)?;
            let report = cmd_verify(&input_state, &output_state, &tol)?;
            emit(&report, &common)?;
            Ok(exit_code::SUCCESS)
        }
        Command::Demo { common } => {
            let tol = parse_tol(common.tol)?;
            let (report, all_upheld) = cmd_demo(&tol);
            emit(&report, &common)?;
            Ok(if all_upheld {
                exit_code::SUCCESS
            } else {
                exit_code::CLAIM_CONTRADICTED
            })
        }
    }
}

fn parse_tol(value: f64) -> CliResult<Tolerance> {
    Tolerance::uniform(value).map_err(|e| CliError::Precondition {
        message: format!("--tol {value}: {e}"),
    })
}

fn emit(report: &Report, common: &CommonOpts) -> CliResult<()> {
    let rendered = match common.format {
        OutputFormat::Text => report::to_text(report),
        OutputFormat::Structured => report::to_json(report),
    };
    match &common.output {
        Some(path) => std::fs::write(path, rendered).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }),
        None => {
            print!("{rendered}");
            Ok(())
        }
    }
}

/// Resolve an input argument: catalog names win over paths, and a `file:`
/// prefix forces path interpretation.
fn resolve_input(input: &str, tol: &Tolerance) -> CliResult<(StateSet, Vec<String>)> {
    if let Some(path) = input.strip_prefix("file:") {
        return load_state_set(Path::new(path), tol);
    }
    if let Some(entry) = catalog::lookup(input) {
        return Ok((entry.set, entry.warnings));
    }
    load_state_set(Path::new(input), tol)
}

fn load_state_set(path: &Path, tol: &Tolerance) -> CliResult<(StateSet, Vec<String>)> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    format::parse_state_set(&text, &path.display().to_string(), tol)
}

/// Informational note when every member of the set is already separable; for
/// such sets the disentanglement is trivially the identity.
fn separability_note(set: &StateSet, tol: &Tolerance) -> Option<String> {
    if !set.dims().ppt_is_exact() {
        return None;
    }
    let all = set.members().iter().all(|m| {
        entanglement::is_separable(&m.state, tol).expect("dims checked ppt-exact above")
    });
    all.then(|| {
        "all members are already separable; disentanglement is trivially the identity map"
            .to_string()
    })
}

fn cmd_classify(input: &str, tol: &Tolerance) -> CliResult<Report> {
    let (set, warnings) = resolve_input(input, tol)?;
    let classification = classify(&set, tol);
    let mut report = Report::new();
    report.classification = Some(ClassificationDto::new(&set, &classification));
    report.warnings = warnings;
    if let Some(note) = separability_note(&set, tol) {
        report.warnings.push(note);
    }
    Ok(report)
}

/// Run one machine on one member, returning the verified report.
fn run_machine(
    set: &StateSet,
    classification: &Classification,
    label: &str,
    input: &BipartiteState,
    method: Method,
    tol: &Tolerance,
) -> CliResult<StateReportDto> {
    let (machine, output) = match method {
        Method::Auto => {
            let machine = classification.selected_machine;
            let output = match machine {
                Machine::MeasurePrepare => disentangle::measure_and_prepare(set, input, tol),
                Machine::BilocalPrepare => disentangle::bilocal_prepare(set, input, tol),
                Machine::LocalBroadcastB | Machine::LocalBroadcastA => {
                    disentangle::disentangle_to_separable(set, input, tol)
                }
                Machine::None => Err(qdisent::Error::PreconditionViolated(
                    "no sufficient condition applies to this set".to_string(),
                )),
            }
            .map_err(CliError::precondition)?;
            (machine, output)
        }
        Method::Prop1a => (
            Machine::MeasurePrepare,
            disentangle::measure_and_prepare(set, input, tol).map_err(CliError::precondition)?,
        ),
        Method::Prop1b => (
            Machine::BilocalPrepare,
            disentangle::bilocal_prepare(set, input, tol).map_err(CliError::precondition)?,
        ),
        Method::Prop2 => {
            let machine = match broadcast_party(set, tol) {
                Some(qdisent::linalg::Party::B) => Machine::LocalBroadcastB,
                Some(qdisent::linalg::Party::A) => Machine::LocalBroadcastA,
                None => Machine::LocalBroadcastB,
            };
            (
                machine,
                disentangle::disentangle_to_separable(set, input, tol)
                    .map_err(CliError::precondition)?,
            )
        }
    };
    let mut verified = disentangle::verify(input, &output, tol).map_err(CliError::precondition)?;
    verified.input_label = label.to_string();
    verified.machine = machine;
    Ok(StateReportDto::new(&verified))
}

fn cmd_disentangle(
    input: &str,
    state: Option<&str>,
    method: Method,
    tol: &Tolerance,
) -> CliResult<Report> {
    let (set, warnings) = resolve_input(input, tol)?;
    let classification = classify(&set, tol);
    let mut report = Report::new();
    report.classification = Some(ClassificationDto::new(&set, &classification));
    report.warnings = warnings;
    if let Some(note) = separability_note(&set, tol) {
        report.warnings.push(note);
    }

    let selected: Vec<(String, BipartiteState)> = match state {
        Some(label) => {
            let member = set.member(label).map_err(CliError::precondition)?;
            vec![(member.label.clone(), member.state.clone())]
        }
        None => set
            .members()
            .iter()
            .map(|m| (m.label.clone(), m.state.clone()))
            .collect(),
    };
    for (label, input_state) in &selected {
        let dto = run_machine(&set, &classification, label, input_state, method, tol)?;
        report.per_state.push(dto);
    }
    Ok(report)
}

fn load_single_state(path: &str, tol: &Tolerance) -> CliResult<(String, BipartiteState)> {
    let (set, _warnings) = resolve_input(path, tol)?;
    if set.len() != 1 {
        return Err(CliError::Precondition {
            message: format!(
                "{path}: expected exactly one state for verification, found {}",
                set.len()
            ),
        });
    }
    let member = &set.members()[0];
    Ok((member.label.clone(), member.state.clone()))
}

fn cmd_verify(input_path: &str, output_path: &str, tol: &Tolerance) -> CliResult<Report> {
    let (input_label, input) = load_single_state(input_path, tol)?;
    let (_, output) = load_single_state(output_path, tol)?;
    let mut verified = disentangle::verify(&input, &output, tol).map_err(CliError::precondition)?;
    verified.input_label = input_label;
    let mut report = Report::new();
    report.per_state.push(StateReportDto::new(&verified));
    Ok(report)
}

/// Deviation threshold for calling a marginal "preserved" in demo claims.
fn marginals_preserved(dto: &StateReportDto, tol: &Tolerance) -> bool {
    dto.marginal_deviation_a <= tol.threshold(1.0) && dto.marginal_deviation_b <= tol.threshold(1.0)
}

fn check_claim(
    entry: &CatalogEntry,
    classification: &Classification,
    states: &[StateReportDto],
    tol: &Tolerance,
) -> ClaimDto {
    let machine = classification.selected_machine;
    let preserved = states.iter().all(|s| marginals_preserved(s, tol));
    let (status, detail) = match entry.expected {
        Expectation::DisentanglesToProduct => {
            let all_product = states.iter().all(|s| s.output_is_product);
            if machine.yields_product() && all_product && preserved && !states.is_empty() {
                (
                    STATUS_REPRODUCED,
                    format!("machine {machine}; every output is a marginal-preserving product"),
                )
            } else {
                (
                    STATUS_CONTRADICTED,
                    format!("expected a product machine to apply, got {machine}"),
                )
            }
        }
        Expectation::DisentanglesToSeparableOnly => {
            let broadcast = matches!(machine, Machine::LocalBroadcastA | Machine::LocalBroadcastB);
            let all_separable = states.iter().all(|s| s.output_is_separable);
            let some_not_product = states.iter().any(|s| !s.output_is_product);
            if broadcast && all_separable && some_not_product && preserved && !states.is_empty() {
                (
                    STATUS_REPRODUCED,
                    format!(
                        "machine {machine}; outputs separable and marginal-preserving, \
                         entangled members map to non-product mixtures"
                    ),
                )
            } else {
                (
                    STATUS_CONTRADICTED,
                    format!("expected only a broadcast machine to apply, got {machine}"),
                )
            }
        }
        Expectation::NotDisentanglableToProduct => {
            if machine.yields_product() {
                (
                    STATUS_CONTRADICTED,
                    format!("a product machine unexpectedly applies: {machine}"),
                )
            } else {
                (
                    STATUS_CONSISTENT,
                    format!(
                        "no product machine applies (selected: {machine}); impossibility is \
                         not checked here"
                    ),
                )
            }
        }
        Expectation::NoSufficientCondition => {
            if machine == Machine::None {
                (
                    STATUS_CONSISTENT,
                    "no sufficient condition applies; impossibility is not checked here"
                        .to_string(),
                )
            } else {
                (
                    STATUS_CONTRADICTED,
                    format!("a machine unexpectedly applies: {machine}"),
                )
            }
        }
    };
    ClaimDto {
        set: entry.name.clone(),
        claim: entry.claim.clone(),
        machine: machine.to_string(),
        status: status.to_string(),
        detail,
    }
}

fn cmd_demo(tol: &Tolerance) -> (Report, bool) {
    let mut report = Report::new();
    let mut all_upheld = true;
    for entry in catalog::all_entries() {
        let classification = classify(&entry.set, tol);
        let mut states = Vec::new();
        if classification.selected_machine != Machine::None {
            for member in entry.set.members() {
                match run_machine(
                    &entry.set,
                    &classification,
                    &format!("{}/{}", entry.name, member.label),
                    &member.state,
                    Method::Auto,
                    tol,
                ) {
                    Ok(dto) => states.push(dto),
                    Err(err) => {
                        all_upheld = false;
                        report
                            .warnings
                            .push(format!("{}::{}: {err}", entry.name, member.label));
                    }
                }
            }
        }
        let claim = check_claim(&entry, &classification, &states, tol);
        if claim.status == STATUS_CONTRADICTED {
            all_upheld = false;
        }
        report.claims.push(claim);
        report.per_state.extend(states);
        for warning in &entry.warnings {
            report.warnings.push(format!("{}: {}", entry.name, warning));
        }
        if let Some(note) = separability_note(&entry.set, tol) {
            report.warnings.push(format!("{}: {}", entry.name, note));
        }
    }
    (report, all_upheld)
}

//! Report assembly and rendering.
//!
//! Every command produces the same [`Report`] shape; text rendering prints
//! matrices with fixed six-decimal precision, the structured (JSON) form
//! carries full precision and uses the same `[re, im]` complex encoding as
//! state-set files. Field order is fixed by the struct definitions, so the
//! structured output is byte-stable for identical inputs and flags.

use serde::Serialize;

use qdisent::disentangle::{Classification, DisentanglementReport, StateSet};
use qdisent::linalg::ComplexMatrix;

#[derive(Debug, Serialize)]
pub struct Report {
    pub classification: Option<ClassificationDto>,
    pub per_state: Vec<StateReportDto>,
    pub claims: Vec<ClaimDto>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new() -> Report {
        Report {
            classification: None,
            per_state: Vec::new(),
            claims: Vec::new(),
            warnings: Vec::new(),
        }
    }
}

impl Default for Report {
    fn default() -> Self {
        Report::new()
    }
}

#[derive(Debug, Serialize)]
pub struct ClassificationDto {
    pub set: String,
    pub dims: (usize, usize),
    pub members: usize,
    pub perfectly_distinguishable: bool,
    pub identical_marginals: bool,
    pub commuting_marginals_a: bool,
    pub commuting_marginals_b: bool,
    pub selected_machine: String,
}

impl ClassificationDto {
    pub fn new(set: &StateSet, c: &Classification) -> ClassificationDto {
        ClassificationDto {
            set: set.name().to_string(),
            dims: (set.dims().a, set.dims().b),
            members: set.len(),
            perfectly_distinguishable: c.perfectly_distinguishable,
            identical_marginals: c.identical_marginals,
            commuting_marginals_a: c.commuting_marginals_a,
            commuting_marginals_b: c.commuting_marginals_b,
            selected_machine: c.selected_machine.to_string(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct StateReportDto {
    pub input_label: String,
    pub machine: String,
    pub dims: (usize, usize),
    pub output: Vec<Vec<[f64; 2]>>,
    pub marginal_deviation_a: f64,
    pub marginal_deviation_b: f64,
    pub output_is_product: bool,
    pub output_is_separable: bool,
    pub ppt_margin: f64,
}

impl StateReportDto {
    pub fn new(report: &DisentanglementReport) -> StateReportDto {
        let rho = report.output.rho();
        let n = rho.rows();
        let output = (0..n)
            .map(|i| (0..n).map(|j| [rho.get(i, j).re, rho.get(i, j).im]).collect())
            .collect();
        StateReportDto {
            input_label: report.input_label.clone(),
            machine: report.machine.to_string(),
            dims: (report.output.dims().a, report.output.dims().b),
            output,
            marginal_deviation_a: report.marginal_deviation_a,
            marginal_deviation_b: report.marginal_deviation_b,
            output_is_product: report.output_is_product,
            output_is_separable: report.output_is_separable,
            ppt_margin: report.ppt_margin,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ClaimDto {
    pub set: String,
    pub claim: String,
    pub machine: String,
    pub status: String,
    pub detail: String,
}

pub const STATUS_REPRODUCED: &str = "REPRODUCED";
pub const STATUS_CONSISTENT: &str = "CONSISTENT";
pub const STATUS_CONTRADICTED: &str = "CONTRADICTED";

pub fn to_json(report: &Report) -> String {
    let mut text =
        serde_json::to_string_pretty(report).expect("reports contain only serializable data");
    text.push('\n');
    text
}

fn yes_no(value: bool) -> &'static str {
    if value {
        "yes"
    } else {
        "no"
    }
}

fn push_matrix(out: &mut String, matrix: &ComplexMatrix, indent: &str) {
    for line in matrix.to_string().lines() {
        out.push_str(indent);
        out.push_str(line);
        out.push('\n');
    }
}

pub fn to_text(report: &Report) -> String {
    let mut out = String::new();
    if let Some(c) = &report.classification {
        out.push_str(&format!(
            "classification of '{}' ({} states, dims {}x{})\n",
            c.set, c.members, c.dims.0, c.dims.1
        ));
        out.push_str(&format!(
            "  perfectly distinguishable: {}\n",
            yes_no(c.perfectly_distinguishable)
        ));
        out.push_str(&format!(
            "  identical marginals:       {}\n",
            yes_no(c.identical_marginals)
        ));
        out.push_str(&format!(
            "  commuting marginals (A):   {}\n",
            yes_no(c.commuting_marginals_a)
        ));
        out.push_str(&format!(
            "  commuting marginals (B):   {}\n",
            yes_no(c.commuting_marginals_b)
        ));
        out.push_str(&format!("  selected machine:          {}\n", c.selected_machine));
    }
    for state in &report.per_state {
        out.push('\n');
        out.push_str(&format!(
            "state '{}' via {}\n",
            state.input_label, state.machine
        ));
        out.push_str(&format!(
            "  output (dims {}x{}):\n",
            state.dims.0, state.dims.1
        ));
        let n = state.output.len();
        let matrix = ComplexMatrix::from_fn(n, n, |i, j| {
            num_complex::Complex64::new(state.output[i][j][0], state.output[i][j][1])
        });
        push_matrix(&mut out, &matrix, "    ");
        out.push_str(&format!(
            "  marginal deviation A: {:.3e}\n",
            state.marginal_deviation_a
        ));
        out.push_str(&format!(
            "  marginal deviation B: {:.3e}\n",
            state.marginal_deviation_b
        ));
        out.push_str(&format!(
            "  output is product:    {}\n",
            yes_no(state.output_is_product)
        ));
        out.push_str(&format!(
            "  output is separable:  {}\n",
            yes_no(state.output_is_separable)
        ));
        out.push_str(&format!("  ppt margin:           {:.3e}\n", state.ppt_margin));
    }
    if !report.claims.is_empty() {
        out.push_str("\nclaims:\n");
        for claim in &report.claims {
            out.push_str(&format!(
                "  {}: \"{}\" — {} ({})\n",
                claim.set, claim.claim, claim.status, claim.detail
            ));
        }
    }
    if !report.warnings.is_empty() {
        out.push_str("\nwarnings:\n");
        for warning in &report.warnings {
            out.push_str(&format!("  - {warning}\n"));
        }
    }
    out
}

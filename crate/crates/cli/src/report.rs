//! Report types produced by the subcommands, with text and CSV renderers.
//! JSON output is plain serde; every field order below is fixed so repeated
//! invocations are byte-identical.

use avnbell_core::frac::{frac_str, to_f64, Frac};
use avnbell_core::lhv::{Assignment, ClassicalBound};
use avnbell_core::montecarlo::SimReport;
use avnbell_core::threshold::{ExtendedThresholdSolution, MixtureReport, ThresholdSolution};
use serde::Serialize;
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

pub trait Render: Serialize {
    fn text(&self) -> String;
    fn csv(&self) -> String;

    fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text(),
            Format::Csv => self.csv(),
            Format::Json => {
                let mut out = serde_json::to_string_pretty(self).expect("reports serialize");
                out.push('\n');
                out
            }
        }
    }
}

fn csv_escape(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn csv_row(fields: &[String]) -> String {
    let mut row = fields
        .iter()
        .map(|f| csv_escape(f))
        .collect::<Vec<_>>()
        .join(",");
    row.push('\n');
    row
}

fn frac_cell(f: Frac) -> String {
    format!("{f} ({})", to_f64(f))
}

fn assignment_text(a: &Assignment) -> String {
    a.to_string()
}

// ---------------------------------------------------------------------------
// verify-quantum
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
pub struct IdentityRow {
    pub identity: String,
    pub sign: i32,
    pub residual: f64,
    pub passed: bool,
}

#[derive(Debug, Serialize)]
pub struct CommutationRow {
    pub a: String,
    pub b: String,
    pub expected_commute: bool,
    pub observed_commute: bool,
    pub passed: bool,
}

#[derive(Debug, Serialize)]
pub struct VerifyQuantumReport {
    pub tol: f64,
    pub state_norm_sqr: f64,
    pub identities: Vec<IdentityRow>,
    pub beta_expectation: f64,
    pub beta_expected: f64,
    pub beta_passed: bool,
    pub commutation: Vec<CommutationRow>,
    pub passed: bool,
}

impl Render for VerifyQuantumReport {
    fn text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "quantum verification (tol = {})", self.tol).unwrap();
        writeln!(out, "  state norm^2: {}", self.state_norm_sqr).unwrap();
        for row in &self.identities {
            writeln!(
                out,
                "  identity {:<10} sign {:+}  residual {:<12e} {}",
                row.identity,
                row.sign,
                row.residual,
                if row.passed { "PASS" } else { "FAIL" }
            )
            .unwrap();
        }
        writeln!(
            out,
            "  <psi|beta|psi> = {} (expected {})  {}",
            self.beta_expectation,
            self.beta_expected,
            if self.beta_passed { "PASS" } else { "FAIL" }
        )
        .unwrap();
        let bad: Vec<&CommutationRow> = self.commutation.iter().filter(|r| !r.passed).collect();
        writeln!(
            out,
            "  commutation: {}/{} pairs as expected",
            self.commutation.len() - bad.len(),
            self.commutation.len()
        )
        .unwrap();
        for row in bad {
            writeln!(out, "    UNEXPECTED: [{}, {}] commute = {}", row.a, row.b, row.observed_commute)
                .unwrap();
        }
        writeln!(out, "result: {}", if self.passed { "PASS" } else { "FAIL" }).unwrap();
        out
    }

    fn csv(&self) -> String {
        let mut out = csv_row(&["section".into(), "name".into(), "value".into(), "passed".into()]);
        out += &csv_row(&["summary".into(), "tol".into(), self.tol.to_string(), String::new()]);
        out += &csv_row(&[
            "summary".into(),
            "state_norm_sqr".into(),
            self.state_norm_sqr.to_string(),
            String::new(),
        ]);
        for row in &self.identities {
            out += &csv_row(&[
                "identity".into(),
                format!("{} ({:+})", row.identity, row.sign),
                row.residual.to_string(),
                row.passed.to_string(),
            ]);
        }
        out += &csv_row(&[
            "summary".into(),
            "beta_expectation".into(),
            self.beta_expectation.to_string(),
            self.beta_passed.to_string(),
        ]);
        for row in &self.commutation {
            out += &csv_row(&[
                "commutation".into(),
                format!("{}|{}", row.a, row.b),
                row.observed_commute.to_string(),
                row.passed.to_string(),
            ]);
        }
        out += &csv_row(&[
            "summary".into(),
            "result".into(),
            String::new(),
            self.passed.to_string(),
        ]);
        out
    }
}

// ---------------------------------------------------------------------------
// classical
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
pub struct SubsetRow {
    pub equations: Vec<u8>,
    pub satisfiable: bool,
    /// Every three-equation subset of this four-equation set is satisfiable.
    pub minimal: bool,
}

#[derive(Debug, Serialize)]
pub struct ClassicalReport {
    pub bound: ClassicalBound,
    pub full_system_satisfiable: bool,
    pub subsets: Vec<SubsetRow>,
    pub passed: bool,
}

impl Render for ClassicalReport {
    fn text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "classical bound over all 4096 assignments").unwrap();
        writeln!(out, "  max bell value:  {}", self.bound.max).unwrap();
        writeln!(out, "  min bell value:  {}", self.bound.min).unwrap();
        writeln!(out, "  maximizers:      {}", self.bound.argmax_count).unwrap();
        writeln!(out, "  first maximizer: {}", assignment_text(&self.bound.witness)).unwrap();
        writeln!(
            out,
            "full 12-equation system satisfiable: {}",
            self.full_system_satisfiable
        )
        .unwrap();
        for s in &self.subsets {
            writeln!(
                out,
                "  subset {:?}: satisfiable = {}, minimal = {}",
                s.equations, s.satisfiable, s.minimal
            )
            .unwrap();
        }
        writeln!(out, "result: {}", if self.passed { "PASS" } else { "FAIL" }).unwrap();
        out
    }

    fn csv(&self) -> String {
        let mut out = csv_row(&["section".into(), "name".into(), "value".into()]);
        out += &csv_row(&["bound".into(), "max".into(), self.bound.max.to_string()]);
        out += &csv_row(&["bound".into(), "min".into(), self.bound.min.to_string()]);
        out += &csv_row(&[
            "bound".into(),
            "argmax_count".into(),
            self.bound.argmax_count.to_string(),
        ]);
        out += &csv_row(&[
            "bound".into(),
            "witness".into(),
            assignment_text(&self.bound.witness),
        ]);
        out += &csv_row(&[
            "system".into(),
            "full_satisfiable".into(),
            self.full_system_satisfiable.to_string(),
        ]);
        for s in &self.subsets {
            out += &csv_row(&[
                "subset".into(),
                format!("{:?}", s.equations),
                format!("satisfiable={} minimal={}", s.satisfiable, s.minimal),
            ]);
        }
        out
    }
}

// ---------------------------------------------------------------------------
// game
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
pub struct ScenarioQuantumRow {
    pub scenario: String,
    pub losing_born_mass: f64,
}

#[derive(Debug, Serialize)]
pub struct GameReport {
    #[serde(with = "frac_str")]
    pub classical_optimum: Frac,
    pub classical_optimum_decimal: f64,
    pub witness: Assignment,
    pub witness_valid: bool,
    pub quantum_win_probability: f64,
    pub quantum_scenarios: Vec<ScenarioQuantumRow>,
    pub passed: bool,
}

impl Render for GameReport {
    fn text(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "optimal classical conditional win probability: {} ({})",
            self.classical_optimum, self.classical_optimum_decimal
        )
        .unwrap();
        writeln!(out, "  witness: {}", assignment_text(&self.witness)).unwrap();
        writeln!(out, "  witness validates: {}", self.witness_valid).unwrap();
        writeln!(out, "quantum win probability: {}", self.quantum_win_probability).unwrap();
        for s in &self.quantum_scenarios {
            writeln!(
                out,
                "  scenario {:<14} losing Born mass {:e}",
                s.scenario, s.losing_born_mass
            )
            .unwrap();
        }
        writeln!(out, "result: {}", if self.passed { "PASS" } else { "FAIL" }).unwrap();
        out
    }

    fn csv(&self) -> String {
        let mut out = csv_row(&["section".into(), "name".into(), "value".into()]);
        out += &csv_row(&[
            "classical".into(),
            "optimum".into(),
            self.classical_optimum.to_string(),
        ]);
        out += &csv_row(&[
            "classical".into(),
            "witness".into(),
            assignment_text(&self.witness),
        ]);
        out += &csv_row(&[
            "classical".into(),
            "witness_valid".into(),
            self.witness_valid.to_string(),
        ]);
        out += &csv_row(&[
            "quantum".into(),
            "win_probability".into(),
            self.quantum_win_probability.to_string(),
        ]);
        for s in &self.quantum_scenarios {
            out += &csv_row(&[
                "quantum".into(),
                s.scenario.clone(),
                s.losing_born_mass.to_string(),
            ]);
        }
        out
    }
}

// ---------------------------------------------------------------------------
// threshold
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
pub struct ThresholdReport {
    pub game: String,
    #[serde(with = "frac_str")]
    pub eta_star: Frac,
    pub eta_star_decimal: f64,
    pub solution: ThresholdSolution,
    pub verification: MixtureReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extended: Option<ExtendedReportPart>,
}

#[derive(Debug, Serialize)]
pub struct ExtendedReportPart {
    #[serde(with = "frac_str")]
    pub eta_star: Frac,
    pub eta_star_decimal: f64,
    pub solution: ExtendedThresholdSolution,
    pub verification: MixtureReport,
}

fn mixture_report_text(out: &mut String, indent: &str, r: &MixtureReport) {
    writeln!(out, "{indent}eta1 = {}, eta2 = {}", frac_cell(r.eta1), frac_cell(r.eta2)).unwrap();
    match r.conditional_win {
        Some(w) => writeln!(out, "{indent}conditional win = {}", frac_cell(w)).unwrap(),
        None => writeln!(out, "{indent}conditional win = undefined").unwrap(),
    }
    writeln!(out, "{indent}violations: {}", r.violations.len()).unwrap();
    for v in &r.violations {
        writeln!(
            out,
            "{indent}  component {} loses scenario {} (equation {}): alice {:?}, bob {:?}",
            v.component, v.scenario, v.equation, v.alice_values, v.bob_values
        )
        .unwrap();
    }
    writeln!(out, "{indent}passed: {}", r.passed).unwrap();
}

impl Render for ThresholdReport {
    fn text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "detection-efficiency threshold ({} game)", self.game).unwrap();
        writeln!(
            out,
            "  eta* = {} ({})  [observable-level refusal sets]",
            self.eta_star, self.eta_star_decimal
        )
        .unwrap();
        writeln!(out, "  support points: {}", self.solution.support_points.len()).unwrap();
        writeln!(out, "  witness components:").unwrap();
        for c in &self.solution.witness.components {
            writeln!(
                out,
                "    weight {:<6} alice {:?} bob {:?}",
                c.weight.to_string(),
                c.alice.entries(),
                c.bob.entries()
            )
            .unwrap();
        }
        writeln!(out, "  witness verification:").unwrap();
        mixture_report_text(&mut out, "    ", &self.verification);
        if let Some(ext) = &self.extended {
            writeln!(
                out,
                "  per-question refusal extension: eta* = {} ({})",
                ext.eta_star, ext.eta_star_decimal
            )
            .unwrap();
            for c in &ext.solution.witness.components {
                writeln!(
                    out,
                    "    weight {:<6} alice values {:?} refuses {:?}; bob values {:?} refuses {:?}",
                    c.weight.to_string(),
                    c.alice.values(),
                    c.alice.refused_scenarios(),
                    c.bob.values(),
                    c.bob.refused_scenarios(),
                )
                .unwrap();
            }
            writeln!(out, "  extension witness verification:").unwrap();
            mixture_report_text(&mut out, "    ", &ext.verification);
        }
        out
    }

    fn csv(&self) -> String {
        let mut out = csv_row(&["section".into(), "name".into(), "value".into()]);
        out += &csv_row(&["threshold".into(), "game".into(), self.game.clone()]);
        out += &csv_row(&[
            "threshold".into(),
            "eta_star".into(),
            self.eta_star.to_string(),
        ]);
        out += &csv_row(&[
            "threshold".into(),
            "eta_star_decimal".into(),
            self.eta_star_decimal.to_string(),
        ]);
        for (a, b) in &self.solution.support_points {
            out += &csv_row(&["support_point".into(), a.to_string(), b.to_string()]);
        }
        out += &csv_row(&[
            "verification".into(),
            "passed".into(),
            self.verification.passed.to_string(),
        ]);
        if let Some(ext) = &self.extended {
            out += &csv_row(&[
                "extended".into(),
                "eta_star".into(),
                ext.eta_star.to_string(),
            ]);
            out += &csv_row(&[
                "extended".into(),
                "passed".into(),
                ext.verification.passed.to_string(),
            ]);
        }
        out
    }
}

// ---------------------------------------------------------------------------
// check-mixture
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
pub struct CheckMixtureReport {
    pub file: String,
    pub game: String,
    pub components: usize,
    pub report: MixtureReport,
    pub passed: bool,
}

impl Render for CheckMixtureReport {
    fn text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "mixture audit: {} ({} game)", self.file, self.game).unwrap();
        writeln!(out, "  components: {}", self.components).unwrap();
        mixture_report_text(&mut out, "  ", &self.report);
        writeln!(out, "result: {}", if self.passed { "PASS" } else { "FAIL" }).unwrap();
        out
    }

    fn csv(&self) -> String {
        let mut out = csv_row(&["name".into(), "value".into()]);
        out += &csv_row(&["file".into(), self.file.clone()]);
        out += &csv_row(&["eta1".into(), self.report.eta1.to_string()]);
        out += &csv_row(&["eta2".into(), self.report.eta2.to_string()]);
        out += &csv_row(&[
            "conditional_win".into(),
            self.report
                .conditional_win
                .map(|w| w.to_string())
                .unwrap_or_else(|| "undefined".into()),
        ]);
        for v in &self.report.violations {
            out += &csv_row(&[
                "violation".into(),
                format!(
                    "component {} scenario {} equation {}",
                    v.component, v.scenario, v.equation
                ),
            ]);
        }
        out += &csv_row(&["passed".into(), self.passed.to_string()]);
        out
    }
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
#[serde(transparent)]
pub struct SimulateReport(pub SimReport);

impl Render for SimulateReport {
    fn text(&self) -> String {
        let r = &self.0;
        let mut out = String::new();
        writeln!(
            out,
            "simulation: {} rounds, seed {}, eta = ({}, {})",
            r.config.rounds, r.config.seed, r.config.eta1, r.config.eta2
        )
        .unwrap();
        writeln!(
            out,
            "  {:<16} {:>9} {:>14} {:>9}",
            "scenario", "asked", "both-detected", "won"
        )
        .unwrap();
        for t in &r.scenarios {
            writeln!(
                out,
                "  {:<16} {:>9} {:>14} {:>9}",
                t.scenario, t.asked, t.both_detected, t.won
            )
            .unwrap();
        }
        writeln!(
            out,
            "  detected: alice {} / bob {} of {} rounds",
            r.alice_detected, r.bob_detected, r.config.rounds
        )
        .unwrap();
        match (r.conditional_win_rate, r.conditional_win_stderr) {
            (Some(rate), Some(se)) => {
                writeln!(out, "  conditional win rate: {rate} (stderr {se})").unwrap()
            }
            _ => writeln!(out, "  conditional win rate: undefined (no both-detected rounds)")
                .unwrap(),
        }
        match &r.beta {
            Some(b) => writeln!(out, "  bell estimate: {} (stderr {})", b.value, b.stderr).unwrap(),
            None => writeln!(out, "  bell estimate: undefined ({})", r.beta_status).unwrap(),
        }
        writeln!(out, "  estimator: {}", r.estimator).unwrap();
        out
    }

    fn csv(&self) -> String {
        let r = &self.0;
        let mut out = csv_row(&[
            "scenario".into(),
            "asked".into(),
            "both_detected".into(),
            "won".into(),
        ]);
        for t in &r.scenarios {
            out += &csv_row(&[
                t.scenario.clone(),
                t.asked.to_string(),
                t.both_detected.to_string(),
                t.won.to_string(),
            ]);
        }
        out += &csv_row(&[
            "TOTAL".into(),
            r.config.rounds.to_string(),
            r.both_detected.to_string(),
            r.won.to_string(),
        ]);
        out += &csv_row(&[
            "conditional_win_rate".into(),
            r.conditional_win_rate
                .map(|v| v.to_string())
                .unwrap_or_else(|| "undefined".into()),
            "stderr".into(),
            r.conditional_win_stderr
                .map(|v| v.to_string())
                .unwrap_or_else(|| "undefined".into()),
        ]);
        out += &csv_row(&[
            "beta_estimate".into(),
            r.beta
                .as_ref()
                .map(|b| b.value.to_string())
                .unwrap_or_else(|| "undefined".into()),
            "stderr".into(),
            r.beta
                .as_ref()
                .map(|b| b.stderr.to_string())
                .unwrap_or_else(|| "undefined".into()),
        ]);
        out
    }
}

// ---------------------------------------------------------------------------
// gaps
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
pub struct GapTableRow {
    pub name: String,
    pub quantum_value: f64,
    pub classical_bound: f64,
    pub gap: f64,
    /// "computed" rows come from this toolkit; "cited" rows are benchmark
    /// constants for comparison.
    pub source: String,
}

#[derive(Debug, Serialize)]
pub struct GapsReport {
    pub rows: Vec<GapTableRow>,
}

impl Render for GapsReport {
    fn text(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "{:<28} {:>14} {:>16} {:>10}  source",
            "inequality", "quantum value", "classical bound", "gap"
        )
        .unwrap();
        for r in &self.rows {
            writeln!(
                out,
                "{:<28} {:>14} {:>16} {:>10}  {}",
                r.name, r.quantum_value, r.classical_bound, r.gap, r.source
            )
            .unwrap();
        }
        out
    }

    fn csv(&self) -> String {
        let mut out = csv_row(&[
            "name".into(),
            "quantum_value".into(),
            "classical_bound".into(),
            "gap".into(),
            "source".into(),
        ]);
        for r in &self.rows {
            out += &csv_row(&[
                r.name.clone(),
                r.quantum_value.to_string(),
                r.classical_bound.to_string(),
                r.gap.to_string(),
                r.source.clone(),
            ]);
        }
        out
    }
}

//! `avnbell` — command-line front end for the two-photon all-versus-nothing
//! Bell-test toolkit.
//!
//! Exit codes: 0 = all performed checks passed; 1 = a check failed;
//! 2 = usage, file or parse problem; 3 = input data violates an invariant
//! (e.g. mixture weights not summing to 1); 4 = internal error.

mod report;

use avnbell_core::frac::to_f64;
use avnbell_core::game::{self, Mixture};
use avnbell_core::lhv;
use avnbell_core::montecarlo::{self, SimConfig, StrategySpec};
use avnbell_core::quantum::{
    bell_operator, build_state, eigen_identities, eigencheck_residual, expectation,
    observable_matrix, ObservableId,
};
use avnbell_core::threshold::{
    solve_threshold, solve_threshold_extended, verify_extended_mixture, verify_mixture, GameSpec,
};
use clap::{Parser, Subcommand, ValueEnum};
use report::{Format, Render};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_INVALID_DATA: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

#[derive(Parser)]
#[command(
    name = "avnbell",
    version,
    about = "Verification and simulation toolkit for a two-photon all-versus-nothing Bell test"
)]
struct Cli {
    /// Output format (env: AVNBELL_FORMAT)
    #[arg(
        long,
        global = true,
        value_enum,
        env = "AVNBELL_FORMAT",
        default_value = "text"
    )]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GameChoice {
    Full,
    Reduced,
}

#[derive(Subcommand)]
enum Command {
    /// Check the 14 operator identities, the Bell expectation value and the
    /// commutation structure of the 12 observables
    VerifyQuantum {
        /// Residual-norm tolerance for every check
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Exhaustive classical bound and the unsatisfiability certificates
    Classical,
    /// The eight-question game: exhaustive classical optimum and the quantum
    /// win probability
    Game,
    /// Detection-efficiency threshold by exhaustive safe-strategy search
    Threshold {
        #[arg(long, value_enum, default_value = "full")]
        game: GameChoice,
        /// Also solve the per-question-refusal extension
        #[arg(long)]
        extended: bool,
    },
    /// Audit a mixture file (JSON) against the full game
    CheckMixture { path: PathBuf },
    /// Seeded Monte Carlo emulation of a lossy-detector experiment
    Simulate {
        /// Detector efficiency of photon 1 (quantum strategy only)
        #[arg(long, default_value_t = 1.0)]
        eta1: f64,
        /// Detector efficiency of photon 2 (quantum strategy only)
        #[arg(long, default_value_t = 1.0)]
        eta2: f64,
        #[arg(long)]
        rounds: u64,
        #[arg(long)]
        seed: u64,
        /// "quantum" or "lhv:<mixture.json>"
        #[arg(long)]
        strategy: String,
    },
    /// Violation-gap comparison table (quantum value vs classical bound)
    Gaps,
}

enum CliError {
    Input(String),
    InvalidData(String),
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::InvalidData(_) => EXIT_INVALID_DATA,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::InvalidData(m) | CliError::Internal(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli.command, cli.format) {
        Ok(passed) => {
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_CHECK_FAILED)
            }
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn dispatch(command: &Command, format: Format) -> Result<bool, CliError> {
    match command {
        Command::VerifyQuantum { tol } => {
            let report = cmd_verify_quantum(*tol);
            print!("{}", report.render(format));
            Ok(report.passed)
        }
        Command::Classical => {
            let report = cmd_classical();
            print!("{}", report.render(format));
            Ok(report.passed)
        }
        Command::Game => {
            let report = cmd_game();
            print!("{}", report.render(format));
            Ok(report.passed)
        }
        Command::Threshold { game, extended } => {
            let report = cmd_threshold(*game, *extended)?;
            print!("{}", report.render(format));
            Ok(report.verification.passed
                && report
                    .extended
                    .as_ref()
                    .is_none_or(|e| e.verification.passed))
        }
        Command::CheckMixture { path } => {
            let report = cmd_check_mixture(path)?;
            print!("{}", report.render(format));
            Ok(report.passed)
        }
        Command::Simulate {
            eta1,
            eta2,
            rounds,
            seed,
            strategy,
        } => {
            let report = cmd_simulate(*eta1, *eta2, *rounds, *seed, strategy)?;
            print!("{}", report.render(format));
            Ok(true)
        }
        Command::Gaps => {
            let report = cmd_gaps();
            let passed = report
                .rows
                .iter()
                .find(|r| r.source == "computed")
                .map(|r| {
                    (r.quantum_value - 16.0).abs() < 1e-9
                        && r.classical_bound == 8.0
                        && (r.gap - 8.0).abs() < 1e-9
                })
                .unwrap_or(false);
            print!("{}", report.render(format));
            Ok(passed)
        }
    }
}

fn cmd_verify_quantum(tol: f64) -> report::VerifyQuantumReport {
    let psi = build_state();
    let identities: Vec<report::IdentityRow> = eigen_identities()
        .iter()
        .map(|id| {
            let residual = eigencheck_residual(&psi, id);
            report::IdentityRow {
                identity: id.label(),
                sign: id.sign.value(),
                residual,
                passed: residual <= tol,
            }
        })
        .collect();

    let beta_expectation = expectation(&psi, &bell_operator()).unwrap_or(f64::NAN);
    let beta_passed = (beta_expectation - 16.0).abs() <= tol;

    let all = ObservableId::all();
    let mut commutation = Vec::new();
    for (i, a) in all.iter().enumerate() {
        for b in &all[i + 1..] {
            let expected = !(a.party == b.party && a.dof == b.dof && a.axis != b.axis);
            let commutator = observable_matrix(*a)
                .mul(&observable_matrix(*b))
                .sub(&observable_matrix(*b).mul(&observable_matrix(*a)))
                .frobenius_norm();
            let observed = commutator <= tol;
            commutation.push(report::CommutationRow {
                a: a.to_string(),
                b: b.to_string(),
                expected_commute: expected,
                observed_commute: observed,
                passed: observed == expected,
            });
        }
    }

    let passed = identities.iter().all(|r| r.passed)
        && beta_passed
        && commutation.iter().all(|r| r.passed);
    report::VerifyQuantumReport {
        tol,
        state_norm_sqr: psi.norm_sqr(),
        identities,
        beta_expectation,
        beta_expected: 16.0,
        beta_passed,
        commutation,
        passed,
    }
}

fn cmd_classical() -> report::ClassicalReport {
    let bound = lhv::classical_bound();
    let all: Vec<u8> = (1..=12).collect();
    let full_system_satisfiable = lhv::subset_satisfiable(&all).satisfiable;
    let subsets: Vec<report::SubsetRow> = lhv::avn_subsets()
        .iter()
        .map(|s| {
            let satisfiable = lhv::subset_satisfiable(s).satisfiable;
            let minimal = s.iter().all(|drop| {
                let rest: Vec<u8> = s.iter().copied().filter(|x| x != drop).collect();
                lhv::subset_satisfiable(&rest).satisfiable
            });
            report::SubsetRow {
                equations: s.to_vec(),
                satisfiable,
                minimal,
            }
        })
        .collect();
    let passed = !full_system_satisfiable && subsets.iter().all(|s| !s.satisfiable && s.minimal);
    report::ClassicalReport {
        bound,
        full_system_satisfiable,
        subsets,
        passed,
    }
}

fn cmd_game() -> report::GameReport {
    let (optimum, witness) = game::optimal_classical();
    let (alice, bob) = game::assignment_instruction_sets(&witness);
    let witness_valid =
        game::strategy_win_probability(&alice, &bob).conditional_win == Some(optimum);

    let psi = build_state();
    let quantum_scenarios: Vec<report::ScenarioQuantumRow> = game::scenario_table()
        .iter()
        .map(|s| report::ScenarioQuantumRow {
            scenario: s.label(),
            losing_born_mass: s.losing_mass(&psi),
        })
        .collect();
    let quantum_wins_all = quantum_scenarios.iter().all(|s| s.losing_born_mass < 1e-12);

    report::GameReport {
        classical_optimum: optimum,
        classical_optimum_decimal: to_f64(optimum),
        witness,
        witness_valid,
        quantum_win_probability: if quantum_wins_all { 1.0 } else { f64::NAN },
        quantum_scenarios,
        passed: witness_valid && quantum_wins_all,
    }
}

fn cmd_threshold(choice: GameChoice, extended: bool) -> Result<report::ThresholdReport, CliError> {
    let game_spec = match choice {
        GameChoice::Full => GameSpec::full(),
        GameChoice::Reduced => GameSpec::reduced(),
    };
    let solution = solve_threshold(&game_spec).map_err(|e| CliError::Internal(e.to_string()))?;
    let verification = verify_mixture(&game_spec, &solution.witness)
        .map_err(|e| CliError::Internal(e.to_string()))?;

    let extended = if extended {
        let solution =
            solve_threshold_extended(&game_spec).map_err(|e| CliError::Internal(e.to_string()))?;
        let verification = verify_extended_mixture(&game_spec, &solution.witness);
        Some(report::ExtendedReportPart {
            eta_star: solution.eta_star,
            eta_star_decimal: to_f64(solution.eta_star),
            solution,
            verification,
        })
    } else {
        None
    };

    Ok(report::ThresholdReport {
        game: game_spec.name.to_string(),
        eta_star: solution.eta_star,
        eta_star_decimal: to_f64(solution.eta_star),
        solution,
        verification,
        extended,
    })
}

fn load_mixture(path: &Path) -> Result<Mixture, CliError> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let mixture: Mixture = serde_json::from_str(&raw)
        .map_err(|e| CliError::Input(format!("cannot parse {}: {e}", path.display())))?;
    mixture
        .validate()
        .map_err(|e| CliError::InvalidData(format!("{}: {e}", path.display())))?;
    Ok(mixture)
}

fn cmd_check_mixture(path: &Path) -> Result<report::CheckMixtureReport, CliError> {
    let mixture = load_mixture(path)?;
    let game_spec = GameSpec::full();
    let audited = verify_mixture(&game_spec, &mixture)
        .map_err(|e| CliError::InvalidData(format!("{}: {e}", path.display())))?;
    Ok(report::CheckMixtureReport {
        file: path.display().to_string(),
        game: game_spec.name.to_string(),
        components: mixture.components.len(),
        passed: audited.passed,
        report: audited,
    })
}

fn cmd_simulate(
    eta1: f64,
    eta2: f64,
    rounds: u64,
    seed: u64,
    strategy: &str,
) -> Result<report::SimulateReport, CliError> {
    let strategy = if strategy == "quantum" {
        StrategySpec::Quantum
    } else if let Some(path) = strategy.strip_prefix("lhv:") {
        StrategySpec::Lhv {
            mixture: load_mixture(Path::new(path))?,
        }
    } else {
        return Err(CliError::Input(format!(
            "unknown strategy {strategy:?}; use \"quantum\" or \"lhv:<mixture.json>\""
        )));
    };
    let config = SimConfig {
        eta1,
        eta2,
        rounds,
        seed,
        strategy,
    };
    config
        .validate()
        .map_err(|e| CliError::Input(format!("invalid flags: {e}")))?;
    let sim = montecarlo::run(&config).map_err(|e| CliError::Internal(e.to_string()))?;
    Ok(report::SimulateReport(sim))
}

fn cmd_gaps() -> report::GapsReport {
    let sqrt8 = 8.0_f64.sqrt();
    let mut rows = vec![
        report::GapTableRow {
            name: "CHSH".into(),
            quantum_value: sqrt8,
            classical_bound: 2.0,
            gap: sqrt8 - 2.0,
            source: "cited".into(),
        },
        report::GapTableRow {
            name: "Mermin three-qubit".into(),
            quantum_value: 4.0,
            classical_bound: 2.0,
            gap: 2.0,
            source: "cited".into(),
        },
        report::GapTableRow {
            name: "two-observer AVN".into(),
            quantum_value: 9.0,
            classical_bound: 7.0,
            gap: 2.0,
            source: "cited".into(),
        },
    ];
    let quantum = expectation(&build_state(), &bell_operator()).unwrap_or(f64::NAN);
    let classical = lhv::classical_bound().max as f64;
    rows.push(report::GapTableRow {
        name: "two-photon AVN (this work)".into(),
        quantum_value: quantum,
        classical_bound: classical,
        gap: quantum - classical,
        source: "computed".into(),
    });
    report::GapsReport { rows }
}

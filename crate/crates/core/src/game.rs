//! The eight-question nonlocal game built on the twelve value equations.
//!
//! Each player is asked one polarization observable and one path observable
//! of their own photon; same-numbered questions are paired with themselves
//! and (v)↔(viii), (vi)↔(vii) are paired with each other, giving the eight
//! equiprobable scenarios. A round is won when every equation whose
//! observables are all asked holds on the answers. Everything here is exact
//! rational arithmetic.

use crate::frac::{frac, frac_str, Frac};
use crate::lhv::{self, Assignment, Equation};
use crate::quantum::{Axis, Dof, ObservableId, Party, QuantumState};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GameError {
    #[error("instruction-set entry {0} is not -1, 0 or +1")]
    InvalidEntry(i8),
    #[error("instruction set must have exactly 6 entries, got {0}")]
    WrongEntryCount(usize),
    #[error("mixture weight {0} is negative")]
    NegativeWeight(Frac),
    #[error("mixture weights sum to {0}, expected exactly 1")]
    WeightSum(Frac),
    #[error("mixture has no components")]
    EmptyMixture,
}

/// One of the eight questions: a polarization axis and a path axis.
/// (Only the (Z, z) pairing is never asked.)
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Question {
    I,
    II,
    III,
    IV,
    V,
    VI,
    VII,
    VIII,
}

impl Question {
    pub fn all() -> [Question; 8] {
        use Question::*;
        [I, II, III, IV, V, VI, VII, VIII]
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// (polarization axis, path axis) the question asks about.
    pub fn axes(self) -> (Axis, Axis) {
        use Question::*;
        match self {
            I => (Axis::X, Axis::Z),
            II => (Axis::Z, Axis::X),
            III => (Axis::Y, Axis::Z),
            IV => (Axis::Z, Axis::Y),
            V => (Axis::X, Axis::X),
            VI => (Axis::X, Axis::Y),
            VII => (Axis::Y, Axis::X),
            VIII => (Axis::Y, Axis::Y),
        }
    }

    /// The concrete (polarization, path) observables for one party.
    pub fn asked(self, party: Party) -> (ObservableId, ObservableId) {
        let (pol, path) = self.axes();
        (
            ObservableId::new(party, Dof::Polarization, pol),
            ObservableId::new(party, Dof::Path, path),
        )
    }
}

impl fmt::Display for Question {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Question::*;
        f.write_str(match self {
            I => "(i)",
            II => "(ii)",
            III => "(iii)",
            IV => "(iv)",
            V => "(v)",
            VI => "(vi)",
            VII => "(vii)",
            VIII => "(viii)",
        })
    }
}

/// One allowed question pairing, with the equations it tests and its
/// probability (1/8 under uniform questioning).
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub alice_q: Question,
    pub bob_q: Question,
    pub tested_equations: Vec<u8>,
    pub probability: Frac,
}

impl Scenario {
    pub fn label(&self) -> String {
        format!("{}-{}", self.alice_q, self.bob_q)
    }

    /// The four measured observables in slot order
    /// (alice pol, alice path, bob pol, bob path).
    pub fn observables(&self) -> [ObservableId; 4] {
        let (ap, aq) = self.alice_q.asked(Party::One);
        let (bp, bq) = self.bob_q.asked(Party::Two);
        [ap, aq, bp, bq]
    }

    /// Born-rule outcome table of the four jointly measured observables.
    pub fn distribution(&self, state: &QuantumState) -> crate::quantum::OutcomeTable {
        crate::quantum::outcome_distribution(state, self.observables())
    }

    /// Total Born mass on outcomes that lose this scenario.
    pub fn losing_mass(&self, state: &QuantumState) -> f64 {
        let table = self.distribution(state);
        (0..16)
            .filter(|index| {
                let v = |s| crate::quantum::OutcomeTable::outcome_value(*index, s);
                !win(self, (v(0), v(1)), (v(2), v(3)))
            })
            .map(|index| table.p[index])
            .sum()
    }
}

/// The canonical eight scenarios. `tested_equations` is computed, not
/// transcribed: an equation is tested exactly when all its observables are
/// contained in the union of the two asked pairs.
pub fn scenario_table() -> &'static [Scenario] {
    static TABLE: OnceLock<Vec<Scenario>> = OnceLock::new();
    TABLE.get_or_init(|| {
        use Question::*;
        let pairs = [
            (I, I),
            (II, II),
            (III, III),
            (IV, IV),
            (V, VIII),
            (VI, VII),
            (VII, VI),
            (VIII, V),
        ];
        pairs
            .iter()
            .map(|(alice_q, bob_q)| {
                let (ap, aq) = alice_q.asked(Party::One);
                let (bp, bq) = bob_q.asked(Party::Two);
                let asked = [ap, aq, bp, bq];
                let tested_equations = lhv::equation_table()
                    .iter()
                    .filter(|e| e.observables.iter().all(|o| asked.contains(o)))
                    .map(|e| e.id)
                    .collect();
                Scenario {
                    alice_q: *alice_q,
                    bob_q: *bob_q,
                    tested_equations,
                    probability: frac(1, 8),
                }
            })
            .collect()
    })
}

fn equation_holds_on(e: &Equation, value_of: impl Fn(ObservableId) -> i8) -> bool {
    let mut prod = e.sign.value();
    for o in &e.observables {
        let v = value_of(*o);
        debug_assert!(v == 1 || v == -1);
        prod *= v as i32;
    }
    prod == 1
}

/// Win predicate: every tested equation holds on the four answers
/// (alice = (pol, path), bob = (pol, path), values ±1).
pub fn win(scenario: &Scenario, alice_answers: (i8, i8), bob_answers: (i8, i8)) -> bool {
    for v in [alice_answers.0, alice_answers.1, bob_answers.0, bob_answers.1] {
        assert!(v == 1 || v == -1, "answers must be ±1");
    }
    let obs = scenario.observables();
    let value_of = |o: ObservableId| {
        if o == obs[0] {
            alice_answers.0
        } else if o == obs[1] {
            alice_answers.1
        } else if o == obs[2] {
            bob_answers.0
        } else if o == obs[3] {
            bob_answers.1
        } else {
            panic!(
                "equation observable {o} is not asked in scenario {}",
                scenario.label()
            )
        }
    };
    scenario
        .tested_equations
        .iter()
        .all(|id| equation_holds_on(lhv::equation(*id), value_of))
}

/// One party's deterministic local strategy: a value in {−1, 0, +1} for each
/// of the six observables in canonical order (X, Y, Z, x, y, z). A 0 is a
/// refusal mark — the party gives no answer to any question that includes
/// that observable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct InstructionSet {
    entries: [i8; 6],
}

impl InstructionSet {
    pub fn new(entries: [i8; 6]) -> Result<Self, GameError> {
        for v in entries {
            if !(-1..=1).contains(&v) {
                return Err(GameError::InvalidEntry(v));
            }
        }
        Ok(Self { entries })
    }

    pub fn all_plus() -> Self {
        Self { entries: [1; 6] }
    }

    pub fn entries(&self) -> [i8; 6] {
        self.entries
    }

    /// Value by local observable index (dof·3 + axis).
    pub fn entry(&self, local_index: usize) -> i8 {
        self.entries[local_index]
    }

    pub fn value_of(&self, o: ObservableId) -> i8 {
        self.entries[o.local_index()]
    }

    /// Does this set answer the question (both asked observables nonzero)?
    pub fn answers(&self, q: Question) -> bool {
        let (pol, path) = q.asked(Party::One); // local indices are party independent
        self.value_of(pol) != 0 && self.value_of(path) != 0
    }

    /// The (pol, path) answers to a question, if it is answered.
    pub fn answered_values(&self, q: Question) -> Option<(i8, i8)> {
        let (pol, path) = q.asked(Party::One);
        let (a, b) = (self.value_of(pol), self.value_of(path));
        (a != 0 && b != 0).then_some((a, b))
    }
}

impl<'de> Deserialize<'de> for InstructionSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = Vec::<i8>::deserialize(d)?;
        if raw.len() != 6 {
            return Err(serde::de::Error::custom(GameError::WrongEntryCount(
                raw.len(),
            )));
        }
        let mut entries = [0i8; 6];
        entries.copy_from_slice(&raw);
        InstructionSet::new(entries).map_err(serde::de::Error::custom)
    }
}

/// The all-answering all-+1 joint strategy (the simple optimal classical
/// strategy; wins 6 of 8 scenarios).
pub fn all_plus_pair() -> (InstructionSet, InstructionSet) {
    (InstructionSet::all_plus(), InstructionSet::all_plus())
}

/// Joint strategy where Alice refuses every question involving her Y or y
/// observable and answers +1 elsewhere; Bob answers +1 everywhere.
/// Alice answers 3 of the 8 questions and no answered scenario is lost.
pub fn alice_y_refusal_pair() -> (InstructionSet, InstructionSet) {
    (
        InstructionSet::new([1, 0, 1, 1, 0, 1]).unwrap(),
        InstructionSet::all_plus(),
    )
}

/// Mirror image: Bob refuses his Y/y questions, Alice answers everything.
pub fn bob_y_refusal_pair() -> (InstructionSet, InstructionSet) {
    let (b, a) = alice_y_refusal_pair();
    (a, b)
}

/// Fraction of the eight questions this set answers.
pub fn answer_fraction(s: &InstructionSet) -> Frac {
    let n = Question::all().iter().filter(|q| s.answers(**q)).count();
    frac(n as i64, 8)
}

/// Exact statistics of one joint deterministic strategy over the eight
/// equiprobable scenarios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyStats {
    /// Probability that both parties answer.
    pub both_answer: Frac,
    /// Win probability conditioned on both answering; `None` when the
    /// strategy never produces a joint answer.
    pub conditional_win: Option<Frac>,
}

pub fn strategy_win_probability(alice: &InstructionSet, bob: &InstructionSet) -> StrategyStats {
    let mut both = Frac::zero();
    let mut won = Frac::zero();
    for s in scenario_table() {
        if let (Some(a), Some(b)) = (
            alice.answered_values(s.alice_q),
            bob.answered_values(s.bob_q),
        ) {
            both += s.probability;
            if win(s, a, b) {
                won += s.probability;
            }
        }
    }
    StrategyStats {
        both_answer: both,
        conditional_win: (!both.is_zero()).then(|| won / both),
    }
}

/// Exhaustive optimum of the conditional win probability over all 2¹²
/// zero-free joint assignments, with the lexicographically first maximizer.
pub fn optimal_classical() -> (Frac, Assignment) {
    let mut best = Frac::zero();
    let mut witness = Assignment::all_minus();
    for a in Assignment::enumerate() {
        let wins = scenario_table()
            .iter()
            .filter(|s| {
                s.tested_equations
                    .iter()
                    .all(|id| lhv::check_equation(&a, lhv::equation(*id)))
            })
            .count();
        let value = frac(wins as i64, 8);
        if value > best {
            best = value;
            witness = a;
        }
    }
    (best, witness)
}

/// The answers a zero-free assignment gives, as one instruction set per party.
pub fn assignment_instruction_sets(a: &Assignment) -> (InstructionSet, InstructionSet) {
    let slice = |party| {
        let mut entries = [0i8; 6];
        for o in ObservableId::party_observables(party) {
            entries[o.local_index()] = a.value(o);
        }
        InstructionSet::new(entries).unwrap()
    };
    (slice(Party::One), slice(Party::Two))
}

/// A rational-weighted distribution over joint instruction sets
/// (shared randomness is exactly such a mixture).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mixture {
    pub components: Vec<MixtureComponent>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub alice: InstructionSet,
    pub bob: InstructionSet,
    #[serde(with = "frac_str")]
    pub weight: Frac,
}

impl Mixture {
    pub fn pure(alice: InstructionSet, bob: InstructionSet) -> Self {
        Self {
            components: vec![MixtureComponent {
                alice,
                bob,
                weight: frac(1, 1),
            }],
        }
    }

    /// Weights must be nonnegative and sum to exactly 1.
    pub fn validate(&self) -> Result<(), GameError> {
        if self.components.is_empty() {
            return Err(GameError::EmptyMixture);
        }
        let mut sum = Frac::zero();
        for c in &self.components {
            if c.weight < Frac::zero() {
                return Err(GameError::NegativeWeight(c.weight));
            }
            sum += c.weight;
        }
        if sum != frac(1, 1) {
            return Err(GameError::WeightSum(sum));
        }
        Ok(())
    }
}

/// Mixture-level statistics: per-party answer probabilities and the win
/// probability conditioned on both answering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureStats {
    pub eta1: Frac,
    pub eta2: Frac,
    pub conditional_win: Option<Frac>,
}

pub fn mixture_stats(m: &Mixture) -> MixtureStats {
    let mut eta1 = Frac::zero();
    let mut eta2 = Frac::zero();
    let mut both_mass = Frac::zero();
    let mut win_mass = Frac::zero();
    for c in &m.components {
        eta1 += c.weight * answer_fraction(&c.alice);
        eta2 += c.weight * answer_fraction(&c.bob);
        let stats = strategy_win_probability(&c.alice, &c.bob);
        both_mass += c.weight * stats.both_answer;
        if let Some(w) = stats.conditional_win {
            win_mass += c.weight * stats.both_answer * w;
        }
    }
    MixtureStats {
        eta1,
        eta2,
        conditional_win: (!both_mass.is_zero()).then(|| win_mass / both_mass),
    }
}

/// The three-component refusal model: the all-+1 set with weight 1−p and the
/// two one-sided Y-refusal sets with weight p/2 each.
pub fn y_refusal_model(p: Frac) -> Mixture {
    assert!(p >= Frac::zero() && p <= frac(1, 1), "p must be in [0, 1]");
    let (g_a, g_b) = all_plus_pair();
    let (b1_a, b1_b) = alice_y_refusal_pair();
    let (b2_a, b2_b) = bob_y_refusal_pair();
    Mixture {
        components: vec![
            MixtureComponent {
                alice: g_a,
                bob: g_b,
                weight: frac(1, 1) - p,
            },
            MixtureComponent {
                alice: b1_a,
                bob: b1_b,
                weight: p / 2,
            },
            MixtureComponent {
                alice: b2_a,
                bob: b2_b,
                weight: p / 2,
            },
        ],
    }
}

/// Detector-efficiency bookkeeping of the refusal model: each party answers
/// everything under the all-+1 set and under the partner's refusal set, and a
/// fraction f (= 3/8 here, computed not assumed) of questions under their own,
/// so η(p) = (1−p) + (p/2)·f + p/2.
pub fn y_refusal_model_eta(p: Frac) -> Frac {
    let f = answer_fraction(&alice_y_refusal_pair().0);
    (frac(1, 1) - p) + (p / 2) * f + p / 2
}

/// Win-probability bookkeeping of the refusal model,
/// P(p) = (1−p)·P_G + (p/2)·P_B1 + (p/2)·P_B2, with each component's
/// conditional win probability computed from the strategy itself.
pub fn y_refusal_model_win(p: Frac) -> Frac {
    let (g_a, g_b) = all_plus_pair();
    let (b1_a, b1_b) = alice_y_refusal_pair();
    let (b2_a, b2_b) = bob_y_refusal_pair();
    let p_g = strategy_win_probability(&g_a, &g_b)
        .conditional_win
        .unwrap();
    let p_b1 = strategy_win_probability(&b1_a, &b1_b)
        .conditional_win
        .unwrap();
    let p_b2 = strategy_win_probability(&b2_a, &b2_b)
        .conditional_win
        .unwrap();
    (frac(1, 1) - p) * p_g + (p / 2) * p_b1 + (p / 2) * p_b2
}

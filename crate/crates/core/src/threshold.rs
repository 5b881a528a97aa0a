//! Detection-efficiency thresholds by exhaustive enumeration and exact
//! maximin optimization.
//!
//! A joint strategy is *safe* when no scenario in which both parties answer
//! is ever lost; a mixture of safe strategies therefore wins every counted
//! round. The solver enumerates every joint instruction-set pair (3⁶ × 3⁶),
//! annotates the safe ones with their per-party answer fractions, and
//! maximizes min(η₁, η₂) over rational mixtures. Because η is affine in the
//! mixture weights, the optimum lies on a single annotation point or on the
//! diagonal crossing of a pair of points, so the search over singletons and
//! pairs of distinct points is exact and certifiable.
//!
//! The same code path solves the full eight-scenario game and the reduced
//! four-equation game; a per-question-refusal extension (values fixed per
//! observable, refusals chosen per question) is solved by the same maximin
//! over its larger strategy class.

use crate::frac::{frac, frac_str, Frac};
use crate::game::{self, InstructionSet, Mixture, MixtureComponent};
use crate::lhv::{self, Equation};
use crate::quantum::{ObservableId, Party};
use num_traits::Zero;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ThresholdError {
    #[error("no safe strategy with positive both-answer probability exists: {0}")]
    Infeasible(String),
}

/// One scenario of a game: the observables each party is asked, the
/// equations tested when both answer, and the scenario probability.
#[derive(Debug, Clone, PartialEq)]
pub struct GameScenario {
    pub label: String,
    pub alice_asked: Vec<ObservableId>,
    pub bob_asked: Vec<ObservableId>,
    pub tested_equations: Vec<u8>,
    pub probability: Frac,
}

/// A game specification: a list of scenarios, with each party's questions in
/// bijection with the scenarios (party j answers scenario s iff they answer
/// their question in s).
#[derive(Debug, Clone, PartialEq)]
pub struct GameSpec {
    pub name: &'static str,
    pub scenarios: Vec<GameScenario>,
}

impl GameSpec {
    /// The eight-scenario game.
    pub fn full() -> GameSpec {
        let scenarios = game::scenario_table()
            .iter()
            .map(|s| {
                let (ap, apath) = s.alice_q.asked(Party::One);
                let (bp, bpath) = s.bob_q.asked(Party::Two);
                GameScenario {
                    label: s.label(),
                    alice_asked: vec![ap, apath],
                    bob_asked: vec![bp, bpath],
                    tested_equations: s.tested_equations.clone(),
                    probability: s.probability,
                }
            })
            .collect();
        GameSpec {
            name: "full",
            scenarios,
        }
    }

    /// The reduced game over equations 1, 5, 9 and 11: per scenario, Alice is
    /// asked the equation's photon-1 observables and Bob the photon-2 ones,
    /// each scenario with probability 1/4.
    pub fn reduced() -> GameSpec {
        let scenarios = [1u8, 5, 9, 11]
            .iter()
            .map(|id| {
                let e = lhv::equation(*id);
                let side = |party| -> Vec<ObservableId> {
                    e.observables
                        .iter()
                        .copied()
                        .filter(|o| o.party == party)
                        .collect()
                };
                let alice_asked = side(Party::One);
                let bob_asked = side(Party::Two);
                GameScenario {
                    label: format!("eq{id}"),
                    alice_asked,
                    bob_asked,
                    tested_equations: vec![*id],
                    probability: frac(1, 4),
                }
            })
            .collect();
        GameSpec {
            name: "reduced",
            scenarios,
        }
    }

    fn tested(&self, scenario: usize) -> impl Iterator<Item = &'static Equation> + '_ {
        self.scenarios[scenario]
            .tested_equations
            .iter()
            .map(|id| lhv::equation(*id))
    }
}

/// One party's role in a joint strategy: whether it answers a scenario's
/// question and which value it assigns to an observable when answering.
trait PartyStrategy {
    fn answers(&self, asked: &[ObservableId], scenario: usize) -> bool;
    fn value_of(&self, o: ObservableId) -> i8;
}

impl PartyStrategy for InstructionSet {
    fn answers(&self, asked: &[ObservableId], _scenario: usize) -> bool {
        asked.iter().all(|o| self.value_of(*o) != 0)
    }

    fn value_of(&self, o: ObservableId) -> i8 {
        InstructionSet::value_of(self, o)
    }
}

fn equation_product(e: &Equation, alice: &impl PartyStrategy, bob: &impl PartyStrategy) -> i32 {
    let mut prod = e.sign.value();
    for o in &e.observables {
        let v = match o.party {
            Party::One => alice.value_of(*o),
            Party::Two => bob.value_of(*o),
        };
        debug_assert!(v == 1 || v == -1, "consulted a refused observable {o}");
        prod *= v as i32;
    }
    prod
}

/// Per-party answer probability over the game's scenarios.
fn answer_probability(game: &GameSpec, strategy: &impl PartyStrategy, alice_side: bool) -> Frac {
    game.scenarios
        .iter()
        .enumerate()
        .filter(|(i, s)| {
            let asked = if alice_side {
                &s.alice_asked
            } else {
                &s.bob_asked
            };
            strategy.answers(asked, *i)
        })
        .map(|(_, s)| s.probability)
        .sum()
}

/// A lost scenario of one mixture component: the equation that fails and the
/// answers both parties gave.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SafetyViolation {
    pub component: usize,
    pub scenario: String,
    pub equation: u8,
    pub alice_values: Vec<i8>,
    pub bob_values: Vec<i8>,
}

fn component_violations(
    game: &GameSpec,
    index: usize,
    alice: &impl PartyStrategy,
    bob: &impl PartyStrategy,
) -> Vec<SafetyViolation> {
    let mut out = Vec::new();
    for (si, scen) in game.scenarios.iter().enumerate() {
        if !alice.answers(&scen.alice_asked, si) || !bob.answers(&scen.bob_asked, si) {
            continue;
        }
        for e in game.tested(si) {
            if equation_product(e, alice, bob) != 1 {
                out.push(SafetyViolation {
                    component: index,
                    scenario: scen.label.clone(),
                    equation: e.id,
                    alice_values: scen
                        .alice_asked
                        .iter()
                        .map(|o| alice.value_of(*o))
                        .collect(),
                    bob_values: scen.bob_asked.iter().map(|o| bob.value_of(*o)).collect(),
                });
            }
        }
    }
    out
}

/// (both-answer probability, won probability mass) of one joint strategy.
fn component_masses(
    game: &GameSpec,
    alice: &impl PartyStrategy,
    bob: &impl PartyStrategy,
) -> (Frac, Frac) {
    let mut both = Frac::zero();
    let mut won = Frac::zero();
    for (si, scen) in game.scenarios.iter().enumerate() {
        if !alice.answers(&scen.alice_asked, si) || !bob.answers(&scen.bob_asked, si) {
            continue;
        }
        both += scen.probability;
        if game.tested(si).all(|e| equation_product(e, alice, bob) == 1) {
            won += scen.probability;
        }
    }
    (both, won)
}

/// All 3⁶ = 729 instruction sets in lexicographic order
/// (entry order X, Y, Z, x, y, z; values ordered −1 < 0 < +1).
pub fn enumerate_instruction_sets() -> Vec<InstructionSet> {
    (0..729usize)
        .map(|code| {
            let mut entries = [0i8; 6];
            let mut c = code;
            for e in entries.iter_mut().rev() {
                *e = (c % 3) as i8 - 1;
                c /= 3;
            }
            InstructionSet::new(entries).expect("ternary digits are valid entries")
        })
        .collect()
}

/// A safe joint strategy annotated with both parties' answer fractions.
#[derive(Debug, Clone, PartialEq)]
pub struct SafeStrategy {
    pub alice: InstructionSet,
    pub bob: InstructionSet,
    pub a1: Frac,
    pub a2: Frac,
}

/// Exhaustive scan of all 729² joint pairs: keeps exactly those that lose no
/// scenario with both parties answering, in lexicographic (alice, bob) order.
pub fn safe_joint_strategies(game: &GameSpec) -> Vec<SafeStrategy> {
    let sets = enumerate_instruction_sets();
    let n = game.scenarios.len();

    // per-set precomputation: answer flags per scenario, answer fractions,
    // and per-equation partial products for either party role
    let mut ans_a = vec![vec![false; n]; sets.len()];
    let mut ans_b = vec![vec![false; n]; sets.len()];
    let mut afrac = vec![Frac::zero(); sets.len()];
    let mut bfrac = vec![Frac::zero(); sets.len()];
    let mut part_a = vec![[0i32; 12]; sets.len()];
    let mut part_b = vec![[0i32; 12]; sets.len()];
    for (k, set) in sets.iter().enumerate() {
        for (si, scen) in game.scenarios.iter().enumerate() {
            ans_a[k][si] = PartyStrategy::answers(set, &scen.alice_asked, si);
            ans_b[k][si] = PartyStrategy::answers(set, &scen.bob_asked, si);
            if ans_a[k][si] {
                afrac[k] += scen.probability;
            }
            if ans_b[k][si] {
                bfrac[k] += scen.probability;
            }
        }
        for e in lhv::equation_table() {
            let partial = |party| -> i32 {
                e.observables
                    .iter()
                    .filter(|o| o.party == party)
                    .map(|o| set.value_of(*o) as i32)
                    .product()
            };
            part_a[k][e.id as usize - 1] = partial(Party::One);
            part_b[k][e.id as usize - 1] = partial(Party::Two);
        }
    }

    let mut out = Vec::new();
    for ia in 0..sets.len() {
        for ib in 0..sets.len() {
            let mut safe = true;
            'scen: for (si, scen) in game.scenarios.iter().enumerate() {
                if !(ans_a[ia][si] && ans_b[ib][si]) {
                    continue;
                }
                for id in &scen.tested_equations {
                    let e = lhv::equation(*id);
                    let k = e.id as usize - 1;
                    if e.sign.value() * part_a[ia][k] * part_b[ib][k] != 1 {
                        safe = false;
                        break 'scen;
                    }
                }
            }
            if safe {
                out.push(SafeStrategy {
                    alice: sets[ia],
                    bob: sets[ib],
                    a1: afrac[ia],
                    a2: bfrac[ib],
                });
            }
        }
    }
    out
}

/// How the maximin optimum over annotation points is attained.
#[derive(Debug, Clone, PartialEq)]
enum MaximinChoice {
    Single((Frac, Frac)),
    /// λ on the first point, 1−λ on the second, crossing the diagonal.
    Pair((Frac, Frac), (Frac, Frac), Frac),
}

/// Exact maximization of min(η₁, η₂) over the convex hull of a finite point
/// set: the optimum is a point's min-coordinate or a diagonal crossing of a
/// pair of points.
fn maximin_over_points(points: &BTreeSet<(Frac, Frac)>) -> Option<(Frac, MaximinChoice)> {
    let mut best: Option<(Frac, MaximinChoice)> = None;
    let mut consider = |value: Frac, choice: MaximinChoice| {
        if best.as_ref().is_none_or(|(b, _)| value > *b) {
            best = Some((value, choice));
        }
    };
    let pts: Vec<(Frac, Frac)> = points.iter().copied().collect();
    for p in &pts {
        consider(p.0.min(p.1), MaximinChoice::Single(*p));
    }
    for (i, p) in pts.iter().enumerate() {
        for q in &pts[i + 1..] {
            let d = (p.0 - p.1) - (q.0 - q.1);
            if d.is_zero() {
                continue; // parallel: segment minimum is attained at an endpoint
            }
            let lambda = (q.1 - q.0) / d;
            if lambda < Frac::zero() || lambda > frac(1, 1) {
                continue;
            }
            let value = lambda * p.0 + (frac(1, 1) - lambda) * q.0;
            consider(value, MaximinChoice::Pair(*p, *q, lambda));
        }
    }
    best
}

/// Output of the threshold optimization over observable-level refusal sets.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdSolution {
    pub game: String,
    #[serde(with = "frac_str")]
    pub eta_star: Frac,
    pub witness: Mixture,
    #[serde(with = "crate::frac::frac_pairs")]
    pub support_points: Vec<(Frac, Frac)>,
}

/// Maximizes min(η₁, η₂) over all rational mixtures of safe joint strategies
/// with a defined conditional win probability. The witness mixture is built
/// from the lexicographically least representative of each optimal point and
/// is re-verified before being returned.
pub fn solve_threshold(game: &GameSpec) -> Result<ThresholdSolution, ThresholdError> {
    let safe = safe_joint_strategies(game);

    // distinct annotation points with their first (= lexicographically least)
    // representatives; strategies sharing a point are interchangeable for η
    let mut reps: BTreeMap<(Frac, Frac), (InstructionSet, InstructionSet)> = BTreeMap::new();
    for s in &safe {
        reps.entry((s.a1, s.a2)).or_insert((s.alice, s.bob));
    }
    let points: BTreeSet<(Frac, Frac)> = reps.keys().copied().collect();

    if !safe.iter().any(|s| {
        let (both, _) = component_masses(game, &s.alice, &s.bob);
        !both.is_zero()
    }) {
        return Err(ThresholdError::Infeasible(format!(
            "{} game: every safe pair has zero both-answer probability",
            game.name
        )));
    }

    let (eta_star, choice) =
        maximin_over_points(&points).expect("safe set is never empty: the all-zero pair is safe");

    let components = match choice {
        MaximinChoice::Single(p) => vec![(reps[&p], frac(1, 1))],
        MaximinChoice::Pair(p, q, lambda) => {
            if lambda.is_zero() {
                vec![(reps[&q], frac(1, 1))]
            } else if lambda == frac(1, 1) {
                vec![(reps[&p], frac(1, 1))]
            } else {
                vec![(reps[&p], lambda), (reps[&q], frac(1, 1) - lambda)]
            }
        }
    };
    let witness = Mixture {
        components: components
            .into_iter()
            .map(|((alice, bob), weight)| MixtureComponent { alice, bob, weight })
            .collect(),
    };

    let report = verify_mixture(game, &witness).expect("witness mixture is valid");
    assert!(
        report.passed && report.eta1.min(report.eta2) == eta_star,
        "threshold witness failed re-verification"
    );

    Ok(ThresholdSolution {
        game: game.name.to_string(),
        eta_star,
        witness,
        support_points: points.into_iter().collect(),
    })
}

/// Audit report for a claimed mixture: exact η per party, conditional win
/// probability, and every lost scenario of every positive-weight component.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixtureReport {
    #[serde(with = "frac_str")]
    pub eta1: Frac,
    #[serde(with = "frac_str")]
    pub eta2: Frac,
    #[serde(with = "crate::frac::opt_frac_str")]
    pub conditional_win: Option<Frac>,
    pub violations: Vec<SafetyViolation>,
    pub passed: bool,
}

fn verify_components<A: PartyStrategy, B: PartyStrategy>(
    game: &GameSpec,
    components: &[(A, B, Frac)],
) -> MixtureReport {
    let mut eta1 = Frac::zero();
    let mut eta2 = Frac::zero();
    let mut both_mass = Frac::zero();
    let mut win_mass = Frac::zero();
    let mut violations = Vec::new();
    for (index, (alice, bob, weight)) in components.iter().enumerate() {
        if weight.is_zero() {
            continue; // a zero-weight component contributes nothing
        }
        eta1 += *weight * answer_probability(game, alice, true);
        eta2 += *weight * answer_probability(game, bob, false);
        let (both, won) = component_masses(game, alice, bob);
        both_mass += *weight * both;
        win_mass += *weight * won;
        violations.extend(component_violations(game, index, alice, bob));
    }
    let conditional_win = (!both_mass.is_zero()).then(|| win_mass / both_mass);
    let passed = violations.is_empty() && conditional_win == Some(frac(1, 1));
    MixtureReport {
        eta1,
        eta2,
        conditional_win,
        violations,
        passed,
    }
}

/// Audits a mixture of instruction sets against a game. Fails with a
/// `GameError` when the mixture itself is malformed; otherwise reports
/// violations and statistics, passing iff safe with conditional win 1.
pub fn verify_mixture(game: &GameSpec, m: &Mixture) -> Result<MixtureReport, game::GameError> {
    m.validate()?;
    let components: Vec<(InstructionSet, InstructionSet, Frac)> = m
        .components
        .iter()
        .map(|c| (c.alice, c.bob, c.weight))
        .collect();
    Ok(verify_components(game, &components))
}

// ---------------------------------------------------------------------------
// Per-question-refusal extension
// ---------------------------------------------------------------------------

/// A per-question-refusal strategy: every observable still has a fixed ±1
/// value, but the refusal decision is made per question (equivalently per
/// scenario, since each party's questions biject with scenarios).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct ExtendedStrategy {
    values: [i8; 6],
    answer_mask: u16,
    scenario_count: u8,
}

impl ExtendedStrategy {
    pub fn new(values: [i8; 6], answer_mask: u16, scenario_count: usize) -> Self {
        assert!(
            values.iter().all(|v| *v == 1 || *v == -1),
            "extended-strategy values must be ±1"
        );
        assert!(scenario_count <= 16 && answer_mask >> scenario_count == 0);
        Self {
            values,
            answer_mask,
            scenario_count: scenario_count as u8,
        }
    }

    pub fn values(&self) -> [i8; 6] {
        self.values
    }

    pub fn answer_mask(&self) -> u16 {
        self.answer_mask
    }

    /// Scenario indices in which this party refuses its question.
    pub fn refused_scenarios(&self) -> Vec<usize> {
        (0..self.scenario_count as usize)
            .filter(|s| self.answer_mask >> s & 1 == 0)
            .collect()
    }
}

impl Serialize for ExtendedStrategy {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ExtendedStrategy", 2)?;
        st.serialize_field("values", &self.values)?;
        st.serialize_field("refused_scenarios", &self.refused_scenarios())?;
        st.end()
    }
}

impl PartyStrategy for ExtendedStrategy {
    fn answers(&self, _asked: &[ObservableId], scenario: usize) -> bool {
        self.answer_mask >> scenario & 1 == 1
    }

    fn value_of(&self, o: ObservableId) -> i8 {
        self.values[o.local_index()]
    }
}

/// A rational-weighted mixture of joint per-question-refusal strategies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtendedMixture {
    pub components: Vec<ExtendedComponent>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtendedComponent {
    pub alice: ExtendedStrategy,
    pub bob: ExtendedStrategy,
    #[serde(with = "frac_str")]
    pub weight: Frac,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtendedThresholdSolution {
    pub game: String,
    #[serde(with = "frac_str")]
    pub eta_star: Frac,
    pub witness: ExtendedMixture,
    #[serde(with = "crate::frac::frac_pairs")]
    pub support_points: Vec<(Frac, Frac)>,
}

pub fn verify_extended_mixture(game: &GameSpec, m: &ExtendedMixture) -> MixtureReport {
    let components: Vec<(ExtendedStrategy, ExtendedStrategy, Frac)> = m
        .components
        .iter()
        .map(|c| (c.alice, c.bob, c.weight))
        .collect();
    verify_components(game, &components)
}

fn all_value_assignments() -> Vec<[i8; 6]> {
    (0..64u8)
        .map(|code| std::array::from_fn(|i| if code >> (5 - i) & 1 == 1 { 1 } else { -1 }))
        .collect()
}

/// The per-question-refusal threshold: same objective and maximin search,
/// strategy class (values in {±1}⁶) × (answer subset of the questions).
/// Always at least the observable-level optimum, because every instruction
/// set is expressible in this class.
pub fn solve_threshold_extended(
    game: &GameSpec,
) -> Result<ExtendedThresholdSolution, ThresholdError> {
    let n = game.scenarios.len();
    assert!(n <= 16, "scenario masks are stored in u16");
    let full_mask: u16 = (1 << n) - 1;
    let values = all_value_assignments();

    // partial equation products per value assignment and party role
    let mut part_a = vec![[0i32; 12]; values.len()];
    let mut part_b = vec![[0i32; 12]; values.len()];
    for (k, vals) in values.iter().enumerate() {
        for e in lhv::equation_table() {
            let partial = |party| -> i32 {
                e.observables
                    .iter()
                    .filter(|o| o.party == party)
                    .map(|o| vals[o.local_index()] as i32)
                    .product()
            };
            part_a[k][e.id as usize - 1] = partial(Party::One);
            part_b[k][e.id as usize - 1] = partial(Party::Two);
        }
    }

    // scenarios a joint value assignment would win; distinct masks with their
    // first (lexicographically least) value pair
    let mut ok_masks: BTreeMap<u16, (usize, usize)> = BTreeMap::new();
    for (ka, pa) in part_a.iter().enumerate() {
        for (kb, pb) in part_b.iter().enumerate() {
            let mut ok: u16 = 0;
            for (si, scen) in game.scenarios.iter().enumerate() {
                let won = scen.tested_equations.iter().all(|id| {
                    let k = *id as usize - 1;
                    lhv::equation(*id).sign.value() * pa[k] * pb[k] == 1
                });
                if won {
                    ok |= 1 << si;
                }
            }
            ok_masks.entry(ok).or_insert((ka, kb));
        }
    }

    // probability mass of every answer mask
    let mask_prob: Vec<Frac> = (0..=full_mask)
        .map(|mask| {
            game.scenarios
                .iter()
                .enumerate()
                .filter(|(si, _)| mask >> si & 1 == 1)
                .map(|(_, s)| s.probability)
                .sum()
        })
        .collect();

    // a pair of answer masks (ma, mb) on top of a value pair with win mask
    // `ok` is safe iff every jointly answered scenario is won
    let mut reps: BTreeMap<(Frac, Frac), (ExtendedStrategy, ExtendedStrategy)> = BTreeMap::new();
    for (ok, (ka, kb)) in &ok_masks {
        for ma in 0..=full_mask {
            for mb in 0..=full_mask {
                if ma & mb & !ok & full_mask != 0 {
                    continue;
                }
                let point = (mask_prob[ma as usize], mask_prob[mb as usize]);
                reps.entry(point).or_insert_with(|| {
                    (
                        ExtendedStrategy::new(values[*ka], ma, n),
                        ExtendedStrategy::new(values[*kb], mb, n),
                    )
                });
            }
        }
    }
    let points: BTreeSet<(Frac, Frac)> = reps.keys().copied().collect();

    let (eta_star, choice) = maximin_over_points(&points)
        .ok_or_else(|| ThresholdError::Infeasible("no safe extended strategy".into()))?;

    let components = match choice {
        MaximinChoice::Single(p) => vec![(reps[&p], frac(1, 1))],
        MaximinChoice::Pair(p, q, lambda) => {
            if lambda.is_zero() {
                vec![(reps[&q], frac(1, 1))]
            } else if lambda == frac(1, 1) {
                vec![(reps[&p], frac(1, 1))]
            } else {
                vec![(reps[&p], lambda), (reps[&q], frac(1, 1) - lambda)]
            }
        }
    };
    let witness = ExtendedMixture {
        components: components
            .into_iter()
            .map(|((alice, bob), weight)| ExtendedComponent { alice, bob, weight })
            .collect(),
    };

    let report = verify_extended_mixture(game, &witness);
    assert!(
        report.passed && report.eta1.min(report.eta2) == eta_star,
        "extended threshold witness failed re-verification"
    );

    Ok(ExtendedThresholdSolution {
        game: game.name.to_string(),
        eta_star,
        witness,
        support_points: points.into_iter().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{alice_y_refusal_pair, all_plus_pair, bob_y_refusal_pair, mixture_stats};

    #[test]
    fn enumeration_has_729_sets_in_lex_order() {
        let sets = enumerate_instruction_sets();
        assert_eq!(sets.len(), 729);
        assert_eq!(sets[0].entries(), [-1; 6]);
        assert_eq!(sets[728].entries(), [1; 6]);
        assert!(sets.windows(2).all(|w| w[0] < w[1]));
        assert!(sets.contains(&InstructionSet::all_plus()));
        assert!(sets.contains(&alice_y_refusal_pair().0));
    }

    #[test]
    fn full_game_safe_set_matches_enumeration_oracle() {
        let game = GameSpec::full();
        let safe = safe_joint_strategies(&game);
        assert_eq!(safe.len(), 228_113);
        let points: BTreeSet<(Frac, Frac)> = safe.iter().map(|s| (s.a1, s.a2)).collect();
        assert_eq!(points.len(), 59);

        // spot checks frozen from an independent scan
        let (b1_a, b1_b) = alice_y_refusal_pair();
        let b1 = safe
            .iter()
            .find(|s| s.alice == b1_a && s.bob == b1_b)
            .expect("one-sided Y-refusal pair is safe");
        assert_eq!((b1.a1, b1.a2), (frac(3, 8), frac(1, 1)));

        let zero = InstructionSet::new([0; 6]).unwrap();
        assert!(safe.iter().any(|s| s.alice == zero && s.bob == zero));

        let (g_a, g_b) = all_plus_pair();
        assert!(!safe.iter().any(|s| s.alice == g_a && s.bob == g_b));
    }

    #[test]
    fn full_game_threshold_is_three_quarters() {
        let solution = solve_threshold(&GameSpec::full()).unwrap();
        assert_eq!(solution.eta_star, frac(3, 4));
        let report = verify_mixture(&GameSpec::full(), &solution.witness).unwrap();
        assert!(report.passed);
        assert_eq!(report.eta1.min(report.eta2), frac(3, 4));
        assert_eq!(solution.support_points.len(), 59);
    }

    #[test]
    fn full_game_has_a_safe_three_quarters_pair() {
        // Alice refuses path-z questions, Bob refuses polarization-Z
        // questions; only the four cross scenarios remain and all are won.
        let alice = InstructionSet::new([1, 1, 1, 1, 1, 0]).unwrap();
        let bob = InstructionSet::new([1, 1, 0, 1, 1, 1]).unwrap();
        let game = GameSpec::full();
        let report = verify_mixture(&game, &Mixture::pure(alice, bob)).unwrap();
        assert!(report.passed, "violations: {:?}", report.violations);
        assert_eq!((report.eta1, report.eta2), (frac(3, 4), frac(3, 4)));
    }

    #[test]
    fn reduced_game_threshold_is_three_quarters() {
        let solution = solve_threshold(&GameSpec::reduced()).unwrap();
        assert_eq!(solution.eta_star, frac(3, 4));
        assert_eq!(solution.support_points.len(), 15);
        let report = verify_mixture(&GameSpec::reduced(), &solution.witness).unwrap();
        assert!(report.passed);
        assert_eq!(report.eta1.min(report.eta2), frac(3, 4));
    }

    #[test]
    fn reduced_game_safe_pair_count_is_frozen() {
        assert_eq!(safe_joint_strategies(&GameSpec::reduced()).len(), 329_265);
    }

    #[test]
    fn y_refusal_mixture_verifies_at_11_16() {
        let game = GameSpec::full();
        let m = Mixture {
            components: vec![
                MixtureComponent {
                    alice: alice_y_refusal_pair().0,
                    bob: alice_y_refusal_pair().1,
                    weight: frac(1, 2),
                },
                MixtureComponent {
                    alice: bob_y_refusal_pair().0,
                    bob: bob_y_refusal_pair().1,
                    weight: frac(1, 2),
                },
            ],
        };
        let report = verify_mixture(&game, &m).unwrap();
        assert!(report.passed);
        assert_eq!((report.eta1, report.eta2), (frac(11, 16), frac(11, 16)));
        assert_eq!(report.conditional_win, Some(frac(1, 1)));

        // on the full game the generic path agrees with the game module
        let stats = mixture_stats(&m);
        assert_eq!((stats.eta1, stats.eta2), (report.eta1, report.eta2));
        assert_eq!(stats.conditional_win, report.conditional_win);
    }

    #[test]
    fn all_plus_mixture_fails_with_named_scenarios() {
        let game = GameSpec::full();
        let (a, b) = all_plus_pair();
        let report = verify_mixture(&game, &Mixture::pure(a, b)).unwrap();
        assert!(!report.passed);
        let scenarios: BTreeSet<&str> = report
            .violations
            .iter()
            .map(|v| v.scenario.as_str())
            .collect();
        assert_eq!(
            scenarios,
            BTreeSet::from(["(iii)-(iii)", "(iv)-(iv)"]),
            "exactly the two Y-path scenarios are lost"
        );
        assert_eq!(report.conditional_win, Some(frac(3, 4)));
    }

    #[test]
    fn malformed_mixtures_are_rejected() {
        let game = GameSpec::full();
        let (a, b) = all_plus_pair();
        let mut m = Mixture::pure(a, b);
        m.components[0].weight = frac(2, 1);
        assert!(verify_mixture(&game, &m).is_err());
    }

    #[test]
    fn optimality_certificate_no_combination_beats_eta_star() {
        for game in [GameSpec::full(), GameSpec::reduced()] {
            let solution = solve_threshold(&game).unwrap();
            let points = &solution.support_points;
            for p in points {
                assert!(p.0.min(p.1) <= solution.eta_star);
            }
            for (i, p) in points.iter().enumerate() {
                for q in &points[i + 1..] {
                    let d = (p.0 - p.1) - (q.0 - q.1);
                    if d.is_zero() {
                        continue;
                    }
                    let lambda = (q.1 - q.0) / d;
                    if lambda < frac(0, 1) || lambda > frac(1, 1) {
                        continue;
                    }
                    let value = lambda * p.0 + (frac(1, 1) - lambda) * q.0;
                    assert!(value <= solution.eta_star);
                }
            }
        }
    }

    #[test]
    fn removing_any_point_never_raises_the_optimum() {
        let solution = solve_threshold(&GameSpec::full()).unwrap();
        let all: BTreeSet<(Frac, Frac)> = solution.support_points.iter().copied().collect();
        for removed in &all {
            let mut subset = all.clone();
            subset.remove(removed);
            if let Some((value, _)) = maximin_over_points(&subset) {
                assert!(value <= solution.eta_star);
            }
        }
    }

    #[test]
    fn safety_is_closed_under_mixing() {
        let game = GameSpec::full();
        let safe = safe_joint_strategies(&game);
        // arbitrary unequal weights over a spread of safe pairs
        let sample: Vec<&SafeStrategy> = safe.iter().step_by(safe.len() / 7).take(7).collect();
        let total = frac(sample.len() as i64, 1);
        let m = Mixture {
            components: sample
                .iter()
                .map(|s| MixtureComponent {
                    alice: s.alice,
                    bob: s.bob,
                    weight: frac(1, 1) / total,
                })
                .collect(),
        };
        let report = verify_mixture(&game, &m).unwrap();
        assert!(report.violations.is_empty());
        if let Some(w) = report.conditional_win {
            assert_eq!(w, frac(1, 1));
        }
    }

    #[test]
    fn extended_threshold_full_game_is_seven_eighths() {
        let solution = solve_threshold_extended(&GameSpec::full()).unwrap();
        assert_eq!(solution.eta_star, frac(7, 8));
        let report = verify_extended_mixture(&GameSpec::full(), &solution.witness);
        assert!(report.passed);
        assert_eq!(report.eta1.min(report.eta2), frac(7, 8));
    }

    #[test]
    fn extended_threshold_reduced_game_is_seven_eighths() {
        let solution = solve_threshold_extended(&GameSpec::reduced()).unwrap();
        assert_eq!(solution.eta_star, frac(7, 8));
        let report = verify_extended_mixture(&GameSpec::reduced(), &solution.witness);
        assert!(report.passed);
    }

    #[test]
    fn extended_dominates_observable_level() {
        for game in [GameSpec::full(), GameSpec::reduced()] {
            let base = solve_threshold(&game).unwrap();
            let ext = solve_threshold_extended(&game).unwrap();
            assert!(ext.eta_star >= base.eta_star, "{}", game.name);
        }
    }

    #[test]
    fn reduced_game_asks_the_equation_sides() {
        let game = GameSpec::reduced();
        let fmt =
            |v: &[ObservableId]| v.iter().map(|o| o.to_string()).collect::<Vec<_>>().join(",");
        let asked: Vec<(String, String)> = game
            .scenarios
            .iter()
            .map(|s| (fmt(&s.alice_asked), fmt(&s.bob_asked)))
            .collect();
        assert_eq!(
            asked,
            [
                ("X1".to_string(), "X2,z2".to_string()),
                ("Y1".to_string(), "Y2,z2".to_string()),
                ("X1,x1".to_string(), "Y2,y2".to_string()),
                ("Y1,x1".to_string(), "X2,y2".to_string()),
            ]
        );
        let total: Frac = game.scenarios.iter().map(|s| s.probability).sum();
        assert_eq!(total, frac(1, 1));
    }
}

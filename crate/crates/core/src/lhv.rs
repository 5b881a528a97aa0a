//! Symbolic local-realistic layer: the twelve ±1 value equations, exhaustive
//! enumeration of all 2¹² deterministic assignments, the classical Bell
//! bound, and the unsatisfiability certificates behind the all-versus-nothing
//! argument.
//!
//! Every equation is normalized to the predicate `sign · Π v(o) = +1`, which
//! is equivalent to the left/right product form because all values square
//! to one.

use crate::quantum::{obs, ObservableId, Sign};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use std::fmt;
use std::sync::OnceLock;

/// One value constraint: `sign · Π v(observables) = +1`.
///
/// Equations 1–8 carry weight 1 and equations 9–12 weight 2 — in the
/// eight-question game the four-observable constraints are tested twice as
/// frequently, and the Bell operator uses the same coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Equation {
    pub id: u8,
    pub observables: Vec<ObservableId>,
    pub sign: Sign,
    pub weight: i32,
}

impl Equation {
    fn new(id: u8, names: &[&str], sign: Sign, weight: i32) -> Self {
        Self {
            id,
            observables: names.iter().map(|n| obs(n)).collect(),
            sign,
            weight,
        }
    }

    pub fn label(&self) -> String {
        self.observables
            .iter()
            .map(|o| o.to_string())
            .collect::<Vec<_>>()
            .join("")
    }
}

/// The canonical twelve-equation table, in stable id order.
pub fn equation_table() -> &'static [Equation] {
    static TABLE: OnceLock<Vec<Equation>> = OnceLock::new();
    TABLE.get_or_init(|| {
        use Sign::{Minus, Plus};
        vec![
            Equation::new(1, &["X1", "X2", "z2"], Plus, 1),
            Equation::new(2, &["x1", "Z2", "x2"], Plus, 1),
            Equation::new(3, &["X1", "z1", "X2"], Plus, 1),
            Equation::new(4, &["Z1", "x1", "x2"], Plus, 1),
            Equation::new(5, &["Y1", "Y2", "z2"], Minus, 1),
            Equation::new(6, &["y1", "Z2", "y2"], Minus, 1),
            Equation::new(7, &["Y1", "z1", "Y2"], Minus, 1),
            Equation::new(8, &["Z1", "y1", "y2"], Minus, 1),
            Equation::new(9, &["X1", "x1", "Y2", "y2"], Plus, 2),
            Equation::new(10, &["X1", "y1", "Y2", "x2"], Plus, 2),
            Equation::new(11, &["Y1", "x1", "X2", "y2"], Plus, 2),
            Equation::new(12, &["Y1", "y1", "X2", "x2"], Plus, 2),
        ]
    })
}

pub fn equation(id: u8) -> &'static Equation {
    assert!((1..=12).contains(&id), "equation id out of range: {id}");
    &equation_table()[id as usize - 1]
}

/// Total weight of all equations (the Bell value of a perfect assignment,
/// which no assignment attains).
pub const TOTAL_WEIGHT: i32 = 16;

/// A total ±1 valuation of the twelve observables.
///
/// The derived ordering is lexicographic over the canonical observable order
/// with −1 before +1; enumeration indices are aligned with it so the witness
/// of an exhaustive scan is reproducible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assignment {
    values: [i8; 12],
}

impl Assignment {
    pub fn new(values: [i8; 12]) -> Self {
        assert!(
            values.iter().all(|v| *v == 1 || *v == -1),
            "assignment values must be ±1"
        );
        Self { values }
    }

    pub fn all_plus() -> Self {
        Self { values: [1; 12] }
    }

    pub fn all_minus() -> Self {
        Self { values: [-1; 12] }
    }

    /// The assignment at position `index` (0..4096) of the lexicographic
    /// enumeration: bit 11−i of the counter holds observable i, cleared
    /// bit ↦ −1, so ascending counters are ascending assignments.
    pub fn from_lex_index(index: u16) -> Self {
        assert!(index < 4096, "assignment index out of range: {index}");
        let mut values = [0i8; 12];
        for (i, v) in values.iter_mut().enumerate() {
            *v = if index >> (11 - i) & 1 == 1 { 1 } else { -1 };
        }
        Self { values }
    }

    pub fn enumerate() -> impl Iterator<Item = Assignment> {
        (0..4096u16).map(Assignment::from_lex_index)
    }

    pub fn value(&self, o: ObservableId) -> i8 {
        self.values[o.index()]
    }

    pub fn values(&self) -> [i8; 12] {
        self.values
    }

    pub fn with_value(mut self, o: ObservableId, v: i8) -> Self {
        assert!(v == 1 || v == -1);
        self.values[o.index()] = v;
        self
    }

    pub fn negated(&self) -> Self {
        let mut values = self.values;
        for v in values.iter_mut() {
            *v = -*v;
        }
        Self { values }
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = ObservableId::all()
            .iter()
            .map(|o| format!("{o}={:+}", self.value(*o)))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl Serialize for Assignment {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(12))?;
        for o in ObservableId::all() {
            map.serialize_entry(&o.to_string(), &self.value(o))?;
        }
        map.end()
    }
}

/// True iff `sign · Π v(o) = +1` for the equation's observables.
pub fn check_equation(a: &Assignment, e: &Equation) -> bool {
    let mut prod = e.sign.value();
    for o in &e.observables {
        prod *= a.value(*o) as i32;
    }
    prod == 1
}

/// The Bell value Σ (±weight): +weight per satisfied equation, −weight per
/// violated one. Always even and within [−16, 16].
pub fn bell_value(a: &Assignment) -> i32 {
    equation_table()
        .iter()
        .map(|e| if check_equation(a, e) { e.weight } else { -e.weight })
        .sum()
}

/// Result of the exhaustive scan over all 4096 assignments.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicalBound {
    pub max: i32,
    pub min: i32,
    pub argmax_count: u64,
    pub witness: Assignment,
}

/// Exhaustive extrema of the Bell value, with the number of maximizers and
/// the lexicographically first one.
pub fn classical_bound() -> ClassicalBound {
    let mut max = i32::MIN;
    let mut min = i32::MAX;
    let mut argmax_count = 0u64;
    let mut witness = Assignment::all_minus();
    for a in Assignment::enumerate() {
        let b = bell_value(&a);
        if b > max {
            max = b;
            argmax_count = 1;
            witness = a;
        } else if b == max {
            argmax_count += 1;
        }
        min = min.min(b);
    }
    ClassicalBound {
        max,
        min,
        argmax_count,
        witness,
    }
}

/// Satisfiability certificate for a subset of the equations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsetCertificate {
    pub satisfiable: bool,
    pub witness: Option<Assignment>,
}

/// Exhaustive search restricted to the observables the subset mentions;
/// unmentioned observables are fixed to +1 in the returned witness.
pub fn subset_satisfiable(ids: &[u8]) -> SubsetCertificate {
    assert!(!ids.is_empty(), "equation subset must be non-empty");
    let eqs: Vec<&Equation> = ids.iter().map(|id| equation(*id)).collect();
    let mut involved: Vec<ObservableId> = eqs
        .iter()
        .flat_map(|e| e.observables.iter().copied())
        .collect();
    involved.sort();
    involved.dedup();

    for counter in 0..(1u32 << involved.len()) {
        let mut a = Assignment::all_plus();
        for (bit, o) in involved.iter().enumerate() {
            if counter >> bit & 1 == 1 {
                a = a.with_value(*o, -1);
            }
        }
        if eqs.iter().all(|e| check_equation(&a, e)) {
            return SubsetCertificate {
                satisfiable: true,
                witness: Some(a),
            };
        }
    }
    SubsetCertificate {
        satisfiable: false,
        witness: None,
    }
}

/// The eight four-equation subsets that are already unsatisfiable: the
/// polarization contradictions {1,5}|{3,7} × {9,11}|{10,12} and the path
/// contradictions {2,6}|{4,8} × {9,10}|{11,12}.
pub fn avn_subsets() -> [[u8; 4]; 8] {
    [
        [1, 5, 9, 11],
        [1, 5, 10, 12],
        [3, 7, 9, 11],
        [3, 7, 10, 12],
        [2, 6, 9, 10],
        [2, 6, 11, 12],
        [4, 8, 9, 10],
        [4, 8, 11, 12],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn equation_table_matches_value_relations() {
        let table = equation_table();
        assert_eq!(table.len(), 12);
        let e1 = equation(1);
        assert_eq!(e1.label(), "X1X2z2");
        assert_eq!((e1.sign, e1.weight), (Sign::Plus, 1));
        let e8 = equation(8);
        assert_eq!(e8.label(), "Z1y1y2");
        assert_eq!((e8.sign, e8.weight), (Sign::Minus, 1));
        let e12 = equation(12);
        assert_eq!(e12.label(), "Y1y1X2x2");
        assert_eq!((e12.sign, e12.weight), (Sign::Plus, 2));
        assert!(table.iter().take(8).all(|e| e.weight == 1));
        assert!(table.iter().skip(8).all(|e| e.weight == 2));
        assert_eq!(table.iter().map(|e| e.weight).sum::<i32>(), TOTAL_WEIGHT);
        // every equation mixes both parties
        for e in table {
            let parties: std::collections::BTreeSet<_> =
                e.observables.iter().map(|o| o.party).collect();
            assert_eq!(parties.len(), 2, "equation {} is one-sided", e.id);
        }
    }

    #[test]
    fn check_equation_examples() {
        let ones = Assignment::all_plus();
        assert!(check_equation(&ones, equation(1)));
        assert!(!check_equation(&ones, equation(5)), "minus-sign equation");
        let flipped = ones.with_value(obs("Y1"), -1);
        assert!(check_equation(&flipped, equation(5)));
    }

    #[test]
    fn all_plus_assignment_scores_eight() {
        // equations 5-8 are violated, everything else satisfied: 12 - 4 = 8
        assert_eq!(bell_value(&Assignment::all_plus()), 8);
    }

    #[test]
    fn classical_bound_matches_enumeration_oracle() {
        let bound = classical_bound();
        assert_eq!(bound.max, 8);
        assert_eq!(bound.min, -8);
        assert_eq!(bound.argmax_count, 576);
        assert_eq!(bound.witness, Assignment::all_minus());
        assert_eq!(bell_value(&bound.witness), bound.max);
    }

    #[test]
    fn bell_value_equals_two_w_minus_16_for_every_assignment() {
        for a in Assignment::enumerate() {
            let w: i32 = equation_table()
                .iter()
                .filter(|e| check_equation(&a, e))
                .map(|e| e.weight)
                .sum();
            let b = bell_value(&a);
            assert_eq!(b, 2 * w - TOTAL_WEIGHT);
            assert_eq!(b.rem_euclid(2), 0);
            assert!((-16..=16).contains(&b));
        }
    }

    #[test]
    fn negating_an_assignment_flips_odd_length_equations_only() {
        for a in Assignment::enumerate() {
            let n = a.negated();
            for e in equation_table() {
                let flip = e.observables.len() % 2 == 1;
                assert_eq!(check_equation(&n, e), check_equation(&a, e) != flip);
            }
        }
    }

    #[test]
    fn flipping_one_involved_observable_toggles_an_equation() {
        for a in Assignment::enumerate().step_by(7) {
            for e in equation_table() {
                for o in &e.observables {
                    let flipped = a.with_value(*o, -a.value(*o));
                    assert_ne!(check_equation(&a, e), check_equation(&flipped, e));
                }
            }
        }
    }

    #[test]
    fn full_system_and_each_avn_subset_are_unsatisfiable() {
        let all: Vec<u8> = (1..=12).collect();
        assert!(!subset_satisfiable(&all).satisfiable);
        let subsets = avn_subsets();
        assert_eq!(subsets.len(), 8);
        let distinct: std::collections::BTreeSet<_> = subsets.iter().collect();
        assert_eq!(distinct.len(), 8);
        for s in subsets {
            assert!(!subset_satisfiable(&s).satisfiable, "subset {s:?}");
        }
    }

    #[test]
    fn avn_subsets_are_minimal() {
        for s in avn_subsets() {
            for drop in s {
                let rest: Vec<u8> = s.iter().copied().filter(|x| *x != drop).collect();
                let cert = subset_satisfiable(&rest);
                assert!(cert.satisfiable, "subset {s:?} minus {drop}");
                let w = cert.witness.unwrap();
                assert!(rest.iter().all(|id| check_equation(&w, equation(*id))));
            }
        }
    }

    #[test]
    fn single_equation_is_satisfied_by_all_plus() {
        let cert = subset_satisfiable(&[1]);
        assert!(cert.satisfiable);
        assert_eq!(cert.witness.unwrap(), Assignment::all_plus());
    }

    #[test]
    fn lex_enumeration_is_ordered() {
        assert_eq!(Assignment::from_lex_index(0), Assignment::all_minus());
        assert_eq!(Assignment::from_lex_index(4095), Assignment::all_plus());
        let mut prev = Assignment::from_lex_index(0);
        for a in Assignment::enumerate().skip(1) {
            assert!(prev < a);
            prev = a;
        }
    }

    proptest! {
        #[test]
        fn witness_is_a_lexicographic_minimum_among_maximizers(index in 0u16..4096) {
            let bound = classical_bound();
            let a = Assignment::from_lex_index(index);
            if bell_value(&a) == bound.max {
                prop_assert!(bound.witness <= a);
            }
        }

        #[test]
        fn serialized_assignment_lists_all_observables(index in 0u16..4096) {
            let a = Assignment::from_lex_index(index);
            let json = serde_json::to_value(a).unwrap();
            let map = json.as_object().unwrap();
            prop_assert_eq!(map.len(), 12);
            for o in ObservableId::all() {
                prop_assert_eq!(map[&o.to_string()].as_i64().unwrap(), a.value(o) as i64);
            }
        }
    }
}

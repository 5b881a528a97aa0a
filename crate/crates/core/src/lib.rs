//! Verification and simulation toolkit for a two-photon all-versus-nothing
//! (AVN) Bell test on a state entangled in both polarization and path.
//!
//! The crate is organized around five layers:
//!
//! - [`quantum`]: exact 16-dimensional construction of the state, the twelve
//!   local dichotomic observables, the operator identities the state
//!   satisfies, the Bell operator (quantum value 16), and Born-rule outcome
//!   tables for jointly measured commuting quadruples.
//! - [`lhv`]: the symbolic local-realistic layer — the twelve ±1 value
//!   equations, exhaustive enumeration of all 2¹² deterministic assignments,
//!   the classical bound |⟨β⟩| ≤ 8, and unsatisfiability certificates for the
//!   full system and its eight minimal four-equation subsets.
//! - [`game`]: the eight-question nonlocal game built on the value equations,
//!   with deterministic instruction sets (including detector-refusal marks),
//!   exact-rational mixture statistics, and the 3/4 classical optimum.
//! - [`threshold`]: detection-efficiency analysis — exhaustive safe-strategy
//!   enumeration over all 3⁶ × 3⁶ joint instruction sets and exact maximin
//!   optimization of the symmetric efficiency, for the full game, the reduced
//!   four-equation game, and a per-question-refusal extension.
//! - [`montecarlo`]: seeded, bit-reproducible emulation of a lossy-detector
//!   experiment with quantum (Born-rule) or LHV (instruction-set) answering,
//!   plus a per-equation estimator for the Bell value.
//!
//! All game and threshold arithmetic is exact (`num_rational`); quantum
//! arithmetic is dense complex floating point with documented tolerances.

pub mod frac;
pub mod game;
pub mod lhv;
pub mod montecarlo;
pub mod quantum;
pub mod threshold;

pub use frac::{frac, Frac};

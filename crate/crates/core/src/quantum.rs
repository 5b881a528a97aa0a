//! Exact 16-dimensional quantum layer: the source state, the twelve local
//! observables, operator identities, the Bell operator and Born-rule outcome
//! tables.
//!
//! Basis convention (fixed here once so every matrix is bit-reproducible):
//! the four tensor factors are ordered (pol₁, path₁, pol₂, path₂) and a basis
//! label maps to the index `8·pol₁ + 4·path₁ + 2·pol₂ + path₂` with
//! H = u = 0 and V = d = 1. So |HuHu⟩ = 0, |HdHd⟩ = 5, |VuVu⟩ = 10,
//! |VdVd⟩ = 15.

use num_complex::Complex64;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;
use thiserror::Error;

pub const DIM: usize = 16;

#[derive(Debug, Error, PartialEq)]
pub enum QuantumError {
    #[error("observables {0} and {1} act on the same degree of freedom with different axes and do not commute")]
    NonCommutingProduct(ObservableId, ObservableId),
    #[error("expectation value has non-negligible imaginary part {imaginary:e} (operator is not Hermitian)")]
    NonHermitianExpectation { imaginary: f64 },
    #[error("unknown observable name {0:?}")]
    UnknownObservable(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Party {
    One,
    Two,
}

impl Party {
    pub fn index(self) -> usize {
        match self {
            Party::One => 0,
            Party::Two => 1,
        }
    }
}

/// Degree of freedom of one photon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dof {
    Polarization,
    Path,
}

impl Dof {
    pub fn index(self) -> usize {
        match self {
            Dof::Polarization => 0,
            Dof::Path => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

/// One of the twelve local dichotomic observables.
///
/// Polarization observables print as `X1`, `Y1`, `Z1`, `X2`, …; path
/// observables use lowercase: `x1`, `y1`, `z1`, …. The derived `Ord` is the
/// canonical enumeration order (party, dof, axis).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObservableId {
    pub party: Party,
    pub dof: Dof,
    pub axis: Axis,
}

impl ObservableId {
    pub const COUNT: usize = 12;

    pub fn new(party: Party, dof: Dof, axis: Axis) -> Self {
        Self { party, dof, axis }
    }

    /// All twelve observables in canonical order.
    pub fn all() -> [ObservableId; 12] {
        let mut out = [ObservableId::new(Party::One, Dof::Polarization, Axis::X); 12];
        let mut i = 0;
        for party in [Party::One, Party::Two] {
            for dof in [Dof::Polarization, Dof::Path] {
                for axis in [Axis::X, Axis::Y, Axis::Z] {
                    out[i] = ObservableId::new(party, dof, axis);
                    i += 1;
                }
            }
        }
        out
    }

    /// Canonical index 0..12: party·6 + dof·3 + axis.
    pub fn index(self) -> usize {
        self.party.index() * 6 + self.local_index()
    }

    /// Index 0..6 within one party's six observables (dof·3 + axis).
    pub fn local_index(self) -> usize {
        self.dof.index() * 3 + self.axis.index()
    }

    pub fn from_index(i: usize) -> ObservableId {
        assert!(i < 12, "observable index out of range: {i}");
        Self::all()[i]
    }

    /// The six observables of one party, in canonical order.
    pub fn party_observables(party: Party) -> [ObservableId; 6] {
        let all = Self::all();
        let base = party.index() * 6;
        std::array::from_fn(|i| all[base + i])
    }

    /// Tensor slot 0..4 in the (pol₁, path₁, pol₂, path₂) factor order.
    fn factor(self) -> usize {
        self.party.index() * 2 + self.dof.index()
    }
}

impl fmt::Display for ObservableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letter = match (self.dof, self.axis) {
            (Dof::Polarization, Axis::X) => 'X',
            (Dof::Polarization, Axis::Y) => 'Y',
            (Dof::Polarization, Axis::Z) => 'Z',
            (Dof::Path, Axis::X) => 'x',
            (Dof::Path, Axis::Y) => 'y',
            (Dof::Path, Axis::Z) => 'z',
        };
        let party = match self.party {
            Party::One => '1',
            Party::Two => '2',
        };
        write!(f, "{letter}{party}")
    }
}

impl FromStr for ObservableId {
    type Err = QuantumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || QuantumError::UnknownObservable(s.to_string());
        let mut chars = s.chars();
        let letter = chars.next().ok_or_else(err)?;
        let party = match chars.next() {
            Some('1') => Party::One,
            Some('2') => Party::Two,
            _ => return Err(err()),
        };
        if chars.next().is_some() {
            return Err(err());
        }
        let (dof, axis) = match letter {
            'X' => (Dof::Polarization, Axis::X),
            'Y' => (Dof::Polarization, Axis::Y),
            'Z' => (Dof::Polarization, Axis::Z),
            'x' => (Dof::Path, Axis::X),
            'y' => (Dof::Path, Axis::Y),
            'z' => (Dof::Path, Axis::Z),
            _ => return Err(err()),
        };
        Ok(ObservableId::new(party, dof, axis))
    }
}

/// Table-construction shorthand; panics on a bad name.
pub(crate) fn obs(name: &str) -> ObservableId {
    name.parse().expect("valid observable name")
}

/// Eigenvalue sign in the operator identities and value equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

/// Pure state of the two photons: 16 complex amplitudes in the basis above.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    amp: [Complex64; DIM],
}

impl QuantumState {
    pub fn from_amplitudes(amp: [Complex64; DIM]) -> Self {
        Self { amp }
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amp[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &QuantumState) -> Complex64 {
        self.amp
            .iter()
            .zip(other.amp.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn sub(&self, other: &QuantumState) -> QuantumState {
        let mut amp = self.amp;
        for (a, b) in amp.iter_mut().zip(other.amp.iter()) {
            *a -= b;
        }
        QuantumState { amp }
    }

    pub fn scaled(&self, c: f64) -> QuantumState {
        let mut amp = self.amp;
        for a in amp.iter_mut() {
            *a *= c;
        }
        QuantumState { amp }
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }
}

/// The source state: (|HuHu⟩ + |HdHd⟩ + |VuVu⟩ − |VdVd⟩)/2, entangled in
/// both polarization and path.
pub fn build_state() -> QuantumState {
    let mut amp = [Complex64::ZERO; DIM];
    let half = Complex64::new(0.5, 0.0);
    amp[0] = half; // |HuHu>
    amp[5] = half; // |HdHd>
    amp[10] = half; // |VuVu>
    amp[15] = -half; // |VdVd>
    QuantumState::from_amplitudes(amp)
}

/// Dense 16×16 complex operator. Everything built in this module is
/// Hermitian; products of commuting Hermitian factors stay Hermitian.
#[derive(Clone, PartialEq)]
pub struct Operator {
    m: [[Complex64; DIM]; DIM],
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Operator(16x16)")
    }
}

impl Operator {
    pub fn zero() -> Self {
        Self {
            m: [[Complex64::ZERO; DIM]; DIM],
        }
    }

    pub fn identity() -> Self {
        let mut op = Self::zero();
        for i in 0..DIM {
            op.m[i][i] = Complex64::ONE;
        }
        op
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.m[row][col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: Complex64) {
        self.m[row][col] = v;
    }

    pub fn mul(&self, other: &Operator) -> Operator {
        let mut out = Operator::zero();
        for r in 0..DIM {
            for k in 0..DIM {
                let a = self.m[r][k];
                if a == Complex64::ZERO {
                    continue;
                }
                for c in 0..DIM {
                    out.m[r][c] += a * other.m[k][c];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Operator) -> Operator {
        let mut out = self.clone();
        for r in 0..DIM {
            for c in 0..DIM {
                out.m[r][c] += other.m[r][c];
            }
        }
        out
    }

    pub fn sub(&self, other: &Operator) -> Operator {
        let mut out = self.clone();
        for r in 0..DIM {
            for c in 0..DIM {
                out.m[r][c] -= other.m[r][c];
            }
        }
        out
    }

    pub fn scaled(&self, c: f64) -> Operator {
        let mut out = self.clone();
        for r in 0..DIM {
            for v in out.m[r].iter_mut() {
                *v *= c;
            }
        }
        out
    }

    pub fn apply(&self, s: &QuantumState) -> QuantumState {
        let mut amp = [Complex64::ZERO; DIM];
        for (r, out) in amp.iter_mut().enumerate() {
            for c in 0..DIM {
                *out += self.m[r][c] * s.amplitude(c);
            }
        }
        QuantumState::from_amplitudes(amp)
    }

    pub fn adjoint(&self) -> Operator {
        let mut out = Operator::zero();
        for r in 0..DIM {
            for c in 0..DIM {
                out.m[r][c] = self.m[c][r].conj();
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .map(|v| v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.sub(&self.adjoint()).frobenius_norm() <= tol
    }

    pub fn trace(&self) -> Complex64 {
        (0..DIM).map(|i| self.m[i][i]).sum()
    }
}

fn pauli(axis: Axis) -> [[Complex64; 2]; 2] {
    let z = Complex64::ZERO;
    let one = Complex64::ONE;
    let i = Complex64::I;
    match axis {
        Axis::X => [[z, one], [one, z]],
        Axis::Y => [[z, -i], [i, z]],
        Axis::Z => [[one, z], [z, -one]],
    }
}

/// The 16×16 matrix of one local observable: the named 2×2 operator on its
/// tensor factor, identity elsewhere.
pub fn observable_matrix(o: ObservableId) -> Operator {
    let p = pauli(o.axis);
    let bit = 3 - o.factor(); // factor 0 (pol1) is the most significant bit
    let mut out = Operator::zero();
    for r in 0..DIM {
        for c in 0..DIM {
            if (r & !(1 << bit)) == (c & !(1 << bit)) {
                out.set(r, c, p[(r >> bit) & 1][(c >> bit) & 1]);
            }
        }
    }
    out
}

/// Matrix product of pairwise commuting observables (empty list = identity).
///
/// Rejects a list containing two observables on the same (party, dof) with
/// different axes — those anticommute and the product would be order
/// dependent.
pub fn product_operator(observables: &[ObservableId]) -> Result<Operator, QuantumError> {
    for (i, a) in observables.iter().enumerate() {
        for b in &observables[i + 1..] {
            if a.party == b.party && a.dof == b.dof && a.axis != b.axis {
                return Err(QuantumError::NonCommutingProduct(*a, *b));
            }
        }
    }
    let mut out = Operator::identity();
    for o in observables {
        out = out.mul(&observable_matrix(*o));
    }
    Ok(out)
}

/// One operator identity `P|ψ⟩ = ±|ψ⟩` satisfied by the source state, where
/// P is a product of commuting observables split across both parties.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenIdentity {
    pub operators: Vec<ObservableId>,
    pub sign: Sign,
}

impl EigenIdentity {
    fn new(names: &[&str], sign: Sign) -> Self {
        Self {
            operators: names.iter().map(|n| obs(n)).collect(),
            sign,
        }
    }

    pub fn label(&self) -> String {
        self.operators
            .iter()
            .map(|o| o.to_string())
            .collect::<Vec<_>>()
            .join("")
    }
}

/// The fourteen identities satisfied by the source state: two two-observable
/// ones (Z₁Z₂, z₁z₂), eight three-observable ones (minus sign on the four
/// Y-type ones), and four four-observable ones.
pub fn eigen_identities() -> &'static [EigenIdentity] {
    static TABLE: OnceLock<Vec<EigenIdentity>> = OnceLock::new();
    TABLE.get_or_init(|| {
        use Sign::{Minus, Plus};
        vec![
            EigenIdentity::new(&["Z1", "Z2"], Plus),
            EigenIdentity::new(&["z1", "z2"], Plus),
            EigenIdentity::new(&["X1", "X2", "z2"], Plus),
            EigenIdentity::new(&["x1", "Z2", "x2"], Plus),
            EigenIdentity::new(&["X1", "z1", "X2"], Plus),
            EigenIdentity::new(&["Z1", "x1", "x2"], Plus),
            EigenIdentity::new(&["Y1", "Y2", "z2"], Minus),
            EigenIdentity::new(&["y1", "Z2", "y2"], Minus),
            EigenIdentity::new(&["Y1", "z1", "Y2"], Minus),
            EigenIdentity::new(&["Z1", "y1", "y2"], Minus),
            EigenIdentity::new(&["X1", "x1", "Y2", "y2"], Plus),
            EigenIdentity::new(&["X1", "y1", "Y2", "x2"], Plus),
            EigenIdentity::new(&["Y1", "x1", "X2", "y2"], Plus),
            EigenIdentity::new(&["Y1", "y1", "X2", "x2"], Plus),
        ]
    })
}

/// Residual norm ‖P|s⟩ − sign·|s⟩‖ for one identity.
pub fn eigencheck_residual(s: &QuantumState, id: &EigenIdentity) -> f64 {
    let p = product_operator(&id.operators).expect("identity factors commute");
    p.apply(s).sub(&s.scaled(id.sign.value() as f64)).norm()
}

/// True iff the identity holds on `s` within `tol` (tol > 0).
pub fn eigencheck(s: &QuantumState, id: &EigenIdentity, tol: f64) -> bool {
    assert!(tol > 0.0, "tolerance must be positive");
    eigencheck_residual(s, id) <= tol
}

/// The Bell operator: the twelve commuting products with coefficients
/// (+1, +1, +1, +1, −1, −1, −1, −1, +2, +2, +2, +2). The source state is an
/// eigenstate with eigenvalue 16.
pub fn bell_operator() -> Operator {
    const TERMS: [(&[&str], f64); 12] = [
        (&["X1", "X2", "z2"], 1.0),
        (&["x1", "Z2", "x2"], 1.0),
        (&["X1", "z1", "X2"], 1.0),
        (&["Z1", "x1", "x2"], 1.0),
        (&["Y1", "Y2", "z2"], -1.0),
        (&["y1", "Z2", "y2"], -1.0),
        (&["Y1", "z1", "Y2"], -1.0),
        (&["Z1", "y1", "y2"], -1.0),
        (&["X1", "x1", "Y2", "y2"], 2.0),
        (&["X1", "y1", "Y2", "x2"], 2.0),
        (&["Y1", "x1", "X2", "y2"], 2.0),
        (&["Y1", "y1", "X2", "x2"], 2.0),
    ];
    let mut out = Operator::zero();
    for (names, coeff) in TERMS {
        let ids: Vec<ObservableId> = names.iter().map(|n| obs(n)).collect();
        let term = product_operator(&ids).expect("term factors commute");
        out = out.add(&term.scaled(coeff));
    }
    out
}

const IMAG_TOL: f64 = 1e-9;

/// ⟨s|op|s⟩ for a normalized state and Hermitian operator. A non-negligible
/// imaginary part signals a non-Hermitian operator and is reported as an
/// error instead of being silently dropped.
pub fn expectation(s: &QuantumState, op: &Operator) -> Result<f64, QuantumError> {
    let v = s.inner(&op.apply(s));
    if v.im.abs() > IMAG_TOL {
        return Err(QuantumError::NonHermitianExpectation { imaginary: v.im });
    }
    Ok(v.re)
}

/// True iff ‖ab − ba‖ ≤ tol in Frobenius norm (tol > 0).
pub fn commutes(a: &Operator, b: &Operator, tol: f64) -> bool {
    assert!(tol > 0.0, "tolerance must be positive");
    a.mul(b).sub(&b.mul(a)).frobenius_norm() <= tol
}

/// Born-rule probability table over the 2⁴ joint outcomes of four commuting
/// ±1 observables.
///
/// Outcome indexing: bit 3 belongs to the first observable, …, bit 0 to the
/// fourth; a clear bit means outcome +1, a set bit means −1, so index 0 is
/// the all-+1 outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeTable {
    pub observables: [ObservableId; 4],
    pub p: [f64; 16],
}

impl OutcomeTable {
    /// The ±1 value of observable slot `slot` in outcome `index`.
    pub fn outcome_value(index: usize, slot: usize) -> i8 {
        if (index >> (3 - slot)) & 1 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn outcome_index(values: [i8; 4]) -> usize {
        let mut idx = 0;
        for (slot, v) in values.iter().enumerate() {
            assert!(*v == 1 || *v == -1, "outcome values must be ±1");
            if *v == -1 {
                idx |= 1 << (3 - slot);
            }
        }
        idx
    }

    pub fn total(&self) -> f64 {
        self.p.iter().sum()
    }
}

/// Joint Born-rule distribution of four commuting observables on `s`,
/// computed from the projectors (I ± O)/2.
///
/// The observables must pairwise commute (one polarization and one path
/// observable per party guarantees this); violating that is a programming
/// error and panics.
pub fn outcome_distribution(s: &QuantumState, observables: [ObservableId; 4]) -> OutcomeTable {
    for (i, a) in observables.iter().enumerate() {
        for b in &observables[i + 1..] {
            assert!(
                !(a.party == b.party && a.dof == b.dof && a.axis != b.axis),
                "jointly measured observables must commute: {a}, {b}"
            );
        }
    }
    let mats: Vec<Operator> = observables.iter().map(|o| observable_matrix(*o)).collect();
    let mut p = [0.0; 16];
    for (index, prob) in p.iter_mut().enumerate() {
        let mut projected = s.clone();
        for (slot, m) in mats.iter().enumerate() {
            let v = OutcomeTable::outcome_value(index, slot) as f64;
            // (I + v·O)/2 applied directly to the running state
            projected = projected.sub(&m.apply(&projected).scaled(-v)).scaled(0.5);
        }
        *prob = s.inner(&projected).re;
    }
    OutcomeTable { observables, p }
}

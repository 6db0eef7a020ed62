//! Dense statevector over named qubits.
//!
//! The first label is the most significant bit of the amplitude index, so a
//! state over `(A, B)` stores `|A B>` at index `2*A + B`. States are always
//! kept normalized; measured qubits are removed from the register rather
//! than left behind in a collapsed basis state.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliOp};

/// Branches with projection probability below this are reported as impossible.
pub const IMPOSSIBLE_BRANCH_THRESHOLD: f64 = 1e-14;

/// Default tolerance for [`equal_up_to_global_phase`].
pub const DEFAULT_EQUIVALENCE_TOL: f64 = 1e-10;

const INPUT_NORM_TOL: f64 = 1e-9;

/// Symbolic name of a qubit, e.g. `A`, `B1`, `C4`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QubitLabel(String);

impl QubitLabel {
    pub fn new(name: impl Into<String>) -> Self {
        QubitLabel(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for QubitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for QubitLabel {
    fn from(s: &str) -> Self {
        QubitLabel(s.to_owned())
    }
}

impl From<String> for QubitLabel {
    fn from(s: String) -> Self {
        QubitLabel(s)
    }
}

/// Amplitude pair `a|0> + b|1>` of a single input qubit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Amplitudes {
    pub zero: Complex64,
    pub one: Complex64,
}

impl Amplitudes {
    pub fn new(zero: Complex64, one: Complex64) -> Self {
        Amplitudes { zero, one }
    }

    pub fn real(zero: f64, one: f64) -> Self {
        Amplitudes::new(Complex64::new(zero, 0.0), Complex64::new(one, 0.0))
    }

    pub fn ket0() -> Self {
        Amplitudes::real(1.0, 0.0)
    }

    pub fn ket1() -> Self {
        Amplitudes::real(0.0, 1.0)
    }

    pub fn plus() -> Self {
        Amplitudes::real(std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2)
    }

    pub fn minus() -> Self {
        Amplitudes::real(std::f64::consts::FRAC_1_SQRT_2, -std::f64::consts::FRAC_1_SQRT_2)
    }

    /// Uniformly distributed point on the Bloch sphere.
    pub fn random_bloch<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let cos_theta: f64 = rng.gen_range(-1.0..=1.0);
        let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let half = cos_theta.clamp(-1.0, 1.0).acos() / 2.0;
        Amplitudes::new(
            Complex64::new(half.cos(), 0.0),
            Complex64::from_polar(half.sin(), phi),
        )
    }

    pub fn norm_sqr(&self) -> f64 {
        self.zero.norm_sqr() + self.one.norm_sqr()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    H,
    X,
    Z,
    Cnot,
    Swap,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::H | GateKind::X | GateKind::Z => 1,
            GateKind::Cnot | GateKind::Swap => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Z => "Z",
            GateKind::Cnot => "CNOT",
            GateKind::Swap => "SWAP",
        }
    }
}

/// A gate on named qubits. For CNOT the control comes first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Gate {
    kind: GateKind,
    targets: Vec<QubitLabel>,
}

impl Gate {
    pub fn new(kind: GateKind, targets: Vec<QubitLabel>) -> Result<Self> {
        let gate = Gate { kind, targets };
        if gate.targets.len() != kind.arity() {
            return Err(Error::BadGate(gate.to_string()));
        }
        if kind.arity() == 2 && gate.targets[0] == gate.targets[1] {
            return Err(Error::BadGate(gate.to_string()));
        }
        Ok(gate)
    }

    pub fn h(q: impl Into<QubitLabel>) -> Self {
        Gate { kind: GateKind::H, targets: vec![q.into()] }
    }

    pub fn x(q: impl Into<QubitLabel>) -> Self {
        Gate { kind: GateKind::X, targets: vec![q.into()] }
    }

    pub fn z(q: impl Into<QubitLabel>) -> Self {
        Gate { kind: GateKind::Z, targets: vec![q.into()] }
    }

    /// Panics if `control == target`; use [`Gate::new`] for a fallible constructor.
    pub fn cnot(control: impl Into<QubitLabel>, target: impl Into<QubitLabel>) -> Self {
        Gate::new(GateKind::Cnot, vec![control.into(), target.into()]).expect("distinct CNOT qubits")
    }

    /// Panics if both qubits coincide.
    pub fn swap(a: impl Into<QubitLabel>, b: impl Into<QubitLabel>) -> Self {
        Gate::new(GateKind::Swap, vec![a.into(), b.into()]).expect("distinct SWAP qubits")
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn targets(&self) -> &[QubitLabel] {
        &self.targets
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind.name())?;
        for t in &self.targets {
            write!(f, " {t}")?;
        }
        Ok(())
    }
}

/// Bell-basis measurement outcome. The declaration order is the fixed table order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BellOutcome {
    PhiPlus,
    PsiPlus,
    PsiMinus,
    PhiMinus,
}

impl BellOutcome {
    pub const ALL: [BellOutcome; 4] = [
        BellOutcome::PhiPlus,
        BellOutcome::PsiPlus,
        BellOutcome::PsiMinus,
        BellOutcome::PhiMinus,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Self {
        Self::ALL[i % 4]
    }

    /// ASCII token used in tables, traces and CLI flags.
    pub fn token(self) -> &'static str {
        match self {
            BellOutcome::PhiPlus => "phi+",
            BellOutcome::PsiPlus => "psi+",
            BellOutcome::PsiMinus => "psi-",
            BellOutcome::PhiMinus => "phi-",
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BellOutcome::PhiPlus => "φ⁺",
            BellOutcome::PsiPlus => "ψ⁺",
            BellOutcome::PsiMinus => "ψ⁻",
            BellOutcome::PhiMinus => "φ⁻",
        }
    }
}

impl fmt::Display for BellOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for BellOutcome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "phi+" | "φ⁺" | "phi_plus" => Ok(BellOutcome::PhiPlus),
            "psi+" | "ψ⁺" | "psi_plus" => Ok(BellOutcome::PsiPlus),
            "psi-" | "ψ⁻" | "psi_minus" => Ok(BellOutcome::PsiMinus),
            "phi-" | "φ⁻" | "phi_minus" => Ok(BellOutcome::PhiMinus),
            other => Err(Error::Parse(format!("unknown Bell outcome {other:?}"))),
        }
    }
}

/// Result of projecting two qubits onto one Bell state.
#[derive(Clone, Debug)]
pub struct BellProjection {
    pub probability: f64,
    /// `None` when the branch is impossible (probability below threshold).
    pub state: Option<StateVector>,
}

impl BellProjection {
    pub fn is_impossible(&self) -> bool {
        self.state.is_none()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    labels: Vec<QubitLabel>,
    amps: Vec<Complex64>,
}

impl Default for StateVector {
    fn default() -> Self {
        StateVector::empty()
    }
}

impl StateVector {
    /// The zero-qubit state (a single amplitude 1).
    pub fn empty() -> Self {
        StateVector { labels: Vec::new(), amps: vec![Complex64::new(1.0, 0.0)] }
    }

    /// Tensor product of single-qubit states in the listed order.
    pub fn product<L: Into<QubitLabel>>(specs: impl IntoIterator<Item = (L, Amplitudes)>) -> Result<Self> {
        let mut state = StateVector::empty();
        for (label, amp) in specs {
            state.append_qubit(label.into(), amp)?;
        }
        Ok(state)
    }

    /// Builds a state from raw amplitudes, normalizing them.
    pub fn from_amplitudes(labels: Vec<QubitLabel>, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1usize << labels.len() {
            return Err(Error::LabelMismatch(format!(
                "{} amplitudes for {} qubits",
                amps.len(),
                labels.len()
            )));
        }
        check_unique(&labels)?;
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return Err(Error::NonNormalizable(labels.first().cloned().unwrap_or_else(|| "?".into())));
        }
        let amps = amps.into_iter().map(|a| a / norm).collect();
        Ok(StateVector { labels, amps })
    }

    pub fn labels(&self) -> &[QubitLabel] {
        &self.labels
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn num_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn contains(&self, label: &QubitLabel) -> bool {
        self.labels.contains(label)
    }

    pub fn position(&self, label: &QubitLabel) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.clone()))
    }

    fn mask(&self, label: &QubitLabel) -> Result<usize> {
        let pos = self.position(label)?;
        Ok(1usize << (self.labels.len() - 1 - pos))
    }

    /// Appends `a|0> + b|1>` as the new least significant qubit.
    pub fn append_qubit(&mut self, label: QubitLabel, amp: Amplitudes) -> Result<()> {
        if self.contains(&label) {
            return Err(Error::DuplicateLabel(label));
        }
        let norm_sqr = amp.norm_sqr();
        if norm_sqr < 1e-24 {
            return Err(Error::NonNormalizable(label));
        }
        if (norm_sqr - 1.0).abs() > INPUT_NORM_TOL {
            return Err(Error::NotNormalized { label, norm_sqr });
        }
        let norm = norm_sqr.sqrt();
        let (a, b) = (amp.zero / norm, amp.one / norm);
        self.amps = self.amps.iter().flat_map(|&x| [x * a, x * b]).collect();
        self.labels.push(label);
        Ok(())
    }

    /// Appends a fresh `|0>` qubit.
    pub fn append_zero(&mut self, label: QubitLabel) -> Result<()> {
        self.append_qubit(label, Amplitudes::ket0())
    }

    /// Appends the ebit `(|00> + |11>)/sqrt(2)` on `(q1, q2)`.
    pub fn append_ebit(&mut self, q1: QubitLabel, q2: QubitLabel) -> Result<()> {
        if q1 == q2 {
            return Err(Error::DuplicateLabel(q2));
        }
        for q in [&q1, &q2] {
            if self.contains(q) {
                return Err(Error::DuplicateLabel(q.clone()));
            }
        }
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let zero = Complex64::new(0.0, 0.0);
        self.amps = self
            .amps
            .iter()
            .flat_map(|&x| [x * h, zero, zero, x * h])
            .collect();
        self.labels.push(q1);
        self.labels.push(q2);
        Ok(())
    }

    /// Removes a qubit that is (within 1e-12) in `|0>` and unentangled.
    pub fn discard_zero(&mut self, label: &QubitLabel) -> Result<()> {
        let m = self.mask(label)?;
        let leak: f64 = self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & m != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        if leak > 1e-12 {
            return Err(Error::NotDisentangled(label.clone()));
        }
        let pos = self.position(label)?;
        self.amps = self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & m == 0)
            .map(|(_, &a)| a)
            .collect();
        self.labels.remove(pos);
        self.renormalize();
        Ok(())
    }

    fn renormalize(&mut self) {
        let norm = self.norm_sqr().sqrt();
        if norm > 0.0 {
            for a in &mut self.amps {
                *a /= norm;
            }
        }
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        let t = gate.targets();
        match gate.kind() {
            GateKind::H => {
                let m = self.mask(&t[0])?;
                let h = std::f64::consts::FRAC_1_SQRT_2;
                for i in 0..self.amps.len() {
                    if i & m == 0 {
                        let (a0, a1) = (self.amps[i], self.amps[i | m]);
                        self.amps[i] = (a0 + a1) * h;
                        self.amps[i | m] = (a0 - a1) * h;
                    }
                }
            }
            GateKind::X => {
                let m = self.mask(&t[0])?;
                self.flip(m);
            }
            GateKind::Z => {
                let m = self.mask(&t[0])?;
                self.phase_flip(m);
            }
            GateKind::Cnot => {
                let (c, x) = (self.mask(&t[0])?, self.mask(&t[1])?);
                self.cnot(c, x);
            }
            GateKind::Swap => {
                let (a, b) = (self.mask(&t[0])?, self.mask(&t[1])?);
                self.cnot(a, b);
                self.cnot(b, a);
                self.cnot(a, b);
            }
        }
        Ok(())
    }

    /// Exchanges two labels without touching amplitudes. Equivalent to a
    /// SWAP gate followed by nothing; used only as an executor shortcut.
    pub fn relabel_swap(&mut self, a: &QubitLabel, b: &QubitLabel) -> Result<()> {
        let (pa, pb) = (self.position(a)?, self.position(b)?);
        self.labels.swap(pa, pb);
        Ok(())
    }

    fn flip(&mut self, m: usize) {
        for i in 0..self.amps.len() {
            if i & m == 0 {
                self.amps.swap(i, i | m);
            }
        }
    }

    fn phase_flip(&mut self, m: usize) {
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & m != 0 {
                *a = -*a;
            }
        }
    }

    fn cnot(&mut self, control: usize, target: usize) {
        for i in 0..self.amps.len() {
            if i & control != 0 && i & target == 0 {
                self.amps.swap(i, i | target);
            }
        }
    }

    /// Multiplies the state by `p`, phase included.
    pub fn apply_pauli(&mut self, p: &PauliOp) -> Result<()> {
        let masks = p
            .factors()
            .map(|(q, letter)| Ok((self.mask(q)?, letter)))
            .collect::<Result<Vec<_>>>()?;
        // Rightmost factor acts first; factors on distinct qubits commute.
        for (m, letter) in masks {
            match letter {
                Pauli::I => {}
                Pauli::X => self.flip(m),
                Pauli::Z => self.phase_flip(m),
                Pauli::Y => {
                    // Y = i X Z
                    self.phase_flip(m);
                    self.flip(m);
                    for a in &mut self.amps {
                        *a *= Complex64::i();
                    }
                }
            }
        }
        let phase = p.phase().to_complex();
        if phase != Complex64::new(1.0, 0.0) {
            for a in &mut self.amps {
                *a *= phase;
            }
        }
        Ok(())
    }

    /// Projects `(q1, q2)` onto a Bell state and removes both qubits.
    pub fn bell_project(&self, q1: &QubitLabel, q2: &QubitLabel, outcome: BellOutcome) -> Result<BellProjection> {
        if q1 == q2 {
            return Err(Error::DuplicateLabel(q2.clone()));
        }
        let (m1, m2) = (self.mask(q1)?, self.mask(q2)?);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = Vec::with_capacity(self.amps.len() / 4);
        for i in 0..self.amps.len() {
            if i & (m1 | m2) != 0 {
                continue;
            }
            let a00 = self.amps[i];
            let a01 = self.amps[i | m2];
            let a10 = self.amps[i | m1];
            let a11 = self.amps[i | m1 | m2];
            let v = match outcome {
                BellOutcome::PhiPlus => a00 + a11,
                BellOutcome::PsiPlus => a01 + a10,
                BellOutcome::PsiMinus => a01 - a10,
                BellOutcome::PhiMinus => a00 - a11,
            };
            amps.push(v * h);
        }
        let probability: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if probability < IMPOSSIBLE_BRANCH_THRESHOLD {
            return Ok(BellProjection { probability, state: None });
        }
        let norm = probability.sqrt();
        for a in &mut amps {
            *a /= norm;
        }
        let labels = self
            .labels
            .iter()
            .filter(|l| *l != q1 && *l != q2)
            .cloned()
            .collect();
        Ok(BellProjection { probability, state: Some(StateVector { labels, amps }) })
    }

    /// Probabilities of the four Bell outcomes on `(q1, q2)`, in [`BellOutcome::ALL`] order.
    pub fn bell_probabilities(&self, q1: &QubitLabel, q2: &QubitLabel) -> Result<[f64; 4]> {
        let mut probs = [0.0; 4];
        for outcome in BellOutcome::ALL {
            probs[outcome.index()] = self.bell_project(q1, q2, outcome)?.probability;
        }
        Ok(probs)
    }

    /// Samples a Bell measurement on `(q1, q2)`.
    pub fn bell_measure_sample<R: Rng + ?Sized>(
        &self,
        q1: &QubitLabel,
        q2: &QubitLabel,
        rng: &mut R,
    ) -> Result<(BellOutcome, StateVector)> {
        let probs = self.bell_probabilities(q1, q2)?;
        let total: f64 = probs.iter().sum();
        let mut u = rng.gen::<f64>() * total;
        let mut chosen = BellOutcome::PhiMinus;
        for outcome in BellOutcome::ALL {
            let p = probs[outcome.index()];
            if p >= IMPOSSIBLE_BRANCH_THRESHOLD {
                chosen = outcome;
                if u < p {
                    break;
                }
            }
            u -= p;
        }
        let proj = self.bell_project(q1, q2, chosen)?;
        let state = proj.state.ok_or_else(|| Error::ImpossibleBranch(chosen.to_string()))?;
        Ok((chosen, state))
    }

    /// Returns the same state with qubits permuted into `order`.
    pub fn reordered(&self, order: &[QubitLabel]) -> Result<StateVector> {
        if order.len() != self.labels.len() {
            return Err(Error::LabelMismatch(format!(
                "{} vs {}",
                join_labels(&self.labels),
                join_labels(order)
            )));
        }
        check_unique(order)?;
        let n = order.len();
        // bit shift in the old index for each new position
        let shifts = order
            .iter()
            .map(|l| {
                self.position(l)
                    .map(|p| n - 1 - p)
                    .map_err(|_| Error::LabelMismatch(format!("{} vs {}", join_labels(&self.labels), join_labels(order))))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut amps = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (j, slot) in amps.iter_mut().enumerate() {
            let mut old = 0usize;
            for (k, &shift) in shifts.iter().enumerate() {
                if j >> (n - 1 - k) & 1 == 1 {
                    old |= 1 << shift;
                }
            }
            *slot = self.amps[old];
        }
        Ok(StateVector { labels: order.to_vec(), amps })
    }

    /// `<self|other>`, with `other` reindexed to this state's label order.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        let other = if other.labels == self.labels { other.clone() } else { other.reordered(&self.labels)? };
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }
}

fn check_unique(labels: &[QubitLabel]) -> Result<()> {
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(Error::DuplicateLabel(l.clone()));
        }
    }
    Ok(())
}

pub(crate) fn join_labels(labels: &[QubitLabel]) -> String {
    labels.iter().map(|l| l.as_str()).collect::<Vec<_>>().join(",")
}

/// Tensor product of single-qubit states; see [`StateVector::product`].
pub fn init_product_state<L: Into<QubitLabel>>(specs: impl IntoIterator<Item = (L, Amplitudes)>) -> Result<StateVector> {
    StateVector::product(specs)
}

/// `1 - |<s1|s2>|^2`.
pub fn infidelity(s1: &StateVector, s2: &StateVector) -> Result<f64> {
    let ov = s1.inner(s2)?.norm_sqr();
    Ok((1.0 - ov).max(0.0))
}

/// True iff `|<s1|s2>| >= 1 - tol`. Label order may differ between the two.
pub fn equal_up_to_global_phase(s1: &StateVector, s2: &StateVector, tol: f64) -> Result<bool> {
    Ok(s1.inner(s2)?.norm() >= 1.0 - tol)
}

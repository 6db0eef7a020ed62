//! Phased Pauli operators and their exact conjugation through Clifford gates.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::network::CnotNetwork;
use crate::statevec::{BellOutcome, Gate, GateKind, QubitLabel};

/// Global phase restricted to powers of `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum Phase {
    #[default]
    PlusOne,
    PlusI,
    MinusOne,
    MinusI,
}

impl Phase {
    pub fn quarter_turns(self) -> u8 {
        self as u8
    }

    pub fn from_quarter_turns(k: u8) -> Self {
        match k % 4 {
            0 => Phase::PlusOne,
            1 => Phase::PlusI,
            2 => Phase::MinusOne,
            _ => Phase::MinusI,
        }
    }

    pub fn to_complex(self) -> Complex64 {
        match self {
            Phase::PlusOne => Complex64::new(1.0, 0.0),
            Phase::PlusI => Complex64::new(0.0, 1.0),
            Phase::MinusOne => Complex64::new(-1.0, 0.0),
            Phase::MinusI => Complex64::new(0.0, -1.0),
        }
    }
}

impl Mul for Phase {
    type Output = Phase;

    // phases multiply by adding quarter turns
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: Phase) -> Phase {
        Phase::from_quarter_turns(self.quarter_turns() + rhs.quarter_turns())
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::PlusOne => "+1",
            Phase::PlusI => "+i",
            Phase::MinusOne => "-1",
            Phase::MinusI => "-i",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// Symplectic bits `(x, z)`.
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    /// Matrix product `self · rhs` as `(phase, letter)`.
    pub fn product(self, rhs: Pauli) -> (Phase, Pauli) {
        use Pauli::*;
        match (self, rhs) {
            (I, p) | (p, I) => (Phase::PlusOne, p),
            (a, b) if a == b => (Phase::PlusOne, I),
            (X, Y) => (Phase::PlusI, Z),
            (Y, Z) => (Phase::PlusI, X),
            (Z, X) => (Phase::PlusI, Y),
            (Y, X) => (Phase::MinusI, Z),
            (Z, Y) => (Phase::MinusI, X),
            (X, Z) => (Phase::MinusI, Y),
            _ => unreachable!(),
        }
    }

    /// ASCII token; Y is written as the product `ZX`.
    pub fn token(self) -> &'static str {
        match self {
            Pauli::I => "I",
            Pauli::X => "X",
            Pauli::Y => "ZX",
            Pauli::Z => "Z",
        }
    }

    pub fn printed_symbol(self) -> &'static str {
        match self {
            Pauli::I => "1",
            Pauli::X => "σx",
            Pauli::Y => "σzσx",
            Pauli::Z => "σz",
        }
    }
}

/// `phase · ⊗_q P_q`. Qubits absent from the map carry the identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct PauliOp {
    phase: Phase,
    factors: BTreeMap<QubitLabel, Pauli>,
}

impl PauliOp {
    pub fn identity() -> Self {
        PauliOp::default()
    }

    pub fn single(label: impl Into<QubitLabel>, letter: Pauli) -> Self {
        let mut op = PauliOp::identity();
        op.set(label.into(), letter);
        op
    }

    pub fn from_factors<L: Into<QubitLabel>>(phase: Phase, factors: impl IntoIterator<Item = (L, Pauli)>) -> Self {
        let mut op = PauliOp { phase, factors: BTreeMap::new() };
        for (l, p) in factors {
            op.set(l.into(), p);
        }
        op
    }

    /// Parses per-qubit tokens (`I`, `X`, `Z`, `ZX`, `Y`, or `1`, `σx`, `σz`, `σzσx`)
    /// paired with `labels`. `ZX` is read as the product Z·X.
    pub fn from_tokens<S: AsRef<str>>(labels: &[QubitLabel], tokens: &[S]) -> Result<Self> {
        if labels.len() != tokens.len() {
            return Err(Error::Parse(format!("{} tokens for {} qubits", tokens.len(), labels.len())));
        }
        let mut op = PauliOp::identity();
        for (label, tok) in labels.iter().zip(tokens) {
            let factor = match tok.as_ref().trim() {
                "I" | "1" => PauliOp::identity(),
                "X" | "σx" => PauliOp::single(label.clone(), Pauli::X),
                "Z" | "σz" => PauliOp::single(label.clone(), Pauli::Z),
                "Y" => PauliOp::single(label.clone(), Pauli::Y),
                "ZX" | "σzσx" => PauliOp::single(label.clone(), Pauli::Z) * PauliOp::single(label.clone(), Pauli::X),
                "XZ" | "σxσz" => PauliOp::single(label.clone(), Pauli::X) * PauliOp::single(label.clone(), Pauli::Z),
                other => return Err(Error::Parse(format!("unknown Pauli token {other:?}"))),
            };
            op = op * factor;
        }
        Ok(op)
    }

    fn set(&mut self, label: QubitLabel, letter: Pauli) {
        if letter == Pauli::I {
            self.factors.remove(&label);
        } else {
            self.factors.insert(label, letter);
        }
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn get(&self, label: &QubitLabel) -> Pauli {
        self.factors.get(label).copied().unwrap_or(Pauli::I)
    }

    /// Non-identity factors in label order.
    pub fn factors(&self) -> impl Iterator<Item = (&QubitLabel, Pauli)> + '_ {
        self.factors.iter().map(|(l, &p)| (l, p))
    }

    pub fn support(&self) -> impl Iterator<Item = &QubitLabel> + '_ {
        self.factors.keys()
    }

    pub fn weight(&self) -> usize {
        self.factors.len()
    }

    /// True when the operator is `+1 · I`.
    pub fn is_identity(&self) -> bool {
        self.factors.is_empty() && self.phase == Phase::PlusOne
    }

    /// True when the operator is the identity up to phase.
    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn strip_phase(&self) -> PauliOp {
        PauliOp { phase: Phase::PlusOne, factors: self.factors.clone() }
    }

    /// Equality modulo global phase.
    pub fn eq_up_to_phase(&self, other: &PauliOp) -> bool {
        self.factors == other.factors
    }

    /// Matrix product `self · rhs`, phase included.
    pub fn compose(&self, rhs: &PauliOp) -> PauliOp {
        let mut out = PauliOp { phase: self.phase * rhs.phase, factors: self.factors.clone() };
        for (label, &b) in &rhs.factors {
            let a = out.get(label);
            let (ph, letter) = a.product(b);
            out.phase = out.phase * ph;
            out.set(label.clone(), letter);
        }
        out
    }

    /// Restriction to `labels` (phase kept).
    pub fn restricted(&self, labels: &[QubitLabel]) -> PauliOp {
        PauliOp {
            phase: self.phase,
            factors: self
                .factors
                .iter()
                .filter(|(l, _)| labels.contains(l))
                .map(|(l, &p)| (l.clone(), p))
                .collect(),
        }
    }

    /// One ASCII token per label in `order`, phase dropped.
    pub fn tokens(&self, order: &[QubitLabel]) -> Vec<&'static str> {
        order.iter().map(|l| self.get(l).token()).collect()
    }

    /// Tensor string in the `1 ⊗ σx ⊗ σzσx` notation over `order`, phase dropped.
    pub fn printed_notation(&self, order: &[QubitLabel]) -> String {
        order
            .iter()
            .map(|l| self.get(l).printed_symbol())
            .collect::<Vec<_>>()
            .join(" ⊗ ")
    }

    /// Compact `ZX@A X@B` rendering of non-identity factors, phase dropped.
    pub fn compact(&self) -> String {
        if self.factors.is_empty() {
            return "I".to_owned();
        }
        self.factors
            .iter()
            .map(|(l, p)| format!("{}@{}", p.token(), l))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl Mul for PauliOp {
    type Output = PauliOp;

    fn mul(self, rhs: PauliOp) -> PauliOp {
        PauliOp::compose(&self, &rhs)
    }
}

impl fmt::Display for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ", self.phase)?;
        if self.factors.is_empty() {
            return f.write_str("I");
        }
        let parts: Vec<String> = self.factors.iter().map(|(l, p)| format!("{p:?}_{l}")).collect();
        f.write_str(&parts.join("⊗"))
    }
}

impl FromStr for PauliOp {
    type Err = Error;

    /// Parses the compact form produced by [`PauliOp::compact`], e.g. `ZX@A X@B`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "I" || s.is_empty() {
            return Ok(PauliOp::identity());
        }
        let mut op = PauliOp::identity();
        for part in s.split_whitespace() {
            let (tok, label) = part
                .split_once('@')
                .ok_or_else(|| Error::Parse(format!("expected TOKEN@LABEL, got {part:?}")))?;
            op = op * PauliOp::from_tokens(&[QubitLabel::from(label)], &[tok])?;
        }
        Ok(op)
    }
}

/// Images of `X_q` and `Z_q` under conjugation by `gate`, one pair per target.
fn generator_images(gate: &Gate) -> Vec<(QubitLabel, PauliOp, PauliOp)> {
    let t = gate.targets();
    let x = |q: &QubitLabel| PauliOp::single(q.clone(), Pauli::X);
    let z = |q: &QubitLabel| PauliOp::single(q.clone(), Pauli::Z);
    let neg = |p: PauliOp| {
        let ph = p.phase * Phase::MinusOne;
        p.with_phase(ph)
    };
    match gate.kind() {
        GateKind::H => vec![(t[0].clone(), z(&t[0]), x(&t[0]))],
        GateKind::X => vec![(t[0].clone(), x(&t[0]), neg(z(&t[0])))],
        GateKind::Z => vec![(t[0].clone(), neg(x(&t[0])), z(&t[0]))],
        GateKind::Cnot => {
            let (c, tg) = (&t[0], &t[1]);
            vec![
                (c.clone(), x(c) * x(tg), z(c)),
                (tg.clone(), x(tg), z(c) * z(tg)),
            ]
        }
        GateKind::Swap => {
            let (a, b) = (&t[0], &t[1]);
            vec![(a.clone(), x(b), z(b)), (b.clone(), x(a), z(a))]
        }
    }
}

/// `g · p · g†`, computed exactly.
pub fn conjugate_through_gate(gate: &Gate, p: &PauliOp) -> PauliOp {
    let images = generator_images(gate);
    let touched: Vec<QubitLabel> = images.iter().map(|(q, _, _)| q.clone()).collect();
    let mut out = PauliOp {
        phase: p.phase,
        factors: p
            .factors
            .iter()
            .filter(|(l, _)| !touched.contains(l))
            .map(|(l, &q)| (l.clone(), q))
            .collect(),
    };
    for (q, img_x, img_z) in images {
        let image = match p.get(&q) {
            Pauli::I => continue,
            Pauli::X => img_x,
            Pauli::Z => img_z,
            // Y = i X Z
            Pauli::Y => (img_x * img_z).with_phase_mul(Phase::PlusI),
        };
        out = out * image;
    }
    out
}

impl PauliOp {
    fn with_phase_mul(self, ph: Phase) -> PauliOp {
        let phase = self.phase * ph;
        self.with_phase(phase)
    }
}

/// `U · p · U†` for the ordered gate list `U = g_k ... g_1`.
pub fn push_through_gates<'a>(gates: impl IntoIterator<Item = &'a Gate>, p: &PauliOp) -> PauliOp {
    gates.into_iter().fold(p.clone(), |acc, g| conjugate_through_gate(g, &acc))
}

/// Conjugates a Pauli over role labels (`A`, `B`, ...) through a CNOT network.
pub fn push_through_network(net: &CnotNetwork, p: &PauliOp) -> PauliOp {
    push_through_gates(&net.gates_on_roles(), p)
}

/// Teleportation byproduct on the receiving qubit for a Bell outcome:
/// `φ⁺ → 1`, `ψ⁺ → σx`, `ψ⁻ → σzσx`, `φ⁻ → σz`. Each is also its own
/// correction up to phase.
pub fn standard_correction(outcome: BellOutcome, label: impl Into<QubitLabel>) -> PauliOp {
    let label = label.into();
    match outcome {
        BellOutcome::PhiPlus => PauliOp::identity(),
        BellOutcome::PsiPlus => PauliOp::single(label, Pauli::X),
        BellOutcome::PsiMinus => PauliOp::single(label.clone(), Pauli::Z) * PauliOp::single(label, Pauli::X),
        BellOutcome::PhiMinus => PauliOp::single(label, Pauli::Z),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiplication_table() {
        let za = PauliOp::single("A", Pauli::Z);
        let xa = PauliOp::single("A", Pauli::X);
        assert_eq!(za.compose(&xa), PauliOp::single("A", Pauli::Y).with_phase(Phase::PlusI));
        assert_eq!(xa.compose(&za), PauliOp::single("A", Pauli::Y).with_phase(Phase::MinusI));
        assert!(xa.compose(&xa).is_identity());
        let xz = xa.compose(&PauliOp::single("B", Pauli::Z));
        assert_eq!(xz, PauliOp::from_factors(Phase::PlusOne, [("A", Pauli::X), ("B", Pauli::Z)]));
    }

    #[test]
    fn cnot_conjugation() {
        let g = Gate::cnot("A", "B");
        assert_eq!(
            conjugate_through_gate(&g, &PauliOp::single("A", Pauli::X)),
            PauliOp::from_factors(Phase::PlusOne, [("A", Pauli::X), ("B", Pauli::X)])
        );
        assert_eq!(
            conjugate_through_gate(&g, &PauliOp::single("B", Pauli::Z)),
            PauliOp::from_factors(Phase::PlusOne, [("A", Pauli::Z), ("B", Pauli::Z)])
        );
        for g in [Gate::h("A"), Gate::x("A"), Gate::swap("A", "B"), g] {
            assert!(conjugate_through_gate(&g, &PauliOp::identity()).is_identity());
        }
    }

    #[test]
    fn single_qubit_conjugation_signs() {
        let y = PauliOp::single("A", Pauli::Y);
        let neg_y = y.clone().with_phase(Phase::MinusOne);
        assert_eq!(conjugate_through_gate(&Gate::h("A"), &y), neg_y);
        assert_eq!(conjugate_through_gate(&Gate::x("A"), &y), neg_y);
        assert_eq!(conjugate_through_gate(&Gate::z("A"), &y), neg_y);
        assert_eq!(
            conjugate_through_gate(&Gate::h("A"), &PauliOp::single("A", Pauli::X)),
            PauliOp::single("A", Pauli::Z)
        );
    }

    #[test]
    fn network_push() {
        let xa = PauliOp::single("A", Pauli::X);
        assert_eq!(push_through_network(&CnotNetwork::empty(), &xa), xa);
        assert_eq!(
            push_through_network(&CnotNetwork::single_cnot(), &xa),
            PauliOp::from_factors(Phase::PlusOne, [("A", Pauli::X), ("B", Pauli::X)])
        );
        assert_eq!(push_through_network(&CnotNetwork::swap(), &xa), PauliOp::single("B", Pauli::X));
    }

    #[test]
    fn token_round_trip() {
        let labels: Vec<QubitLabel> = vec!["A".into(), "B".into(), "C".into()];
        let op = PauliOp::from_tokens(&labels, &["ZX", "I", "σx"]).unwrap();
        assert_eq!(op.tokens(&labels), vec!["ZX", "I", "X"]);
        assert_eq!(op.printed_notation(&labels), "σzσx ⊗ 1 ⊗ σx");
        assert_eq!(op.compact(), "ZX@A X@C");
        let back: PauliOp = op.compact().parse().unwrap();
        assert!(back.eq_up_to_phase(&op));
        assert!(PauliOp::from_tokens(&labels, &["Q", "I", "I"]).is_err());
    }

    #[test]
    fn standard_rule() {
        assert!(standard_correction(BellOutcome::PhiPlus, "A").is_identity());
        assert!(standard_correction(BellOutcome::PsiMinus, "A").eq_up_to_phase(&PauliOp::single("A", Pauli::Y)));
    }
}

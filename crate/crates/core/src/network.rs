//! CNOT networks over logical roles `A`, `B`, `C`, ...

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::statevec::{Gate, QubitLabel};

/// Logical qubit role; index 0 is `A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Role(pub u8);

impl Role {
    pub const A: Role = Role(0);
    pub const B: Role = Role(1);
    pub const C: Role = Role(2);

    /// Roles are single letters, so at most 26 of them.
    pub const MAX: usize = 26;

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn name(self) -> char {
        (b'A' + self.0) as char
    }

    pub fn label(self) -> QubitLabel {
        QubitLabel::new(self.name().to_string())
    }

    /// Label for the `k`-th auxiliary qubit at this role's site, e.g. `B2`.
    pub fn aux(self, k: usize) -> QubitLabel {
        QubitLabel::new(format!("{}{}", self.name(), k))
    }

    pub fn first(n: usize) -> impl Iterator<Item = Role> {
        (0..n.min(Self::MAX) as u8).map(Role)
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl TryFrom<char> for Role {
    type Error = Error;

    fn try_from(c: char) -> Result<Role> {
        if c.is_ascii_uppercase() {
            Ok(Role(c as u8 - b'A'))
        } else {
            Err(Error::BadRole(c.to_string()))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Cnot {
    pub control: Role,
    pub target: Role,
}

/// Ordered CNOT list in application order: `gates[0]` acts first.
///
/// The operator product `CNOT_CA·CNOT_BC·CNOT_AB` is therefore the list
/// `[AB, BC, CA]`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct CnotNetwork {
    gates: Vec<Cnot>,
}

impl CnotNetwork {
    pub fn empty() -> Self {
        CnotNetwork::default()
    }

    pub fn new(pairs: impl IntoIterator<Item = (Role, Role)>) -> Result<Self> {
        let gates = pairs
            .into_iter()
            .map(|(control, target)| {
                if control == target {
                    Err(Error::BadRole(format!("CNOT with control = target = {control}")))
                } else {
                    Ok(Cnot { control, target })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CnotNetwork { gates })
    }

    /// `CNOT_AB`.
    pub fn single_cnot() -> Self {
        CnotNetwork { gates: vec![cx(Role::A, Role::B)] }
    }

    /// `CNOT_BA·CNOT_AB`.
    pub fn two_cnot() -> Self {
        CnotNetwork { gates: vec![cx(Role::A, Role::B), cx(Role::B, Role::A)] }
    }

    /// `CNOT_AB·CNOT_BA·CNOT_AB`, a swap.
    pub fn swap() -> Self {
        CnotNetwork { gates: vec![cx(Role::A, Role::B), cx(Role::B, Role::A), cx(Role::A, Role::B)] }
    }

    /// `CNOT_CA·CNOT_BC·CNOT_AB`.
    pub fn u3a() -> Self {
        CnotNetwork { gates: vec![cx(Role::A, Role::B), cx(Role::B, Role::C), cx(Role::C, Role::A)] }
    }

    /// `CNOT_BC·CNOT_AB·CNOT_CA`.
    pub fn u3b() -> Self {
        CnotNetwork { gates: vec![cx(Role::C, Role::A), cx(Role::A, Role::B), cx(Role::B, Role::C)] }
    }

    /// Ladder `r0→r1, r1→r2, ..., r(n-2)→r(n-1)` closed by `r(n-1)→r0`.
    /// For n = 2 this is [`two_cnot`](Self::two_cnot), for n = 3 [`u3a`](Self::u3a).
    pub fn ladder(n: usize) -> Self {
        let n = n.min(Role::MAX) as u8;
        if n < 2 {
            return CnotNetwork::empty();
        }
        let mut gates: Vec<Cnot> = (0..n - 1).map(|i| cx(Role(i), Role(i + 1))).collect();
        gates.push(cx(Role(n - 1), Role(0)));
        CnotNetwork { gates }
    }

    /// Uniformly random network of `len` CNOTs over the first `roles` roles.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, roles: usize, len: usize) -> Self {
        assert!((2..=Role::MAX).contains(&roles));
        let gates = (0..len)
            .map(|_| {
                let c = rng.gen_range(0..roles) as u8;
                let mut t = rng.gen_range(0..roles - 1) as u8;
                if t >= c {
                    t += 1;
                }
                cx(Role(c), Role(t))
            })
            .collect();
        CnotNetwork { gates }
    }

    pub fn gates(&self) -> &[Cnot] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Number of roles touched, i.e. `1 + max role index` (0 when empty).
    pub fn min_arity(&self) -> usize {
        self.gates
            .iter()
            .map(|g| g.control.index().max(g.target.index()) + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn check_roles(&self, arity: usize) -> Result<()> {
        match self
            .gates
            .iter()
            .flat_map(|g| [g.control, g.target])
            .find(|r| r.index() >= arity)
        {
            Some(r) => Err(Error::BadRole(format!("{r} (protocol has {arity} roles)"))),
            None => Ok(()),
        }
    }

    /// The network as gates on the role labels themselves.
    pub fn gates_on_roles(&self) -> Vec<Gate> {
        self.gates_on(|r| r.label())
    }

    /// The network as gates on whatever qubits currently carry each role.
    pub fn gates_on(&self, carrier: impl Fn(Role) -> QubitLabel) -> Vec<Gate> {
        self.gates
            .iter()
            .map(|g| Gate::cnot(carrier(g.control), carrier(g.target)))
            .collect()
    }
}

fn cx(control: Role, target: Role) -> Cnot {
    Cnot { control, target }
}

impl fmt::Display for CnotNetwork {
    /// Comma-separated control/target pairs in application order, e.g. `AB,BC,CA`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.gates.iter().map(|g| format!("{}{}", g.control, g.target)).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for CnotNetwork {
    type Err = Error;

    /// Parses `AB,BC,CA` (application order). The empty string is the empty network.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(CnotNetwork::empty());
        }
        let pairs = s
            .split(',')
            .map(|tok| {
                let chars: Vec<char> = tok.trim().chars().collect();
                match chars[..] {
                    [c, t] => Ok((Role::try_from(c)?, Role::try_from(t)?)),
                    _ => Err(Error::Parse(format!("expected a role pair like AB, got {tok:?}"))),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        CnotNetwork::new(pairs)
    }
}

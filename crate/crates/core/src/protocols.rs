//! Protocol builders and the executor that runs them on a statevector.
//!
//! A [`ProtocolSpec`] is a flat list of [`Step`]s over named qubits. Builders
//! cover the teleport-there-and-back scheme (Bell measurements interleaved
//! with the gate) and the post-measurement scheme where every Bell
//! measurement happens after all unitaries and corrections come from a
//! lookup table keyed by the deferred outcomes.

use std::fmt;
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::network::{CnotNetwork, Role};
use crate::pauli::{standard_correction, PauliOp};
use crate::statevec::{join_labels, Amplitudes, BellOutcome, Gate, GateKind, QubitLabel, StateVector};
use crate::synth::{conjugation_table, CorrectionTable};

/// Largest register the executor will simulate at once.
pub const MAX_LIVE_QUBITS: usize = 20;

/// A pair of qubits measured together in the Bell basis.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Site {
    pub first: QubitLabel,
    pub second: QubitLabel,
}

impl Site {
    pub fn new(first: impl Into<QubitLabel>, second: impl Into<QubitLabel>) -> Self {
        Site { first: first.into(), second: second.into() }
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.first, self.second)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    MeasureInMiddle,
    PostMeasurement,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Step {
    Ebit(QubitLabel, QubitLabel),
    /// Fresh `|0>` qubit.
    Prepare(QubitLabel),
    Gate(Gate),
    /// Bell measurement of `sites[i]`.
    Measure(usize),
    Correct(CorrectionTable),
    /// Drop a qubit that must be back in `|0>`.
    Discard(QubitLabel),
}

/// A site whose Bell outcome leaves a byproduct on `role` *before* the network.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DeferredSite {
    pub site: usize,
    pub role: Role,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolSpec {
    id: String,
    scheme: Scheme,
    network: CnotNetwork,
    arity: usize,
    ebits: Vec<(QubitLabel, QubitLabel)>,
    sites: Vec<Site>,
    deferred: Vec<DeferredSite>,
    steps: Vec<Step>,
}

impl ProtocolSpec {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn network(&self) -> &CnotNetwork {
        &self.network
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Logical qubit labels in role order.
    pub fn roles(&self) -> Vec<QubitLabel> {
        Role::first(self.arity).map(Role::label).collect()
    }

    pub fn ebits(&self) -> &[(QubitLabel, QubitLabel)] {
        &self.ebits
    }

    /// Measurement sites in execution order.
    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn deferred_sites(&self) -> &[DeferredSite] {
        &self.deferred
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn site_index(&self, site: &Site) -> Option<usize> {
        self.sites.iter().position(|s| s == site)
    }

    /// Every label that ever appears in the protocol.
    pub fn total_qubits(&self) -> usize {
        let mut labels = self.roles();
        for step in &self.steps {
            let new: Vec<&QubitLabel> = match step {
                Step::Ebit(a, b) => vec![a, b],
                Step::Prepare(a) => vec![a],
                _ => vec![],
            };
            for l in new {
                if !labels.contains(l) {
                    labels.push(l.clone());
                }
            }
        }
        labels.len()
    }

    /// Widest register reached during execution.
    pub fn peak_live_qubits(&self) -> usize {
        let mut live = self.arity;
        let mut peak = live;
        for step in &self.steps {
            match step {
                Step::Ebit(..) => live += 2,
                Step::Prepare(_) => live += 1,
                Step::Measure(_) => live -= 2,
                Step::Discard(_) => live -= 1,
                Step::Gate(_) | Step::Correct(_) => {}
            }
            peak = peak.max(live);
        }
        peak
    }

    /// The lookup table fed by the deferred sites (post-measurement specs only).
    pub fn deferred_table(&self) -> Option<&CorrectionTable> {
        let sites = self.deferred_site_pairs();
        if sites.is_empty() {
            return None;
        }
        self.steps.iter().find_map(|s| match s {
            Step::Correct(t) if t.sites() == &sites[..] => Some(t),
            _ => None,
        })
    }

    pub fn deferred_site_pairs(&self) -> Vec<Site> {
        self.deferred.iter().map(|d| self.sites[d.site].clone()).collect()
    }

    /// All correction tables in execution order.
    pub fn correction_tables(&self) -> impl Iterator<Item = &CorrectionTable> + '_ {
        self.steps.iter().filter_map(|s| match s {
            Step::Correct(t) => Some(t),
            _ => None,
        })
    }

    /// Replaces the correction step conditioned on the same sites as `table`.
    pub fn install_table(&self, table: CorrectionTable) -> Result<ProtocolSpec> {
        let mut spec = self.clone();
        let slot = spec
            .steps
            .iter_mut()
            .find(|s| matches!(s, Step::Correct(t) if t.sites() == table.sites()))
            .ok_or_else(|| {
                Error::SiteMismatch(format!(
                    "no correction step on sites [{}] in {}",
                    table.sites().iter().map(Site::to_string).collect::<Vec<_>>().join(","),
                    self.id
                ))
            })?;
        *slot = Step::Correct(table);
        Ok(spec)
    }

    /// Same protocol with every correction step removed.
    pub fn without_corrections(&self) -> ProtocolSpec {
        let mut spec = self.clone();
        spec.steps.retain(|s| !matches!(s, Step::Correct(_)));
        spec
    }

    /// Replaces all correction steps with `tables`, appended at the end.
    pub fn with_corrections(&self, tables: Vec<CorrectionTable>) -> ProtocolSpec {
        let mut spec = self.without_corrections();
        spec.steps.extend(tables.into_iter().map(Step::Correct));
        spec
    }

    /// The target gate applied directly to the logical qubits.
    pub fn apply_direct(&self, input: &StateVector) -> Result<StateVector> {
        let mut out = input.clone();
        for g in self.network.gates_on_roles() {
            out.apply_gate(&g)?;
        }
        Ok(out)
    }

    /// Checks structural invariants; every builder output satisfies them.
    pub fn validate(&self) -> Result<()> {
        let mut measured = vec![false; self.sites.len()];
        let mut seen_measure = false;
        for step in &self.steps {
            match step {
                Step::Measure(i) => {
                    let slot = measured
                        .get_mut(*i)
                        .ok_or_else(|| Error::MalformedSpec(format!("measurement of unknown site {i}")))?;
                    if *slot {
                        return Err(Error::MalformedSpec(format!("site {} measured twice", self.sites[*i])));
                    }
                    *slot = true;
                    seen_measure = true;
                }
                Step::Gate(_) | Step::Ebit(..) | Step::Prepare(_)
                    if seen_measure && self.scheme == Scheme::PostMeasurement =>
                {
                    return Err(Error::MalformedSpec(
                        "post-measurement protocol has a unitary step after a measurement".into(),
                    ));
                }
                Step::Correct(t) => {
                    for s in t.sites() {
                        let i = self
                            .site_index(s)
                            .ok_or_else(|| Error::MalformedSpec(format!("correction conditioned on unknown site {s}")))?;
                        if !measured[i] {
                            return Err(Error::MalformedSpec(format!("correction uses {s} before it is measured")));
                        }
                    }
                }
                _ => {}
            }
        }
        if measured.iter().any(|m| !m) {
            return Err(Error::MalformedSpec("some measurement sites are never measured".into()));
        }
        Ok(())
    }

    /// Line-based circuit trace, one step per line.
    pub fn trace(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# {}", self.id);
        for step in &self.steps {
            match step {
                Step::Ebit(a, b) => {
                    let _ = writeln!(out, "EBIT {a} {b}");
                }
                Step::Prepare(a) => {
                    let _ = writeln!(out, "INIT {a}");
                }
                Step::Gate(g) if g.kind() == GateKind::Swap => {
                    let t = g.targets();
                    let _ = writeln!(out, "SWAP {} {}", t[0], t[1]);
                }
                Step::Gate(g) => {
                    let _ = writeln!(out, "GATE {g}");
                }
                Step::Measure(i) => {
                    let s = &self.sites[*i];
                    let _ = writeln!(out, "BELLMEAS {} {} -> m{i}", s.first, s.second);
                }
                Step::Correct(t) => {
                    let ids: Vec<usize> = t.sites().iter().filter_map(|s| self.site_index(s)).collect();
                    for (key, entry) in t.iter() {
                        if entry.is_trivial() {
                            continue;
                        }
                        let cond: Vec<String> =
                            ids.iter().zip(&key).map(|(i, o)| format!("m{i}={}", o.token())).collect();
                        let _ = writeln!(out, "CORRECT if {} : {}", cond.join(","), entry.compact());
                    }
                }
                Step::Discard(a) => {
                    let _ = writeln!(out, "DISCARD {a}");
                }
            }
        }
        out
    }
}

/// Outcome per measurement site, in the protocol's measurement order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BranchAssignment {
    entries: Vec<(Site, BellOutcome)>,
}

impl BranchAssignment {
    pub fn new(spec: &ProtocolSpec, outcomes: &[BellOutcome]) -> Result<Self> {
        if outcomes.len() != spec.sites.len() {
            return Err(Error::BranchMismatch(format!(
                "{} outcomes for {} sites",
                outcomes.len(),
                spec.sites.len()
            )));
        }
        Ok(BranchAssignment { entries: spec.sites.iter().cloned().zip(outcomes.iter().copied()).collect() })
    }

    /// Every φ⁺.
    pub fn trivial(spec: &ProtocolSpec) -> Self {
        BranchAssignment::new(spec, &vec![BellOutcome::PhiPlus; spec.sites.len()]).expect("length matches")
    }

    /// Branch number `k` in mixed radix, first site most significant.
    pub fn nth(spec: &ProtocolSpec, k: usize) -> Self {
        let m = spec.sites.len();
        let outcomes: Vec<BellOutcome> = (0..m)
            .map(|j| BellOutcome::from_index(k >> (2 * (m - 1 - j)) & 3))
            .collect();
        BranchAssignment::new(spec, &outcomes).expect("length matches")
    }

    /// Parses `phi+,psi-` (outcomes in site order).
    pub fn parse(spec: &ProtocolSpec, s: &str) -> Result<Self> {
        let outcomes = s.split(',').map(str::parse).collect::<Result<Vec<BellOutcome>>>()?;
        BranchAssignment::new(spec, &outcomes)
    }

    pub fn outcomes(&self) -> Vec<BellOutcome> {
        self.entries.iter().map(|(_, o)| *o).collect()
    }

    pub fn entries(&self) -> &[(Site, BellOutcome)] {
        &self.entries
    }

    pub fn get(&self, site: &Site) -> Option<BellOutcome> {
        self.entries.iter().find(|(s, _)| s == site).map(|(_, o)| *o)
    }
}

impl fmt::Display for BranchAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = self.entries.iter().map(|(_, o)| o.token()).collect();
        f.write_str(&parts.join(","))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum BranchChoice {
    Fixed(BranchAssignment),
    Sample(u64),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Execute SWAP steps by exchanging labels instead of amplitudes.
    pub relabel_swaps: bool,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    /// Final state over the logical qubits, in role order.
    pub state: StateVector,
    pub probability: f64,
    /// Non-trivial corrections in the order they fired.
    pub corrections: Vec<PauliOp>,
    pub branch: BranchAssignment,
}

/// State after the unitary prefix (everything before the first measurement).
#[derive(Clone, Debug)]
pub struct PreparedRun {
    state: StateVector,
    next_step: usize,
}

impl PreparedRun {
    pub fn state(&self) -> &StateVector {
        &self.state
    }
}

enum OutcomeSource {
    Fixed(Vec<BellOutcome>),
    Sample(Box<ChaCha8Rng>),
}

impl ProtocolSpec {
    /// Runs the measurement-free prefix once so that many branches can share it.
    pub fn prepare(&self, input: &StateVector, opts: RunOptions) -> Result<PreparedRun> {
        self.validate()?;
        let roles = self.roles();
        if input.num_qubits() != roles.len() || roles.iter().any(|r| !input.contains(r)) {
            return Err(Error::LabelMismatch(format!(
                "input over [{}], protocol roles [{}]",
                join_labels(input.labels()),
                join_labels(&roles)
            )));
        }
        let mut state = input.clone();
        let mut i = 0;
        while i < self.steps.len() && !matches!(self.steps[i], Step::Measure(_)) {
            let mut fired = Vec::new();
            self.exec_step(i, &mut state, &mut OutcomeSource::Fixed(Vec::new()), &mut [], &mut 1.0, &mut fired, opts)?;
            i += 1;
        }
        Ok(PreparedRun { state, next_step: i })
    }

    pub fn run_prepared(&self, prepared: &PreparedRun, branch: &BranchChoice, opts: RunOptions) -> Result<RunOutcome> {
        let mut state = prepared.state.clone();
        let mut source = match branch {
            BranchChoice::Fixed(b) => {
                if b.entries.iter().map(|(s, _)| s).ne(self.sites.iter()) {
                    return Err(Error::BranchMismatch(format!("branch {b} does not cover sites of {}", self.id)));
                }
                OutcomeSource::Fixed(b.outcomes())
            }
            BranchChoice::Sample(seed) => OutcomeSource::Sample(Box::new(ChaCha8Rng::seed_from_u64(*seed))),
        };
        let mut recorded: Vec<Option<BellOutcome>> = vec![None; self.sites.len()];
        let mut probability = 1.0;
        let mut corrections = Vec::new();
        for i in prepared.next_step..self.steps.len() {
            self.exec_step(i, &mut state, &mut source, &mut recorded, &mut probability, &mut corrections, opts)?;
        }
        let roles = self.roles();
        let state = state.reordered(&roles).map_err(|_| {
            Error::LabelMismatch(format!(
                "protocol {} ended on [{}], expected [{}]",
                self.id,
                join_labels(state.labels()),
                join_labels(&roles)
            ))
        })?;
        let outcomes: Vec<BellOutcome> = recorded
            .into_iter()
            .map(|o| o.ok_or_else(|| Error::MalformedSpec("site never measured".into())))
            .collect::<Result<_>>()?;
        Ok(RunOutcome { state, probability, corrections, branch: BranchAssignment::new(self, &outcomes)? })
    }

    #[allow(clippy::too_many_arguments)]
    fn exec_step(
        &self,
        i: usize,
        state: &mut StateVector,
        source: &mut OutcomeSource,
        recorded: &mut [Option<BellOutcome>],
        probability: &mut f64,
        fired: &mut Vec<PauliOp>,
        opts: RunOptions,
    ) -> Result<()> {
        match &self.steps[i] {
            Step::Ebit(a, b) => state.append_ebit(a.clone(), b.clone())?,
            Step::Prepare(a) => state.append_zero(a.clone())?,
            Step::Gate(g) if opts.relabel_swaps && g.kind() == GateKind::Swap => {
                state.relabel_swap(&g.targets()[0], &g.targets()[1])?
            }
            Step::Gate(g) => state.apply_gate(g)?,
            Step::Discard(a) => state.discard_zero(a)?,
            Step::Measure(k) => {
                let site = &self.sites[*k];
                let (outcome, next, p) = match source {
                    OutcomeSource::Fixed(outcomes) => {
                        let outcome = outcomes[*k];
                        let proj = state.bell_project(&site.first, &site.second, outcome)?;
                        let p = proj.probability;
                        let next = proj
                            .state
                            .ok_or_else(|| Error::ImpossibleBranch(format!("{site}={outcome}")))?;
                        (outcome, next, p)
                    }
                    OutcomeSource::Sample(rng) => {
                        let probs = state.bell_probabilities(&site.first, &site.second)?;
                        let (outcome, next) = state.bell_measure_sample(&site.first, &site.second, rng)?;
                        (outcome, next, probs[outcome.index()])
                    }
                };
                *state = next;
                *probability *= p;
                recorded[*k] = Some(outcome);
            }
            Step::Correct(table) => {
                let key = table
                    .sites()
                    .iter()
                    .map(|s| {
                        self.site_index(s)
                            .and_then(|k| recorded[k])
                            .ok_or_else(|| Error::MalformedSpec(format!("correction reads unmeasured site {s}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let entry = table.get(&key);
                if !entry.is_trivial() {
                    state.apply_pauli(entry)?;
                    fired.push(entry.clone());
                }
            }
        }
        Ok(())
    }
}

/// Runs `spec` on a product input, one amplitude pair per role.
pub fn run_protocol(spec: &ProtocolSpec, inputs: &[Amplitudes], branch: &BranchChoice) -> Result<RunOutcome> {
    let input = product_input(spec, inputs)?;
    run_protocol_on(spec, &input, branch, RunOptions::default())
}

/// Runs `spec` on an arbitrary (possibly entangled) state of the logical qubits.
pub fn run_protocol_on(
    spec: &ProtocolSpec,
    input: &StateVector,
    branch: &BranchChoice,
    opts: RunOptions,
) -> Result<RunOutcome> {
    let prepared = spec.prepare(input, opts)?;
    spec.run_prepared(&prepared, branch, opts)
}

/// Product state over the protocol's roles.
pub fn product_input(spec: &ProtocolSpec, inputs: &[Amplitudes]) -> Result<StateVector> {
    if inputs.len() != spec.arity {
        return Err(Error::LabelMismatch(format!("{} inputs for arity {}", inputs.len(), spec.arity)));
    }
    StateVector::product(spec.roles().into_iter().zip(inputs.iter().copied()))
}

fn standard_table(site: &Site, target: QubitLabel) -> CorrectionTable {
    let targets = vec![target.clone()];
    CorrectionTable::from_fn(vec![site.clone()], targets, |key| standard_correction(key[0], target.clone()))
}

/// Teleport-there-and-back two-qubit gate: `A` is teleported to `B1`, the
/// network runs on `(B1, B)`, `B1` is teleported back to `A2`, and `A2` is
/// swapped into `A`.
pub fn build_measure_in_middle(network: &CnotNetwork) -> Result<ProtocolSpec> {
    network.check_roles(2)?;
    Ok(build_generic_nonlocal(2, network)?.with_id(format!("mid2q:{network}")))
}

/// `n`-party version: roles `1..n-1` are teleported to the last role's site
/// with `n-1` ebits, the network runs there, and each is teleported back
/// with another `n-1` ebits.
pub fn build_generic_nonlocal(n: usize, network: &CnotNetwork) -> Result<ProtocolSpec> {
    if n < 2 {
        return Err(Error::BadRole(format!("generic protocol needs at least 2 roles, got {n}")));
    }
    if n > Role::MAX {
        return Err(Error::ArityTooLarge(n));
    }
    network.check_roles(n)?;
    let roles: Vec<Role> = Role::first(n).collect();
    let hub = roles[n - 1];
    let mut steps = Vec::new();
    let mut sites = Vec::new();
    let mut ebits = Vec::new();

    // forward: role i -> hub aux (2i+1)
    for (i, &r) in roles[..n - 1].iter().enumerate() {
        let (near, far) = (r.aux(1), hub.aux(2 * i + 1));
        ebits.push((near.clone(), far.clone()));
        steps.push(Step::Ebit(near.clone(), far.clone()));
        let site = Site::new(r.label(), near);
        steps.push(Step::Measure(sites.len()));
        steps.push(Step::Correct(standard_table(&site, far)));
        sites.push(site);
    }
    let carrier = |r: Role| if r == hub { hub.label() } else { hub.aux(2 * r.index() + 1) };
    steps.extend(network.gates_on(carrier).into_iter().map(Step::Gate));
    // back: hub aux (2i+1) -> role i aux 2, then swap into the role qubit
    for (i, &r) in roles[..n - 1].iter().enumerate() {
        let (near, far) = (r.aux(2), hub.aux(2 * i + 2));
        ebits.push((near.clone(), far.clone()));
        steps.push(Step::Ebit(near.clone(), far.clone()));
        let site = Site::new(hub.aux(2 * i + 1), far);
        steps.push(Step::Measure(sites.len()));
        steps.push(Step::Correct(standard_table(&site, near.clone())));
        sites.push(site);
        steps.push(Step::Prepare(r.label()));
        steps.push(Step::Gate(Gate::swap(r.label(), near.clone())));
        steps.push(Step::Discard(near));
    }
    let spec = ProtocolSpec {
        id: format!("generic:n={n}:{network}"),
        scheme: Scheme::MeasureInMiddle,
        network: network.clone(),
        arity: n,
        ebits,
        sites,
        deferred: Vec::new(),
        steps,
    };
    let peak = spec.peak_live_qubits();
    if peak > MAX_LIVE_QUBITS {
        return Err(Error::ArityTooLarge(peak));
    }
    Ok(spec)
}

/// Post-measurement two-qubit gate with ebits `A1B1`, `A2B2`.
pub fn build_post_measurement_2q(network: &CnotNetwork) -> Result<ProtocolSpec> {
    network.check_roles(2)?;
    let (a, b) = (Role::A, Role::B);
    let carrier = |r: Role| if r == a { b.aux(1) } else { b.label() };
    let mut steps = vec![
        Step::Ebit(a.aux(1), b.aux(1)),
        Step::Ebit(a.aux(2), b.aux(2)),
    ];
    steps.extend(network.gates_on(carrier).into_iter().map(Step::Gate));
    steps.push(Step::Gate(Gate::swap(a.label(), a.aux(2))));
    let sites = vec![Site::new(b.aux(1), b.aux(2)), Site::new(a.aux(1), a.aux(2))];
    steps.push(Step::Measure(0));
    steps.push(Step::Measure(1));
    steps.push(Step::Correct(standard_table(&sites[0], a.label())));
    let deferred = vec![DeferredSite { site: 1, role: a }];
    let targets = vec![a.label(), b.label()];
    steps.push(Step::Correct(conjugation_table(network, &[(sites[1].clone(), a)], &targets)));
    Ok(ProtocolSpec {
        id: format!("post2q:{network}"),
        scheme: Scheme::PostMeasurement,
        network: network.clone(),
        arity: 2,
        ebits: vec![(a.aux(1), b.aux(1)), (a.aux(2), b.aux(2))],
        sites,
        deferred,
        steps,
    })
}

/// Post-measurement three-qubit gate with ebits `A1B1`, `B2C2`, `A3B3`, `B4C4`.
pub fn build_post_measurement_3q(network: &CnotNetwork) -> Result<ProtocolSpec> {
    network.check_roles(3)?;
    let (a, b, c) = (Role::A, Role::B, Role::C);
    let carrier = |r: Role| match r {
        Role::A => b.aux(1),
        Role::C => b.aux(2),
        _ => b.label(),
    };
    let ebits = vec![
        (a.aux(1), b.aux(1)),
        (b.aux(2), c.aux(2)),
        (a.aux(3), b.aux(3)),
        (b.aux(4), c.aux(4)),
    ];
    let mut steps = vec![Step::Ebit(ebits[0].0.clone(), ebits[0].1.clone()), Step::Ebit(ebits[1].0.clone(), ebits[1].1.clone())];
    steps.extend(network.gates_on(carrier).into_iter().map(Step::Gate));
    steps.push(Step::Ebit(ebits[2].0.clone(), ebits[2].1.clone()));
    steps.push(Step::Ebit(ebits[3].0.clone(), ebits[3].1.clone()));
    steps.push(Step::Gate(Gate::swap(a.label(), a.aux(3))));
    steps.push(Step::Gate(Gate::swap(c.label(), c.aux(4))));
    let sites = vec![
        Site::new(a.aux(1), a.aux(3)),
        Site::new(b.aux(1), b.aux(3)),
        Site::new(b.aux(2), b.aux(4)),
        Site::new(c.aux(2), c.aux(4)),
    ];
    steps.extend((0..4).map(Step::Measure));
    // B1B3 returns role A and B2B4 returns role C after the network
    steps.push(Step::Correct(standard_table(&sites[1], a.label())));
    steps.push(Step::Correct(standard_table(&sites[2], c.label())));
    let deferred = vec![DeferredSite { site: 0, role: a }, DeferredSite { site: 3, role: c }];
    let targets = vec![a.label(), b.label(), c.label()];
    steps.push(Step::Correct(conjugation_table(
        network,
        &[(sites[0].clone(), a), (sites[3].clone(), c)],
        &targets,
    )));
    Ok(ProtocolSpec {
        id: format!("post3q:{network}"),
        scheme: Scheme::PostMeasurement,
        network: network.clone(),
        arity: 3,
        ebits,
        sites,
        deferred,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevec::equal_up_to_global_phase;
    use num_complex::Complex64;

    fn inputs2() -> Vec<Amplitudes> {
        vec![Amplitudes::real(0.6, 0.8), Amplitudes::new(Complex64::new(0.28, 0.0), Complex64::new(0.0, 0.96))]
    }

    #[test]
    fn ebit_counts() {
        assert_eq!(build_post_measurement_2q(&CnotNetwork::single_cnot()).unwrap().ebits().len(), 2);
        assert_eq!(build_post_measurement_3q(&CnotNetwork::u3a()).unwrap().ebits().len(), 4);
        for n in 2..=5 {
            let spec = build_generic_nonlocal(n, &CnotNetwork::ladder(n)).unwrap();
            assert_eq!(spec.ebits().len(), 2 * (n - 1));
        }
    }

    #[test]
    fn generic_two_matches_fig1_builder() {
        let net = CnotNetwork::two_cnot();
        let mid = build_measure_in_middle(&net).unwrap();
        let gen = build_generic_nonlocal(2, &net).unwrap();
        assert_eq!(mid.steps(), gen.steps());
        assert_eq!(mid.sites(), gen.sites());
        assert_eq!(mid.ebits(), gen.ebits());
    }

    #[test]
    fn bad_roles_rejected() {
        assert!(matches!(build_post_measurement_2q(&CnotNetwork::u3a()), Err(Error::BadRole(_))));
        assert!(matches!(build_measure_in_middle(&CnotNetwork::u3a()), Err(Error::BadRole(_))));
        assert!(matches!(build_generic_nonlocal(1, &CnotNetwork::empty()), Err(Error::BadRole(_))));
        assert!(matches!(build_generic_nonlocal(30, &CnotNetwork::empty()), Err(Error::ArityTooLarge(_))));
        assert!(matches!(build_generic_nonlocal(20, &CnotNetwork::ladder(20)), Err(Error::ArityTooLarge(_))));
    }

    #[test]
    fn trivial_branch_fires_nothing() {
        let spec = build_measure_in_middle(&CnotNetwork::two_cnot()).unwrap();
        let run = run_protocol(&spec, &inputs2(), &BranchChoice::Fixed(BranchAssignment::trivial(&spec))).unwrap();
        assert!(run.corrections.is_empty());
    }

    #[test]
    fn one_cnot_trivial_branch() {
        let spec = build_post_measurement_2q(&CnotNetwork::single_cnot()).unwrap();
        let run = run_protocol(&spec, &inputs2(), &BranchChoice::Fixed(BranchAssignment::trivial(&spec))).unwrap();
        assert!((run.probability - 1.0 / 16.0).abs() < 1e-12);
        let direct = spec.apply_direct(&product_input(&spec, &inputs2()).unwrap()).unwrap();
        assert!(equal_up_to_global_phase(&run.state, &direct, 1e-10).unwrap());
        assert!(run.corrections.is_empty());
    }

    #[test]
    fn sampling_deterministic() {
        let spec = build_post_measurement_3q(&CnotNetwork::u3a()).unwrap();
        let inputs = vec![Amplitudes::real(0.6, 0.8); 3];
        let a = run_protocol(&spec, &inputs, &BranchChoice::Sample(9)).unwrap();
        let b = run_protocol(&spec, &inputs, &BranchChoice::Sample(9)).unwrap();
        assert_eq!(a.branch, b.branch);
        assert_eq!(a.state, b.state);
    }

    #[test]
    fn relabel_flag_agrees_with_swap_gate() {
        let spec = build_post_measurement_3q(&CnotNetwork::u3b()).unwrap();
        let input = product_input(&spec, &[Amplitudes::real(0.6, 0.8), Amplitudes::plus(), Amplitudes::real(0.28, 0.96)]).unwrap();
        for k in [0, 37, 255] {
            let b = BranchChoice::Fixed(BranchAssignment::nth(&spec, k));
            let slow = run_protocol_on(&spec, &input, &b, RunOptions::default()).unwrap();
            let fast = run_protocol_on(&spec, &input, &b, RunOptions { relabel_swaps: true }).unwrap();
            assert!(equal_up_to_global_phase(&slow.state, &fast.state, 1e-12).unwrap());
        }
    }

    #[test]
    fn input_shape_errors() {
        let spec = build_post_measurement_2q(&CnotNetwork::single_cnot()).unwrap();
        let err = run_protocol(&spec, &inputs2()[..1], &BranchChoice::Sample(1)).unwrap_err();
        assert!(matches!(err, Error::LabelMismatch(_)));
        let wrong = StateVector::product([("A", Amplitudes::ket0()), ("Q", Amplitudes::ket0())]).unwrap();
        let err = run_protocol_on(&spec, &wrong, &BranchChoice::Sample(1), RunOptions::default()).unwrap_err();
        assert!(matches!(err, Error::LabelMismatch(_)));
        assert!(BranchAssignment::parse(&spec, "phi+").is_err());
        assert!(BranchAssignment::parse(&spec, "phi+,bogus").is_err());
    }

    #[test]
    fn post_measurement_ordering_enforced() {
        let spec = build_post_measurement_2q(&CnotNetwork::single_cnot()).unwrap();
        let mut broken = spec.clone();
        broken.steps.push(Step::Gate(Gate::x("A")));
        assert!(matches!(broken.validate(), Err(Error::MalformedSpec(_))));
        spec.validate().unwrap();
    }

    #[test]
    fn corrections_stay_on_logical_qubits() {
        let spec = build_post_measurement_3q(&CnotNetwork::u3a()).unwrap();
        let roles = spec.roles();
        for t in spec.correction_tables() {
            for (_, e) in t.iter() {
                assert!(e.support().all(|l| roles.contains(l)));
            }
        }
    }

    #[test]
    fn live_qubit_budget() {
        assert_eq!(build_post_measurement_3q(&CnotNetwork::u3a()).unwrap().peak_live_qubits(), 11);
        assert_eq!(build_post_measurement_2q(&CnotNetwork::swap()).unwrap().peak_live_qubits(), 6);
    }
}

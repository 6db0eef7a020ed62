//! Exhaustive branch sweeps against direct application of the target gate.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::CnotNetwork;
use crate::pauli::{Pauli, PauliOp};
use crate::protocols::{BranchAssignment, BranchChoice, ProtocolSpec, RunOptions};
use crate::statevec::{infidelity, Amplitudes, Gate, StateVector};
use crate::synth::{self, CorrectionTable, TableDiff};

pub const DEFAULT_TOL: f64 = 1e-10;

/// Branch enumeration is capped at 4^6 assignments.
pub const MAX_SITES: usize = 6;

/// Every outcome assignment with its probability, in mixed-radix order.
///
/// Bell statistics of these protocols do not depend on the input, so the
/// probabilities are computed on a fixed reference input.
pub fn enumerate_branches(spec: &ProtocolSpec) -> Result<Vec<(BranchAssignment, f64)>> {
    let m = spec.sites().len();
    if m > MAX_SITES {
        return Err(Error::TooManySites(m));
    }
    let input = StateVector::product(spec.roles().into_iter().zip(synth::oracle_inputs(spec.arity(), 0).remove(0)))?;
    let prepared = spec.prepare(&input, RunOptions::default())?;
    (0..1usize << (2 * m))
        .map(|k| {
            let branch = BranchAssignment::nth(spec, k);
            match spec.run_prepared(&prepared, &BranchChoice::Fixed(branch.clone()), RunOptions::default()) {
                Ok(run) => Ok((branch, run.probability)),
                Err(Error::ImpossibleBranch(_)) => Ok((branch, 0.0)),
                Err(e) => Err(e),
            }
        })
        .collect()
}

/// `|0>`, `|1>`, `|+>`, `|->` on every qubit: all combinations when there are
/// at most 64 of them, otherwise the four uniform products.
pub fn edge_inputs(arity: usize) -> Vec<Vec<Amplitudes>> {
    let basis = [Amplitudes::ket0(), Amplitudes::ket1(), Amplitudes::plus(), Amplitudes::minus()];
    if arity <= 3 {
        (0..1usize << (2 * arity))
            .map(|k| (0..arity).map(|j| basis[k >> (2 * (arity - 1 - j)) & 3]).collect())
            .collect()
    } else {
        basis.iter().map(|&b| vec![b; arity]).collect()
    }
}

pub fn random_product_inputs(arity: usize, count: usize, seed: u64) -> Vec<Vec<Amplitudes>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..arity).map(|_| Amplitudes::random_bloch(&mut rng)).collect())
        .collect()
}

/// Random product state pushed through a short random H/CNOT circuit.
pub fn random_entangled_input(spec: &ProtocolSpec, rng: &mut ChaCha8Rng) -> Result<StateVector> {
    let roles = spec.roles();
    let inputs: Vec<Amplitudes> = (0..roles.len()).map(|_| Amplitudes::random_bloch(rng)).collect();
    let mut state = StateVector::product(roles.iter().cloned().zip(inputs))?;
    if roles.len() >= 2 {
        let net = CnotNetwork::random(rng, roles.len(), roles.len() + 1);
        for (i, g) in net.gates_on_roles().iter().enumerate() {
            state.apply_gate(&Gate::h(roles[i % roles.len()].clone()))?;
            state.apply_gate(g)?;
        }
    }
    Ok(state)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub branch: String,
    /// Index into the report's input list (edge cases first, then random).
    pub input: usize,
    pub infidelity: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableReport {
    pub name: String,
    pub diff: TableDiff,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub spec: String,
    pub branches: usize,
    pub states: usize,
    pub tolerance: f64,
    pub max_infidelity: f64,
    pub failures: Vec<Failure>,
    pub tables: Vec<TableReport>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Distinct branches with at least one failure, in branch order.
    pub fn failing_branches(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for f in &self.failures {
            if out.last() != Some(&f.branch) {
                out.push(f.branch.clone());
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "spec: {}", self.spec);
        let _ = writeln!(out, "branches checked: {}", self.branches);
        let _ = writeln!(out, "states per branch: {}", self.states);
        let _ = writeln!(out, "tolerance: {:e}", self.tolerance);
        let _ = writeln!(out, "max infidelity: {:e}", self.max_infidelity);
        let _ = writeln!(out, "failures: {}", self.failures.len());
        let branches = self.failing_branches();
        if !branches.is_empty() {
            let _ = writeln!(out, "failing branches: {}", branches.join(" "));
        }
        for t in &self.tables {
            let _ = write!(out, "table {} vs printed: {}", t.name, t.diff.render_text());
        }
        let _ = writeln!(out, "{}", if self.passed() { "PASS" } else { "FAIL" });
        out
    }
}

/// Checks every branch of `spec` on the edge-case inputs plus `n_states`
/// random product inputs drawn from `seed`.
pub fn verify_protocol(spec: &ProtocolSpec, n_states: usize, tol: f64, seed: u64) -> Result<VerificationReport> {
    if n_states == 0 {
        return Err(Error::InvalidArgument("n_states must be at least 1".into()));
    }
    let roles = spec.roles();
    let mut inputs = edge_inputs(spec.arity());
    inputs.extend(random_product_inputs(spec.arity(), n_states, seed));
    let states = inputs
        .into_iter()
        .map(|amps| StateVector::product(roles.iter().cloned().zip(amps)))
        .collect::<Result<Vec<_>>>()?;
    let mut report = verify_on_states(spec, &states, tol)?;
    report.tables = table_reports(spec)?;
    Ok(report)
}

/// Sweep over caller-supplied logical states (entangled inputs allowed).
pub fn verify_on_states(spec: &ProtocolSpec, states: &[StateVector], tol: f64) -> Result<VerificationReport> {
    let m = spec.sites().len();
    if m > MAX_SITES {
        return Err(Error::TooManySites(m));
    }
    let branches: Vec<BranchAssignment> = (0..1usize << (2 * m)).map(|k| BranchAssignment::nth(spec, k)).collect();
    // [input][branch] -> (infidelity, error)
    let results: Vec<Vec<(f64, Option<String>)>> = states
        .par_iter()
        .map(|input| {
            let setup = spec
                .prepare(input, RunOptions::default())
                .and_then(|p| spec.apply_direct(input).map(|d| (p, d)));
            let (prepared, direct) = match setup {
                Ok(x) => x,
                Err(e) => return vec![(1.0, Some(e.to_string())); branches.len()],
            };
            branches
                .iter()
                .map(|b| {
                    match spec
                        .run_prepared(&prepared, &BranchChoice::Fixed(b.clone()), RunOptions::default())
                        .and_then(|run| infidelity(&direct, &run.state))
                    {
                        Ok(x) => (x, None),
                        Err(e) => (1.0, Some(e.to_string())),
                    }
                })
                .collect()
        })
        .collect();
    let mut max_infidelity: f64 = 0.0;
    let mut failures = Vec::new();
    for (bi, b) in branches.iter().enumerate() {
        for (ii, per_input) in results.iter().enumerate() {
            let (x, err) = &per_input[bi];
            max_infidelity = max_infidelity.max(*x);
            if *x > tol || err.is_some() {
                failures.push(Failure { branch: b.to_string(), input: ii, infidelity: *x, error: err.clone() });
            }
        }
    }
    Ok(VerificationReport {
        spec: spec.id().to_owned(),
        branches: branches.len(),
        states: states.len(),
        tolerance: tol,
        max_infidelity,
        failures,
        tables: Vec::new(),
    })
}

fn table_reports(spec: &ProtocolSpec) -> Result<Vec<TableReport>> {
    let (Some(name), Some(installed)) = (synth::printed_table_name(spec), spec.deferred_table()) else {
        return Ok(Vec::new());
    };
    let printed = synth::printed_table_for(spec).expect("name resolves");
    let mut diff = synth::diff_tables(installed, &printed)?;
    if !diff.is_clean() {
        diff.annotate_with_oracle(&synth::synthesize_by_oracle(spec)?);
    }
    Ok(vec![TableReport { name: name.to_owned(), diff }])
}

/// A deferred table with a single entry replaced.
pub fn corrupt_entry(table: &CorrectionTable, key: &[crate::statevec::BellOutcome]) -> CorrectionTable {
    let mut bad = table.clone();
    let current = table.get(key);
    let replacement = if current.is_trivial() {
        PauliOp::single(table.targets()[0].clone(), Pauli::X)
    } else {
        PauliOp::identity()
    };
    bad.set(key, replacement);
    bad
}

#[derive(Clone, Debug, PartialEq)]
pub struct FaultResult {
    pub outcomes: String,
    pub failing_branches: Vec<String>,
}

/// Corrupts each entry of the deferred table in turn and re-verifies.
pub fn fault_sensitivity(spec: &ProtocolSpec, n_states: usize, tol: f64, seed: u64) -> Result<Vec<FaultResult>> {
    let table = spec
        .deferred_table()
        .ok_or_else(|| Error::UnsupportedSpec(format!("{} has no deferred table", spec.id())))?
        .clone();
    table
        .keys()
        .map(|key| {
            let faulty = spec.install_table(corrupt_entry(&table, &key))?;
            let report = verify_protocol(&faulty, n_states, tol, seed)?;
            Ok(FaultResult {
                outcomes: key.iter().map(|o| o.token()).collect::<Vec<_>>().join(","),
                failing_branches: report.failing_branches(),
            })
        })
        .collect()
}

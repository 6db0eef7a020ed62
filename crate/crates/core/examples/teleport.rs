//! Teleports a random qubit from A to B1 and applies the Pauli fix-up for
//! each of the four Bell outcomes.

use nonlocal_gates::pauli::standard_correction;
use nonlocal_gates::statevec::{infidelity, Amplitudes, BellOutcome, StateVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> nonlocal_gates::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let psi = Amplitudes::random_bloch(&mut rng);
    println!("input on A: {:.4} |0> + {:.4} |1>", psi.zero, psi.one);

    let mut state = StateVector::product([("A", psi)])?;
    state.append_ebit("A1".into(), "B1".into())?;
    let target = StateVector::product([("B1", psi)])?;

    for outcome in BellOutcome::ALL {
        let proj = state.bell_project(&"A".into(), &"A1".into(), outcome)?;
        let mut b1 = proj.state.expect("every outcome is possible");
        let fix = standard_correction(outcome, "B1");
        b1.apply_pauli(&fix)?;
        println!(
            "{:>4}  p = {:.3}  correction {:<6} infidelity {:.1e}",
            outcome.symbol(),
            proj.probability,
            fix.compact(),
            infidelity(&target, &b1)?
        );
    }
    Ok(())
}

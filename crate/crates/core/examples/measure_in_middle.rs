//! Two-CNOT nonlocal gate with mid-circuit Bell measurements. Every branch
//! should land on CNOT_BA CNOT_AB applied to the inputs.

use nonlocal_gates::network::CnotNetwork;
use nonlocal_gates::protocols::{build_measure_in_middle, product_input, BranchAssignment, BranchChoice, RunOptions};
use nonlocal_gates::statevec::{infidelity, Amplitudes};

fn main() -> nonlocal_gates::Result<()> {
    let spec = build_measure_in_middle(&CnotNetwork::two_cnot())?;
    print!("{}", spec.trace());

    let input = product_input(&spec, &[Amplitudes::real(0.6, 0.8), Amplitudes::real(0.28, 0.96)])?;
    let direct = spec.apply_direct(&input)?;
    let prepared = spec.prepare(&input, RunOptions::default())?;
    println!("\n{} branches:", 1 << (2 * spec.sites().len()));
    for k in 0..1 << (2 * spec.sites().len()) {
        let branch = BranchAssignment::nth(&spec, k);
        let run = spec.run_prepared(&prepared, &BranchChoice::Fixed(branch), RunOptions::default())?;
        println!("  {:<10} p = {:.4}  infidelity {:.1e}", run.branch, run.probability, infidelity(&direct, &run.state)?);
    }
    Ok(())
}

//! Corrupts each entry of a deferred correction table in turn and shows
//! which branches the harness flags.

use nonlocal_gates::network::CnotNetwork;
use nonlocal_gates::protocols::build_post_measurement_2q;
use nonlocal_gates::verify;

fn main() -> nonlocal_gates::Result<()> {
    let spec = build_post_measurement_2q(&CnotNetwork::two_cnot())?;
    for r in verify::fault_sensitivity(&spec, 5, verify::DEFAULT_TOL, 42)? {
        println!("corrupt {:<5} -> {} failing: {}", r.outcomes, r.failing_branches.len(), r.failing_branches.join(" "));
    }
    Ok(())
}

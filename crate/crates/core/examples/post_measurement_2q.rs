//! Post-measurement nonlocal gates for one, two and three CNOTs: prints the
//! deferred correction rule and checks it against the textbook rules.

use nonlocal_gates::network::CnotNetwork;
use nonlocal_gates::protocols::build_post_measurement_2q;
use nonlocal_gates::synth;
use nonlocal_gates::verify;

fn main() -> nonlocal_gates::Result<()> {
    for (name, net) in [
        ("post2q:cnot-ab", CnotNetwork::single_cnot()),
        ("post2q:two-cnot", CnotNetwork::two_cnot()),
        ("post2q:swap", CnotNetwork::swap()),
    ] {
        let spec = build_post_measurement_2q(&net)?.with_id(name);
        let table = synth::synthesize_by_conjugation(&spec)?;
        println!("== {name} (network {net})");
        print!("{}", table.render_text());
        let report = verify::verify_protocol(&spec, 20, verify::DEFAULT_TOL, 1)?;
        println!("verified {} branches x {} inputs: {}\n", report.branches, report.states, if report.passed() { "ok" } else { "FAILED" });
    }
    Ok(())
}

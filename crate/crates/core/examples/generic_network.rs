//! Measure-in-the-middle scheme for an arbitrary CNOT network on n parties.
//!
//! Usage: cargo run --example generic_network -- [n] [network]
//! e.g. `-- 4 AB,BC,CD,DA`

use nonlocal_gates::network::CnotNetwork;
use nonlocal_gates::protocols::build_generic_nonlocal;
use nonlocal_gates::verify;

fn main() -> nonlocal_gates::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map(|s| s.parse().expect("n must be an integer")).unwrap_or(3);
    let net = match args.next() {
        Some(s) => s.parse()?,
        None => CnotNetwork::ladder(n),
    };
    let spec = build_generic_nonlocal(n, &net)?;
    println!(
        "n = {n}, network {net}: {} ebits, {} Bell measurements, peak {} live qubits",
        spec.ebits().len(),
        spec.sites().len(),
        spec.peak_live_qubits()
    );
    match verify::verify_protocol(&spec, 10, verify::DEFAULT_TOL, 42) {
        Ok(report) => print!("{}", report.render_text()),
        Err(e) => println!("not verified exhaustively: {e}"),
    }
    Ok(())
}

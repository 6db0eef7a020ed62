//! Full verification sweep with the JSON report printed to stdout.

use nonlocal_gates::network::CnotNetwork;
use nonlocal_gates::protocols::build_post_measurement_3q;
use nonlocal_gates::verify;

fn main() -> nonlocal_gates::Result<()> {
    let spec = build_post_measurement_3q(&CnotNetwork::u3a())?.with_id("post3q:u3a");
    let report = verify::verify_protocol(&spec, 20, verify::DEFAULT_TOL, 42)?;
    println!("{}", report.to_json());
    eprint!("{}", report.render_text());
    Ok(())
}

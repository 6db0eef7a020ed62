//! Synthesizes the 16-entry correction tables for both three-qubit networks,
//! compares them with the printed tables and scores the site-label readings.

use nonlocal_gates::network::CnotNetwork;
use nonlocal_gates::protocols::build_post_measurement_3q;
use nonlocal_gates::synth;

fn main() -> nonlocal_gates::Result<()> {
    for (name, net) in [("post3q:u3a", CnotNetwork::u3a()), ("post3q:u3b", CnotNetwork::u3b())] {
        let spec = build_post_measurement_3q(&net)?.with_id(name);
        let conj = synth::synthesize_by_conjugation(&spec)?;
        let oracle = synth::synthesize_by_oracle(&spec)?;
        println!("== {name}: network {net}");
        print!("{}", conj.render_text());
        println!("conjugation vs oracle: {}", synth::diff_tables(&conj, &oracle)?.render_text().trim_end());

        let printed = synth::printed_table_for(&spec).expect("printed table");
        let mut diff = synth::diff_tables(&conj, &printed)?;
        diff.annotate_with_oracle(&oracle);
        print!("vs printed: {}", diff.render_text());
        for v in synth::adjudicate_readings(&spec, &printed, &synth::three_qubit_site_readings(), 42)? {
            println!("  {:>3}/{} {}", v.consistent_branches, v.total_branches, v.reading);
        }
        println!();
    }
    Ok(())
}

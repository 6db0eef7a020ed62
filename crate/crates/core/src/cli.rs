//! `nlgate` command-line front end.
//!
//! ```text
//! nlgate simulate   <SPEC> [--branch phi+,psi-] [--seed N] [--json]
//! nlgate verify     <SPEC> [--states N] [--seed N] [--tol X] [--json]
//! nlgate table      <SPEC> [--method conjugation|oracle] [--text]
//! nlgate diff-paper <SPEC> [--json]
//! nlgate branches   <SPEC> [--json]
//! ```
//!
//! `SPEC` is a named protocol (`post2q:cnot-ab`, `post2q:two-cnot`,
//! `post2q:swap`, `post3q:u3a`, `post3q:u3b`, `mid2q`, `generic:n=K`), a
//! scheme with an explicit network (`post3q:AB,BC,CA`, `generic:n=4:AB,CD`),
//! or the path of a circuit file.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::error::{Error, Result};
use crate::network::{CnotNetwork, Role};
use crate::protocols::{
    build_generic_nonlocal, build_measure_in_middle, build_post_measurement_2q, build_post_measurement_3q,
    product_input, run_protocol_on, BranchAssignment, BranchChoice, ProtocolSpec, RunOptions,
};
use crate::statevec::{infidelity, Amplitudes};
use crate::synth;
use crate::verify;

#[derive(Parser, Debug)]
#[command(name = "nlgate", about = "Simulate and verify teleportation-based nonlocal CNOT gates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug, Clone)]
struct Common {
    /// Protocol selector or circuit file path
    spec: String,
    /// Random input states per branch
    #[arg(long, default_value_t = 100)]
    states: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Infidelity tolerance
    #[arg(long, default_value_t = verify::DEFAULT_TOL)]
    tol: f64,
    /// Comma-separated Bell outcomes in site order (default: sampled)
    #[arg(long)]
    branch: Option<String>,
    #[arg(long, conflicts_with = "text")]
    json: bool,
    #[arg(long)]
    text: bool,
    /// Write output to a file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Method {
    Conjugation,
    Oracle,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one branch and print the final state and the corrections that fired
    Simulate(Common),
    /// Sweep every branch against the direct gate
    Verify(Common),
    /// Print the synthesized deferred-correction table
    Table {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Method::Conjugation)]
        method: Method,
    },
    /// Compare the synthesized table with the printed one
    DiffPaper(Common),
    /// List every outcome assignment with its probability
    Branches(Common),
}

#[derive(Copy, Clone, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

impl Common {
    fn format(&self, default: Format) -> Format {
        if self.json {
            Format::Json
        } else if self.text {
            Format::Text
        } else {
            default
        }
    }
}

/// Resolves a protocol selector (see module docs) or circuit file path.
pub fn resolve_spec(selector: &str) -> Result<ProtocolSpec> {
    let path = std::path::Path::new(selector);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{selector}: {e}")))?;
        return parse_circuit_file(&text).map(|s| s.with_id(selector));
    }
    let (scheme, rest) = selector.split_once(':').unwrap_or((selector, ""));
    let spec = match scheme {
        "mid2q" => {
            let net = if rest.is_empty() { CnotNetwork::two_cnot() } else { rest.parse()? };
            build_measure_in_middle(&net)?
        }
        "post2q" => {
            let net = match rest {
                "cnot-ab" => CnotNetwork::single_cnot(),
                "two-cnot" => CnotNetwork::two_cnot(),
                "swap" => CnotNetwork::swap(),
                "" => return Err(Error::Parse("post2q needs a network, e.g. post2q:cnot-ab".into())),
                other => other.parse()?,
            };
            build_post_measurement_2q(&net)?
        }
        "post3q" => {
            let net = match rest {
                "u3a" => CnotNetwork::u3a(),
                "u3b" => CnotNetwork::u3b(),
                "" => return Err(Error::Parse("post3q needs a network, e.g. post3q:u3a".into())),
                other => other.parse()?,
            };
            build_post_measurement_3q(&net)?
        }
        "generic" => {
            let (n, net) = rest.split_once(':').unwrap_or((rest, ""));
            let n: usize = n
                .strip_prefix("n=")
                .and_then(|k| k.parse().ok())
                .ok_or_else(|| Error::Parse(format!("expected generic:n=K, got {selector:?}")))?;
            let net = if net.is_empty() { CnotNetwork::ladder(n) } else { net.parse()? };
            build_generic_nonlocal(n, &net)?
        }
        _ => return Err(Error::Parse(format!("unknown protocol selector {selector:?}"))),
    };
    Ok(spec.with_id(selector))
}

/// Circuit files: `scheme <post2q|post3q|mid2q|generic>`, optional
/// `roles <n>` for the generic scheme, then one `cnot <control> <target>`
/// per line in application order. `#` starts a comment.
pub fn parse_circuit_file(text: &str) -> Result<ProtocolSpec> {
    let mut scheme = None;
    let mut roles = None;
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        let bad = || Error::Parse(format!("line {}: {raw:?}", lineno + 1));
        match words[..] {
            ["scheme", s] => scheme = Some(s.to_owned()),
            ["roles", n] => roles = Some(n.parse::<usize>().map_err(|_| bad())?),
            ["cnot", c, t] | ["CNOT", c, t] => {
                let role = |s: &str| {
                    let mut chars = s.chars();
                    match (chars.next(), chars.next()) {
                        (Some(ch), None) => Role::try_from(ch),
                        _ => Err(bad()),
                    }
                };
                pairs.push((role(c)?, role(t)?));
            }
            _ => return Err(bad()),
        }
    }
    let net = CnotNetwork::new(pairs)?;
    match scheme.as_deref() {
        Some("post2q") => build_post_measurement_2q(&net),
        Some("post3q") => build_post_measurement_3q(&net),
        Some("mid2q") => build_measure_in_middle(&net),
        Some("generic") => build_generic_nonlocal(roles.unwrap_or(net.min_arity().max(2)), &net),
        Some(other) => Err(Error::Parse(format!("unknown scheme {other:?}"))),
        None => Err(Error::Parse("circuit file has no scheme line".into())),
    }
}

/// Entry point shared by the binary and the tests. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = stdout.write_all(rendered.as_bytes());
            } else {
                let _ = stderr.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    let common = match &cli.command {
        Command::Simulate(c) | Command::Verify(c) | Command::DiffPaper(c) | Command::Branches(c) => c.clone(),
        Command::Table { common, .. } => common.clone(),
    };
    let spec = match resolve_spec(&common.spec) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return 2;
        }
    };
    let result = match &cli.command {
        Command::Simulate(c) => simulate(&spec, c),
        Command::Verify(c) => verify_cmd(&spec, c),
        Command::Table { common, method } => table_cmd(&spec, common, *method),
        Command::DiffPaper(c) => diff_paper(&spec, c),
        Command::Branches(c) => branches(&spec, c),
    };
    match result {
        Ok((body, code)) => {
            if let Some(path) = &common.out {
                if let Err(e) = std::fs::write(path, &body) {
                    let _ = writeln!(stderr, "error: cannot write {}: {e}", path.display());
                    return 1;
                }
            } else {
                let _ = stdout.write_all(body.as_bytes());
            }
            code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            match e {
                Error::Parse(_) | Error::BranchMismatch(_) | Error::InvalidArgument(_) | Error::UnsupportedSpec(_) => 2,
                _ => 1,
            }
        }
    }
}

type CmdOutput = Result<(String, i32)>;

fn fmt_c(z: num_complex::Complex64) -> String {
    format!("{:+.12}{:+.12}i", z.re, z.im)
}

fn simulate(spec: &ProtocolSpec, c: &Common) -> CmdOutput {
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let inputs: Vec<Amplitudes> = (0..spec.arity()).map(|_| Amplitudes::random_bloch(&mut rng)).collect();
    let input = product_input(spec, &inputs)?;
    let choice = match &c.branch {
        Some(b) => BranchChoice::Fixed(BranchAssignment::parse(spec, b)?),
        None => BranchChoice::Sample(c.seed),
    };
    let run = run_protocol_on(spec, &input, &choice, RunOptions::default())?;
    let direct = spec.apply_direct(&input)?;
    let infid = infidelity(&direct, &run.state)?;
    let n = run.state.num_qubits();
    let labels: Vec<&str> = run.state.labels().iter().map(|l| l.as_str()).collect();
    let body = match c.format(Format::Text) {
        Format::Json => {
            let v = json!({
                "spec": spec.id(),
                "inputs": inputs.iter().map(|a| [fmt_c(a.zero), fmt_c(a.one)]).collect::<Vec<_>>(),
                "branch": run.branch.to_string(),
                "probability": run.probability,
                "corrections": run.corrections.iter().map(|p| p.compact()).collect::<Vec<_>>(),
                "labels": labels,
                "state": run.state.amplitudes().iter().map(|&z| fmt_c(z)).collect::<Vec<_>>(),
                "infidelity": infid,
            });
            serde_json::to_string_pretty(&v).expect("json") + "\n"
        }
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "spec: {}", spec.id());
            let _ = writeln!(out, "circuit:");
            for line in spec.trace().lines().skip(1) {
                let _ = writeln!(out, "  {line}");
            }
            for (label, a) in labels.iter().zip(&inputs) {
                let _ = writeln!(out, "input {label}: {} |0> {} |1>", fmt_c(a.zero), fmt_c(a.one));
            }
            let _ = writeln!(out, "branch: {} (probability {})", run.branch, run.probability);
            let fired: Vec<String> = run.corrections.iter().map(|p| p.compact()).collect();
            let _ = writeln!(out, "corrections: {}", if fired.is_empty() { "none".into() } else { fired.join(" ; ") });
            let _ = writeln!(out, "final state ({}):", labels.join(","));
            for (k, z) in run.state.amplitudes().iter().enumerate() {
                let _ = writeln!(out, "  |{:0width$b}> {}", k, fmt_c(*z), width = n);
            }
            let _ = writeln!(out, "infidelity vs direct gate: {infid:e}");
            out
        }
    };
    Ok((body, 0))
}

fn verify_cmd(spec: &ProtocolSpec, c: &Common) -> CmdOutput {
    let report = verify::verify_protocol(spec, c.states, c.tol, c.seed)?;
    let code = if report.passed() { 0 } else { 1 };
    let body = match c.format(Format::Text) {
        Format::Json => report.to_json() + "\n",
        Format::Text => report.render_text(),
    };
    Ok((body, code))
}

fn table_cmd(spec: &ProtocolSpec, c: &Common, method: Method) -> CmdOutput {
    let table = match method {
        Method::Conjugation => synth::synthesize_by_conjugation(spec)?,
        Method::Oracle => synth::synthesize_by_oracle_with_seed(spec, c.seed)?,
    };
    let body = match c.format(Format::Json) {
        Format::Json => table.to_json() + "\n",
        Format::Text => table.render_text(),
    };
    Ok((body, 0))
}

fn diff_paper(spec: &ProtocolSpec, c: &Common) -> CmdOutput {
    let name = synth::printed_table_name(spec)
        .ok_or_else(|| Error::UnsupportedSpec(format!("no printed table for {}", spec.id())))?;
    let printed = synth::printed_table_for(spec).expect("name resolves");
    let conj = synth::synthesize_by_conjugation(spec)?;
    let oracle = synth::synthesize_by_oracle_with_seed(spec, c.seed)?;
    let methods_agree = synth::diff_tables(&conj, &oracle)?.is_clean();
    let mut diff = synth::diff_tables(&conj, &printed)?;
    diff.annotate_with_oracle(&oracle);
    let readings = if spec.arity() == 3 {
        synth::adjudicate_readings(spec, &printed, &synth::three_qubit_site_readings(), c.seed)?
    } else {
        Vec::new()
    };
    let code = if methods_agree && diff.mismatches_oracle_backed() { 0 } else { 1 };
    let body = match c.format(Format::Text) {
        Format::Json => {
            let v = json!({
                "spec": spec.id(),
                "table": name,
                "methods_agree": methods_agree,
                "diff": diff,
                "readings": readings,
            });
            serde_json::to_string_pretty(&v).expect("json") + "\n"
        }
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "spec: {}", spec.id());
            let _ = writeln!(out, "printed table: {name}");
            let _ = writeln!(out, "conjugation vs oracle: {}", if methods_agree { "agree" } else { "DISAGREE" });
            let _ = write!(out, "synthesized vs printed: {}", diff.render_text());
            for r in &readings {
                let _ = writeln!(
                    out,
                    "reading [{}]: {}/{} branches consistent with oracle",
                    r.reading, r.consistent_branches, r.total_branches
                );
            }
            out
        }
    };
    Ok((body, code))
}

fn branches(spec: &ProtocolSpec, c: &Common) -> CmdOutput {
    let list = verify::enumerate_branches(spec)?;
    let body = match c.format(Format::Text) {
        Format::Json => {
            let sites: Vec<String> = spec.sites().iter().map(|s| s.to_string()).collect();
            let v = json!({
                "spec": spec.id(),
                "sites": sites,
                "branches": list.iter().map(|(b, p)| json!({"outcomes": b.to_string(), "probability": p})).collect::<Vec<_>>(),
            });
            serde_json::to_string_pretty(&v).expect("json") + "\n"
        }
        Format::Text => {
            let mut out = String::new();
            for (b, p) in &list {
                let _ = writeln!(out, "{b} {p}");
            }
            out
        }
    };
    Ok((body, 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selectors_resolve() {
        for s in ["post2q:cnot-ab", "post2q:two-cnot", "post2q:swap", "post3q:u3a", "post3q:u3b", "mid2q", "generic:n=3", "post3q:AB,CA"] {
            assert_eq!(resolve_spec(s).unwrap().id(), s);
        }
        assert_eq!(resolve_spec("generic:n=3").unwrap().network(), &CnotNetwork::u3a());
        assert!(resolve_spec("post4q:x").is_err());
        assert!(resolve_spec("post2q:AC").is_err());
        assert!(resolve_spec("generic:k=3").is_err());
    }

    #[test]
    fn circuit_file_parsing() {
        let spec = parse_circuit_file("# U3a\nscheme post3q\ncnot A B\ncnot B C\ncnot C A\n").unwrap();
        assert_eq!(spec.network(), &CnotNetwork::u3a());
        assert!(parse_circuit_file("cnot A B").is_err());
        assert!(parse_circuit_file("scheme post2q\ncnot A\n").is_err());
        let g = parse_circuit_file("scheme generic\nroles 3\ncnot A B\n").unwrap();
        assert_eq!(g.arity(), 3);
    }
}

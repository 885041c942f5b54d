//! The subcommands, as functions returning an exit code, a JSON report and
//! human-readable text.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use af2m_core::lattice::{
    all_lattices, check_conventional_principles, check_mendler_principles, is_monotone, random_lattice,
    random_monotone_operator, random_operator, FiniteLattice, Operator, Outcome, Principle,
};
use af2m_core::reduction::{normalize, DEFAULT_FUEL, DEFAULT_SN_FUEL};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::corpus;
use crate::driver::{check_source, CheckedFile};
use crate::parser::parse_proof_term;
use crate::report::{trace, FileReport, SnReport, SCHEMA};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Clone, Debug)]
pub struct CommandOutcome {
    pub code: i32,
    pub json: Value,
    pub text: String,
}

fn outcome(code: i32, command: &str, body: Value, text: String) -> CommandOutcome {
    let mut json = json!({ "schema": SCHEMA, "command": command, "exit": code });
    if let (Value::Object(m), Value::Object(b)) = (&mut json, body) {
        m.extend(b);
    }
    CommandOutcome { code, json, text }
}

fn usage(command: &str, message: String) -> CommandOutcome {
    outcome(EXIT_USAGE, command, json!({ "error": message }), message)
}

/// Checks sources in parallel; results keep the input order.
pub fn check_sources(sources: &[(String, String)], fuel: Option<usize>) -> Vec<CheckedFile> {
    std::thread::scope(|s| {
        let handles: Vec<_> = sources.iter().map(|(_, src)| s.spawn(move || check_source(src, fuel))).collect();
        handles.into_iter().map(|h| h.join().expect("checker thread panicked")).collect()
    })
}

fn files_outcome(command: &str, sources: &[(String, String)], fuel: Option<usize>, with_sn: bool) -> CommandOutcome {
    let checked = check_sources(sources, fuel);
    let reports: Vec<FileReport> =
        sources.iter().zip(&checked).map(|((n, _), f)| FileReport::new(n, f, with_sn)).collect();
    let mut coverage: BTreeMap<String, usize> =
        af2m_core::Rule::ALL.iter().map(|r| (r.name().to_string(), 0)).collect();
    for r in &reports {
        for (k, v) in &r.coverage {
            *coverage.entry(k.clone()).or_insert(0) += v;
        }
    }
    let parse_failed = reports.iter().any(|r| !r.diagnostics.is_empty());
    let failed = reports.iter().filter(|r| !r.passed).count();
    let code = if parse_failed {
        EXIT_USAGE
    } else if failed > 0 {
        EXIT_FAILURE
    } else {
        EXIT_OK
    };
    let mut text: Vec<String> = Vec::new();
    for r in &reports {
        text.push(format!("== {}", r.file));
        text.extend(r.lines());
    }
    let uncovered: Vec<&String> = coverage.iter().filter(|(_, n)| **n == 0).map(|(k, _)| k).collect();
    text.push(format!(
        "{} file(s), {} failed; rules not exercised: {}",
        reports.len(),
        failed,
        if uncovered.is_empty() { "none".to_string() } else { format!("{uncovered:?}") }
    ));
    let body = json!({
        "files": reports,
        "summary": { "files": reports.len(), "failed": failed },
        "coverage": coverage,
    });
    outcome(code, command, body, text.join("\n"))
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn check(paths: &[PathBuf], fuel: Option<usize>) -> CommandOutcome {
    let mut sources = Vec::new();
    for p in paths {
        match read(p) {
            Ok(s) => sources.push((p.display().to_string(), s)),
            Err(e) => return usage("check", e),
        }
    }
    files_outcome("check", &sources, fuel, false)
}

/// Every corpus file, with strong-normalization verdicts for each theorem.
pub fn corpus(fuel: Option<usize>) -> CommandOutcome {
    let sources: Vec<(String, String)> =
        corpus::FILES.iter().map(|(n, s)| (n.to_string(), s.to_string())).collect();
    files_outcome("corpus", &sources, fuel, true)
}

fn load_term(command: &str, path: &Path, term: &str) -> Result<(CheckedFile, af2m_core::ProofTerm), CommandOutcome> {
    let src = read(path).map_err(|e| usage(command, e))?;
    let f = check_source(&src, None);
    if let Some(d) = f.diagnostics.first() {
        return Err(usage(command, format!("{}:{d}", path.display())));
    }
    let t = parse_proof_term(term, &f.source).map_err(|d| usage(command, format!("term: {d}")))?;
    let t = f.expand(&t);
    Ok((f, t))
}

pub fn eval(path: &Path, term: &str, fuel: Option<usize>) -> CommandOutcome {
    let (_, t) = match load_term("eval", path, term) {
        Ok(x) => x,
        Err(o) => return o,
    };
    let fuel = fuel.unwrap_or(DEFAULT_FUEL);
    match normalize(&t, fuel) {
        Ok(n) => {
            let mut text: Vec<String> = Vec::new();
            let states = n.trace.states();
            for (s, next) in n.trace.steps.iter().zip(states.iter().skip(1)) {
                text.push(format!("--{}--> {next}", s.axiom.name()));
            }
            text.push(format!("normal form after {} step(s): {}", n.trace.steps.len(), n.term));
            let body = json!({
                "term": t.to_string(),
                "normal_form": n.term.to_string(),
                "steps": n.trace.steps.len(),
                "trace": trace(&n.trace.steps),
            });
            outcome(EXIT_OK, "eval", body, text.join("\n"))
        }
        Err(x) => {
            let body = json!({
                "term": t.to_string(),
                "fuel_exhausted": x.fuel,
                "reached": x.reached.to_string(),
            });
            outcome(EXIT_FAILURE, "eval", body, format!("no normal form within {} step(s); reached {}", x.fuel, x.reached))
        }
    }
}

pub fn sn(path: &Path, term: &str, fuel: Option<usize>, budget: usize) -> CommandOutcome {
    let (_, t) = match load_term("sn", path, term) {
        Ok(x) => x,
        Err(o) => return o,
    };
    let r = SnReport::of(&t, fuel.unwrap_or(DEFAULT_SN_FUEL), budget);
    // A derivation is itself a proof of strong normalization; the oracle can
    // only refute it by finding a divergence, never by running out of budget.
    let diverges = r.oracle == "cycle" || r.oracle == "expanding";
    let code = if !diverges && (r.certified || r.oracle == "sn") { EXIT_OK } else { EXIT_FAILURE };
    let mut text = vec![
        format!("term: {t}"),
        match &r.certifier_error {
            None => format!("certifier: SN derivation with {} node(s)", r.certificate_size.unwrap_or(0)),
            Some(e) => format!("certifier: no derivation ({e})"),
        },
        format!("oracle: {} ({} term(s))", r.oracle, r.nodes),
    ];
    if !r.cycle.is_empty() {
        text.push("cycle:".to_string());
        text.extend(r.cycle.iter().map(|t| format!("  {t}")));
    }
    let body = json!({ "term": t.to_string(), "sn": r });
    outcome(code, "sn", body, text.join("\n"))
}

#[derive(Clone, Debug, Default, Serialize, PartialEq, Eq)]
pub struct PrincipleCounts {
    pub holds: usize,
    pub vacuous: usize,
    pub violated: usize,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Campaign {
    pub lattices: usize,
    pub operators: usize,
    pub monotone_operators: usize,
    pub principles: BTreeMap<&'static str, PrincipleCounts>,
    /// First few violations, as `(principle, lattice size, operator, m)`.
    pub counterexamples: Vec<(String, usize, Operator, usize)>,
}

impl Campaign {
    fn new() -> Campaign {
        let mut c = Campaign::default();
        for p in Principle::ALL {
            c.principles.insert(p.name(), PrincipleCounts::default());
        }
        c
    }

    pub fn violations(&self) -> usize {
        self.principles.values().map(|c| c.violated).sum()
    }

    /// Checks every principle that applies to `phi` at every element.
    pub fn run(&mut self, l: &FiniteLattice, phi: &Operator) {
        self.operators += 1;
        let mono = is_monotone(l, phi);
        if mono {
            self.monotone_operators += 1;
        }
        for m in l.elements() {
            let mut report = check_mendler_principles(l, phi, m).expect("operator fits the lattice");
            if mono {
                report.extend(check_conventional_principles(l, phi, m).expect("monotone"));
            }
            for (p, o) in report {
                let c = self.principles.get_mut(p.name()).expect("known principle");
                match o {
                    Outcome::Holds => c.holds += 1,
                    Outcome::Vacuous => c.vacuous += 1,
                    Outcome::Violated => {
                        c.violated += 1;
                        if self.counterexamples.len() < 10 {
                            self.counterexamples.push((p.name().to_string(), l.size(), phi.clone(), m));
                        }
                    }
                }
            }
        }
    }
}

/// `trials` random lattices of size `1..=size`, each with one arbitrary and
/// one monotone operator, then every operator on every lattice of size at
/// most `exhaustive`.
pub fn lattice_campaign(size: usize, trials: usize, seed: u64, exhaustive: usize) -> Campaign {
    let mut c = Campaign::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let n = rng.gen_range(1..=size.max(1));
        let l = random_lattice(n, rng.gen());
        c.lattices += 1;
        c.run(&l, &random_operator(&l, rng.gen()));
        c.run(&l, &random_monotone_operator(&l, rng.gen()));
    }
    for n in 1..=exhaustive {
        for l in all_lattices(n) {
            c.lattices += 1;
            for code in 0..n.pow(n as u32) {
                let phi: Operator = (0..n).map(|i| code / n.pow(i as u32) % n).collect();
                c.run(&l, &phi);
            }
        }
    }
    c
}

pub fn lattice_fuzz(size: usize, trials: usize, seed: u64, exhaustive: usize) -> CommandOutcome {
    if size == 0 {
        return usage("lattice-fuzz", "--size must be at least 1".to_string());
    }
    if exhaustive > 6 {
        return usage("lattice-fuzz", "--exhaustive is limited to 6".to_string());
    }
    let c = lattice_campaign(size, trials, seed, exhaustive);
    let code = if c.violations() == 0 { EXIT_OK } else { EXIT_FAILURE };
    let mut text = vec![format!(
        "{} lattice(s), {} operator(s) ({} monotone), {} violation(s)",
        c.lattices,
        c.operators,
        c.monotone_operators,
        c.violations()
    )];
    for (p, n) in &c.principles {
        text.push(format!("  {p:<30} holds {:>8}  vacuous {:>8}  violated {:>4}", n.holds, n.vacuous, n.violated));
    }
    let body = json!({ "size": size, "trials": trials, "seed": seed, "exhaustive": exhaustive, "campaign": c });
    outcome(code, "lattice-fuzz", body, text.join("\n"))
}

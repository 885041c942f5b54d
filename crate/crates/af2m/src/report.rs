//! Machine-readable reports. Everything here is deterministic: no timings,
//! ordered maps only.

use std::collections::BTreeMap;

use af2m_core::equational::{EqEvidence, Orientation};
use af2m_core::reduction::{sn_certify, sn_oracle, OracleVerdict, ReductionStep, DEFAULT_ORACLE_BUDGET, DEFAULT_SN_FUEL};
use af2m_core::ProofTerm;
use serde::Serialize;
use serde_json::{json, Value};

use crate::document::Diagnostic;
use crate::driver::{CheckedFile, ExpectOutcome, TheoremOutcome};

pub const SCHEMA: &str = "af2m-report/1";

pub fn evidence(ev: &EqEvidence) -> Value {
    match ev {
        EqEvidence::Refl(t) => json!({ "refl": t.to_string() }),
        EqEvidence::Instance { index, subst, orientation } => {
            let s: BTreeMap<String, String> = subst.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
            let o = match orientation {
                Orientation::Forward => "forward",
                Orientation::Backward => "backward",
            };
            json!({ "instance": index, "orientation": o, "subst": s })
        }
        EqEvidence::Trans { left, right, mid } => {
            json!({ "trans": [evidence(left), evidence(right)], "mid": mid.to_string() })
        }
        EqEvidence::Cong { symbol, args } => {
            json!({ "cong": symbol.to_string(), "args": args.iter().map(evidence).collect::<Vec<_>>() })
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SnReport {
    pub certified: bool,
    /// `"sn"`, `"cycle"`, `"expanding"` or `"inconclusive"`.
    pub oracle: &'static str,
    pub nodes: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certifier_error: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub cycle: Vec<String>,
}

impl SnReport {
    pub fn of(t: &ProofTerm, fuel: usize, budget: usize) -> SnReport {
        let cert = sn_certify(t, fuel);
        let verdict = sn_oracle(t, budget);
        let (oracle, nodes, cycle) = match &verdict {
            OracleVerdict::Sn { nodes } => ("sn", *nodes, Vec::new()),
            OracleVerdict::Cycle(c) => ("cycle", c.len(), c.iter().map(|t| t.to_string()).collect()),
            OracleVerdict::Expanding(c) => ("expanding", c.len(), c.iter().map(|t| t.to_string()).collect()),
            OracleVerdict::Inconclusive { explored } => ("inconclusive", *explored, Vec::new()),
        };
        SnReport {
            certified: cert.is_ok(),
            oracle,
            nodes,
            certificate_size: cert.as_ref().ok().map(|d| d.size()),
            certifier_error: cert.err().map(|e| e.to_string()),
            cycle,
        }
    }

    pub fn default_of(t: &ProofTerm) -> SnReport {
        SnReport::of(t, DEFAULT_SN_FUEL, DEFAULT_ORACLE_BUDGET)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceStep {
    pub axiom: &'static str,
    pub path: Vec<usize>,
}

pub fn trace(steps: &[ReductionStep]) -> Vec<TraceStep> {
    steps.iter().map(|s| TraceStep { axiom: s.axiom.name(), path: s.path.clone() }).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Obligation {
    pub step: usize,
    pub lhs: String,
    pub rhs: String,
    pub evidence: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct TheoremReport {
    pub name: String,
    /// `"checked"` or `"failed"`.
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<Diagnostic>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub judgment: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub term: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub formula: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sn: Option<SnReport>,
    pub equations: Vec<Obligation>,
}

fn theorem(t: &TheoremOutcome, with_sn: bool) -> TheoremReport {
    match &t.result {
        Ok(j) => TheoremReport {
            name: t.name.to_string(),
            status: "checked",
            error: None,
            judgment: Some(j.to_string()),
            term: Some(j.term().to_string()),
            formula: Some(j.formula().to_string()),
            sn: with_sn.then(|| SnReport::default_of(j.term())),
            equations: t
                .obligations
                .iter()
                .map(|o| Obligation {
                    step: o.step + 1,
                    lhs: o.lhs.to_string(),
                    rhs: o.rhs.to_string(),
                    evidence: evidence(&o.evidence),
                })
                .collect(),
        },
        Err(d) => TheoremReport {
            name: t.name.to_string(),
            status: "failed",
            error: Some(d.clone()),
            judgment: None,
            term: None,
            formula: None,
            sn: None,
            equations: Vec::new(),
        },
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SubjectReductionReport {
    pub lhs_theorem: String,
    pub nf_theorem: String,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub typed_states: usize,
    pub states: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExpectReport {
    pub name: String,
    /// `"reduced"` or `"failed"`.
    pub status: &'static str,
    pub steps: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normal_form: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subject_reduction: Option<SubjectReductionReport>,
    pub trace: Vec<TraceStep>,
}

fn expect(e: &ExpectOutcome) -> ExpectReport {
    let ok = e.result.is_ok() && e.subject_reduction.as_ref().is_none_or(|s| s.holds.is_ok());
    ExpectReport {
        name: e.name.to_string(),
        status: if ok { "reduced" } else { "failed" },
        steps: e.steps,
        normal_form: e.normal_form.as_ref().map(|t| t.to_string()),
        error: e.result.as_ref().err().cloned(),
        subject_reduction: e.subject_reduction.as_ref().map(|s| SubjectReductionReport {
            lhs_theorem: s.lhs_theorem.to_string(),
            nf_theorem: s.nf_theorem.to_string(),
            holds: s.holds.is_ok(),
            error: s.holds.as_ref().err().cloned(),
            typed_states: s.typed_states,
            states: s.states,
        }),
        trace: trace(&e.trace),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FileReport {
    pub file: String,
    pub passed: bool,
    pub diagnostics: Vec<Diagnostic>,
    pub theorems: Vec<TheoremReport>,
    pub expects: Vec<ExpectReport>,
    pub coverage: BTreeMap<String, usize>,
}

impl FileReport {
    /// `with_sn` adds the certifier and oracle verdicts of every theorem term.
    pub fn new(file: &str, f: &CheckedFile, with_sn: bool) -> FileReport {
        let theorems: Vec<TheoremReport> = f.theorems.iter().map(|t| theorem(t, with_sn)).collect();
        let sn_ok = theorems.iter().all(|t| t.sn.as_ref().is_none_or(|s| s.oracle == "sn"));
        FileReport {
            file: file.to_string(),
            passed: f.all_passed() && sn_ok,
            diagnostics: f.diagnostics.clone(),
            theorems,
            expects: f.expects.iter().map(expect).collect(),
            coverage: f.coverage().into_iter().map(|(r, n)| (r.name().to_string(), n)).collect(),
        }
    }

    /// Human-readable summary lines.
    pub fn lines(&self) -> Vec<String> {
        let mut out = Vec::new();
        for d in &self.diagnostics {
            out.push(format!("{}:{d}", self.file));
        }
        for t in &self.theorems {
            match (&t.error, &t.judgment) {
                (Some(d), _) => out.push(format!("{}:{d}", self.file)),
                (None, Some(j)) => {
                    let sn = match &t.sn {
                        Some(s) => format!("  [sn: oracle {}, certified {}]", s.oracle, s.certified),
                        None => String::new(),
                    };
                    out.push(format!("ok   {}: {j}{sn}", t.name));
                }
                _ => {}
            }
        }
        for e in &self.expects {
            let mut line = match (&e.error, &e.normal_form) {
                (Some(err), _) => format!("FAIL {}: {err}", e.name),
                (None, Some(nf)) => format!("ok   {}: ->* {nf} in {} step(s)", e.name, e.steps),
                _ => format!("FAIL {}", e.name),
            };
            if let Some(s) = &e.subject_reduction {
                match &s.error {
                    Some(err) => line.push_str(&format!("; subject reduction FAILED: {err}")),
                    None => line.push_str(&format!(
                        "; subject reduction ok ({}/{} states typed)",
                        s.typed_states, s.states
                    )),
                }
            }
            out.push(line);
        }
        out
    }
}

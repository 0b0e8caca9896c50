//! Checking `{P} c {Q}` against a finite set of initial distributions.

use std::path::Path;

use serde::Serialize;

use super::pc::pc;
use crate::assertlang::{holds, parse_assertion, pretty_assn, DistAssn, Truth};
use crate::densem::Denoter;
use crate::lang::{parse_program, pretty, Program};
use crate::state::Povd;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct Triple {
    pub pre: DistAssn,
    pub program: Program,
    pub post: DistAssn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckMode {
    Pc,
    Semantic,
    Both,
}

impl std::str::FromStr for CheckMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pc" => Ok(CheckMode::Pc),
            "semantic" => Ok(CheckMode::Semantic),
            "both" => Ok(CheckMode::Both),
            _ => Err(Error::InvalidArgument(format!("unknown mode `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Indeterminate,
    /// The precondition is false at this witness.
    Vacuous,
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    pub witness_id: String,
    pub verdict: Verdict,
    pub pre: Truth,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pc: Option<Truth>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub semantic: Option<Truth>,
    pub details: String,
    /// On failure: the witness and the distribution it ends in.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<serde_json::Value>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Summary {
    pub total: usize,
    pub pass: usize,
    pub fail: usize,
    pub indeterminate: usize,
    pub vacuous: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct TripleReport {
    pub mode: CheckMode,
    /// Verdicts hold relative to the listed witnesses only.
    pub relative_to: &'static str,
    pub overall: Verdict,
    pub pre: String,
    pub post: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precondition: Option<String>,
    pub witnesses: Vec<WitnessReport>,
    pub indeterminate: Vec<String>,
    pub summary: Summary,
}

impl TripleReport {
    /// 0 if every verdict passes, 1 on any failure, 2 if some are
    /// indeterminate and none fail.
    pub fn exit_code(&self) -> i32 {
        match self.overall {
            Verdict::Pass | Verdict::Vacuous => 0,
            Verdict::Fail => 1,
            Verdict::Indeterminate => 2,
        }
    }
}

fn combine(pre: Truth, post: Truth) -> Verdict {
    match pre.implies(post) {
        _ if pre == Truth::False => Verdict::Vacuous,
        Truth::True => Verdict::Pass,
        Truth::False => Verdict::Fail,
        Truth::Indeterminate => Verdict::Indeterminate,
    }
}

pub fn check_triple(t: &Triple, witnesses: &[(String, Povd)], mode: CheckMode) -> Result<TripleReport> {
    let body = &t.program.body;
    let pre_cond = match mode {
        CheckMode::Pc | CheckMode::Both => Some(pc(body, &t.post)?),
        CheckMode::Semantic => None,
    };
    let mut reports = Vec::new();
    for (id, mu) in witnesses {
        if mu.qubits() != t.program.qubits.as_slice() {
            return Err(Error::RegisterMismatch {
                left: t.program.qubits.clone(),
                right: mu.qubits().to_vec(),
            });
        }
        let pre = holds(&t.pre, mu)?;
        let mut details = Vec::new();

        let pc_truth = match &pre_cond {
            Some(q) if pre != Truth::False => Some(holds(q, mu)?),
            _ => None,
        };
        let mut terminal = None;
        let sem_truth = if mode != CheckMode::Pc && pre != Truth::False {
            let mut d = Denoter::default();
            let out = d.denote(body, mu)?;
            let mut v = holds(&t.post, &out)?;
            if !d.converged() {
                details.push("a loop hit its iteration cap".to_string());
                if v != Truth::True {
                    v = Truth::Indeterminate;
                }
            }
            terminal = Some(out);
            Some(v)
        } else {
            None
        };

        let verdict = match (pc_truth, sem_truth) {
            _ if pre == Truth::False => Verdict::Vacuous,
            (Some(a), Some(b)) => match (combine(pre, a), combine(pre, b)) {
                (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
                (Verdict::Pass, Verdict::Pass) => Verdict::Pass,
                _ => Verdict::Indeterminate,
            },
            (Some(a), None) | (None, Some(a)) => combine(pre, a),
            (None, None) => unreachable!("some mode is selected"),
        };
        match verdict {
            Verdict::Vacuous => details.push("precondition is false".into()),
            Verdict::Fail if pc_truth == Some(Truth::False) => {
                details.push("the witness does not satisfy the computed precondition".into())
            }
            Verdict::Fail => details.push("the final distribution violates the postcondition".into()),
            Verdict::Indeterminate => details.push("an unguided split could not be decided".into()),
            Verdict::Pass => {}
        }
        let counterexample = if verdict == Verdict::Fail {
            let out = match terminal {
                Some(out) => out,
                None => Denoter::default().denote(body, mu)?,
            };
            Some(serde_json::json!({ "witness": mu.to_json(), "terminal": out.to_json() }))
        } else {
            None
        };
        reports.push(WitnessReport {
            witness_id: id.clone(),
            verdict,
            pre,
            pc: pc_truth,
            semantic: sem_truth,
            details: details.join("; "),
            counterexample,
        });
    }

    let mut summary = Summary {
        total: reports.len(),
        ..Summary::default()
    };
    for r in &reports {
        match r.verdict {
            Verdict::Pass => summary.pass += 1,
            Verdict::Fail => summary.fail += 1,
            Verdict::Indeterminate => summary.indeterminate += 1,
            Verdict::Vacuous => summary.vacuous += 1,
        }
    }
    let overall = if summary.fail > 0 {
        Verdict::Fail
    } else if summary.indeterminate > 0 {
        Verdict::Indeterminate
    } else if summary.pass == 0 {
        Verdict::Vacuous
    } else {
        Verdict::Pass
    };
    Ok(TripleReport {
        mode,
        relative_to: "witnesses",
        overall,
        pre: pretty_assn(&t.pre),
        post: pretty_assn(&t.post),
        precondition: pre_cond.as_ref().map(pretty_assn),
        indeterminate: reports
            .iter()
            .filter(|r| r.verdict == Verdict::Indeterminate)
            .map(|r| r.witness_id.clone())
            .collect(),
        witnesses: reports,
        summary,
    })
}

/// The three sections of a `.qhl` file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QhlSource {
    pub pre: String,
    pub prog: String,
    pub post: String,
}

/// Splits `pre: ... prog: ... post: ...` into its sections. Each key starts
/// a line; its text runs to the next key.
pub fn parse_qhl(text: &str) -> Result<QhlSource> {
    let mut sections: Vec<(&str, String)> = Vec::new();
    for line in text.lines() {
        let trimmed = line.trim_start();
        if trimmed.starts_with("//") {
            continue;
        }
        let key = ["pre:", "prog:", "post:"].into_iter().find(|k| trimmed.starts_with(k));
        match key {
            Some(k) => {
                if sections.iter().any(|(s, _)| *s == k) {
                    return Err(Error::InvalidArgument(format!("duplicate `{k}` section")));
                }
                sections.push((k, trimmed[k.len()..].trim().to_string()));
            }
            None => match sections.last_mut() {
                Some((_, body)) => {
                    body.push('\n');
                    body.push_str(line);
                }
                None if trimmed.is_empty() => {}
                None => {
                    return Err(Error::InvalidArgument(format!(
                        "text before the first section: `{trimmed}`"
                    )))
                }
            },
        }
    }
    let get = |k: &str| {
        sections
            .iter()
            .find(|(s, _)| *s == k)
            .map(|(_, b)| b.trim().to_string())
            .ok_or_else(|| Error::InvalidArgument(format!("missing `{k}` section")))
    };
    Ok(QhlSource {
        pre: get("pre:")?,
        prog: get("prog:")?,
        post: get("post:")?,
    })
}

impl Triple {
    /// Parses the assertions of `src` against an already parsed program.
    pub fn new(pre: &str, program: Program, post: &str) -> Result<Triple> {
        let pre = parse_assertion(pre, &program.measurements)?;
        let post = parse_assertion(post, &program.measurements)?;
        Ok(Triple { pre, program, post })
    }

    /// Reads a `.qhl` file; the program path is relative to the file.
    pub fn load(path: &Path) -> Result<Triple> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
        let src = parse_qhl(&text)?;
        let prog_path = path.parent().unwrap_or(Path::new(".")).join(&src.prog);
        let prog_text = std::fs::read_to_string(&prog_path)
            .map_err(|e| Error::InvalidArgument(format!("{}: {e}", prog_path.display())))?;
        Triple::new(&src.pre, parse_program(&prog_text)?, &src.post)
    }

    pub fn program_text(&self) -> String {
        pretty(&self.program)
    }
}

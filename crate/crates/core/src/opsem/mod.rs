//! Small-step execution of commands with nondeterministic measurement
//! branching.

mod eval;

pub use eval::{aexp_step, bexp_step, eval_aexp, eval_bexp, reduce_aexp, reduce_bexp};

use serde::Serialize;

use crate::lang::pretty::pretty_com_inline;
use crate::lang::{Com, Program};
use crate::qmath::literal::format_exact;
use crate::qmath::{CMatrix, PartialDensityOp};
use crate::state::{quantum, ClassicalState, Configuration, Povd};
use crate::{Error, Result, EPS_PRUNE};

pub const DEFAULT_FUEL: u64 = 1_000_000;

/// Successors of one configuration. Empty for `abort`, which is stuck.
#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub successors: Vec<Configuration>,
}

/// One transition of `cfg`, with qubit names resolved against `register`.
pub fn step_in(cfg: &Configuration, register: &[String]) -> Result<StepResult> {
    let succ = step_raw(&cfg.command, &cfg.sigma, cfg.rho.matrix(), register)?;
    Ok(StepResult {
        successors: succ
            .into_iter()
            .map(|(c, s, r)| Configuration::new(c, s, PartialDensityOp::from_matrix_unchecked(r)))
            .collect(),
    })
}

pub fn step(cfg: &Configuration, prog: &Program) -> Result<StepResult> {
    step_in(cfg, &prog.qubits)
}

type Succ = (Com, ClassicalState, CMatrix);

fn step_raw(c: &Com, sigma: &ClassicalState, rho: &CMatrix, reg: &[String]) -> Result<Vec<Succ>> {
    let same = |c: Com| Ok(vec![(c, sigma.clone(), rho.clone())]);
    match c {
        Com::Nil => Err(Error::SteppingNil),
        Com::Skip => same(Com::Nil),
        Com::Abort => Ok(Vec::new()),
        Com::Assign(x, a) => {
            let n = eval_aexp(a, sigma)?;
            Ok(vec![(Com::Nil, sigma.update(x, n), rho.clone())])
        }
        Com::Seq(c0, c1) => {
            if **c0 == Com::Nil {
                return step_raw(c1, sigma, rho, reg);
            }
            Ok(step_raw(c0, sigma, rho, reg)?
                .into_iter()
                .map(|(c0p, s, r)| (Com::Seq(Box::new(c0p), c1.clone()), s, r))
                .collect())
        }
        Com::If(b, c0, c1) => {
            if eval_bexp(b, sigma)? {
                same((**c0).clone())
            } else {
                same((**c1).clone())
            }
        }
        Com::While(b, body) => same(Com::if_then_else(
            b.clone(),
            Com::seq((**body).clone(), c.clone()),
            Com::Skip,
        )),
        Com::QInit(q) => Ok(vec![(Com::Nil, sigma.clone(), quantum::reset(rho, reg, q)?)]),
        Com::QUnit(g, qs) => Ok(vec![(
            Com::Nil,
            sigma.clone(),
            quantum::apply_unitary(rho, g.gate.matrix(), reg, qs)?,
        )]),
        Com::QMeas(x, m, qs) => {
            let mut out = Vec::new();
            for (label, r) in quantum::measure(rho, &m.meas, reg, qs)? {
                if r.trace().re < EPS_PRUNE {
                    continue;
                }
                out.push((Com::Nil, sigma.update(x, quantum::outcome_value(&label)?), r));
            }
            Ok(out)
        }
    }
}

/// A node of the execution tree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceNode {
    pub command: String,
    pub cstate: ClassicalState,
    pub rho: String,
    /// Expression reductions performed by the step leaving this node.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub eval: Vec<String>,
    pub children: Vec<TraceNode>,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub terminal: Povd,
    /// Mass of configurations still running when fuel ran out.
    pub residual_mass: f64,
    /// Breadth-first rounds taken.
    pub steps: u64,
    pub trace_tree: Vec<TraceNode>,
}

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    /// Maximum number of transitions along any path.
    pub fuel: u64,
    pub trace: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            fuel: DEFAULT_FUEL,
            trace: false,
        }
    }
}

pub fn run(prog: &Program, init: &Povd, fuel: u64) -> Result<RunResult> {
    if init.qubits() != prog.qubits.as_slice() {
        return Err(Error::RegisterMismatch {
            left: prog.qubits.clone(),
            right: init.qubits().to_vec(),
        });
    }
    run_com(&prog.body, init, RunOptions { fuel, trace: false })
}

/// Explores every branch of `c` from each entry of `init`, breadth first.
pub fn run_com(c: &Com, init: &Povd, opts: RunOptions) -> Result<RunResult> {
    if opts.fuel == 0 {
        return Err(Error::InvalidArgument("fuel must be positive".into()));
    }
    let reg = init.qubits().to_vec();
    let mut arena: Vec<(TraceNode, Vec<usize>)> = Vec::new();
    let mut node = |cfg: &Configuration| -> usize {
        if !opts.trace {
            return 0;
        }
        arena.push((
            TraceNode {
                command: pretty_com_inline(&cfg.command),
                cstate: cfg.sigma.clone(),
                rho: format_exact(cfg.rho.matrix()),
                eval: Vec::new(),
                children: Vec::new(),
            },
            Vec::new(),
        ));
        arena.len() - 1
    };

    let mut live: Vec<(Configuration, usize)> = Vec::new();
    let mut roots = Vec::new();
    for (s, r) in init.iter() {
        let cfg = Configuration::new(c.clone(), s.clone(), r.clone());
        let id = node(&cfg);
        roots.push(id);
        live.push((cfg, id));
    }
    drop(node);

    let mut terminal = Povd::empty(reg.clone());
    let mut steps = 0;
    while !live.is_empty() && steps < opts.fuel {
        steps += 1;
        let mut next = Vec::new();
        for (cfg, id) in live {
            let succ = step_in(&cfg, &reg)?;
            if opts.trace {
                arena[id].0.eval = redex_reductions(&cfg.command, &cfg.sigma)?;
            }
            for s in succ.successors {
                let child = if opts.trace {
                    arena.push((
                        TraceNode {
                            command: pretty_com_inline(&s.command),
                            cstate: s.sigma.clone(),
                            rho: format_exact(s.rho.matrix()),
                            eval: Vec::new(),
                            children: Vec::new(),
                        },
                        Vec::new(),
                    ));
                    let child = arena.len() - 1;
                    arena[id].1.push(child);
                    child
                } else {
                    0
                };
                if s.command == Com::Nil {
                    terminal.accumulate(s.sigma, s.rho.into_matrix())?;
                } else {
                    next.push((s, child));
                }
            }
        }
        live = next;
    }
    terminal.prune();
    let residual_mass = live.iter().map(|(cfg, _)| cfg.rho.trace()).fold(0.0, |acc, t| acc + t);
    let trace_tree = if opts.trace {
        roots.iter().map(|&r| build_tree(&arena, r)).collect()
    } else {
        Vec::new()
    };
    Ok(RunResult {
        terminal,
        residual_mass,
        steps,
        trace_tree,
    })
}

fn build_tree(arena: &[(TraceNode, Vec<usize>)], id: usize) -> TraceNode {
    let (n, kids) = &arena[id];
    let mut out = n.clone();
    out.children = kids.iter().map(|&k| build_tree(arena, k)).collect();
    out
}

/// The command that the next transition of `c` acts on.
fn active(c: &Com) -> &Com {
    match c {
        Com::Seq(c0, c1) if **c0 == Com::Nil => active(c1),
        Com::Seq(c0, _) => active(c0),
        _ => c,
    }
}

fn redex_reductions(c: &Com, sigma: &ClassicalState) -> Result<Vec<String>> {
    Ok(match active(c) {
        Com::Assign(_, a) => reduce_aexp(a, sigma)?.1,
        Com::If(b, ..) => reduce_bexp(b, sigma)?.1,
        _ => Vec::new(),
    })
}

//! Commands as POVD transformers, with loops computed as limits of their
//! lower approximations.

use serde::Serialize;

use crate::lang::pretty::pretty_com_inline;
use crate::lang::{BExp, Com};
use crate::opsem::eval_aexp;
use crate::qmath::PartialDensityOp;
use crate::state::{quantum, ClassicalState, Povd};
use crate::{Error, Result, EPS_NUM, EPS_PRUNE};

pub const DEFAULT_LOOP_CAP: u64 = 10_000;

#[derive(Debug, Clone, Copy)]
pub struct DenoteOptions {
    pub loop_cap: u64,
    pub loop_tol: f64,
}

impl Default for DenoteOptions {
    fn default() -> Self {
        DenoteOptions {
            loop_cap: DEFAULT_LOOP_CAP,
            loop_tol: EPS_NUM,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WhileResult {
    pub result: Povd,
    pub converged: bool,
    /// Approximants computed, counting the 0-th; the cap bounds body
    /// applications.
    pub iterations: u64,
    /// Mass still inside the loop at the last approximant.
    pub residual_mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoopReport {
    pub loop_text: String,
    pub converged: bool,
    pub iterations: u64,
    pub residual_mass: f64,
}

/// Evaluator that records a report for every loop it runs.
#[derive(Debug, Clone, Default)]
pub struct Denoter {
    pub opts: DenoteOptions,
    pub loops: Vec<LoopReport>,
}

impl Denoter {
    pub fn new(opts: DenoteOptions) -> Self {
        Denoter {
            opts,
            loops: Vec::new(),
        }
    }

    pub fn converged(&self) -> bool {
        self.loops.iter().all(|l| l.converged)
    }

    /// `⟦c⟧_μ`.
    pub fn denote(&mut self, c: &Com, mu: &Povd) -> Result<Povd> {
        match c {
            Com::Skip | Com::Nil => Ok(mu.clone()),
            Com::Abort => Ok(Povd::empty(mu.qubits().to_vec())),
            Com::Seq(c0, c1) => {
                let mid = self.denote(c0, mu)?;
                self.denote(c1, &mid)
            }
            Com::If(b, c0, c1) => {
                let yes = self.denote(c0, &mu.restrict(b)?)?;
                let no = self.denote(c1, &mu.restrict(&BExp::not(b.clone()))?)?;
                yes.add_unbounded(&no)
            }
            Com::While(b, body) => {
                let r = self.denote_while(b, body, mu)?;
                self.loops.push(LoopReport {
                    loop_text: pretty_com_inline(c),
                    converged: r.converged,
                    iterations: r.iterations,
                    residual_mass: r.residual_mass,
                });
                Ok(r.result)
            }
            _ => self.denote_pointwise(c, mu),
        }
    }

    /// Atomic commands, entry by entry.
    fn denote_pointwise(&mut self, c: &Com, mu: &Povd) -> Result<Povd> {
        let reg = mu.qubits().to_vec();
        let mut out = Povd::empty(reg.clone());
        for (s, r) in mu.iter() {
            let rho = r.matrix();
            match c {
                Com::Assign(x, a) => out.accumulate(s.update(x, eval_aexp(a, s)?), rho.clone())?,
                Com::QInit(q) => out.accumulate(s.clone(), quantum::reset(rho, &reg, q)?)?,
                Com::QUnit(g, qs) => out.accumulate(
                    s.clone(),
                    quantum::apply_unitary(rho, g.gate.matrix(), &reg, qs)?,
                )?,
                Com::QMeas(x, m, qs) => {
                    for (label, ri) in quantum::measure(rho, &m.meas, &reg, qs)? {
                        if ri.trace().re < EPS_PRUNE {
                            continue;
                        }
                        out.accumulate(s.update(x, quantum::outcome_value(&label)?), ri)?;
                    }
                }
                _ => unreachable!("compound commands are handled by denote"),
            }
        }
        out.prune();
        Ok(out)
    }

    /// Iterates the body on the live part `μ|b`, collecting the mass that
    /// leaves through `¬b`. Stops when the live mass is below tolerance, or
    /// when the live part repeats and nothing more leaves.
    pub fn denote_while(&mut self, b: &BExp, body: &Com, mu: &Povd) -> Result<WhileResult> {
        if self.opts.loop_cap == 0 || !(self.opts.loop_tol > 0.0) {
            return Err(Error::InvalidArgument("loop cap and tolerance must be positive".into()));
        }
        let not_b = BExp::not(b.clone());
        let mut approx = mu.restrict(&not_b)?;
        let mut live = mu.restrict(b)?;
        let mut iterations = 1;
        loop {
            if live.total_mass() < self.opts.loop_tol {
                return Ok(WhileResult {
                    result: approx,
                    converged: true,
                    iterations,
                    residual_mass: live.total_mass(),
                });
            }
            if iterations > self.opts.loop_cap {
                return Ok(WhileResult {
                    result: approx,
                    converged: false,
                    iterations,
                    residual_mass: live.total_mass(),
                });
            }
            let after = self.denote(body, &live)?;
            let exit = after.restrict(&not_b)?;
            let next_live = after.restrict(b)?;
            iterations += 1;
            let exit_size = exit.distance(&Povd::empty(exit.qubits().to_vec()));
            approx = approx.add_unbounded(&exit)?;
            let repeats = next_live.approx_eq(&live, self.opts.loop_tol);
            live = next_live;
            if repeats && exit_size < self.opts.loop_tol {
                return Ok(WhileResult {
                    result: approx,
                    converged: true,
                    iterations,
                    residual_mass: live.total_mass(),
                });
            }
        }
    }
}

pub fn denote(c: &Com, mu: &Povd) -> Result<Povd> {
    Denoter::default().denote(c, mu)
}

pub fn denote_state(c: &Com, sigma: &ClassicalState, rho: &PartialDensityOp, qubits: &[String]) -> Result<Povd> {
    let mu = Povd::point(qubits.to_vec(), sigma.clone(), rho.clone())?;
    denote(c, &mu)
}

pub fn denote_while(b: &BExp, c: &Com, mu: &Povd, cap: u64, tol: f64) -> Result<WhileResult> {
    Denoter::new(DenoteOptions {
        loop_cap: cap,
        loop_tol: tol,
    })
    .denote_while(b, c, mu)
}

/// `(if b then c)^n; if b then abort`, the syntactic n-th approximant.
pub fn approximant(b: &BExp, c: &Com, n: usize) -> Com {
    let step = Com::if_then_else(b.clone(), c.clone(), Com::Skip);
    let mut parts: Vec<Com> = std::iter::repeat_n(step, n).collect();
    parts.push(Com::if_then_else(b.clone(), Com::Abort, Com::Skip));
    Com::seq_all(parts)
}

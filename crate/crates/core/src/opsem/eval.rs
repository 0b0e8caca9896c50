//! Arithmetic and boolean expressions: a big-step evaluator and the
//! one-step reduction relation it must agree with.

use crate::lang::{pretty_aexp, pretty_bexp, AExp, BExp};
use crate::state::ClassicalState;
use crate::{Error, Result};

fn arith(a: &AExp, l: i64, r: i64) -> Result<i64> {
    let v = match a {
        AExp::Add(..) => l.checked_add(r),
        AExp::Sub(..) => l.checked_sub(r),
        AExp::Mul(..) => l.checked_mul(r),
        _ => unreachable!("arith on a leaf"),
    };
    v.ok_or_else(|| Error::Overflow(pretty_aexp(a)))
}

pub fn eval_aexp(a: &AExp, sigma: &ClassicalState) -> Result<i64> {
    match a {
        AExp::Int(n) => Ok(*n),
        AExp::Var(x) => Ok(sigma.get(x)),
        AExp::Add(l, r) | AExp::Sub(l, r) | AExp::Mul(l, r) => {
            let l = eval_aexp(l, sigma)?;
            let r = eval_aexp(r, sigma)?;
            arith(a, l, r)
        }
    }
}

/// Conjunction and disjunction short-circuit from the left.
pub fn eval_bexp(b: &BExp, sigma: &ClassicalState) -> Result<bool> {
    Ok(match b {
        BExp::True => true,
        BExp::False => false,
        BExp::Eq(l, r) => eval_aexp(l, sigma)? == eval_aexp(r, sigma)?,
        BExp::Leq(l, r) => eval_aexp(l, sigma)? <= eval_aexp(r, sigma)?,
        BExp::Not(b) => !eval_bexp(b, sigma)?,
        BExp::And(l, r) => eval_bexp(l, sigma)? && eval_bexp(r, sigma)?,
        BExp::Or(l, r) => eval_bexp(l, sigma)? || eval_bexp(r, sigma)?,
    })
}

/// One `↪` step; `None` on a numeral.
pub fn aexp_step(a: &AExp, sigma: &ClassicalState) -> Result<Option<AExp>> {
    let rebuild = |l: AExp, r: AExp| match a {
        AExp::Add(..) => AExp::add(l, r),
        AExp::Sub(..) => AExp::sub(l, r),
        _ => AExp::mul(l, r),
    };
    Ok(match a {
        AExp::Int(_) => None,
        AExp::Var(x) => Some(AExp::Int(sigma.get(x))),
        AExp::Add(l, r) | AExp::Sub(l, r) | AExp::Mul(l, r) => match (&**l, &**r) {
            (AExp::Int(n), AExp::Int(m)) => Some(AExp::Int(arith(a, *n, *m)?)),
            (AExp::Int(_), _) => {
                let r2 = aexp_step(r, sigma)?.expect("non-numeral steps");
                Some(rebuild((**l).clone(), r2))
            }
            _ => {
                let l2 = aexp_step(l, sigma)?.expect("non-numeral steps");
                Some(rebuild(l2, (**r).clone()))
            }
        },
    })
}

/// One `↪` step; `None` on `true` or `false`.
pub fn bexp_step(b: &BExp, sigma: &ClassicalState) -> Result<Option<BExp>> {
    Ok(match b {
        BExp::True | BExp::False => None,
        BExp::Eq(l, r) | BExp::Leq(l, r) => {
            let eq = matches!(b, BExp::Eq(..));
            let mk = |l, r| if eq { BExp::Eq(l, r) } else { BExp::Leq(l, r) };
            match (l, r) {
                (AExp::Int(n), AExp::Int(m)) => {
                    Some(if (eq && n == m) || (!eq && n <= m) { BExp::True } else { BExp::False })
                }
                (AExp::Int(_), _) => Some(mk(l.clone(), aexp_step(r, sigma)?.expect("steps"))),
                _ => Some(mk(aexp_step(l, sigma)?.expect("steps"), r.clone())),
            }
        }
        BExp::Not(inner) => match &**inner {
            BExp::True => Some(BExp::False),
            BExp::False => Some(BExp::True),
            _ => Some(BExp::not(bexp_step(inner, sigma)?.expect("steps"))),
        },
        BExp::And(l, r) => match &**l {
            BExp::True => Some((**r).clone()),
            BExp::False => Some(BExp::False),
            _ => Some(BExp::and(bexp_step(l, sigma)?.expect("steps"), (**r).clone())),
        },
        BExp::Or(l, r) => match &**l {
            BExp::True => Some(BExp::True),
            BExp::False => Some((**r).clone()),
            _ => Some(BExp::or(bexp_step(l, sigma)?.expect("steps"), (**r).clone())),
        },
    })
}

/// Reduces to a numeral, returning it with every intermediate expression.
pub fn reduce_aexp(a: &AExp, sigma: &ClassicalState) -> Result<(i64, Vec<String>)> {
    let mut cur = a.clone();
    let mut trace = vec![pretty_aexp(&cur)];
    while let Some(next) = aexp_step(&cur, sigma)? {
        cur = next;
        trace.push(pretty_aexp(&cur));
    }
    match cur {
        AExp::Int(n) => Ok((n, trace)),
        _ => unreachable!("irreducible arithmetic expressions are numerals"),
    }
}

pub fn reduce_bexp(b: &BExp, sigma: &ClassicalState) -> Result<(bool, Vec<String>)> {
    let mut cur = b.clone();
    let mut trace = vec![pretty_bexp(&cur)];
    while let Some(next) = bexp_step(&cur, sigma)? {
        cur = next;
        trace.push(pretty_bexp(&cur));
    }
    Ok((cur == BExp::True, trace))
}

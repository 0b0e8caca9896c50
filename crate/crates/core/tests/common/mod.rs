#![allow(dead_code)]

use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;

use qimp_core::assertlang::{CmpOp, DistAssn, DistExpr, MeasSpec, Quant, StateAssn, StateExpr};
use qimp_core::lang::{lookup_gate, lookup_measurement, AExp, BExp, Com, GateRef, MeasRef};
use qimp_core::qmath::{CMatrix, GeneralMeasurement, UnitaryGate, C64};
use qimp_core::state::Povd;
use qimp_core::witness::{random_povd, seeded_rng, WitnessOptions, WitnessRng};

pub const QUBITS: [&str; 2] = ["q0", "q1"];
pub const VARS: [&str; 3] = ["x", "y", "m"];
pub const TOL: f64 = 1e-9;

pub fn rng(seed: u64) -> WitnessRng {
    seeded_rng(seed)
}

pub fn qubits() -> Vec<String> {
    QUBITS.iter().map(|s| s.to_string()).collect()
}

pub fn vars() -> Vec<String> {
    VARS.iter().map(|s| s.to_string()).collect()
}

fn pick<'a, T>(rng: &mut WitnessRng, xs: &'a [T]) -> &'a T {
    &xs[rng.random_range(0..xs.len())]
}

/// Random sub-normalised distribution over `QUBITS` and `VARS`.
pub fn povd(rng: &mut WitnessRng) -> Povd {
    let opts = WitnessOptions {
        mass: None,
        ..WitnessOptions::default()
    };
    random_povd(rng, &qubits(), &vars(), &opts).expect("generated distribution is valid")
}

// ---- matrices ----

fn gaussian(rng: &mut WitnessRng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-ish unitary from Gram-Schmidt on a Gaussian matrix.
pub fn unitary(rng: &mut WitnessRng, dim: usize) -> CMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::new();
    while cols.len() < dim {
        let mut v: Vec<C64> = (0..dim).map(|_| gaussian(rng)).collect();
        for u in &cols {
            let dot: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= dot * ui;
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-6 {
            cols.push(v.into_iter().map(|z| z / n).collect());
        }
    }
    let rows = (0..dim).map(|i| (0..dim).map(|j| cols[j][i]).collect()).collect();
    CMatrix::from_rows(rows).expect("square")
}

/// A complete measurement with `k` outcomes: `M_i = V_i D_i W` where the
/// squared diagonals sum to one.
pub fn measurement(rng: &mut WitnessRng, arity: usize, k: usize, label_width: usize) -> GeneralMeasurement {
    let dim = 1 << arity;
    let w = unitary(rng, dim);
    let mut weights = vec![vec![0.0; dim]; k];
    for j in 0..dim {
        let raw: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 0.05).collect();
        let total: f64 = raw.iter().sum();
        for i in 0..k {
            weights[i][j] = raw[i] / total;
        }
    }
    let ops = (0..k)
        .map(|i| {
            let mut d = CMatrix::zeros(dim, dim);
            for j in 0..dim {
                d[(j, j)] = C64::new(weights[i][j].sqrt(), 0.0);
            }
            unitary(rng, dim).matmul(&d).unwrap().matmul(&w).unwrap()
        })
        .collect();
    let labels = (0..k).map(|_| (0..label_width).map(|_| rng.random_range(0..=1)).collect()).collect();
    GeneralMeasurement::complete(ops, labels).expect("complete by construction")
}

pub fn distinct_qubits(rng: &mut WitnessRng, n: usize) -> Vec<String> {
    let mut qs = qubits();
    if rng.random_bool(0.5) {
        qs.reverse();
    }
    qs.truncate(n);
    qs
}

pub fn gate(rng: &mut WitnessRng) -> (GateRef, Vec<String>) {
    match rng.random_range(0..5) {
        0 => (lookup_gate(&[], pick(rng, &["H", "X", "Z"])).unwrap(), distinct_qubits(rng, 1)),
        1 => (lookup_gate(&[], "CNOT").unwrap(), distinct_qubits(rng, 2)),
        2 | 3 => {
            let g = GateRef {
                name: "U1".into(),
                gate: Arc::new(UnitaryGate::new(unitary(rng, 2)).unwrap()),
            };
            (g, distinct_qubits(rng, 1))
        }
        _ => {
            let g = GateRef {
                name: "U2".into(),
                gate: Arc::new(UnitaryGate::new(unitary(rng, 4)).unwrap()),
            };
            (g, distinct_qubits(rng, 2))
        }
    }
}

/// A program measurement: single-component labels.
pub fn program_measurement(rng: &mut WitnessRng) -> (MeasRef, Vec<String>) {
    match rng.random_range(0..3) {
        0 => (lookup_measurement(&[], "M").unwrap(), distinct_qubits(rng, 1)),
        1 => {
            let k = rng.random_range(2..=3);
            let m = MeasRef {
                name: "N1".into(),
                meas: Arc::new(measurement(rng, 1, k, 1)),
            };
            (m, distinct_qubits(rng, 1))
        }
        _ => {
            let k = rng.random_range(2..=4);
            let m = MeasRef {
                name: "N2".into(),
                meas: Arc::new(measurement(rng, 2, k, 1)),
            };
            (m, distinct_qubits(rng, 2))
        }
    }
}

// ---- programs ----

pub fn aexp(rng: &mut WitnessRng, vars: &[&str], depth: u32) -> AExp {
    if depth == 0 || rng.random_bool(0.5) {
        return if rng.random_bool(0.5) {
            AExp::Int(rng.random_range(0..=2))
        } else {
            AExp::var(pick(rng, vars))
        };
    }
    let a = aexp(rng, vars, depth - 1);
    let b = aexp(rng, vars, depth - 1);
    match rng.random_range(0..4) {
        0 | 1 => AExp::add(a, b),
        2 => AExp::sub(a, b),
        _ => AExp::mul(a, b),
    }
}

pub fn bexp(rng: &mut WitnessRng, vars: &[&str], depth: u32) -> BExp {
    if depth == 0 || rng.random_bool(0.4) {
        return match rng.random_range(0..6) {
            0 => BExp::True,
            1 | 2 => BExp::Leq(aexp(rng, vars, 1), aexp(rng, vars, 1)),
            _ => BExp::eq(aexp(rng, vars, 1), aexp(rng, vars, 1)),
        };
    }
    match rng.random_range(0..3) {
        0 => BExp::not(bexp(rng, vars, depth - 1)),
        1 => BExp::and(bexp(rng, vars, depth - 1), bexp(rng, vars, depth - 1)),
        _ => BExp::or(bexp(rng, vars, depth - 1), bexp(rng, vars, depth - 1)),
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ProgramShape {
    pub loops: bool,
    pub abort: bool,
    pub max_len: usize,
    pub depth: u32,
}

impl ProgramShape {
    pub const LOOPING: ProgramShape = ProgramShape {
        loops: true,
        abort: true,
        max_len: 4,
        depth: 2,
    };
    pub const LOOP_FREE: ProgramShape = ProgramShape {
        loops: false,
        abort: false,
        max_len: 4,
        depth: 2,
    };
}

fn atom(rng: &mut WitnessRng, shape: ProgramShape) -> Com {
    let roll = rng.random_range(0..if shape.abort { 21 } else { 20 });
    match roll {
        0..=1 => Com::Skip,
        2..=5 => Com::Assign(pick(rng, &["x", "y"]).to_string(), aexp(rng, &VARS, 1)),
        6..=7 => Com::QInit(pick(rng, &QUBITS).to_string()),
        8..=13 => {
            let (g, qs) = gate(rng);
            Com::QUnit(g, qs)
        }
        14..=19 => {
            let (m, qs) = program_measurement(rng);
            Com::QMeas(pick(rng, &["m", "m", "x"]).to_string(), m, qs)
        }
        _ => Com::Abort,
    }
}

/// Random command over `QUBITS` and `VARS`. Loops are bounded by a counter
/// `k<depth>` that nothing else writes.
pub fn com(rng: &mut WitnessRng, shape: ProgramShape) -> Com {
    let len = rng.random_range(1..=shape.max_len);
    Com::seq_all((0..len).map(|_| stmt(rng, shape, shape.depth)))
}

fn stmt(rng: &mut WitnessRng, shape: ProgramShape, depth: u32) -> Com {
    if depth == 0 {
        return atom(rng, shape);
    }
    let inner = ProgramShape {
        max_len: 2,
        ..shape
    };
    let block = |rng: &mut WitnessRng| {
        let len = rng.random_range(1..=inner.max_len);
        Com::seq_all((0..len).map(|_| stmt(rng, inner, depth - 1)).collect::<Vec<_>>())
    };
    match rng.random_range(0..10) {
        0..=1 => Com::if_then_else(bexp(rng, &VARS, 1), block(rng), block(rng)),
        2 if shape.loops => {
            let k = format!("k{depth}");
            let bound = rng.random_range(0..=2);
            let guard = BExp::and(BExp::Leq(AExp::var(&k), AExp::Int(bound)), bexp(rng, &VARS, 1));
            let body = Com::seq(block(rng), Com::Assign(k.clone(), AExp::add(AExp::var(&k), AExp::Int(1))));
            Com::seq(Com::Assign(k, AExp::Int(0)), Com::while_do(guard, body))
        }
        _ => atom(rng, shape),
    }
}

// ---- assertions ----

pub fn state_expr(rng: &mut WitnessRng, vars: &[&str], depth: u32) -> StateExpr {
    if depth == 0 || rng.random_bool(0.45) {
        return match rng.random_range(0..3) {
            0 => StateExpr::Int(rng.random_range(0..=2)),
            _ => StateExpr::var(pick(rng, vars)),
        };
    }
    match rng.random_range(0..5) {
        0 | 1 => StateExpr::ind(state_assn(rng, vars, depth - 1)),
        2 => StateExpr::add(state_expr(rng, vars, depth - 1), state_expr(rng, vars, depth - 1)),
        3 => StateExpr::sub(state_expr(rng, vars, depth - 1), state_expr(rng, vars, depth - 1)),
        _ => StateExpr::mul(state_expr(rng, vars, depth - 1), state_expr(rng, vars, depth - 1)),
    }
}

pub fn state_assn(rng: &mut WitnessRng, vars: &[&str], depth: u32) -> StateAssn {
    if depth == 0 || rng.random_bool(0.4) {
        return match rng.random_range(0..8) {
            0 => StateAssn::Bool(rng.random_bool(0.5)),
            1 | 2 => StateAssn::cmp(state_expr(rng, vars, 1), CmpOp::Le, state_expr(rng, vars, 1)),
            3 => StateAssn::cmp(state_expr(rng, vars, 1), CmpOp::Lt, state_expr(rng, vars, 1)),
            _ => StateAssn::eq(StateExpr::var(pick(rng, vars)), StateExpr::Int(rng.random_range(0..=1))),
        };
    }
    match rng.random_range(0..5) {
        0 => StateAssn::not(state_assn(rng, vars, depth - 1)),
        1 => StateAssn::and(state_assn(rng, vars, depth - 1), state_assn(rng, vars, depth - 1)),
        2 => StateAssn::or(state_assn(rng, vars, depth - 1), state_assn(rng, vars, depth - 1)),
        3 => StateAssn::implies(state_assn(rng, vars, depth - 1), state_assn(rng, vars, depth - 1)),
        _ => {
            let mut inner = vars.to_vec();
            inner.push("z");
            StateAssn::Quant {
                q: if rng.random_bool(0.5) { Quant::Forall } else { Quant::Exists },
                var: "z".into(),
                lo: 0,
                hi: rng.random_range(0..=1),
                body: Box::new(state_assn(rng, &inner, depth - 1)),
            }
        }
    }
}

/// Which names a generated expression may bind with `E_{ȳ∼M}`.
#[derive(Debug, Clone, Copy)]
pub struct Binders {
    pub allow_x: bool,
    /// Also use a named measurement `K`; different occurrences may differ.
    pub named: bool,
}

impl Binders {
    pub const ANY: Binders = Binders {
        allow_x: true,
        named: true,
    };
    pub const NO_X: Binders = Binders {
        allow_x: false,
        named: true,
    };
    pub const ANONYMOUS: Binders = Binders {
        allow_x: true,
        named: false,
    };
}

fn mexpect(rng: &mut WitnessRng, vars: &[&str], binders: Binders) -> DistExpr {
    let arity = rng.random_range(1..=2);
    let width = rng.random_range(1..=2);
    let k = rng.random_range(2..=4);
    let meas = measurement(rng, arity, k, width);
    let mut pool = vec!["w", "v"];
    if binders.allow_x {
        pool.push("x");
    }
    let mut bound = Vec::new();
    while bound.len() < width {
        let b = *pick(rng, &pool);
        if !bound.contains(&b) {
            bound.push(b);
        }
    }
    let mut scope = vars.to_vec();
    scope.extend(bound.iter().copied());
    let meas = if binders.named && rng.random_bool(0.2) {
        MeasSpec::named("K", Arc::new(meas))
    } else {
        MeasSpec::anonymous(meas)
    };
    DistExpr::MExpect {
        vars: bound.iter().map(|s| s.to_string()).collect(),
        meas,
        qubits: distinct_qubits(rng, arity),
        body: state_expr(rng, &scope, 2),
    }
}

/// Operator-valued expression.
pub fn op_expr(rng: &mut WitnessRng, vars: &[&str], binders: Binders, depth: u32) -> DistExpr {
    if depth == 0 || rng.random_bool(0.5) {
        return if rng.random_bool(0.5) {
            DistExpr::Expect(state_expr(rng, vars, 2))
        } else {
            mexpect(rng, vars, binders)
        };
    }
    match rng.random_range(0..3) {
        0 => DistExpr::add(op_expr(rng, vars, binders, depth - 1), op_expr(rng, vars, binders, depth - 1)),
        1 => DistExpr::sub(op_expr(rng, vars, binders, depth - 1), op_expr(rng, vars, binders, depth - 1)),
        _ => DistExpr::scale(rng.random_range(-2.0..2.0), op_expr(rng, vars, binders, depth - 1)),
    }
}

pub fn scalar_expr(rng: &mut WitnessRng, vars: &[&str], binders: Binders, depth: u32) -> DistExpr {
    if depth == 0 || rng.random_bool(0.5) {
        return if rng.random_bool(0.3) {
            DistExpr::Num(rng.random_range(0.0..1.0))
        } else {
            DistExpr::trace(op_expr(rng, vars, binders, 1))
        };
    }
    match rng.random_range(0..3) {
        0 => DistExpr::add(scalar_expr(rng, vars, binders, depth - 1), scalar_expr(rng, vars, binders, depth - 1)),
        1 => DistExpr::sub(scalar_expr(rng, vars, binders, depth - 1), scalar_expr(rng, vars, binders, depth - 1)),
        _ => DistExpr::scale(rng.random_range(-2.0..2.0), scalar_expr(rng, vars, binders, depth - 1)),
    }
}

/// Either kind, for the expression-level substitution lemmas.
pub fn dist_expr(rng: &mut WitnessRng, binders: Binders) -> DistExpr {
    if rng.random_bool(0.6) {
        op_expr(rng, &VARS, binders, 2)
    } else {
        scalar_expr(rng, &VARS, binders, 2)
    }
}

fn comparison(rng: &mut WitnessRng, vars: &[&str], binders: Binders) -> DistAssn {
    let op = *pick(rng, &[CmpOp::Le, CmpOp::Le, CmpOp::Lt, CmpOp::Eq]);
    match rng.random_range(0..4) {
        // Often true: a weighted expectation against its upper bound.
        0 => {
            let psi = state_assn(rng, vars, 1);
            DistAssn::cmp(DistExpr::prob(psi), CmpOp::Le, DistExpr::prob(StateAssn::Bool(true)))
        }
        1 => DistAssn::cmp(
            DistExpr::trace(op_expr(rng, vars, binders, 1)),
            op,
            DistExpr::Num(rng.random_range(0.0..1.0)),
        ),
        2 => DistAssn::cmp(op_expr(rng, vars, binders, 1), op, op_expr(rng, vars, binders, 1)),
        _ => DistAssn::cmp(scalar_expr(rng, vars, binders, 1), op, scalar_expr(rng, vars, binders, 1)),
    }
}

/// An assertion without `⊕`.
pub fn plain_assn(rng: &mut WitnessRng, vars: &[&str], binders: Binders, depth: u32) -> DistAssn {
    if depth == 0 || rng.random_bool(0.35) {
        return match rng.random_range(0..5) {
            0 | 1 => DistAssn::boxed(state_assn(rng, vars, 2)),
            _ => comparison(rng, vars, binders),
        };
    }
    match rng.random_range(0..5) {
        0 => DistAssn::not(plain_assn(rng, vars, binders, depth - 1)),
        1 => DistAssn::and(plain_assn(rng, vars, binders, depth - 1), plain_assn(rng, vars, binders, depth - 1)),
        2 => DistAssn::or(plain_assn(rng, vars, binders, depth - 1), plain_assn(rng, vars, binders, depth - 1)),
        3 => DistAssn::implies(plain_assn(rng, vars, binders, depth - 1), plain_assn(rng, vars, binders, depth - 1)),
        _ => quantified(rng, vars, binders, depth, plain_assn),
    }
}

fn quantified(
    rng: &mut WitnessRng,
    vars: &[&str],
    binders: Binders,
    depth: u32,
    body: fn(&mut WitnessRng, &[&str], Binders, u32) -> DistAssn,
) -> DistAssn {
    let mut inner = vars.to_vec();
    inner.push("z");
    DistAssn::Quant {
        q: if rng.random_bool(0.5) { Quant::Forall } else { Quant::Exists },
        var: "z".into(),
        lo: 0,
        hi: rng.random_range(0..=1),
        body: Box::new(body(rng, &inner, binders, depth - 1)),
    }
}

/// Guarded fragment: every split is `(P1 ∧ □b) ⊕ (P2 ∧ □¬b)` decided by
/// `b`, and negative positions hold no split. On this fragment the split
/// is determined by the support, so evaluation never guesses.
pub fn guarded_assn(rng: &mut WitnessRng, vars: &[&str], binders: Binders, depth: u32) -> DistAssn {
    if depth == 0 || rng.random_bool(0.3) {
        return plain_assn(rng, vars, binders, 1);
    }
    match rng.random_range(0..6) {
        0 | 1 => {
            let guard_vars: Vec<&str> = vars.iter().copied().filter(|v| *v != "m").collect();
            let b = state_assn(rng, &guard_vars, 1);
            let l = guarded_assn(rng, vars, binders, depth - 1);
            let r = guarded_assn(rng, vars, binders, depth - 1);
            DistAssn::oplus(
                DistAssn::and(l, DistAssn::boxed(b.clone())),
                DistAssn::and(r, DistAssn::boxed(StateAssn::not(b.clone()))),
                Some(b),
            )
        }
        2 => DistAssn::and(guarded_assn(rng, vars, binders, depth - 1), guarded_assn(rng, vars, binders, depth - 1)),
        3 => DistAssn::or(guarded_assn(rng, vars, binders, depth - 1), guarded_assn(rng, vars, binders, depth - 1)),
        4 => DistAssn::implies(plain_assn(rng, vars, binders, depth - 1), guarded_assn(rng, vars, binders, depth - 1)),
        _ => quantified(rng, vars, binders, depth, guarded_assn),
    }
}

pub fn povd_close(a: &Povd, b: &Povd) -> bool {
    a.approx_eq(b, TOL)
}

/// Counts for one randomized property.
#[derive(Debug, Default, Clone, Copy)]
pub struct Tally {
    pub cases: usize,
    pub failures: usize,
    pub skipped: usize,
}

impl Tally {
    pub fn record(&mut self, ok: bool) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
        }
    }
}

//! One PASS/FAIL line per acceptance criterion.

mod common;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use common::{Binders, ProgramShape, Tally, TOL};
use qimp_core::assertlang::{
    box_holds, compare, eval_dist_expr, holds, CmpOp, DistAssn, DistExpr, DistValue, FreshVars, MeasSpec,
    StateAssn, StateExpr, Truth,
};
use qimp_core::densem::{denote, Denoter};
use qimp_core::Error;
use qimp_core::lang::{parse_program, Com, Program};
use qimp_core::opsem::{run, run_com, step_in, RunOptions};
use qimp_core::qmath::{CMatrix, GeneralMeasurement, PartialDensityOp};
use qimp_core::state::{quantum, ClassicalState, Configuration, Povd};
use qimp_core::witness::{basis_witness, random_witnesses, WitnessOptions, WitnessRng};
use qimp_core::wp::{check_triple, pc, simplify_assertion, subst_assign, subst_f, subst_g, subst_h, CheckMode, Triple, Verdict};
use rand::Rng;

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../programs").join(name)
}

fn load(name: &str) -> Program {
    parse_program(&std::fs::read_to_string(corpus(name)).unwrap()).unwrap()
}

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn values_close(a: &DistValue, b: &DistValue) -> bool {
    match (a, b) {
        (DistValue::Scalar(x), DistValue::Scalar(y)) => (x - y).abs() <= TOL,
        (DistValue::Op(x), DistValue::Op(y)) => x.approx_eq(y, TOL),
        _ => false,
    }
}

fn bits(sigma: &ClassicalState, names: &[&str]) -> String {
    names.iter().map(|n| sigma.get(n).to_string()).collect()
}

// 1
fn superdense_coding() -> Outcome {
    let prog = load("sc.qimp");
    let mut good = 0;
    let mut rows = Vec::new();
    for (x0, x1) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        let sigma = ClassicalState::from_pairs([("x0", x0), ("x1", x1)]);
        let init = basis_witness(&prog.qubits, sigma, 0).unwrap();
        let res = run(&prog, &init, 1000).unwrap();
        let entries: Vec<_> = res.terminal.iter().collect();
        let expected = PartialDensityOp::basis(4, (2 * x0 + x1) as usize);
        let ok = entries.len() == 1 && {
            let (s, rho) = entries[0];
            s.get("y0") == x0 && s.get("y1") == x1 && rho.matrix().approx_eq(expected.matrix(), TOL)
        };
        if ok {
            good += 1;
            let (s, _) = entries[0];
            rows.push(format!("(nil, {}, [|{x0}{x1}>])", bits(s, &["x0", "x1", "y0", "y1"])));
        }
    }
    outcome(good == 4, format!("{good}/4 cases; {}", rows.join(" ")))
}

fn corpus_cases(n: usize, seed: u64) -> Vec<(Com, Povd, WitnessRng)> {
    let mut rng = common::rng(seed);
    (0..n)
        .map(|_| {
            let c = common::com(&mut rng, ProgramShape::LOOPING);
            let mu = common::povd(&mut rng);
            let sub = common::rng(rng.random());
            (c, mu, sub)
        })
        .collect()
}

// 2
fn semantics_agree() -> Outcome {
    let mut t = Tally::default();
    let mut mass = 0.0;
    for (c, mu, _) in corpus_cases(250, 2) {
        let ok = (|| -> qimp_core::Result<bool> {
            let ran = run_com(&c, &mu, RunOptions { fuel: 10_000, trace: false })?;
            let mut d = Denoter::default();
            let den = d.denote(&c, &mu)?;
            mass += den.total_mass();
            Ok(d.converged() && ran.residual_mass.abs() <= TOL && common::povd_close(&den, &ran.terminal))
        })()
        .unwrap_or(false);
        t.record(ok);
    }
    outcome(
        t.failures == 0 && t.cases >= 200,
        format!("{} programs, {} mismatches, mean terminal mass {:.3}", t.cases, t.failures, mass / t.cases as f64),
    )
}

// 3
fn linearity_and_composition() -> Outcome {
    let mut lin = Tally::default();
    let mut comp = Tally::default();
    for (c, mu, mut rng) in corpus_cases(250, 3) {
        let nu = common::povd(&mut rng);
        let (a, b) = (mu.scale(0.5), nu.scale(0.5));
        let ok = (|| -> qimp_core::Result<bool> {
            let whole = denote(&c, &a.add(&b)?)?;
            let parts = denote(&c, &a)?.add_unbounded(&denote(&c, &b)?)?;
            Ok(common::povd_close(&whole, &parts))
        })()
        .unwrap_or(false);
        lin.record(ok);

        let c1 = common::com(&mut rng, ProgramShape::LOOPING);
        let ok = (|| -> qimp_core::Result<bool> {
            let seq = denote(&Com::seq(c.clone(), c1.clone()), &mu)?;
            let stepwise = denote(&c1, &denote(&c, &mu)?)?;
            Ok(common::povd_close(&seq, &stepwise))
        })()
        .unwrap_or(false);
        comp.record(ok);
    }
    outcome(
        lin.failures == 0 && comp.failures == 0 && lin.cases >= 200,
        format!(
            "linearity {}/{} ok, composition {}/{} ok",
            lin.cases - lin.failures,
            lin.cases,
            comp.cases - comp.failures,
            comp.cases
        ),
    )
}

fn lhs(p: DistAssn) -> DistExpr {
    match p {
        DistAssn::Cmp(l, _, _) => l,
        other => panic!("expected a comparison, got {other}"),
    }
}

type Transform<'a> = Box<dyn Fn(&DistAssn, &mut FreshVars) -> qimp_core::Result<DistAssn> + 'a>;

struct SubstStats {
    eq: Tally,
    imp: Tally,
    antecedent_true: usize,
}

/// Clause (i) as an equality of values and clause (ii) as an implication.
fn subst_battery(
    seed: u64,
    n: usize,
    binders: Binders,
    mut instance: impl FnMut(&mut WitnessRng) -> (Com, Transform<'static>),
) -> SubstStats {
    let mut rng = common::rng(seed);
    let mut s = SubstStats {
        eq: Tally::default(),
        imp: Tally::default(),
        antecedent_true: 0,
    };
    for _ in 0..n {
        let (c, transform) = instance(&mut rng);
        let mu = common::povd(&mut rng);
        let after = denote(&c, &mu).unwrap();

        let r = common::dist_expr(&mut rng, binders);
        let ok = (|| -> qimp_core::Result<bool> {
            let wrapped = DistAssn::cmp(r.clone(), CmpOp::Eq, r.clone());
            let tr = lhs(transform(&wrapped, &mut FreshVars::for_assn(&wrapped))?);
            Ok(values_close(&eval_dist_expr(&tr, &mu)?, &eval_dist_expr(&r, &after)?))
        })()
        .unwrap_or(false);
        s.eq.record(ok);

        let p = common::guarded_assn(&mut rng, &common::VARS, binders, 2);
        let ok = (|| -> qimp_core::Result<bool> {
            let tp = transform(&p, &mut FreshVars::for_assn(&p))?;
            if holds(&tp, &mu)? == Truth::True {
                s.antecedent_true += 1;
                return Ok(holds(&p, &after)? == Truth::True);
            }
            Ok(true)
        })()
        .unwrap_or(false);
        s.imp.record(ok);
    }
    s
}

// 4
fn substitution_lemmas() -> Outcome {
    const N: usize = 600;
    let any = Binders::ANY;
    let h = subst_battery(41, N, any, |rng| {
        let q = common::distinct_qubits(rng, 1).remove(0);
        let qc = q.clone();
        (Com::QInit(q), Box::new(move |p, f| subst_h(p, &qc, f)))
    });
    let g = subst_battery(42, N, any, |rng| {
        let (gate, qs) = common::gate(rng);
        let (u, qc) = (gate.gate.clone(), qs.clone());
        (Com::QUnit(gate, qs), Box::new(move |p, f| subst_g(p, &u, &qc, f)))
    });
    let a = subst_battery(43, N, Binders::NO_X, |rng| {
        let x = ["x", "y", "m"][rng.random_range(0..3)].to_string();
        let e = common::aexp(rng, &["x", "y", "m", "w"], 2);
        let (xc, ec) = (x.clone(), e.clone());
        (Com::Assign(x, e), Box::new(move |p, f| subst_assign(p, &ec, &xc, f)))
    });
    let m = subst_battery(44, N, any, |rng| {
        let (meas, qs) = common::program_measurement(rng);
        let x = ["x", "m"][rng.random_range(0..2)].to_string();
        let (xc, mc, qc) = (x.clone(), meas.meas.clone(), qs.clone());
        (
            Com::QMeas(x, meas, qs),
            Box::new(move |p, f| subst_f(p, &xc, &mc, None, &qc, f)),
        )
    });
    let parts = [("h", &h), ("g", &g), ("assign", &a), ("f", &m)];
    let ok = parts
        .iter()
        .all(|(_, s)| s.eq.failures == 0 && s.imp.failures == 0 && s.eq.cases >= 500 && s.imp.cases >= 500);
    let detail = parts
        .iter()
        .map(|(name, s)| {
            format!(
                "{name}: (i) {}/{} (ii) {}/{} [{} with true antecedent]",
                s.eq.cases - s.eq.failures,
                s.eq.cases,
                s.imp.cases - s.imp.failures,
                s.imp.cases,
                s.antecedent_true
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    outcome(ok, detail)
}

// 5
fn pc_soundness() -> Outcome {
    let mut rng = common::rng(5);
    let mut t = Tally::default();
    let mut fired = 0;
    let mut errors = 0;
    while t.cases < 600 {
        let c = common::com(&mut rng, ProgramShape::LOOP_FREE);
        let p = common::guarded_assn(&mut rng, &common::VARS, Binders::NO_X, 2);
        let mu = common::povd(&mut rng);
        let pre = match pc(&c, &p) {
            Ok(pre) => pre,
            // An assignment to a variable that a later measurement binds has
            // no precondition; such instances are outside the domain.
            Err(Error::Capture(_)) => {
                t.skipped += 1;
                continue;
            }
            Err(_) => {
                errors += 1;
                t.record(false);
                continue;
            }
        };
        let res = (|| -> qimp_core::Result<bool> {
            if holds(&pre, &mu)? != Truth::True {
                return Ok(true);
            }
            fired += 1;
            Ok(holds(&p, &denote(&c, &mu)?)? == Truth::True)
        })();
        match res {
            Ok(ok) => t.record(ok),
            Err(_) => {
                errors += 1;
                t.record(false);
            }
        }
    }
    outcome(
        t.failures == 0,
        format!(
            "{} instances, {} violations, {} errors, {} with true precondition, {} undefined by capture",
            t.cases,
            t.failures - errors,
            errors,
            fired,
            t.skipped
        ),
    )
}

/// 1-based `(row, col)` of the single unit entry of each operator.
const SIMPLIFIED: [(&str, [(usize, usize); 4]); 4] = [
    ("x0x1=11", [(4, 1), (4, 3), (4, 2), (4, 4)]),
    ("x0x1=10", [(3, 1), (3, 3), (3, 2), (3, 4)]),
    ("x0x1=01", [(2, 1), (2, 3), (2, 2), (2, 4)]),
    ("x0x1=00", [(1, 1), (1, 3), (1, 2), (1, 4)]),
];

fn unit_at(m: &CMatrix, (r, c): (usize, usize)) -> bool {
    let mut target = CMatrix::zeros(m.rows(), m.cols());
    target[(r - 1, c - 1)] = 1.0.into();
    m.approx_eq(&target, TOL)
}

fn leaf_measurement(p: &DistAssn) -> Option<&GeneralMeasurement> {
    let DistAssn::And(l, _) = p else { return None };
    let DistAssn::Cmp(
        DistExpr::MExpect {
            meas: MeasSpec { meas: a, .. },
            ..
        },
        CmpOp::Eq,
        DistExpr::MExpect {
            meas: MeasSpec { meas: b, .. },
            ..
        },
    ) = &**l
    else {
        return None;
    };
    (a == b).then_some(&**a)
}

fn split(p: &DistAssn) -> Option<(&DistAssn, &DistAssn)> {
    match p {
        DistAssn::OPlus { left, right, .. } => Some((left, right)),
        _ => None,
    }
}

fn and_left(p: &DistAssn) -> Option<&DistAssn> {
    match p {
        DistAssn::And(l, _) => Some(l),
        _ => None,
    }
}

// 6
fn measurement_simplification() -> Outcome {
    let prog = load("sc.qimp");
    let post = qimp_core::assertlang::parse_assertion("box(x0 = y0 && x1 = y1)", &prog.measurements).unwrap();
    let pre = simplify_assertion(&pc(&prog.body, &post).unwrap()).unwrap();
    let leaves = (|| {
        let (x1_set, x1_clear) = split(&pre)?;
        let (m10, m8) = split(and_left(x1_set)?)?;
        let (m9, m7) = split(and_left(x1_clear)?)?;
        Some([
            leaf_measurement(m10)?,
            leaf_measurement(m9)?,
            leaf_measurement(m8)?,
            leaf_measurement(m7)?,
        ])
    })();
    let Some(leaves) = leaves else {
        return outcome(false, "precondition does not have the expected shape");
    };
    let mut matched = Vec::new();
    for (m, (name, positions)) in leaves.iter().zip(SIMPLIFIED) {
        if m.len() == 4 && m.ops().iter().zip(positions).all(|(op, pos)| unit_at(op, pos)) {
            matched.push(name);
        }
    }
    outcome(matched.len() == 4, format!("matched {}", matched.join(", ")))
}

// 7
fn triple_check() -> Outcome {
    let good = Triple::load(&corpus("sc.qhl")).unwrap();
    let wrong = Triple::load(&corpus("sc_wrong.qhl")).unwrap();
    let mut witnesses = Vec::new();
    for name in ["sc_00", "sc_01", "sc_10", "sc_11"] {
        let text = std::fs::read_to_string(corpus(&format!("{name}.json"))).unwrap();
        witnesses.push((name.to_string(), Povd::from_json_str(&text).unwrap()));
    }
    let vars: Vec<String> = good.program.classical_vars().into_iter().collect();
    witnesses.extend(random_witnesses(7, 50, &good.program.qubits, &vars, &WitnessOptions::default()).unwrap());

    let mut notes = Vec::new();
    let mut ok = true;
    for mode in [CheckMode::Semantic, CheckMode::Pc] {
        let r = check_triple(&good, &witnesses, mode).unwrap();
        ok &= r.overall == Verdict::Pass && r.summary.pass == 54;
        notes.push(format!("{mode:?}: {}/{} pass", r.summary.pass, r.summary.total));
    }
    let r = check_triple(&wrong, &witnesses, CheckMode::Both).unwrap();
    let concrete = r.witnesses.iter().find_map(|w| w.counterexample.as_ref()).is_some_and(|ce| {
        let start = Povd::from_json(&ce["witness"]).unwrap();
        let end = Povd::from_json(&ce["terminal"]).unwrap();
        common::povd_close(&denote(&wrong.program.body, &start).unwrap(), &end)
            && holds(&wrong.post, &end).unwrap() == Truth::False
    });
    ok &= r.overall == Verdict::Fail && concrete;
    notes.push(format!(
        "wrong post: {:?} with {} failing witnesses, counterexample replays: {concrete}",
        r.overall, r.summary.fail
    ));
    outcome(ok, notes.join("; "))
}

fn intermediate_values_valid(c: &Com, mu: &Povd) -> qimp_core::Result<bool> {
    let reg = mu.qubits().to_vec();
    let mut live: Vec<Configuration> = mu
        .iter()
        .map(|(s, r)| Configuration::new(c.clone(), s.clone(), r.clone()))
        .collect();
    let mut rounds = 0;
    while !live.is_empty() && rounds < 10_000 {
        rounds += 1;
        let mut next = Vec::new();
        for cfg in live {
            let before = cfg.rho.trace();
            let succ = step_in(&cfg, &reg)?.successors;
            let after: f64 = succ.iter().map(|s| s.rho.trace()).sum();
            if after > before + TOL || succ.iter().any(|s| s.rho.check().is_err()) {
                return Ok(false);
            }
            next.extend(succ.into_iter().filter(|s| s.command != Com::Nil));
        }
        live = next;
    }
    let mut acc = mu.clone();
    for part in c.flatten_seq() {
        acc = denote(part, &acc)?;
        if acc.check_invariants().is_err() {
            return Ok(false);
        }
    }
    Ok(true)
}

// 8
fn conservation_and_structure() -> Outcome {
    const N: usize = 1000;
    let mut rng = common::rng(8);
    let mut conservation = Tally::default();
    let mut invariants = Tally::default();
    let mut box_sugar = Tally::default();
    let mut decomposition = Tally::default();
    let reg = common::qubits();

    for _ in 0..N {
        // Branch masses of a measurement add up to the input mass.
        let mu = common::povd(&mut rng);
        let (sigma, rho) = mu.iter().next().map(|(s, r)| (s.clone(), r.clone())).unwrap();
        let (meas, qs) = common::program_measurement(&mut rng);
        let ok = (|| -> qimp_core::Result<bool> {
            let branches = quantum::measure(rho.matrix(), &meas.meas, &reg, &qs)?;
            let total: f64 = branches.iter().map(|(_, b)| b.trace().re).sum();
            let cfg = Configuration::new(Com::QMeas("m".into(), meas.clone(), qs.clone()), sigma.clone(), rho.clone());
            let stepped: f64 = step_in(&cfg, &reg)?.successors.iter().map(|s| s.rho.trace()).sum();
            Ok((total - rho.trace()).abs() <= TOL && (stepped - rho.trace()).abs() <= TOL)
        })()
        .unwrap_or(false);
        conservation.record(ok);

        let c = common::com(&mut rng, ProgramShape::LOOPING);
        invariants.record(intermediate_values_valid(&c, &mu).unwrap_or(false));

        // The three box equivalences.
        let psi = common::state_assn(&mut rng, &common::VARS, 2);
        let b = common::state_assn(&mut rng, &common::VARS, 1);
        let ok = (|| -> qimp_core::Result<bool> {
            let boxed = box_holds(&psi, &mu)?;
            let plain = compare(
                &eval_dist_expr(&DistExpr::prob(psi.clone()), &mu)?,
                CmpOp::Eq,
                &eval_dist_expr(&DistExpr::prob(StateAssn::Bool(true)), &mu)?,
            )?;
            let (m, qs) = {
                let arity = rng.random_range(1..=2);
                let k = rng.random_range(2..=4);
                (common::measurement(&mut rng, arity, k, 1), common::distinct_qubits(&mut rng, arity))
            };
            let mexp = |body: StateAssn| DistExpr::MExpect {
                vars: vec!["w".into()],
                meas: MeasSpec::anonymous(m.clone()),
                qubits: qs.clone(),
                body: StateExpr::ind(body),
            };
            let measured = compare(
                &eval_dist_expr(&mexp(psi.clone()), &mu)?,
                CmpOp::Eq,
                &eval_dist_expr(&mexp(StateAssn::Bool(true)), &mu)?,
            )?;
            let halves = |guard| {
                DistAssn::oplus(
                    DistAssn::boxed(StateAssn::and(psi.clone(), b.clone())),
                    DistAssn::boxed(StateAssn::and(psi.clone(), StateAssn::not(b.clone()))),
                    guard,
                )
            };
            let want = if boxed { Truth::True } else { Truth::False };
            Ok(plain == boxed
                && measured == boxed
                && holds(&halves(Some(b.clone())), &mu)? == want
                && holds(&halves(None), &mu)? == want)
        })()
        .unwrap_or(false);
        box_sugar.record(ok);

        let guard = common::bexp(&mut rng, &common::VARS, 2);
        let ok = (|| -> qimp_core::Result<bool> {
            let parts = mu.restrict(&guard)?.add(&mu.restrict(&qimp_core::lang::BExp::not(guard.clone()))?)?;
            Ok(common::povd_close(&parts, &mu))
        })()
        .unwrap_or(false);
        decomposition.record(ok);
    }
    let parts = [
        ("mass conservation", conservation),
        ("invariants", invariants),
        ("box sugar", box_sugar),
        ("decomposition", decomposition),
    ];
    let ok = parts.iter().all(|(_, t)| t.failures == 0 && t.cases >= 1000);
    let detail = parts
        .iter()
        .map(|(name, t)| format!("{name} {}/{}", t.cases - t.failures, t.cases))
        .collect::<Vec<_>>()
        .join(", ");
    outcome(ok, detail)
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("superdense coding end to end", superdense_coding),
        ("operational and denotational semantics agree", semantics_agree),
        ("linearity and sequential composition", linearity_and_composition),
        ("substitution lemmas", substitution_lemmas),
        ("precondition soundness", pc_soundness),
        ("simplified measurements of the superdense precondition", measurement_simplification),
        ("triple check", triple_check),
        ("conservation and structure", conservation_and_structure),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = f();
        let tag = if o.ok { "PASS" } else { "FAIL" };
        if !o.ok {
            failed += 1;
        }
        println!("{tag} {} {name}: {} ({:.2}s)", i + 1, o.detail, start.elapsed().as_secs_f64());
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}

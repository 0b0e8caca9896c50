use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::json;

use qimp_core::assertlang::{parse_assertion, pretty_assn, DistAssn};
use qimp_core::densem::{DenoteOptions, Denoter, DEFAULT_LOOP_CAP};
use qimp_core::lang::{parse_program, pretty, Program};
use qimp_core::opsem::{run_com, RunOptions, TraceNode, DEFAULT_FUEL};
use qimp_core::qmath::{literal::format_fixed, GeneralMeasurement, PartialDensityOp};
use qimp_core::state::{ClassicalState, Povd};
use qimp_core::witness::{random_witnesses, WitnessOptions};
use qimp_core::wp::{check_triple, measurements_of, pc, simplify_assertion, CheckMode, Triple};
use qimp_core::EPS_NUM;

/// Exit status for bad usage, unreadable input and validation failures.
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "qimp", version, about = "Run, denote and verify QIMP programs")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Execute a program with the small-step semantics.
    Run {
        program: PathBuf,
        /// Initial distribution (JSON). Defaults to |0..0> with the
        /// classical values from --classical.
        #[arg(long, conflicts_with = "classical")]
        povd: Option<PathBuf>,
        /// Initial classical state, e.g. `x0=1,x1=0`.
        #[arg(long, value_delimiter = ',')]
        classical: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: u64,
        /// Print the execution tree.
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        json: bool,
    },
    /// Compute the denotation of a program on a distribution.
    Denote {
        program: PathBuf,
        povd: PathBuf,
        #[arg(long, default_value_t = DEFAULT_LOOP_CAP)]
        loop_cap: u64,
        #[arg(long, default_value_t = EPS_NUM)]
        loop_tol: f64,
    },
    /// Compute the precondition of an assertion through a loop-free program.
    Pc {
        program: PathBuf,
        /// Assertion file, or the assertion text itself.
        assertion: String,
        /// Drop zero operators from anonymous measurements and print them.
        #[arg(long)]
        simplify: bool,
        #[arg(long)]
        json: bool,
    },
    /// Check a `.qhl` triple on witness distributions.
    Check {
        triple: PathBuf,
        #[arg(long = "witness")]
        witnesses: Vec<PathBuf>,
        /// Number of seeded random witnesses.
        #[arg(long, default_value_t = 0)]
        random: usize,
        /// Expected register size; rejected if the program disagrees.
        #[arg(long)]
        qubits: Option<usize>,
        /// Overridden by QIMP_SEED.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "both")]
        mode: String,
    },
    /// Parse a program (or a `.qassn` assertion) and print it back.
    Parse {
        file: PathBuf,
        /// Parse as an assertion whatever the extension.
        #[arg(long)]
        assertion: bool,
        /// Program whose measurement names the assertion may use.
        #[arg(long)]
        program: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn dispatch(cmd: Cmd) -> Result<u8> {
    match cmd {
        Cmd::Run {
            program,
            povd,
            classical,
            fuel,
            trace,
            json,
        } => cmd_run(&program, povd.as_deref(), &classical, fuel, trace, json),
        Cmd::Denote {
            program,
            povd,
            loop_cap,
            loop_tol,
        } => cmd_denote(&program, &povd, DenoteOptions { loop_cap, loop_tol }),
        Cmd::Pc {
            program,
            assertion,
            simplify,
            json,
        } => cmd_pc(&program, &assertion, simplify, json),
        Cmd::Check {
            triple,
            witnesses,
            random,
            qubits,
            seed,
            mode,
        } => cmd_check(&triple, &witnesses, random, qubits, seed, &mode),
        Cmd::Parse {
            file,
            assertion,
            program,
        } => cmd_parse(&file, assertion, program.as_deref()),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_program(path: &Path) -> Result<Program> {
    let text = read(path)?;
    parse_program(&text).with_context(|| format!("{}", path.display()))
}

fn load_povd(path: &Path) -> Result<Povd> {
    Povd::from_json_str(&read(path)?).with_context(|| format!("{}", path.display()))
}

fn parse_classical(pairs: &[String]) -> Result<ClassicalState> {
    let mut sigma = ClassicalState::new();
    for p in pairs.iter().filter(|p| !p.trim().is_empty()) {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| anyhow!("expected `name=value`, got `{p}`"))?;
        let v: i64 = v.trim().parse().with_context(|| format!("bad value in `{p}`"))?;
        sigma.set(k.trim(), v);
    }
    Ok(sigma)
}

fn render_povd(mu: &Povd) -> String {
    if mu.is_empty() {
        return "  ε".into();
    }
    mu.iter()
        .map(|(s, r)| format!("  {s} -> {}", format_fixed(r.matrix())))
        .collect::<Vec<_>>()
        .join("\n")
}

fn render_trace(nodes: &[TraceNode], depth: usize, out: &mut String) {
    for n in nodes {
        out.push_str(&"  ".repeat(depth));
        out.push_str(&format!("({}, {}, {})\n", n.command, n.cstate, n.rho));
        for e in &n.eval {
            out.push_str(&"  ".repeat(depth + 1));
            out.push_str(&format!("~ {e}\n"));
        }
        render_trace(&n.children, depth + 1, out);
    }
}

fn cmd_run(program: &Path, povd: Option<&Path>, classical: &[String], fuel: u64, trace: bool, json: bool) -> Result<u8> {
    let prog = load_program(program)?;
    let init = match povd {
        Some(p) => load_povd(p)?,
        None => Povd::point(
            prog.qubits.clone(),
            parse_classical(classical)?,
            PartialDensityOp::basis(1 << prog.qubits.len(), 0),
        )?,
    };
    if init.qubits() != prog.qubits.as_slice() {
        bail!("distribution is over {:?} but the program declares {:?}", init.qubits(), prog.qubits);
    }
    let res = run_com(&prog.body, &init, RunOptions { fuel, trace })?;
    if json {
        let mut v = json!({
            "terminal": res.terminal.to_json(),
            "residual_mass": res.residual_mass,
            "steps": res.steps,
        });
        if trace {
            v["trace"] = serde_json::to_value(&res.trace_tree)?;
        }
        println!("{}", serde_json::to_string_pretty(&v)?);
        return Ok(0);
    }
    if trace {
        let mut s = String::new();
        render_trace(&res.trace_tree, 0, &mut s);
        println!("trace:\n{}", s.trim_end());
    }
    println!("terminal:\n{}", render_povd(&res.terminal));
    println!("residual mass: {:.6}", res.residual_mass);
    println!("steps: {}", res.steps);
    Ok(0)
}

fn cmd_denote(program: &Path, povd: &Path, opts: DenoteOptions) -> Result<u8> {
    let prog = load_program(program)?;
    let mu = load_povd(povd)?;
    if mu.qubits() != prog.qubits.as_slice() {
        bail!("distribution is over {:?} but the program declares {:?}", mu.qubits(), prog.qubits);
    }
    let mut d = Denoter::new(opts);
    let out = d.denote(&prog.body, &mu)?;
    let v = json!({
        "converged": d.converged(),
        "loops": d.loops,
        "result": out.to_json(),
    });
    println!("{}", serde_json::to_string_pretty(&v)?);
    Ok(0)
}

/// Reads `arg` as a file when one exists at that path, otherwise as text.
fn assertion_source(arg: &str) -> Result<String> {
    let p = Path::new(arg);
    if p.is_file() {
        read(p)
    } else {
        Ok(arg.to_string())
    }
}

fn measurement_json(m: &GeneralMeasurement) -> serde_json::Value {
    m.iter()
        .map(|(op, label)| json!({ "label": label, "matrix": format_fixed(op) }))
        .collect()
}

fn cmd_pc(program: &Path, assertion: &str, simplify: bool, json: bool) -> Result<u8> {
    let prog = load_program(program)?;
    let post = parse_assertion(&assertion_source(assertion)?, &prog.measurements)?;
    let mut pre = pc(&prog.body, &post)?;
    if simplify {
        pre = simplify_assertion(&pre)?;
    }
    let text = pretty_assn(&pre);
    let ms: Vec<&GeneralMeasurement> = if simplify { measurements_of(&pre) } else { Vec::new() };
    if json {
        let v = json!({
            "precondition": text,
            "measurements": ms.iter().map(|m| measurement_json(m)).collect::<Vec<_>>(),
        });
        println!("{}", serde_json::to_string_pretty(&v)?);
        return Ok(0);
    }
    println!("{text}");
    for (i, m) in ms.iter().enumerate() {
        println!("\nmeasurement {} ({} operators):", i + 1, m.len());
        for (op, label) in m.iter() {
            println!("  {label:?}: {}", format_fixed(op));
        }
    }
    Ok(0)
}

fn witness_vars(t: &Triple) -> Vec<String> {
    let mut vars: BTreeSet<String> = t.program.classical_vars();
    vars.extend(t.pre.fv());
    vars.extend(t.post.fv());
    vars.into_iter().collect()
}

fn seed_from_env(flag: u64) -> Result<u64> {
    match std::env::var("QIMP_SEED") {
        Ok(s) => s.trim().parse().with_context(|| format!("QIMP_SEED=`{s}` is not an integer")),
        Err(_) => Ok(flag),
    }
}

fn cmd_check(
    triple: &Path,
    witness_files: &[PathBuf],
    random: usize,
    qubits: Option<usize>,
    seed: u64,
    mode: &str,
) -> Result<u8> {
    let mode: CheckMode = mode.parse()?;
    let t = Triple::load(triple)?;
    if let Some(k) = qubits {
        if k != t.program.qubits.len() {
            bail!("--qubits {k} but the program declares {} qubits", t.program.qubits.len());
        }
    }
    let mut witnesses = Vec::new();
    for f in witness_files {
        let id = f.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        witnesses.push((id, load_povd(f)?));
    }
    if random > 0 {
        let seed = seed_from_env(seed)?;
        let vars = witness_vars(&t);
        witnesses.extend(random_witnesses(seed, random, &t.program.qubits, &vars, &WitnessOptions::default())?);
    }
    let report = check_triple(&t, &witnesses, mode)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(report.exit_code() as u8)
}

fn cmd_parse(file: &Path, as_assertion: bool, program: Option<&Path>) -> Result<u8> {
    let text = read(file)?;
    let is_assn = as_assertion || file.extension().is_some_and(|e| e == "qassn");
    if is_assn {
        let meas = match program {
            Some(p) => load_program(p)?.measurements,
            None => Vec::new(),
        };
        let a: DistAssn = parse_assertion(&text, &meas).with_context(|| format!("{}", file.display()))?;
        println!("{}", pretty_assn(&a));
    } else {
        let prog = parse_program(&text).with_context(|| format!("{}", file.display()))?;
        print!("{}", pretty(&prog));
    }
    Ok(0)
}

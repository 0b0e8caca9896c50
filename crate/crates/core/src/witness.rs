//! Seeded random initial distributions for checking triples.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::qmath::{CMatrix, PartialDensityOp, C64};
use crate::state::{ClassicalState, Povd};
use crate::Result;

pub type WitnessRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> WitnessRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone)]
pub struct WitnessOptions {
    /// At most this many classical states, and never more than 4.
    pub max_states: usize,
    /// Classical values are drawn from `0..=max_value`.
    pub max_value: i64,
    /// Total trace; `None` draws it uniformly from `(0, 1]`.
    pub mass: Option<f64>,
}

impl Default for WitnessOptions {
    fn default() -> Self {
        WitnessOptions {
            max_states: 4,
            max_value: 1,
            mass: Some(1.0),
        }
    }
}

/// A normalised vector with independent complex Gaussian entries.
pub fn random_pure_state(rng: &mut impl Rng, dim: usize) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..dim)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// A density operator mixing one or two random pure states.
pub fn random_density(rng: &mut impl Rng, dim: usize) -> CMatrix {
    let a = random_pure_state(rng, dim);
    let pa = CMatrix::outer(&a, &a);
    if rng.random_bool(0.5) {
        return pa;
    }
    let b = random_pure_state(rng, dim);
    let w: f64 = rng.random();
    pa.scale(w).try_add(&CMatrix::outer(&b, &b).scale(1.0 - w)).expect("same dimension")
}

pub fn random_cstate(rng: &mut impl Rng, vars: &[String], max_value: i64) -> ClassicalState {
    let mut s = ClassicalState::new();
    for v in vars {
        s.set(v, rng.random_range(0..=max_value));
    }
    s
}

/// Convex combination of random pure or rank-two states over up to four
/// classical states.
pub fn random_povd(rng: &mut impl Rng, qubits: &[String], vars: &[String], opts: &WitnessOptions) -> Result<Povd> {
    let dim = 1usize << qubits.len();
    let k = rng.random_range(1..=opts.max_states.clamp(1, 4));
    let mut weights: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    let mass = opts.mass.unwrap_or_else(|| 1.0 - rng.random::<f64>());
    for w in weights.iter_mut() {
        *w *= mass / total;
    }
    let entries: Vec<(ClassicalState, CMatrix)> = weights
        .into_iter()
        .map(|w| (random_cstate(rng, vars, opts.max_value), random_density(rng, dim).scale(w)))
        .collect();
    let mut mu = Povd::empty(qubits.to_vec());
    for (s, m) in entries {
        mu.accumulate(s, m)?;
    }
    mu.prune();
    Ok(mu)
}

/// Every assignment of `0..=max_value` to `vars`, in lexicographic order.
pub fn all_cstates(vars: &[String], max_value: i64) -> Vec<ClassicalState> {
    let mut out = vec![ClassicalState::new()];
    for v in vars {
        out = out
            .into_iter()
            .flat_map(|s| (0..=max_value).map(move |n| s.update(v, n)))
            .collect();
    }
    out
}

/// `(σ, |i⟩⟨i|)` as a one-entry distribution.
pub fn basis_witness(qubits: &[String], sigma: ClassicalState, index: usize) -> Result<Povd> {
    Povd::point(
        qubits.to_vec(),
        sigma,
        PartialDensityOp::basis(1 << qubits.len(), index),
    )
}

/// `n` random witnesses named `random-0`, `random-1`, ...
pub fn random_witnesses(
    seed: u64,
    n: usize,
    qubits: &[String],
    vars: &[String],
    opts: &WitnessOptions,
) -> Result<Vec<(String, Povd)>> {
    let mut rng = seeded_rng(seed);
    (0..n)
        .map(|i| Ok((format!("random-{i}"), random_povd(&mut rng, qubits, vars, opts)?)))
        .collect()
}

/// Picks one of `items` uniformly.
pub fn choose<'a, T>(rng: &mut impl Rng, items: &'a [T]) -> &'a T {
    items.choose(rng).expect("non-empty choice")
}

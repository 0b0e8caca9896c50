//! Preconditions: substitutions, the calculus for loop-free commands and a
//! witness-based triple checker.

pub mod pc;
pub mod subst;
pub mod triple;

pub use pc::{measurements_of, pc, pc_with, simplify_assertion, simplify_measurement};
pub use subst::{subst_assign, subst_f, subst_g, subst_h};
pub use triple::{check_triple, parse_qhl, CheckMode, QhlSource, Summary, Triple, TripleReport, Verdict, WitnessReport};

//! Fixtures shared by the benchmarks.

use splitstep::{c3_scheme, gue_terms, ising_terms, GueSpec, IsingSpec, SplitScheme, TermSet};

pub const SEED: u64 = 42;

pub fn gue(dim: usize) -> TermSet {
    gue_terms(GueSpec { dim, seed: SEED }).expect("valid GUE size")
}

pub fn ising(sites: usize) -> TermSet {
    ising_terms(&IsingSpec::chaotic(sites)).expect("valid chain length")
}

pub fn c3() -> SplitScheme {
    c3_scheme(2).expect("two terms")
}

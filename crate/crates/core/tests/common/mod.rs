#![allow(dead_code)]

use hofer_depth::complex::{admissible_entries, ComplexGenerator, FilteredComplex};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn gen(id: usize, grading: i64, filtration: f64) -> ComplexGenerator {
    ComplexGenerator { id, grading, filtration }
}

/// Random complex with `n` generators in gradings 0..3 and a random `∂` with `∂² = 0`.
pub fn random_complex(rng: &mut ChaCha8Rng, n: usize) -> FilteredComplex {
    loop {
        let gens: Vec<ComplexGenerator> =
            (0..n).map(|id| gen(id, rng.gen_range(0..3), rng.gen_range(-10.0..10.0))).collect();
        let entries: Vec<(usize, usize)> = admissible_entries(&gens).into_iter().filter(|_| rng.gen_bool(0.5)).collect();
        if let Ok(c) = FilteredComplex::new(gens, entries) {
            return c;
        }
    }
}

/// Generators built from pairs in adjacent degrees, the upper one higher, so that an
/// acyclic admissible differential often exists.
pub fn random_paired_generators(rng: &mut ChaCha8Rng) -> Vec<ComplexGenerator> {
    let pairs = rng.gen_range(1..=4);
    let mut gens = Vec::new();
    for p in 0..pairs {
        let k = rng.gen_range(0..3);
        let lo = rng.gen_range(-10.0..10.0);
        gens.push(gen(2 * p, k, lo));
        gens.push(gen(2 * p + 1, k + 1, lo + rng.gen_range(0.1..5.0)));
    }
    gens
}

pub fn scenario_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

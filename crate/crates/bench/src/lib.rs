//! Fixtures shared by the benchmarks.

use cstarlab::fdca::{BlockElement, BlockShape};
use cstarlab::matcore::{ComplexMatrix, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seeded dense complex matrix with entries uniform in the unit square.
pub fn random_matrix(seed: u64, n: usize) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ComplexMatrix::from_fn(n, n, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .expect("finite entries")
}

/// `x ↦ (x, x, ..., x)` generators of `T_2` in `copies` blocks of `M_2`.
pub fn repeated_t2(copies: usize) -> (BlockShape, Vec<BlockElement>) {
    let shape = BlockShape::new(vec![2; copies]).expect("nonempty shape");
    let gens = cstarlab::catalog::t2_generators()
        .into_iter()
        .map(|g| BlockElement::new(&shape, vec![g; copies]).expect("matching blocks"))
        .collect();
    (shape, gens)
}

//! Fixtures shared by the criterion benches.

use qnet_core::linalg::{random_operator, random_state};
use qnet_core::registers::{make_augmented, RegisterLayout};
use qnet_core::{AugmentedState, Operator};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A seeded random operator and the augmented state `psi (x) |0>`.
pub fn operator_and_state(dim: usize, seed: u64) -> (Operator, AugmentedState) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = random_operator(&mut rng, dim, dim);
    let psi = random_state(&mut rng, dim);
    let layout = RegisterLayout::single(dim).expect("positive dim");
    (u, make_augmented(&psi, &layout).expect("matching layout"))
}

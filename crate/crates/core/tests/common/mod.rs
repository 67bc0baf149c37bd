#![allow(dead_code)]

use polsphere::HalfInteger;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn h(twice: i32) -> HalfInteger {
    HalfInteger::from_twice(twice)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniformly distributed point on the sphere as `(θ, φ)`.
pub fn random_node<R: Rng>(rng: &mut R) -> (f64, f64) {
    let c: f64 = rng.random_range(-1.0..1.0);
    (c.acos(), rng.random_range(0.0..std::f64::consts::TAU))
}

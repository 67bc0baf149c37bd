//! Angular-momentum special functions: Clebsch–Gordan coefficients, Wigner
//! small-d elements and spherical harmonics, all in the Condon–Shortley
//! phase convention.
//!
//! Everything here is a pure function. The factorial caches are built once
//! on first use and only read afterwards.

mod clebsch;
mod factorial;
mod half;
mod harmonics;
mod wigner;

pub use clebsch::{cg, cg_stretched, clebsch_gordan, clebsch_gordan_squared, CgArgs, EXACT_FACTORIAL_LIMIT};
pub use factorial::{factorial_exact, ln_binomial, ln_factorial};
pub use half::HalfInteger;
pub use harmonics::{spherical_harmonic, HarmonicTable};
pub use wigner::{wigner_small_d, wigner_small_d_matrix};

//! Quantum polarization on the Poincaré sphere.
//!
//! A two-mode field is reduced to its polarization sectors (one density
//! block per total spin `S = N/2`), expanded in state multipoles `ρ_Kq`, and
//! mapped to the SU(2) Q function and its per-multipole components. The
//! effective areas `∫ Q² dΩ` and `∫ Q_K² dΩ` measure how much polarization
//! structure each order carries.
//!
//! ```
//! use polsphere::{fock_state, measures::{area_report, build_grid}};
//!
//! let state = fock_state(1, 1);
//! let report = area_report(&state, &build_grid(state.max_spin()), None).unwrap();
//! assert!(report.per_k[&1].abs() < 1e-12);
//! ```

pub mod angular;
pub mod cli;
pub mod error;
pub mod measures;
pub mod multipole;
pub mod qfunction;
pub mod sphere;
pub mod state;

pub use angular::HalfInteger;
pub use error::{Error, Result};
pub use multipole::{extract_multipoles, reconstruct_state, MultipoleTable};
pub use qfunction::{evaluate_field, q_component, q_sector_direct, q_sector_via_multipoles, q_total, QField};
pub use sphere::SphereGrid;
pub use state::{
    fock_state, make_state, mix, noon_state, su2_coherent_state, two_mode_coherent, PolarizationState,
    SectorDensityMatrix,
};

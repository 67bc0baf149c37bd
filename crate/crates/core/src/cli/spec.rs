//! JSON state specifications.
//!
//! ```json
//! {"type": "fock", "n_h": 1, "n_v": 1}
//! {"type": "coherent_su2", "spin": 1.5, "theta": 0.3, "phi": 1.0}
//! {"type": "two_mode_coherent", "alpha_h": [1.0, 0.0], "alpha_v": [0.0, 1.0], "eps": 1e-12}
//! {"type": "noon", "n": 2, "phase": 0.0}
//! {"type": "mixture", "components": [...], "weights": [0.5, 0.5]}
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angular::HalfInteger;
use crate::error::{Error, Result};
use crate::state::{
    fock_state, mix, noon_state, su2_coherent_state, two_mode_coherent, PolarizationState, TruncatedState,
    DEFAULT_TRUNCATION_EPS,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Fock {
        n_h: u32,
        n_v: u32,
    },
    CoherentSu2 {
        spin: f64,
        theta: f64,
        phi: f64,
    },
    TwoModeCoherent {
        alpha_h: [f64; 2],
        alpha_v: [f64; 2],
        #[serde(default)]
        eps: Option<f64>,
    },
    Noon {
        n: u32,
        #[serde(default)]
        phase: f64,
    },
    Mixture {
        components: Vec<StateSpec>,
        weights: Vec<f64>,
    },
}

/// A built state plus truncation reports of any infinite-sector parts.
#[derive(Clone, Debug)]
pub struct BuiltState {
    pub state: PolarizationState,
    pub truncations: Vec<TruncatedState>,
}

impl StateSpec {
    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn build(&self) -> Result<BuiltState> {
        let mut truncations = Vec::new();
        let state = self.build_into(&mut truncations)?;
        Ok(BuiltState { state, truncations })
    }

    fn build_into(&self, truncations: &mut Vec<TruncatedState>) -> Result<PolarizationState> {
        match self {
            StateSpec::Fock { n_h, n_v } => Ok(fock_state(*n_h, *n_v)),
            StateSpec::CoherentSu2 { spin, theta, phi } => {
                let s = HalfInteger::from_f64(*spin)
                    .filter(|s| s.twice() >= 0)
                    .ok_or_else(|| Error::Domain(format!("spin {spin} is not a non-negative half-integer")))?;
                su2_coherent_state(s, *theta, *phi)
            }
            StateSpec::TwoModeCoherent { alpha_h, alpha_v, eps } => {
                let t = two_mode_coherent(
                    Complex64::new(alpha_h[0], alpha_h[1]),
                    Complex64::new(alpha_v[0], alpha_v[1]),
                    eps.unwrap_or(DEFAULT_TRUNCATION_EPS),
                )?;
                let state = t.state.clone();
                truncations.push(t);
                Ok(state)
            }
            StateSpec::Noon { n, phase } => noon_state(*n, *phase),
            StateSpec::Mixture { components, weights } => {
                let states = components
                    .iter()
                    .map(|c| c.build_into(truncations))
                    .collect::<Result<Vec<_>>>()?;
                mix(&states, weights)
            }
        }
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One instance of the PT-symmetric kicked rotor with kicking potential
/// `V(theta) = K [cos(theta) + i lambda sin(theta)]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub kick_strength: f64,
    pub non_hermiticity: f64,
    pub hbar_eff: f64,
}

impl ModelParams {
    pub fn new(kick_strength: f64, non_hermiticity: f64, hbar_eff: f64) -> Result<Self> {
        let p = Self {
            kick_strength,
            non_hermiticity,
            hbar_eff,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.kick_strength.is_finite() {
            return Err(Error::InvalidParameter {
                name: "kick_strength",
                reason: format!("must be finite, got {}", self.kick_strength),
            });
        }
        if !(self.non_hermiticity.is_finite() && self.non_hermiticity >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "non_hermiticity",
                reason: format!("must be finite and non-negative, got {}", self.non_hermiticity),
            });
        }
        if !(self.hbar_eff.is_finite() && self.hbar_eff > 0.0) {
            return Err(Error::InvalidParameter {
                name: "hbar_eff",
                reason: format!("must be positive and finite, got {}", self.hbar_eff),
            });
        }
        Ok(())
    }

    pub fn is_hermitian(&self) -> bool {
        self.non_hermiticity == 0.0 || self.kick_strength == 0.0
    }

    /// Upper bound on the per-kick gain exponent, `K lambda / hbar`.
    pub fn max_gain_exponent(&self) -> f64 {
        self.kick_strength.abs() * self.non_hermiticity / self.hbar_eff
    }
}

/// Which way a propagator factor is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Adjoint,
}

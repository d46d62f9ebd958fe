use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inputs of the Lorentzian ladder model.
///
/// A discrete level at `e_phi` couples to ladder states `E_k = k·delta`
/// with amplitude `v_k = v / sqrt(1 + (k/a)^2)`. The dimensionless width
/// `a` is measured in units of the ladder spacing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub v: f64,
    pub delta: f64,
    pub a: f64,
    pub e_phi: f64,
}

impl ModelParams {
    pub fn new(v: f64, delta: f64, a: f64, e_phi: f64) -> Result<Self> {
        if !(v.is_finite() && delta.is_finite() && a.is_finite() && e_phi.is_finite()) {
            return Err(Error::InvalidParams("all parameters must be finite".into()));
        }
        if delta <= 0.0 {
            return Err(Error::InvalidParams(format!("ladder spacing must be positive, got {delta}")));
        }
        if a <= 0.0 {
            return Err(Error::InvalidParams(format!("resonance width must be positive, got {a}")));
        }
        Ok(Self { v, delta, a, e_phi })
    }

    /// Builds the model from continuum-limit constants: decay rate `Γ`,
    /// resonance width `γ` and spacing `δ`.
    pub fn from_rates(big_gamma: f64, gamma: f64, delta: f64, e_phi: f64) -> Result<Self> {
        if big_gamma <= 0.0 || gamma <= 0.0 {
            return Err(Error::InvalidParams("decay rate and resonance width must be positive".into()));
        }
        let v = (big_gamma * delta / (2.0 * PI)).sqrt();
        Self::new(v, delta, gamma / delta, e_phi)
    }

    pub fn eps_phi(&self) -> f64 {
        self.e_phi / self.delta
    }

    /// Resonance width in energy units.
    pub fn gamma(&self) -> f64 {
        self.a * self.delta
    }

    /// Golden-rule decay rate `2π v² / δ`.
    pub fn big_gamma(&self) -> f64 {
        2.0 * PI * self.v * self.v / self.delta
    }

    /// Continuum coupling scale, `w² = Γγ/2`.
    pub fn w(&self) -> f64 {
        (self.big_gamma() * self.gamma() / 2.0).sqrt()
    }

    /// `(v/δ)²`, the prefactor of every ladder sum.
    pub fn coupling_ratio_sq(&self) -> f64 {
        let r = self.v / self.delta;
        r * r
    }

    pub fn coupling(&self, k: i64) -> f64 {
        let x = k as f64 / self.a;
        self.v / (1.0 + x * x).sqrt()
    }

    pub(crate) fn require_coupled(&self) -> Result<()> {
        if self.v == 0.0 {
            Err(Error::InvalidParams("coupling must be nonzero".into()))
        } else {
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_constants() {
        let p = ModelParams::new(0.16, 1.0, 20.0, 0.0).unwrap();
        assert_eq!(p.gamma(), 20.0);
        assert_eq!(p.big_gamma(), 2.0 * PI * 0.16 * 0.16);
        let w2 = p.w() * p.w();
        assert!((w2 - p.big_gamma() * p.gamma() / 2.0).abs() < 1e-14 * w2);
        assert_eq!(p.coupling(0), 0.16);
        assert_eq!(p.coupling(-3), p.coupling(3));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(ModelParams::new(0.1, 0.0, 1.0, 0.0).is_err());
        assert!(ModelParams::new(0.1, 1.0, -1.0, 0.0).is_err());
        assert!(ModelParams::new(f64::NAN, 1.0, 1.0, 0.0).is_err());
        assert!(ModelParams::new(0.0, 1.0, 1.0, 0.0).is_ok());
    }

    #[test]
    fn from_rates_round_trips() {
        let p = ModelParams::from_rates(0.5, 300.0, 0.01, 0.0).unwrap();
        assert!((p.big_gamma() - 0.5).abs() < 1e-14);
        assert!((p.gamma() - 300.0).abs() < 1e-9);
        assert!((p.a - 30000.0).abs() < 1e-6);
    }
}

//! Closed forms and brute-force partial sums for the Lorentzian-weighted
//! ladder sums
//!
//! ```text
//! S1(ε, a) = Σ_k 1/(1 + (k/a)²) · 1/(ε − k)
//! S2(ε, a) = Σ_k 1/(1 + (k/a)²) · 1/(ε − k)²
//! ```
//!
//! Both closed forms involve `cot(πε)`. Arguments are reduced to the
//! nearest integer before any trigonometry so that points a hair away from
//! a pole keep their full relative precision.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Distance from an integer below which a ladder sum is treated as sitting
/// on a pole.
pub const POLE_GUARD: f64 = 1e-12;

/// A point `pole + offset` on the real line with `|offset| <= 1/2`.
///
/// Keeping the offset separate from the integer part preserves precision
/// for eigenvalues that sit extremely close to a ladder level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticePoint {
    pub pole: i64,
    pub offset: f64,
}

impl LatticePoint {
    pub fn new(pole: i64, offset: f64) -> Self {
        Self { pole, offset }
    }

    pub fn from_eps(eps: f64) -> Self {
        let pole = eps.round();
        Self { pole: pole as i64, offset: eps - pole }
    }

    pub fn eps(&self) -> f64 {
        self.pole as f64 + self.offset
    }

    fn checked(eps: f64) -> Result<Self> {
        if !eps.is_finite() {
            return Err(Error::Domain(format!("non-finite argument {eps}")));
        }
        let pt = Self::from_eps(eps);
        if pt.offset.abs() < POLE_GUARD {
            return Err(Error::Pole { eps });
        }
        Ok(pt)
    }
}

/// `coth(x)` for `x > 0`, written so that large arguments cannot overflow.
pub fn coth(x: f64) -> f64 {
    if x > 19.0 {
        1.0
    } else {
        1.0 + 2.0 / (2.0 * x).exp_m1()
    }
}

fn check_width(a: f64) -> Result<()> {
    if a > 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("resonance width must be positive and finite, got {a}")))
    }
}

/// `α(a) = coth(πa)/a`, the energy-independent term of the eigenvalue equation.
pub fn alpha(a: f64) -> Result<f64> {
    check_width(a)?;
    Ok(coth(PI * a) / a)
}

/// `Σ_k 1/(a² + k²) = (π/a) coth(πa)`.
pub fn lorentz_sum(a: f64) -> Result<f64> {
    check_width(a)?;
    Ok(PI / a * coth(PI * a))
}

/// Symmetric partial sum `Σ_{k=-n_cut}^{n_cut}` of S1. Terms `k` and `-k`
/// are combined before accumulation, so the result is exactly odd in `eps`.
pub fn s1_partial(eps: f64, a: f64, n_cut: u64) -> Result<f64> {
    check_width(a)?;
    if n_cut == 0 {
        return Err(Error::Domain("n_cut must be at least 1".into()));
    }
    LatticePoint::checked(eps)?;
    let mut sum = 0.0;
    // smallest terms first
    for k in (1..=n_cut).rev() {
        let kf = k as f64;
        let x = kf / a;
        sum += 2.0 * eps / ((1.0 + x * x) * ((eps - kf) * (eps + kf)));
    }
    Ok(sum + 1.0 / eps)
}

#[inline]
pub(crate) fn cot_pi(offset: f64) -> f64 {
    1.0 / (PI * offset).tan()
}

#[inline]
pub(crate) fn s1_at(pt: LatticePoint, a: f64, alpha: f64) -> f64 {
    let eps = pt.eps();
    let x = eps / a;
    PI * (cot_pi(pt.offset) + eps * alpha) / (1.0 + x * x)
}

#[inline]
pub(crate) fn s2_at(pt: LatticePoint, a: f64, alpha: f64) -> f64 {
    let eps = pt.eps();
    let x = eps / a;
    let den = 1.0 + x * x;
    let sin = (PI * pt.offset).sin();
    let cot = cot_pi(pt.offset);
    PI / den * (PI / (sin * sin) - alpha + 2.0 * eps / (a * a) * (cot + alpha * eps) / den)
}

/// Closed form `π [cot(πε) + ε α(a)] / (1 + (ε/a)²)`.
pub fn s1_closed(eps: f64, a: f64) -> Result<f64> {
    let al = alpha(a)?;
    Ok(s1_at(LatticePoint::checked(eps)?, a, al))
}

/// Closed form of S2, equal to `-∂S1/∂ε`.
pub fn s2_trig(eps: f64, a: f64) -> Result<f64> {
    let al = alpha(a)?;
    Ok(s2_at(LatticePoint::checked(eps)?, a, al))
}

/// The value `cot(πε)` must take if `eps` solves the eigenvalue equation.
///
/// Off the solution set this is just a rational function of `eps` and has
/// no relation to the actual cotangent.
pub fn cot_rational(eps: f64, p: &ModelParams) -> f64 {
    let al = coth(PI * p.a) / p.a;
    let x = eps / p.a;
    (1.0 + x * x) * (eps - p.eps_phi()) / (PI * p.coupling_ratio_sq()) - eps * al
}

/// S2 with the cotangent replaced by [`cot_rational`]; agrees with
/// [`s2_trig`] only at eigenvalues.
pub fn s2_rational(eps: f64, p: &ModelParams) -> f64 {
    let a = p.a;
    let al = coth(PI * a) / a;
    let c = cot_rational(eps, p);
    let x = eps / a;
    let den = 1.0 + x * x;
    PI / den * (PI * (1.0 + c * c) - al + 2.0 * eps / (a * a) * (eps * al + c) / den)
}

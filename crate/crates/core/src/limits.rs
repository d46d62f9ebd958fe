//! Closed-form reference models the Lorentzian ladder reduces to: the
//! two-level (Rabi) system, the flat-coupling ladder (Bixon–Jortner), the
//! flat continuum (Wigner–Weisskopf) and the Lorentzian continuum.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::special_sums::{cot_pi, LatticePoint};
use crate::spectral::{adaptive_loop, solve_intervals, SecularEquation, SolveOptions, Spectrum, SpectrumModel};

/// Below this `|γ − 2W|` the two continuum poles merge.
pub const DEGENERATE_POLE_TOL: f64 = 1e-9;

/// Eigenvalues `E± = e1/2 ± sqrt(e1²/4 + v²)` of `[[e1, v], [v, 0]]`.
pub fn rabi_eigenvalues(e1: f64, v: f64) -> (f64, f64) {
    let root = (0.25 * e1 * e1 + v * v).sqrt();
    (0.5 * e1 + root, 0.5 * e1 - root)
}

/// Normalized eigenvector `(E±, v)/sqrt(E±² + v²)` for real `v`.
pub fn rabi_eigenvector(e_pm: f64, v: f64) -> Result<(f64, f64)> {
    let norm = e_pm.hypot(v);
    if norm == 0.0 {
        return Err(Error::Degenerate("eigenvalue and coupling are both zero".into()));
    }
    Ok((e_pm / norm, v / norm))
}

/// Probability of remaining in the upper state of the two-level system.
pub fn rabi_survival(e_phi: f64, v: f64, t: f64) -> f64 {
    let omega_sq = e_phi * e_phi + 4.0 * v * v;
    if omega_sq == 0.0 {
        return 1.0;
    }
    let s = (0.5 * omega_sq.sqrt() * t).sin();
    1.0 - 4.0 * v * v / omega_sq * s * s
}

/// Golden-rule decay `exp(−Γt)`.
pub fn ww_survival(big_gamma: f64, t: f64) -> f64 {
    (-big_gamma * t).exp()
}

/// Level-shift function `W² E / (E² + γ²)` of the Lorentzian continuum.
#[allow(non_snake_case)]
pub fn fano_F(e: f64, w: f64, gamma: f64) -> f64 {
    w * w * e / (e * e + gamma * gamma)
}

/// Spectral density of the discrete state in the Lorentzian continuum.
pub fn fano_alpha_sq(e: f64, w: f64, gamma: f64, e_phi: f64) -> f64 {
    let shifted = e - e_phi;
    let a = e * shifted - w * w;
    w * w * gamma / PI / (a * a + gamma * gamma * shifted * shifted)
}

/// Roots of `(E − E_φ)(E + iγ) = W²`, the poles of the continuum propagator.
/// At `E_φ = 0` they are `[−iγ ± sqrt(4W² − γ²)]/2`.
pub fn fano_poles(w: f64, gamma: f64, e_phi: f64) -> (Complex64, Complex64) {
    let b = Complex64::new(-e_phi, gamma);
    let disc = (Complex64::new(e_phi, gamma).powi(2) + 4.0 * w * w).sqrt();
    ((-b + disc) * 0.5, (-b - disc) * 0.5)
}

/// True when the two poles coincide (`E_φ = 0`, `γ = 2W`) and the
/// partial-fraction form of the amplitude breaks down.
pub fn fano_is_degenerate(w: f64, gamma: f64, e_phi: f64) -> bool {
    e_phi.abs() < DEGENERATE_POLE_TOL && (gamma - 2.0 * w).abs() < DEGENERATE_POLE_TOL
}

/// Survival amplitude of the discrete state in the Lorentzian continuum.
pub fn fano_amplitude(w: f64, gamma: f64, e_phi: f64, t: f64) -> Result<Complex64> {
    if !(w > 0.0 && gamma > 0.0) || !e_phi.is_finite() {
        return Err(Error::InvalidParams("W and γ must be positive and E_φ finite".into()));
    }
    if fano_is_degenerate(w, gamma, e_phi) {
        return Err(Error::Degenerate(format!("double pole at γ = 2W = {gamma}")));
    }
    let (ep, em) = fano_poles(w, gamma, e_phi);
    let ig = Complex64::new(0.0, gamma);
    let term = |z: Complex64, other: Complex64| (z + ig) / (z - other) * (-Complex64::i() * z * t).exp();
    Ok(term(ep, em) + term(em, ep))
}

pub fn fano_survival(w: f64, gamma: f64, e_phi: f64, t: f64) -> Result<f64> {
    Ok(fano_amplitude(w, gamma, e_phi, t)?.norm_sqr())
}

/// Flat-coupling ladder: `ε = ε_φ + (πv²/δ²) cot(πε)`.
#[derive(Debug, Clone, Copy)]
struct BixonJortnerEquation {
    eps_phi: f64,
    /// `πv²/δ²`
    slope: f64,
    v: f64,
    delta: f64,
    half_rate: f64,
}

impl BixonJortnerEquation {
    fn new(v: f64, delta: f64, e_phi: f64) -> Self {
        Self {
            eps_phi: e_phi / delta,
            slope: PI * v * v / (delta * delta),
            v,
            delta,
            half_rate: PI * v * v / delta,
        }
    }
}

impl SecularEquation for BixonJortnerEquation {
    fn residual(&self, pt: LatticePoint) -> f64 {
        self.eps_phi + self.slope * cot_pi(pt.offset) - pt.eps()
    }

    fn weight(&self, pt: LatticePoint) -> f64 {
        let detuning = (pt.eps() - self.eps_phi) * self.delta;
        let v2 = self.v * self.v;
        v2 / (v2 + self.half_rate * self.half_rate + detuning * detuning)
    }
}

fn bj_params(v: f64, delta: f64, e_phi: f64) -> Result<ModelParams> {
    if v == 0.0 || !v.is_finite() {
        return Err(Error::InvalidParams("coupling must be nonzero".into()));
    }
    if !(delta > 0.0) || !e_phi.is_finite() {
        return Err(Error::InvalidParams("ladder spacing must be positive".into()));
    }
    Ok(ModelParams { v, delta, a: f64::INFINITY, e_phi })
}

/// Eigenvalues of the flat-coupling ladder inside `window`, one per unit
/// interval, with weights `v²/(v² + (Γ/2)² + (E − E_φ)²)`.
pub fn bj_spectrum(v: f64, delta: f64, e_phi: f64, window: (f64, f64)) -> Result<Spectrum> {
    let params = bj_params(v, delta, e_phi)?;
    let (lo, hi) = window;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidParams(format!("invalid window [{lo}, {hi}]")));
    }
    let eq = BixonJortnerEquation::new(v, delta, e_phi);
    let opts = SolveOptions::default();
    let pairs = solve_intervals(&eq, lo.floor() as i64, hi.ceil() as i64, 2, opts.tol, opts.mode)
        .into_iter()
        .filter(|p| p.eps >= lo && p.eps <= hi)
        .collect();
    Ok(Spectrum::assemble(params, SpectrumModel::BixonJortner, pairs, window))
}

/// Flat-coupling spectrum on a window grown until the weight deficit is
/// below `opts.deficit_target` or the width reaches `opts.max_width`.
pub fn bj_spectrum_adaptive(v: f64, delta: f64, e_phi: f64, opts: &SolveOptions) -> Result<Spectrum> {
    let params = bj_params(v, delta, e_phi)?;
    let eq = BixonJortnerEquation::new(v, delta, e_phi);
    adaptive_loop(&eq, &params, SpectrumModel::BixonJortner, 2, opts)
}

/// Options used for reference flat-coupling curves: the weights fall off
/// only as `1/E²`, so the window is allowed to grow much wider.
pub fn bj_reference_options() -> SolveOptions {
    SolveOptions { deficit_target: 1e-5, max_width: 20_000.0, ..SolveOptions::default() }
}

/// Reference model selector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LimitSpec {
    Rabi { e1: f64, v: f64 },
    Bj { v: f64, delta: f64, e_phi: f64 },
    Ww { big_gamma: f64 },
    Fano { w: f64, gamma: f64, e_phi: f64 },
}

impl LimitSpec {
    pub fn name(&self) -> &'static str {
        match self {
            LimitSpec::Rabi { .. } => "rabi",
            LimitSpec::Bj { .. } => "bj",
            LimitSpec::Ww { .. } => "ww",
            LimitSpec::Fano { .. } => "fano",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            LimitSpec::Rabi { e1, v } if e1.is_finite() && v.is_finite() => Ok(()),
            LimitSpec::Bj { v, delta, e_phi } => bj_params(v, delta, e_phi).map(|_| ()),
            LimitSpec::Ww { big_gamma } if big_gamma > 0.0 => Ok(()),
            LimitSpec::Fano { w, gamma, e_phi } => {
                if !(w > 0.0 && gamma > 0.0) || !e_phi.is_finite() {
                    Err(Error::InvalidParams("W and γ must be positive and E_φ finite".into()))
                } else if fano_is_degenerate(w, gamma, e_phi) {
                    Err(Error::Degenerate(format!("double pole at γ = 2W = {gamma}")))
                } else {
                    Ok(())
                }
            }
            _ => Err(Error::InvalidParams(format!("invalid {} parameters", self.name()))),
        }
    }

    /// Survival probability on the given times.
    pub fn survival(&self, times: &[f64]) -> Result<Vec<f64>> {
        self.validate()?;
        match *self {
            LimitSpec::Rabi { e1, v } => Ok(times.iter().map(|&t| rabi_survival(e1, v, t)).collect()),
            LimitSpec::Ww { big_gamma } => Ok(times.iter().map(|&t| ww_survival(big_gamma, t)).collect()),
            LimitSpec::Fano { w, gamma, e_phi } => times.iter().map(|&t| fano_survival(w, gamma, e_phi, t)).collect(),
            LimitSpec::Bj { v, delta, e_phi } => {
                // renormalized: the missing far weight only affects the first instants
                let s = bj_spectrum_adaptive(v, delta, e_phi, &bj_reference_options())?;
                let norm = s.weight_sum().powi(2);
                Ok(times.iter().map(|&t| crate::dynamics::survival_amplitude(&s, t).norm_sqr() / norm).collect())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rabi_eigen() {
        assert_eq!(rabi_eigenvalues(0.0, 1.0), (1.0, -1.0));
        assert_eq!(rabi_eigenvalues(3.0, 2.0), (4.0, -1.0));
        let (p, m) = rabi_eigenvalues(0.7, -0.3);
        assert!((p + m - 0.7).abs() < 1e-15 && (p * m + 0.09).abs() < 1e-15);
        let (c0, c1) = rabi_eigenvector(1.0, 1.0).unwrap();
        assert!((c0 - 0.5f64.sqrt()).abs() < 1e-15 && (c1 - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(rabi_eigenvector(0.0, 0.0).is_err());
    }

    #[test]
    fn rabi_eigenvectors_solve_the_matrix() {
        for &(e1, v) in &[(0.3, 0.8), (-1.2, 0.05), (2.0, -0.7)] {
            let (ep, em) = rabi_eigenvalues(e1, v);
            let a = rabi_eigenvector(ep, v).unwrap();
            let b = rabi_eigenvector(em, v).unwrap();
            for (e, (x, y)) in [(ep, a), (em, b)] {
                assert!((e1 * x + v * y - e * x).abs() < 1e-12);
                assert!((v * x - e * y).abs() < 1e-12);
            }
            assert!((a.0 * b.0 + a.1 * b.1).abs() < 1e-12);
        }
    }

    #[test]
    fn rabi_survival_values() {
        assert_eq!(rabi_survival(0.4, 0.3, 0.0), 1.0);
        for &t in &[0.3, 2.0, 9.0] {
            assert!((rabi_survival(0.0, 0.16, t) - (0.16 * t).cos().powi(2)).abs() < 1e-14);
        }
    }

    #[test]
    fn ww_values() {
        assert_eq!(ww_survival(0.5, 0.0), 1.0);
        assert!((ww_survival(2.0, 0.5) - (-1.0f64).exp()).abs() < 1e-15);
        assert!((ww_survival(3.0, 2f64.ln() / 3.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn fano_shift_function() {
        assert_eq!(fano_F(0.0, 1.3, 0.5), 0.0);
        assert!((fano_F(0.5, 1.3, 0.5) - 1.69 / 1.0).abs() < 1e-14);
        assert!((fano_F(1e8, 1.3, 0.5) * 1e8 - 1.69).abs() < 1e-6);
    }

    #[test]
    fn fano_pole_positions() {
        let (p, m) = fano_poles(1.75, 0.5, 0.0);
        assert!((p.re - 1.732_050_807_568_877).abs() < 1e-12);
        assert!((m.re + 1.732_050_807_568_877).abs() < 1e-12);
        assert_eq!(p.im, -0.25);
        assert_eq!(m.im, -0.25);
        let (p, m) = fano_poles(1.0, 2.0, 0.0);
        assert_eq!(p, m);
        assert!(fano_survival(1.0, 2.0, 0.0, 1.0).is_err());
        assert!(fano_survival(1.0, 2.0, 0.1, 1.0).is_ok());
    }

    #[test]
    fn fano_starts_at_one() {
        for &(w, g, e) in &[(1.75, 0.5, 0.0), (75f64.sqrt(), 300.0, 0.0), (0.75f64.sqrt(), 0.5, 0.0), (1.0, 2.0, 0.3)] {
            assert!((fano_survival(w, g, e, 0.0).unwrap() - 1.0).abs() < 1e-9);
            assert!((fano_amplitude(w, g, e, 0.0).unwrap() - 1.0).norm() < 1e-9);
        }
    }

    #[test]
    fn fano_detuned_amplitude_matches_density_transform() {
        let (w, g, e_phi) = (0.9, 0.4, 0.7);
        // midpoint rule on a wide grid; the density falls off as 1/E^4
        let (l, n) = (400.0, 800_000);
        let h = 2.0 * l / n as f64;
        for &t in &[0.0, 0.8, 2.5, 6.0] {
            let amp: Complex64 = (0..n)
                .map(|i| {
                    let e = -l + (i as f64 + 0.5) * h;
                    (-Complex64::i() * e * t).exp() * fano_alpha_sq(e, w, g, e_phi) * h
                })
                .sum();
            assert!((amp - fano_amplitude(w, g, e_phi, t).unwrap()).norm() < 1e-6, "t = {t}: {amp}");
        }
    }

    #[test]
    fn fano_detuned_far_level_barely_decays() {
        // level far above the band centre: the decay rate is W²γ/E_φ²
        let p = fano_survival(0.5, 0.5, 20.0, 2.0).unwrap();
        let rate = 0.25 * 0.5 / 400.0;
        assert!((p - (-2.0 * rate * 2.0f64).exp()).abs() < 2e-3, "{p}");
    }

    #[test]
    fn fano_density_even_when_centred() {
        for &e in &[0.1, 0.9, 4.0] {
            assert_eq!(fano_alpha_sq(e, 0.86, 0.5, 0.0), fano_alpha_sq(-e, 0.86, 0.5, 0.0));
        }
    }

    #[test]
    fn bj_one_root_per_interval() {
        let s = bj_spectrum(0.16, 1.0, 0.0, (-20.0, 20.0)).unwrap();
        assert_eq!(s.len(), 40);
        for pr in &s.pairs {
            assert_eq!(pr.interval_index, Some(pr.eps.floor() as i64));
            assert!(pr.residual.abs() < 1e-12);
        }
    }

    #[test]
    fn limit_spec_rejects_degenerate_fano() {
        let spec = LimitSpec::Fano { w: 0.5, gamma: 1.0, e_phi: 0.0 };
        assert!(matches!(spec.survival(&[0.0]), Err(Error::Degenerate(_))));
    }
}

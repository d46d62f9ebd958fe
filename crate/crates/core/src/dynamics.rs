//! Survival amplitude and probability of the discrete state.
//!
//! With `ℏ = 1`, starting from `|φ⟩`:
//! `⟨φ|ψ(t)⟩ = Σ_μ w_μ exp(−i ε_μ δ t)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{self, Mode};
use crate::params::ModelParams;
use crate::spectral::Spectrum;

/// Default number of grid intervals (2001 points).
pub const DEFAULT_STEPS: usize = 2000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesMeta {
    pub params: ModelParams,
    pub engine: String,
    pub norm_deficit: f64,
    pub renormalized: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub probs: Vec<f64>,
    #[serde(skip)]
    pub amps: Option<Vec<Complex64>>,
    pub meta: SeriesMeta,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Largest `|p_self − p_other|` over a shared grid.
    pub fn sup_distance(&self, other: &[f64]) -> f64 {
        self.probs.iter().zip(other).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Uniform grid `0, t_max/n, …, t_max` (`n_steps + 1` points).
pub fn time_grid(t_max: f64, n_steps: usize) -> Vec<f64> {
    let dt = t_max / n_steps as f64;
    (0..=n_steps).map(|i| if i == n_steps { t_max } else { i as f64 * dt }).collect()
}

/// `Σ_μ w_μ exp(−i ε_μ δ t)`.
pub fn survival_amplitude(s: &Spectrum, t: f64) -> Complex64 {
    let scale = s.params.delta * t;
    let (mut re, mut im) = (0.0, 0.0);
    for pr in &s.pairs {
        let (sin, cos) = (pr.eps * scale).sin_cos();
        re += pr.weight * cos;
        im -= pr.weight * sin;
    }
    Complex64::new(re, im)
}

pub fn survival_series(s: &Spectrum, t_max: f64, n_steps: usize, renormalize: bool) -> Result<TimeSeries> {
    survival_series_with(s, t_max, n_steps, renormalize, Mode::default())
}

pub fn survival_series_with(
    s: &Spectrum,
    t_max: f64,
    n_steps: usize,
    renormalize: bool,
    mode: Mode,
) -> Result<TimeSeries> {
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::InvalidParams(format!("t_max must be positive, got {t_max}")));
    }
    if n_steps == 0 {
        return Err(Error::InvalidParams("n_steps must be positive".into()));
    }
    let times = time_grid(t_max, n_steps);
    let amps = exec::map_slice(mode, &times, |&t| survival_amplitude(s, t));
    let scale = if renormalize {
        let total = s.weight_sum();
        1.0 / (total * total)
    } else {
        1.0
    };
    let probs = amps.iter().map(|z| z.norm_sqr() * scale).collect();
    let engine = match s.model {
        crate::spectral::SpectrumModel::Lorentzian => "semi-analytic".to_string(),
        crate::spectral::SpectrumModel::BixonJortner => "bixon-jortner".to_string(),
        crate::spectral::SpectrumModel::Truncated { n_cut } => format!("semi-analytic-truncated(n_cut={n_cut})"),
    };
    Ok(TimeSeries {
        times,
        probs,
        amps: Some(amps),
        meta: SeriesMeta { params: s.params, engine, norm_deficit: s.norm_deficit, renormalized: renormalize },
    })
}

/// `Σ w_μ ε_μ^order` for order 0, 1 or 2.
pub fn moment(s: &Spectrum, order: u32) -> Result<f64> {
    if order > 2 {
        return Err(Error::Domain(format!("moment order must be 0, 1 or 2, got {order}")));
    }
    Ok(neumaier(s.pairs.iter().map(|pr| pr.weight * pr.eps.powi(order as i32))))
}

/// Analytic second moment `ε_φ² + (v/δ)² π a coth(πa)` of the infinite model.
pub fn second_moment_exact(p: &ModelParams) -> f64 {
    let eps_phi = p.eps_phi();
    eps_phi * eps_phi + p.coupling_ratio_sq() * p.a * p.a * crate::special_sums::lorentz_sum(p.a).unwrap_or(f64::NAN)
}

/// Share of the second moment carried by eigenvalues outside the unit
/// intervals `[n_lo, n_hi)`.
///
/// Far from the discrete level each eigenvalue sits just outward of one
/// ladder state `k`, so the solved intervals account for the states
/// `k = n_lo+1..=n_hi-1`. Expanding the eigenvalue equation about `k` gives
/// `w ε² = (v_k/δ)² k² / (k − ε_φ − R_k)²` up to `O((v_k/δ)²/k²)`, where
/// `R_k` is the regular part of the coupling sum at `k`.
pub fn second_moment_tail(p: &ModelParams, n_lo: i64, n_hi: i64) -> f64 {
    let a = p.a;
    let ratio = p.coupling_ratio_sq();
    let alpha = crate::special_sums::alpha(a).unwrap_or(f64::NAN);
    let eps_phi = p.eps_phi();
    // Σ (v_k/δ)² over all k, minus the states inside the window
    let total = a * a * crate::special_sums::lorentz_sum(a).unwrap_or(f64::NAN);
    let inside = neumaier(((n_lo + 1)..n_hi).map(|k| {
        let x = k as f64 / a;
        1.0 / (1.0 + x * x)
    }));
    let leading = ratio * (total - inside);

    // (v_k/δ)² (f_k − 1), summed explicitly out to `far` and estimated beyond
    let excess = |k: i64| {
        let kf = k as f64;
        let lorentz = 1.0 / (1.0 + (kf / a).powi(2));
        let regular = PI * ratio * lorentz * (alpha * kf - 2.0 * kf * lorentz / (PI * a * a));
        let f = kf / (kf - eps_phi - regular);
        ratio * lorentz * (f * f - 1.0)
    };
    let reach = (n_hi - n_lo).max(a.ceil() as i64).max(64);
    let far = 16 * reach;
    let upper = neumaier((n_hi..=n_hi + far).map(excess));
    let lower = neumaier((n_lo - far..=n_lo).map(excess));
    // beyond ±far the excess is (v_k/δ)² (2C + 3ε_φ²)/k² with C = Σ (v_k/δ)²
    let c = ratio * total;
    let remainder = |m: f64| ratio * a * a * (2.0 * c + 3.0 * eps_phi * eps_phi) * inverse_fourth_lorentz_tail(m, a);
    leading + upper + lower + remainder((n_hi + far) as f64) + remainder((far - n_lo) as f64)
}

/// `∫_m^∞ dk / (k² (a² + k²))`.
fn inverse_fourth_lorentz_tail(m: f64, a: f64) -> f64 {
    let r = a / m;
    if r < 1e-2 {
        // series of (1/m − atan(a/m)/a)/a², avoiding the cancellation
        (1.0 / (3.0 * m * m * m)) * (1.0 - 0.6 * r * r + r.powi(4) * 3.0 / 7.0)
    } else {
        (1.0 / m - r.atan() / a) / (a * a)
    }
}

/// Compensated sum.
pub(crate) fn neumaier(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{solve_spectrum, solve_truncated, SolveOptions};

    #[test]
    fn grid_is_inclusive() {
        let g = time_grid(2.0, 4);
        assert_eq!(g, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
    }

    #[test]
    fn amplitude_at_zero_and_parity() {
        let p = ModelParams::new(0.16, 1.0, 20.0, 0.0).unwrap();
        let s = solve_spectrum(&p, (-60.0, 60.0)).unwrap();
        let z = survival_amplitude(&s, 0.0);
        assert!((z.re - (1.0 - s.norm_deficit)).abs() < 1e-12);
        assert_eq!(z.im, 0.0);
        for &t in &[0.5, 3.0, 17.0] {
            let z = survival_amplitude(&s, t);
            assert!(z.im.abs() < 1e-12);
            assert!(z.norm() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn series_start_and_renormalization() {
        let p = ModelParams::new(0.39, 1.0, 5.0, 0.2).unwrap();
        let s = solve_spectrum(&p, (-30.0, 30.0)).unwrap();
        let raw = survival_series(&s, 10.0, 200, false).unwrap();
        let total = s.weight_sum();
        assert!((raw.probs[0] - total * total).abs() < 1e-12);
        assert!(raw.probs.iter().all(|&x| (0.0..=1.0 + 1e-9).contains(&x)));
        let norm = survival_series(&s, 10.0, 200, true).unwrap();
        assert!((norm.probs[0] - 1.0).abs() < 1e-12);
        assert!(survival_series(&s, 0.0, 10, false).is_err());
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let p = ModelParams::new(0.16, 1.0, 2.0, 0.0).unwrap();
        let s = solve_spectrum(&p, (-50.0, 50.0)).unwrap();
        let a = survival_series_with(&s, 20.0, 300, false, Mode::Sequential).unwrap();
        let b = survival_series_with(&s, 20.0, 300, false, Mode::Parallel).unwrap();
        assert_eq!(a.probs, b.probs);
    }

    #[test]
    fn moments_of_truncated_model_are_exact() {
        let p = ModelParams::new(0.3, 1.0, 4.0, 0.35).unwrap();
        let n = 50;
        let s = solve_truncated(&p, n, &SolveOptions::default()).unwrap();
        assert!((moment(&s, 0).unwrap() - 1.0).abs() < 1e-12);
        assert!((moment(&s, 1).unwrap() - 0.35).abs() < 1e-10);
        let couplings: f64 = (-(n as i64)..=n as i64).map(|k| p.coupling(k).powi(2)).sum();
        assert!((moment(&s, 2).unwrap() - (0.35f64.powi(2) + couplings)).abs() < 1e-9);
        assert!(moment(&s, 3).is_err());
    }

    #[test]
    fn tail_corrected_second_moment() {
        for &(v, a) in &[(0.16, 20.0), (0.39, 1.0), (0.39, 0.1)] {
            let p = ModelParams::new(v, 1.0, a, 0.0).unwrap();
            let s = solve_spectrum(&p, (-400.0, 400.0)).unwrap();
            let m2 = moment(&s, 2).unwrap() + second_moment_tail(&p, -400, 400);
            assert!((m2 - second_moment_exact(&p)).abs() < 1e-6, "a={a}: {m2}");
        }
    }
}

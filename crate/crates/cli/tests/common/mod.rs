//! Reference computations written without the library's numerics.

#![allow(dead_code)]

use std::f64::consts::PI;

/// Plain bisection; `f(lo)` and `f(hi)` must differ in sign.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let f_lo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) > 0.0) == (f_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Root of `coth(πa) = πa`, written as `cosh − πa sinh = 0`.
pub fn certificate_threshold() -> f64 {
    bisect(|a| (PI * a).cosh() - PI * a * (PI * a).sinh(), 0.1, 1.0)
}

/// Flat-coupling eigenvalues `E/δ` in `(n, n+1)` for `n ∈ [n_lo, n_hi)`.
pub fn bj_roots(v: f64, delta: f64, e_phi: f64, n_lo: i64, n_hi: i64) -> Vec<f64> {
    let c = PI * v * v / (delta * delta);
    let eps_phi = e_phi / delta;
    (n_lo..n_hi)
        .map(|n| {
            // with y = ε − n ∈ (0, 1): ε_φ + c cot(πy) − n − y
            let f = |y: f64| eps_phi + c / (PI * y).tan() - n as f64 - y;
            n as f64 + bisect(f, 1e-15, 1.0 - 1e-15)
        })
        .collect()
}

/// Flat-coupling discrete-state weight at energy `e`.
pub fn bj_weight(e: f64, v: f64, delta: f64, e_phi: f64) -> f64 {
    let half_rate = PI * v * v / delta;
    v * v / (v * v + half_rate * half_rate + (e - e_phi) * (e - e_phi))
}

/// Survival probability of the Lorentzian continuum by direct quadrature of
/// `|∫ ρ(E) e^{−iEt} dE|²` (composite Simpson on `[−L, L]`).
pub fn continuum_survival_quadrature(w: f64, gamma: f64, t: f64) -> f64 {
    let rho = |e: f64| w * w * gamma / PI / ((e * e - w * w).powi(2) + gamma * gamma * e * e);
    let l = 50.0 * w.max(gamma);
    let n = 400_000usize;
    let h = 2.0 * l / n as f64;
    let (mut re, mut im) = (0.0, 0.0);
    for i in 0..=n {
        let e = -l + i as f64 * h;
        let weight = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
        let r = rho(e) * weight;
        re += r * (e * t).cos();
        im -= r * (e * t).sin();
    }
    (re * h / 3.0).powi(2) + (im * h / 3.0).powi(2)
}

pub fn local_minima(p: &[f64]) -> Vec<usize> {
    (1..p.len().saturating_sub(1)).filter(|&i| p[i] < p[i - 1] && p[i] <= p[i + 1]).collect()
}

pub fn local_maxima(p: &[f64]) -> Vec<usize> {
    (1..p.len().saturating_sub(1)).filter(|&i| p[i] > p[i - 1] && p[i] >= p[i + 1]).collect()
}

pub fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Least-squares slope of `y` against `x`.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

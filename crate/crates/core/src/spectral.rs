//! Eigenvalues and eigenvectors of the Lorentzian ladder model.
//!
//! The dimensionless eigenvalues `ε` are the zeros of
//!
//! ```text
//! g(ε) = ε_φ + (πv²/δ²) [cot(πε) + α(a) ε] / (1 + (ε/a)²) − ε
//! ```
//!
//! `g` runs from `+∞` just above each integer to `−∞` just below the next
//! one, so every unit interval holds at least one root. Roots are bracketed
//! by sampling each interval and then polished with Brent's method in
//! coordinates relative to the nearest integer.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{self, Mode};
use crate::params::ModelParams;
use crate::roots::brent;
use crate::special_sums::{coth, cot_pi, s2_at, LatticePoint};

/// Offset from each integer at which the residual is first sampled.
pub const POLE_OFFSET: f64 = 1e-9;
/// Interior samples per unit interval when `g` is not known to be monotone.
pub const DEFAULT_SUBSAMPLES: usize = 64;
/// Interior samples per unit interval when the monotonicity certificate holds.
pub const CERTIFIED_SUBSAMPLES: usize = 8;
/// Eigenvalues closer than this are treated as duplicates.
pub const DEDUP_THRESHOLD: f64 = 1e-10;

/// One eigenvalue of the coupled model with its discrete-state weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenPair {
    /// Dimensionless eigenvalue `E/δ`.
    pub eps: f64,
    /// Nearest integer to `eps`.
    pub pole: i64,
    /// `eps - pole`, carried at full relative precision.
    pub offset: f64,
    /// `|⟨φ|ψ⟩|²`.
    pub weight: f64,
    /// `n` with `eps ∈ (n, n+1)`; `None` for roots outside a finite ladder.
    pub interval_index: Option<i64>,
    /// Residual of the eigenvalue equation at `eps`.
    pub residual: f64,
}

impl EigenPair {
    pub fn point(&self) -> LatticePoint {
        LatticePoint::new(self.pole, self.offset)
    }

    /// Ladder component `⟨k|ψ⟩ = √w · v_k / (δ(ε − k))` for the infinite model.
    pub fn k_component(&self, k: i64, p: &ModelParams) -> f64 {
        let gap = (self.pole - k) as f64 + self.offset;
        self.weight.sqrt() * p.coupling(k) / (p.delta * gap)
    }
}

/// Which secular equation produced a [`Spectrum`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumModel {
    /// Infinite ladder with Lorentzian couplings.
    Lorentzian,
    /// Infinite ladder with flat coupling (`a → ∞`).
    BixonJortner,
    /// Ladder truncated to `k = -n_cut..=n_cut`.
    Truncated { n_cut: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub params: ModelParams,
    pub model: SpectrumModel,
    /// Sorted by `eps`, strictly increasing.
    pub pairs: Vec<EigenPair>,
    pub window: (f64, f64),
    /// `1 − Σ weights`, clamped at zero.
    pub norm_deficit: f64,
}

impl Spectrum {
    pub(crate) fn assemble(
        params: ModelParams,
        model: SpectrumModel,
        mut pairs: Vec<EigenPair>,
        window: (f64, f64),
    ) -> Self {
        pairs.sort_by(|x, y| x.eps.total_cmp(&y.eps));
        pairs.dedup_by(|next, kept| {
            if (next.eps - kept.eps).abs() < DEDUP_THRESHOLD {
                if next.residual.abs() < kept.residual.abs() {
                    *kept = *next;
                }
                true
            } else {
                false
            }
        });
        let total = crate::dynamics::neumaier(pairs.iter().map(|p| p.weight));
        Self { params, model, pairs, window, norm_deficit: (1.0 - total).max(0.0) }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.eps).collect()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.weight).collect()
    }

    pub fn weight_sum(&self) -> f64 {
        crate::dynamics::neumaier(self.pairs.iter().map(|p| p.weight))
    }

    /// Eigenvalue whose `eps` is nearest to `target`.
    pub fn nearest(&self, target: f64) -> Option<&EigenPair> {
        self.pairs.iter().min_by(|x, y| (x.eps - target).abs().total_cmp(&(y.eps - target).abs()))
    }
}

/// A secular equation with `+∞`/`−∞` limits at the right/left of each pole.
pub(crate) trait SecularEquation: Sync {
    fn residual(&self, pt: LatticePoint) -> f64;
    fn weight(&self, pt: LatticePoint) -> f64;
}

/// The infinite Lorentzian model.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LorentzianEquation {
    eps_phi: f64,
    a: f64,
    alpha: f64,
    /// `(v/δ)²`
    ratio: f64,
}

impl LorentzianEquation {
    pub(crate) fn new(p: &ModelParams, alpha_offset: f64) -> Self {
        Self {
            eps_phi: p.eps_phi(),
            a: p.a,
            alpha: coth(PI * p.a) / p.a + alpha_offset,
            ratio: p.coupling_ratio_sq(),
        }
    }
}

impl SecularEquation for LorentzianEquation {
    #[inline]
    fn residual(&self, pt: LatticePoint) -> f64 {
        let eps = pt.eps();
        let x = eps / self.a;
        self.eps_phi + PI * self.ratio * (cot_pi(pt.offset) + self.alpha * eps) / (1.0 + x * x) - eps
    }

    #[inline]
    fn weight(&self, pt: LatticePoint) -> f64 {
        1.0 / (1.0 + self.ratio * s2_at(pt, self.a, self.alpha))
    }
}

/// The ladder truncated to `|k| <= n_cut`, matching the dense oracle.
#[derive(Debug, Clone)]
pub(crate) struct TruncatedEquation {
    eps_phi: f64,
    n_cut: i64,
    ratio: f64,
    /// `1/(1 + (k/a)²)` for `k = -n_cut..=n_cut`
    profile: Vec<f64>,
}

impl TruncatedEquation {
    pub(crate) fn new(p: &ModelParams, n_cut: u64) -> Self {
        let n = n_cut as i64;
        let profile = (-n..=n)
            .map(|k| {
                let x = k as f64 / p.a;
                1.0 / (1.0 + x * x)
            })
            .collect();
        Self { eps_phi: p.eps_phi(), n_cut: n, ratio: p.coupling_ratio_sq(), profile }
    }

    fn sum_pow(&self, pt: LatticePoint, square: bool) -> f64 {
        let mut s = 0.0;
        for (i, w) in self.profile.iter().enumerate() {
            let k = i as i64 - self.n_cut;
            let gap = (pt.pole - k) as f64 + pt.offset;
            s += if square { w / (gap * gap) } else { w / gap };
        }
        s
    }
}

impl SecularEquation for TruncatedEquation {
    fn residual(&self, pt: LatticePoint) -> f64 {
        self.eps_phi + self.ratio * self.sum_pow(pt, false) - pt.eps()
    }

    fn weight(&self, pt: LatticePoint) -> f64 {
        1.0 / (1.0 + self.ratio * self.sum_pow(pt, true))
    }
}

/// A sign-change bracket `[pole + lo, pole + hi]` of the residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub pole: i64,
    pub lo: f64,
    pub hi: f64,
    pub g_lo: f64,
    pub g_hi: f64,
}

impl Bracket {
    pub fn lo_eps(&self) -> f64 {
        self.pole as f64 + self.lo
    }

    pub fn hi_eps(&self) -> f64 {
        self.pole as f64 + self.hi
    }
}

/// Sample points of the unit interval `(n, n+1)`, written relative to the
/// nearer end. The midpoint appears once in each half so no bracket ever
/// straddles the two coordinate systems.
fn interval_samples(n: i64, subsamples: usize) -> Vec<LatticePoint> {
    let s = subsamples.max(2).div_ceil(2) * 2;
    let half = s / 2;
    let mut pts = Vec::with_capacity(s + 4);
    pts.push(LatticePoint::new(n, POLE_OFFSET));
    for j in 1..=half {
        pts.push(LatticePoint::new(n, j as f64 / s as f64));
    }
    for j in (1..=half).rev() {
        pts.push(LatticePoint::new(n + 1, -(j as f64) / s as f64));
    }
    pts.push(LatticePoint::new(n + 1, -POLE_OFFSET));
    pts
}

/// Moves a near-pole sample closer to its pole until the residual takes the
/// sign of the pole limit.
fn push_towards_pole<E: SecularEquation>(eq: &E, pt: LatticePoint, want_positive: bool) -> (LatticePoint, f64) {
    let mut pt = pt;
    let mut g = eq.residual(pt);
    while (g > 0.0) != want_positive && pt.offset.abs() > 1e-290 {
        pt.offset *= 1e-3;
        g = eq.residual(pt);
    }
    (pt, g)
}

/// Brackets and exact hits of the residual inside `(n, n+1)`.
pub(crate) fn bracket_interval<E: SecularEquation>(
    eq: &E,
    n: i64,
    subsamples: usize,
) -> (Vec<Bracket>, Vec<LatticePoint>) {
    let pts = interval_samples(n, subsamples);
    let mut vals: Vec<(LatticePoint, f64)> = pts.iter().map(|&pt| (pt, eq.residual(pt))).collect();
    let last = vals.len() - 1;
    if vals[0].1 <= 0.0 {
        vals[0] = push_towards_pole(eq, vals[0].0, true);
    }
    if vals[last].1 >= 0.0 {
        vals[last] = push_towards_pole(eq, vals[last].0, false);
    }

    let mut brackets = Vec::new();
    let mut exact = Vec::new();
    for (i, &(pt, g)) in vals.iter().enumerate() {
        if g == 0.0 && !(i > 0 && vals[i - 1].0.eps() == pt.eps()) {
            exact.push(pt);
        }
    }
    for w in vals.windows(2) {
        let ((p0, g0), (p1, g1)) = (w[0], w[1]);
        if p0.pole != p1.pole || g0 == 0.0 || g1 == 0.0 || (g0 > 0.0) == (g1 > 0.0) {
            continue;
        }
        brackets.push(Bracket { pole: p0.pole, lo: p0.offset, hi: p1.offset, g_lo: g0, g_hi: g1 });
    }
    (brackets, exact)
}

pub(crate) fn refine<E: SecularEquation>(eq: &E, b: &Bracket, tol: f64) -> (LatticePoint, f64) {
    let pole = b.pole;
    let root = brent(
        |y| eq.residual(LatticePoint::new(pole, y)),
        b.lo,
        b.hi,
        b.g_lo,
        b.g_hi,
        tol,
        1e-300,
    );
    (LatticePoint::new(pole, root.x), root.fx)
}

pub(crate) fn make_pair<E: SecularEquation>(eq: &E, pt: LatticePoint, residual: f64, bounded: bool) -> EigenPair {
    let eps = pt.eps();
    let interval = if pt.offset > 0.0 { pt.pole } else { pt.pole - 1 };
    EigenPair {
        eps,
        pole: pt.pole,
        offset: pt.offset,
        weight: eq.weight(pt),
        interval_index: bounded.then_some(interval),
        residual,
    }
}

/// Solves every root inside the unit intervals `n_range`.
pub(crate) fn solve_intervals<E: SecularEquation>(
    eq: &E,
    n_lo: i64,
    n_hi: i64,
    subsamples: usize,
    tol: f64,
    mode: Mode,
) -> Vec<EigenPair> {
    let count = (n_hi - n_lo).max(0) as usize;
    let per_interval = exec::map_range(mode, count, |i| {
        let n = n_lo + i as i64;
        let (brackets, exact) = bracket_interval(eq, n, subsamples);
        let mut out: Vec<EigenPair> = exact.into_iter().map(|pt| make_pair(eq, pt, 0.0, true)).collect();
        for b in &brackets {
            let (pt, g) = refine(eq, b, tol);
            out.push(make_pair(eq, pt, g, true));
        }
        out
    });
    per_interval.into_iter().flatten().collect()
}

/// Knobs for [`solve_spectrum_with`] and [`solve_adaptive`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Samples per unit interval when `g` may be non-monotone.
    pub subsamples: usize,
    /// Residual tolerance for root refinement; zero refines to full precision.
    pub tol: f64,
    /// Adaptive windows stop growing once `norm_deficit` drops below this.
    pub deficit_target: f64,
    /// Largest adaptive window width (in units of δ).
    pub max_width: f64,
    pub mode: Mode,
    /// Added to `α(a)` everywhere. Zero for the physical model; nonzero
    /// values exist only to check that the validation suite notices.
    pub alpha_offset: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            subsamples: DEFAULT_SUBSAMPLES,
            tol: 1e-14,
            deficit_target: 1e-6,
            max_width: 2000.0,
            mode: Mode::default(),
            alpha_offset: 0.0,
        }
    }
}

impl SolveOptions {
    fn samples_for(&self, p: &ModelParams) -> usize {
        if monotonicity_certificate(p) && self.alpha_offset == 0.0 {
            CERTIFIED_SUBSAMPLES
        } else {
            self.subsamples.max(8)
        }
    }
}

/// Residual `g(ε)` of the eigenvalue equation; zero exactly at eigenvalues.
pub fn residual_g(eps: f64, p: &ModelParams) -> Result<f64> {
    let pt = LatticePoint::from_eps(eps);
    if pt.offset.abs() < crate::special_sums::POLE_GUARD {
        return Err(Error::Pole { eps });
    }
    Ok(LorentzianEquation::new(p, 0.0).residual(pt))
}

fn window_intervals(window: (f64, f64)) -> Result<(i64, i64)> {
    let (lo, hi) = window;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidParams(format!("invalid window [{lo}, {hi}]")));
    }
    Ok((lo.floor() as i64, hi.ceil() as i64))
}

/// Every sign-change bracket of `g` in the unit intervals meeting `window`.
pub fn bracket_roots(p: &ModelParams, window: (f64, f64), subsamples: usize) -> Result<Vec<Bracket>> {
    p.require_coupled()?;
    let (n_lo, n_hi) = window_intervals(window)?;
    let eq = LorentzianEquation::new(p, 0.0);
    let mut out = Vec::new();
    for n in n_lo..n_hi {
        let (brackets, exact) = bracket_interval(&eq, n, subsamples.max(8));
        out.extend(brackets);
        // exact hits become zero-width brackets
        out.extend(exact.into_iter().map(|pt| Bracket {
            pole: pt.pole,
            lo: pt.offset,
            hi: pt.offset,
            g_lo: 0.0,
            g_hi: 0.0,
        }));
    }
    out.sort_by(|x, y| x.lo_eps().total_cmp(&y.lo_eps()));
    Ok(out)
}

/// Refines one bracket to an eigenvalue.
pub fn refine_root(bracket: &Bracket, p: &ModelParams, tol: f64) -> Result<f64> {
    let eq = LorentzianEquation::new(p, 0.0);
    let g_lo = eq.residual(LatticePoint::new(bracket.pole, bracket.lo));
    let g_hi = eq.residual(LatticePoint::new(bracket.pole, bracket.hi));
    if g_lo == 0.0 {
        return Ok(bracket.lo_eps());
    }
    if g_hi == 0.0 {
        return Ok(bracket.hi_eps());
    }
    if (g_lo > 0.0) == (g_hi > 0.0) {
        return Err(Error::InvalidBracket { lo: bracket.lo_eps(), hi: bracket.hi_eps() });
    }
    let b = Bracket { g_lo, g_hi, ..*bracket };
    Ok(refine(&eq, &b, tol).0.eps())
}

/// All eigenvalues inside `window` with their weights.
pub fn solve_spectrum(p: &ModelParams, window: (f64, f64)) -> Result<Spectrum> {
    solve_spectrum_with(p, window, &SolveOptions::default())
}

pub fn solve_spectrum_with(p: &ModelParams, window: (f64, f64), opts: &SolveOptions) -> Result<Spectrum> {
    p.require_coupled()?;
    let (n_lo, n_hi) = window_intervals(window)?;
    let eq = LorentzianEquation::new(p, opts.alpha_offset);
    let pairs = solve_intervals(&eq, n_lo, n_hi, opts.samples_for(p), opts.tol, opts.mode)
        .into_iter()
        .filter(|pr| pr.eps >= window.0 && pr.eps <= window.1)
        .collect();
    Ok(Spectrum::assemble(*p, SpectrumModel::Lorentzian, pairs, window))
}

/// Solves on a window centred on `ε_φ`, doubling its width until the
/// weight deficit falls below `opts.deficit_target` or the width reaches
/// `opts.max_width`.
pub fn solve_adaptive(p: &ModelParams, opts: &SolveOptions) -> Result<Spectrum> {
    p.require_coupled()?;
    let eq = LorentzianEquation::new(p, opts.alpha_offset);
    let samples = opts.samples_for(p);
    adaptive_loop(&eq, p, SpectrumModel::Lorentzian, samples, opts)
}

pub(crate) fn adaptive_loop<E: SecularEquation>(
    eq: &E,
    p: &ModelParams,
    model: SpectrumModel,
    samples: usize,
    opts: &SolveOptions,
) -> Result<Spectrum> {
    let centre = p.eps_phi().round() as i64;
    let max_half = ((opts.max_width / 2.0).floor() as i64).max(1);
    let mut half = 64.min(max_half);
    let mut pairs = solve_intervals(eq, centre - half, centre + half, samples, opts.tol, opts.mode);
    loop {
        let total: f64 = pairs.iter().map(|pr| pr.weight).sum();
        if 1.0 - total < opts.deficit_target || half >= max_half {
            break;
        }
        let next = (half * 2).min(max_half);
        pairs.extend(solve_intervals(eq, centre - next, centre - half, samples, opts.tol, opts.mode));
        pairs.extend(solve_intervals(eq, centre + half, centre + next, samples, opts.tol, opts.mode));
        half = next;
    }
    let window = ((centre - half) as f64, (centre + half) as f64);
    Ok(Spectrum::assemble(*p, model, pairs, window))
}

/// Spectrum of the ladder truncated to `k = -n_cut..=n_cut`: exactly
/// `2·n_cut + 2` eigenvalues, the same finite model the dense oracle
/// diagonalizes.
pub fn solve_truncated(p: &ModelParams, n_cut: u64, opts: &SolveOptions) -> Result<Spectrum> {
    p.require_coupled()?;
    if n_cut == 0 {
        return Err(Error::InvalidParams("n_cut must be at least 1".into()));
    }
    let eq = TruncatedEquation::new(p, n_cut);
    let n = n_cut as i64;
    // g_N is strictly decreasing between poles: one root per interval
    let mut pairs = solve_intervals(&eq, -n, n, 2, opts.tol, opts.mode);
    pairs.push(outer_root(&eq, n, true, opts.tol));
    pairs.push(outer_root(&eq, -n, false, opts.tol));
    let window = (pairs.iter().map(|x| x.eps).fold(f64::INFINITY, f64::min), pairs.iter().map(|x| x.eps).fold(f64::NEG_INFINITY, f64::max));
    Ok(Spectrum::assemble(*p, SpectrumModel::Truncated { n_cut }, pairs, window))
}

/// Root of the truncated equation beyond the outermost ladder level.
fn outer_root(eq: &TruncatedEquation, edge: i64, above: bool, tol: f64) -> EigenPair {
    let sign = if above { 1.0 } else { -1.0 };
    let near = LatticePoint::new(edge, 0.5 * sign);
    let g_near = eq.residual(near);
    // above the top level g falls from +∞; below the bottom one it rises to +∞ from -∞
    let root_is_close = if above { g_near <= 0.0 } else { g_near >= 0.0 };
    if root_is_close {
        let start = if above { POLE_OFFSET } else { -POLE_OFFSET };
        let (pole_pt, g_pole) = push_towards_pole(eq, LatticePoint::new(edge, start), above);
        let (lo, hi, g_lo, g_hi) = if above {
            (pole_pt.offset, 0.5, g_pole, g_near)
        } else {
            (-0.5, pole_pt.offset, g_near, g_pole)
        };
        let (pt, g) = refine(eq, &Bracket { pole: edge, lo, hi, g_lo, g_hi }, tol);
        return make_pair(eq, pt, g, false);
    }
    // step outward until the sign flips, then refine in absolute coordinates
    let mut step = 1.0;
    let mut inner = 0.5;
    let mut g_inner = g_near;
    loop {
        let outer = inner + step;
        let g_outer = eq.residual(LatticePoint::new(edge, outer * sign));
        if (g_outer > 0.0) != (g_inner > 0.0) || g_outer == 0.0 {
            let (lo, hi, g_lo, g_hi) = if above {
                (inner, outer, g_inner, g_outer)
            } else {
                (-outer, -inner, g_outer, g_inner)
            };
            let root = brent(|y| eq.residual(LatticePoint::new(edge, y)), lo, hi, g_lo, g_hi, tol, 1e-300);
            let eps = edge as f64 + root.x;
            return make_pair(eq, LatticePoint::from_eps(eps), root.fx, false);
        }
        inner = outer;
        g_inner = g_outer;
        step *= 2.0;
    }
}

/// Ladder component `⟨k|ψ_μ⟩` of the eigenvector with eigenvalue `eps`.
pub fn k_component(eps: f64, k: i64, p: &ModelParams) -> Result<f64> {
    let pt = LatticePoint::from_eps(eps);
    if pt.pole == k && pt.offset == 0.0 {
        return Err(Error::Pole { eps });
    }
    let eq = LorentzianEquation::new(p, 0.0);
    let w = eq.weight(pt);
    let gap = (pt.pole - k) as f64 + pt.offset;
    Ok(w.sqrt() * p.coupling(k) / (p.delta * gap))
}

/// Predicted small-`a` displacement of the eigenvalue next to the integer `n`.
pub fn near_integer_shift(n: i64, p: &ModelParams) -> Result<f64> {
    if n == 0 {
        return Err(Error::Degenerate("the shift is defined only for n != 0".into()));
    }
    let nf = n as f64;
    let r = p.coupling_ratio_sq();
    let den = nf - p.eps_phi() - r / nf;
    if den.abs() < 1e-12 {
        return Err(Error::Degenerate(format!("denominator vanishes at n = {n}")));
    }
    Ok(r * p.a * p.a / (nf * nf) / den)
}

/// True when `coth(πa) <= πa`, which makes `g` monotone on every unit interval.
pub fn monotonicity_certificate(p: &ModelParams) -> bool {
    coth(PI * p.a) <= PI * p.a
}

/// The width `a₀` solving `coth(πa₀) = πa₀`.
pub fn monotonicity_threshold() -> f64 {
    let f = |a: f64| coth(PI * a) - PI * a;
    brent(f, 0.1, 1.0, f(0.1), f(1.0), 0.0, 0.0).x
}

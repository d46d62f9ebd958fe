//! Parameter sets of the published decay figures.
//!
//! Each preset is a sequence of panels; a panel fixes the model, the time
//! range and the reference curves drawn over it. Single panels are
//! addressed as `<preset>-<tag>`, e.g. `beta05-a20` or `overdamped-d0.01`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::dynamics::{survival_series_with, DEFAULT_STEPS};
use crate::exec::Mode;
use crate::error::{Error, Result};
use crate::limits::LimitSpec;
use crate::params::ModelParams;
use crate::spectral::{solve_adaptive, SolveOptions};

pub const PRESET_NAMES: [&str; 6] = ["beta05", "beta3", "overdamped", "underdamped", "intermediate", "rabi-continuum"];

/// Deficit target for figure dynamics; well below plotting resolution.
pub const FIGURE_DEFICIT: f64 = 1e-5;
/// Adaptive width cap (in units of δ) for figure dynamics. The continuum
/// panels at δ = 0.01 need windows of ~10⁵ levels.
pub const FIGURE_MAX_WIDTH: f64 = 4e6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Panel {
    /// `<preset>-<tag>`
    pub label: String,
    pub params: ModelParams,
    pub overlays: Vec<LimitSpec>,
    pub t_max: f64,
    pub n_steps: usize,
}

impl Panel {
    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions { deficit_target: FIGURE_DEFICIT, max_width: FIGURE_MAX_WIDTH, ..SolveOptions::default() }
    }

    /// General-model survival probability and every overlay on the panel grid.
    pub fn evaluate(&self, mode: Mode) -> Result<PanelCurves> {
        let opts = SolveOptions { mode, ..self.solve_options() };
        let spectrum = solve_adaptive(&self.params, &opts)?;
        let general = survival_series_with(&spectrum, self.t_max, self.n_steps, false, mode)?;
        let overlays = self
            .overlays
            .iter()
            .map(|o| Ok((o.name().to_string(), o.survival(&general.times)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(PanelCurves { times: general.times, general: general.probs, overlays, norm_deficit: spectrum.norm_deficit })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PanelCurves {
    pub times: Vec<f64>,
    pub general: Vec<f64>,
    /// `(model name, curve)` in overlay order
    pub overlays: Vec<(String, Vec<f64>)>,
    pub norm_deficit: f64,
}

impl PanelCurves {
    pub fn overlay(&self, name: &str) -> Option<&[f64]> {
        self.overlays.iter().find(|(n, _)| n == name).map(|(_, c)| c.as_slice())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Preset {
    pub name: String,
    pub panels: Vec<Panel>,
}

impl Preset {
    /// Continuum reference curve shared by all panels, if the figure has one.
    pub fn continuum_limit(&self) -> Option<LimitSpec> {
        match self.name.as_str() {
            "overdamped" | "underdamped" | "intermediate" => {
                self.panels[0].overlays.iter().copied().find(|o| matches!(o, LimitSpec::Fano { .. }))
            }
            _ => None,
        }
    }
}

fn panel(label: String, params: ModelParams, overlays: Vec<LimitSpec>, t_max: f64) -> Panel {
    Panel { label, params, overlays, t_max, n_steps: DEFAULT_STEPS }
}

/// Flat-ladder figures: fixed `v`, `δ = 1`, sweep of `a`.
fn ladder_sweep(name: &str, v: f64) -> Result<Vec<Panel>> {
    let delta = 1.0;
    [0.1, 1.0, 5.0, 20.0]
        .iter()
        .map(|&a| {
            let p = ModelParams::new(v, delta, a, 0.0)?;
            let overlays = vec![
                LimitSpec::Rabi { e1: 0.0, v },
                LimitSpec::Bj { v, delta, e_phi: 0.0 },
                LimitSpec::Ww { big_gamma: p.big_gamma() },
            ];
            Ok(panel(format!("{name}-a{a}"), p, overlays, 4.0 * PI))
        })
        .collect()
}

/// Continuum-approach figures: fixed `Γ` and `γ`, shrinking `δ`.
fn continuum_sweep(name: &str, big_gamma: f64, gamma: f64, t_max: f64) -> Result<Vec<Panel>> {
    let w = (big_gamma * gamma / 2.0).sqrt();
    [1.0, 0.5, 0.1, 0.01]
        .iter()
        .map(|&delta| {
            let p = ModelParams::from_rates(big_gamma, gamma, delta, 0.0)?;
            let overlays = vec![LimitSpec::Fano { w, gamma, e_phi: 0.0 }, LimitSpec::Ww { big_gamma }];
            Ok(panel(format!("{name}-d{delta}"), p, overlays, t_max))
        })
        .collect()
}

fn intermediate() -> Result<Vec<Panel>> {
    let (big_gamma, gamma): (f64, f64) = (3.0, 0.5);
    let w = (big_gamma * gamma / 2.0).sqrt();
    [(0.5, 0.69), (0.71, 0.57), (1.25, 0.43), (5.0, 0.21)]
        .iter()
        .map(|&(a, v)| {
            let p = ModelParams::new(v, gamma / a, a, 0.0)?;
            let overlays = vec![LimitSpec::Fano { w, gamma, e_phi: 0.0 }, LimitSpec::Ww { big_gamma }];
            Ok(panel(format!("intermediate-a{a}"), p, overlays, 10.0))
        })
        .collect()
}

/// Fixed small `δ` and `W = 1`; shrinking `γ` moves the continuum decay
/// towards Rabi oscillations at frequency `2W`.
fn rabi_continuum() -> Result<Vec<Panel>> {
    let (delta, w): (f64, f64) = (0.005, 1.0);
    [1.0, 0.5, 0.2, 0.05]
        .iter()
        .map(|&gamma| {
            let v = w * (delta / (PI * gamma)).sqrt();
            let p = ModelParams::new(v, delta, gamma / delta, 0.0)?;
            let overlays = vec![LimitSpec::Fano { w, gamma, e_phi: 0.0 }, LimitSpec::Rabi { e1: 0.0, v: w }];
            Ok(panel(format!("rabi-continuum-g{gamma}"), p, overlays, 4.0 * PI))
        })
        .collect()
}

/// Resolves a figure preset by name.
pub fn preset(name: &str) -> Result<Preset> {
    let panels = match name {
        "beta05" => ladder_sweep(name, 0.16)?,
        "beta3" => ladder_sweep(name, 0.39)?,
        "overdamped" => continuum_sweep(name, 0.5, 300.0, 6.0)?,
        "underdamped" => continuum_sweep(name, 12.25, 0.5, 3.0)?,
        "intermediate" => intermediate()?,
        "rabi-continuum" => rabi_continuum()?,
        _ => {
            return Err(Error::InvalidParams(format!(
                "unknown preset '{name}' (expected one of {})",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    Ok(Preset { name: name.to_string(), panels })
}

/// Resolves a single panel label such as `beta05-a20`.
pub fn panel_by_label(label: &str) -> Result<Panel> {
    for name in PRESET_NAMES {
        if label.starts_with(name) && label.len() > name.len() {
            if let Some(found) = preset(name)?.panels.into_iter().find(|p| p.label == label) {
                return Ok(found);
            }
        }
    }
    Err(Error::InvalidParams(format!("unknown preset panel '{label}'")))
}

use std::fs;
use std::path::Path;

use qladder::dense::oracle_survival;
use qladder::dynamics::{survival_series_with, time_grid};
use qladder::limits::LimitSpec;
use qladder::output::{format_float, svg_plot, Cell, Table};
use qladder::presets::{panel_by_label, preset, Panel};
use qladder::spectral::{solve_adaptive, solve_spectrum_with};
use qladder::validate::{self, ValidateOptions};
use qladder::{exec, Mode, ModelParams, SolveOptions};

use crate::{exit, CompareArgs, DynamicsArgs, Engine, Failure, Format, LimitKind, LimitsArgs, ModelFlags, SpectrumArgs, ValidateArgs};

type Outcome = Result<u8, Failure>;

fn emit(table: &Table, format: Format, out: Option<&Path>) -> Result<(), Failure> {
    let text = match format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    };
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::io(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn required(value: Option<f64>, flag: &str) -> Result<f64, Failure> {
    value.ok_or_else(|| Failure::usage(format!("missing required flag --{flag}")))
}

fn model_params(m: &ModelFlags) -> Result<ModelParams, Failure> {
    let p = ModelParams::new(required(m.v, "v")?, required(m.delta, "delta")?, required(m.a, "a")?, m.e_phi)?;
    if p.v == 0.0 {
        return Err(Failure::usage("coupling must be nonzero"));
    }
    Ok(p)
}

fn echo_params(t: &mut Table, p: &ModelParams) {
    t.meta("v", p.v).meta("delta", p.delta).meta("a", p.a).meta("e_phi", p.e_phi);
}

pub fn spectrum(args: &SpectrumArgs, mode: Mode) -> Outcome {
    let p = model_params(&args.model)?;
    let opts = SolveOptions { deficit_target: args.deficit, max_width: args.max_width, mode, ..SolveOptions::default() };
    let s = match (args.window_min, args.window_max) {
        (Some(lo), Some(hi)) => solve_spectrum_with(&p, (lo, hi), &opts)?,
        _ => solve_adaptive(&p, &opts)?,
    };
    let mut t = Table::new(["index", "eps", "energy", "weight", "interval_index", "residual"]);
    echo_params(&mut t, &p);
    t.meta("window", format!("{} {}", s.window.0, s.window.1));
    t.meta("eigenvalues", s.len());
    t.meta("norm_deficit", format_float(s.norm_deficit));
    for (i, pr) in s.pairs.iter().enumerate() {
        t.push(vec![
            Cell::Int(i as i64),
            pr.eps.into(),
            (pr.eps * p.delta).into(),
            pr.weight.into(),
            pr.interval_index.into(),
            pr.residual.into(),
        ]);
    }
    emit(&t, args.format, args.out.as_deref())?;
    Ok(exit::OK)
}

pub fn dynamics(args: &DynamicsArgs, mode: Mode) -> Outcome {
    let (params, preset_t_max, opts) = match &args.preset {
        Some(label) => {
            let panel = panel_by_label(label)?;
            (panel.params, Some(panel.t_max), SolveOptions { mode, ..panel.solve_options() })
        }
        None => (model_params(&args.model)?, None, SolveOptions { mode, ..SolveOptions::default() }),
    };
    let t_max = args.t_max.or(preset_t_max).ok_or_else(|| Failure::usage("missing required flag --t-max"))?;
    if args.t_steps == 0 {
        return Err(Failure::usage("--t-steps must be positive"));
    }

    let semi = if args.engine != Engine::Oracle {
        let s = solve_adaptive(&params, &opts)?;
        Some(survival_series_with(&s, t_max, args.t_steps, args.renormalize, mode)?)
    } else {
        None
    };
    let oracle = if args.engine != Engine::Semi {
        if args.n_cut == 0 {
            return Err(Failure::usage("--n-cut must be positive"));
        }
        Some(oracle_survival(&params, args.n_cut, t_max, args.t_steps)?)
    } else {
        None
    };

    let mut columns = vec!["t"];
    if semi.is_some() {
        columns.push("p_semi");
    }
    if oracle.is_some() {
        columns.push("p_oracle");
    }
    if semi.is_some() && oracle.is_some() {
        columns.push("abs_diff");
    }
    let mut t = Table::new(columns);
    if let Some(label) = &args.preset {
        t.meta("preset", label);
    }
    echo_params(&mut t, &params);
    t.meta("t_max", t_max).meta("t_steps", args.t_steps);
    if let Some(s) = &semi {
        t.meta("norm_deficit", format_float(s.meta.norm_deficit)).meta("renormalized", s.meta.renormalized);
    }
    if oracle.is_some() {
        t.meta("n_cut", args.n_cut);
    }
    let times = time_grid(t_max, args.t_steps);
    for (i, &time) in times.iter().enumerate() {
        let mut row = vec![Cell::Float(time)];
        let a = semi.as_ref().map(|s| s.probs[i]);
        let b = oracle.as_ref().map(|s| s.probs[i]);
        row.extend(a.map(Cell::Float));
        row.extend(b.map(Cell::Float));
        if let (Some(a), Some(b)) = (a, b) {
            row.push(Cell::Float((a - b).abs()));
        }
        t.push(row);
    }
    emit(&t, args.format, args.out.as_deref())?;
    Ok(exit::OK)
}

fn limit_spec(args: &LimitsArgs) -> Result<(LimitSpec, Option<f64>), Failure> {
    if let Some(name) = &args.preset {
        if args.kind != LimitKind::Fano {
            return Err(Failure::usage("--preset is only available with --kind fano"));
        }
        let p = preset(name)?;
        let spec = p.continuum_limit().ok_or_else(|| Failure::usage(format!("preset '{name}' has no continuum limit")))?;
        return Ok((spec, Some(p.panels[0].t_max)));
    }
    let spec = match args.kind {
        LimitKind::Rabi => LimitSpec::Rabi { e1: args.e_phi, v: required(args.v, "v")? },
        LimitKind::Bj => LimitSpec::Bj { v: required(args.v, "v")?, delta: required(args.delta, "delta")?, e_phi: args.e_phi },
        LimitKind::Ww => LimitSpec::Ww { big_gamma: required(args.big_gamma, "big-gamma")? },
        LimitKind::Fano => LimitSpec::Fano { w: required(args.w, "w")?, gamma: required(args.gamma, "gamma")?, e_phi: args.e_phi },
    };
    Ok((spec, None))
}

pub fn limits(args: &LimitsArgs) -> Outcome {
    let (spec, preset_t_max) = limit_spec(args)?;
    let t_max = args.t_max.or(preset_t_max).ok_or_else(|| Failure::usage("missing required flag --t-max"))?;
    if !(t_max > 0.0) || args.t_steps == 0 {
        return Err(Failure::usage("the time grid needs --t-max > 0 and --t-steps > 0"));
    }
    let times = time_grid(t_max, args.t_steps);
    let p = spec.survival(&times)?;
    let mut t = Table::new(["t", "p"]);
    t.meta("kind", spec.name());
    t.meta("spec", format!("{spec:?}"));
    if let Some(name) = &args.preset {
        t.meta("preset", name);
    }
    t.meta("t_max", t_max).meta("t_steps", args.t_steps);
    for (x, y) in times.iter().zip(&p) {
        t.push(vec![(*x).into(), (*y).into()]);
    }
    emit(&t, args.format, args.out.as_deref())?;
    Ok(exit::OK)
}

fn panel_table(panel: &Panel, curves: &qladder::presets::PanelCurves) -> Table {
    let mut columns = vec!["t".to_string(), "p_general".to_string()];
    columns.extend(curves.overlays.iter().map(|(n, _)| format!("p_{n}")));
    let mut t = Table::new(columns);
    t.meta("panel", &panel.label);
    echo_params(&mut t, &panel.params);
    t.meta("big_gamma", panel.params.big_gamma()).meta("gamma", panel.params.gamma()).meta("w", panel.params.w());
    t.meta("t_max", panel.t_max).meta("t_steps", panel.n_steps);
    t.meta("norm_deficit", format_float(curves.norm_deficit));
    for o in &panel.overlays {
        t.meta(format!("overlay_{}", o.name()), format!("{o:?}"));
    }
    for (i, &time) in curves.times.iter().enumerate() {
        let mut row = vec![Cell::Float(time), Cell::Float(curves.general[i])];
        row.extend(curves.overlays.iter().map(|(_, c)| Cell::Float(c[i])));
        t.push(row);
    }
    t
}

pub fn compare(args: &CompareArgs, mode: Mode) -> Outcome {
    let p = preset(&args.preset)?;
    let curves = exec::try_map_slice(mode, &p.panels, |panel| panel.evaluate(mode))?;
    fs::create_dir_all(&args.out).map_err(|e| Failure::io(&args.out, e))?;
    for (panel, c) in p.panels.iter().zip(&curves) {
        let path = args.out.join(format!("{}.csv", panel.label));
        fs::write(&path, panel_table(panel, c).to_csv()).map_err(|e| Failure::io(&path, e))?;
        if args.svg {
            let mut series: Vec<(&str, &[f64])> = vec![("general", c.general.as_slice())];
            series.extend(c.overlays.iter().map(|(n, v)| (n.as_str(), v.as_slice())));
            let path = args.out.join(format!("{}.svg", panel.label));
            fs::write(&path, svg_plot(&panel.label, &c.times, &series)).map_err(|e| Failure::io(&path, e))?;
        }
    }
    Ok(exit::OK)
}

pub fn validate(args: &ValidateArgs, mode: Mode) -> Outcome {
    let opts = ValidateOptions { alpha_offset: args.perturb_alpha, mode };
    let report = validate::run(&opts);
    let mut table = report.to_table();
    if args.perturb_alpha != 0.0 {
        table.meta("perturb_alpha", args.perturb_alpha);
    }
    emit(&table, args.format, args.out.as_deref())?;
    let failed: Vec<&str> = report.failures().map(|c| c.name).collect();
    if failed.is_empty() {
        eprintln!("validate: all {} checks passed", report.checks.len());
        Ok(exit::OK)
    } else {
        for c in report.failures() {
            match &c.error {
                Some(e) => eprintln!("FAIL {}: {e}", c.name),
                None => eprintln!("FAIL {}: measured {:e} > bound {:e}", c.name, c.measured, c.bound),
            }
        }
        Ok(exit::VALIDATION)
    }
}

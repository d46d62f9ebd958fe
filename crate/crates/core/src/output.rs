//! Deterministic CSV, JSON and SVG emission.

use std::fmt::Write as _;

use serde_json::{Map, Value};

pub const TOOL_VERSION: &str = concat!("qladder ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(&'static str),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match *self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format_float(x),
            Cell::Text(s) => s.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match *self {
            Cell::Int(i) => Value::from(i),
            Cell::Float(x) => serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null),
            Cell::Text(s) => Value::from(s),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<i64> for Cell {
    fn from(i: i64) -> Self {
        Cell::Int(i)
    }
}

impl From<Option<i64>> for Cell {
    fn from(i: Option<i64>) -> Self {
        i.map_or(Cell::Empty, Cell::Int)
    }
}

/// 17 significant digits: round-trips every double.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// Column-oriented table with `key: value` metadata.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        let mut t = Self { columns: columns.into_iter().map(Into::into).collect(), ..Self::default() };
        t.meta.push(("tool".into(), TOOL_VERSION.into()));
        t
    }

    pub fn meta(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.meta.push((key.into(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<Cell>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k}: {}", v.replace('\n', " "));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let meta: Map<String, Value> = self.meta.iter().map(|(k, v)| (k.clone(), Value::from(v.as_str()))).collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Object(self.columns.iter().cloned().zip(r.iter().map(Cell::json)).collect()))
            .collect();
        let mut doc = Map::new();
        doc.insert("meta".into(), Value::Object(meta));
        doc.insert("rows".into(), Value::Array(rows));
        let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("json values always serialize");
        s.push('\n');
        s
    }
}

pub const SVG_WIDTH: f64 = 800.0;
pub const SVG_HEIGHT: f64 = 500.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"];

/// Line plot of several series over a shared x grid; the first series is
/// solid, the rest dashed.
pub fn svg_plot(title: &str, xs: &[f64], series: &[(&str, &[f64])]) -> String {
    let (left, right, top, bottom) = (60.0, 20.0, 40.0, 50.0);
    let pw = SVG_WIDTH - left - right;
    let ph = SVG_HEIGHT - top - bottom;
    let (x0, x1) = bounds(xs.iter().copied());
    let (mut y0, mut y1) = bounds(series.iter().flat_map(|(_, ys)| ys.iter().copied()));
    y0 = y0.min(0.0);
    y1 = y1.max(1.0);
    let sx = |x: f64| left + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| top + (y1 - y) / (y1 - y0) * ph;

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#, SVG_WIDTH / 2.0, escape(title));
    let _ = writeln!(out, r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
    for &(lx, ly) in &[(x0, y0), (x1, y1)] {
        let _ = writeln!(out, r#"<text x="{:.2}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">{:.3}</text>"#, sx(lx), SVG_HEIGHT - bottom + 18.0, lx);
        let _ = writeln!(out, r#"<text x="{}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="end">{:.3}</text>"#, left - 6.0, sy(ly) + 4.0, ly);
    }
    let _ = writeln!(out, r#"<text x="{}" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle">t</text>"#, left + pw / 2.0, SVG_HEIGHT - 12.0);
    for (i, (name, ys)) in series.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let dash = if i == 0 { "" } else { r#" stroke-dasharray="6 4""# };
        let mut pts = String::new();
        for (&x, &y) in xs.iter().zip(ys.iter()) {
            if y.is_finite() {
                let _ = write!(pts, "{:.2},{:.2} ", sx(x), sy(y));
            }
        }
        let _ = writeln!(out, r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5"{dash} points="{}"/>"#, pts.trim_end());
        let ly = top + 16.0 + 18.0 * i as f64;
        let lx = left + pw - 150.0;
        let _ = writeln!(out, r#"<line x1="{lx}" y1="{}" x2="{}" y2="{}" stroke="{colour}" stroke-width="2"{dash}/>"#, ly - 4.0, lx + 24.0, ly - 4.0);
        let _ = writeln!(out, r#"<text x="{}" y="{ly}" font-family="sans-serif" font-size="12">{}</text>"#, lx + 30.0, escape(name));
    }
    out.push_str("</svg>\n");
    out
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !(lo < hi) {
        let c = if lo.is_finite() { lo } else { 0.0 };
        return (c - 0.5, c + 0.5);
    }
    (lo, hi)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(["t", "p", "k"]);
        t.meta("v", 0.16);
        t.push(vec![0.0.into(), 1.0.into(), Some(3).into()]);
        t.push(vec![0.1.into(), (1.0 / 3.0).into(), None.into()]);
        t
    }

    #[test]
    fn csv_layout() {
        let csv = sample().to_csv();
        let lines: Vec<&str> = csv.split('\n').collect();
        assert!(lines[0].starts_with("# tool: qladder "));
        assert_eq!(lines[1], "# v: 0.16");
        assert_eq!(lines[2], "t,p,k");
        assert_eq!(lines[3], "0.0000000000000000e0,1.0000000000000000e0,3");
        assert!(lines[4].ends_with(","));
        assert!(!csv.contains('\r'));
        assert!(csv.ends_with('\n'));
    }

    #[test]
    fn floats_round_trip() {
        for &x in &[1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE, 0.1 + 0.2] {
            let s = format_float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17);
        }
    }

    #[test]
    fn json_layout() {
        let v: Value = serde_json::from_str(&sample().to_json()).unwrap();
        assert_eq!(v["meta"]["v"], "0.16");
        assert_eq!(v["rows"].as_array().unwrap().len(), 2);
        assert_eq!(v["rows"][0]["k"], 3);
        assert!(v["rows"][1]["k"].is_null());
        assert_eq!(v["rows"][1]["p"].as_f64().unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn svg_has_one_polyline_per_series() {
        let xs = [0.0, 1.0, 2.0];
        let s = svg_plot("demo <1>", &xs, &[("a", &[1.0, 0.5, 0.2]), ("b", &[1.0, 0.7, 0.1])]);
        assert_eq!(s.matches("<polyline").count(), 2);
        assert!(s.contains(r#"viewBox="0 0 800 500""#));
        assert!(s.contains("demo &lt;1&gt;"));
        assert!(s.trim_end().ends_with("</svg>"));
    }
}

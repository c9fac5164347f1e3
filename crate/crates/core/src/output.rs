//! CSV output: comma separated, `.` decimal point, header row, LF line
//! endings. Floats are written in scientific notation with 17 significant
//! digits, which round-trips every `f64` and keeps files byte-stable.

use std::fmt::Write as _;

use crate::contmodel::ContinuousDraw;
use crate::gcurve::{CurvePoint, ProbSample};
use crate::tailfit::TailFit;

pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(usize),
    Bool(bool),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Float(x) => fmt_f64(*x),
            Cell::Int(x) => x.to_string(),
            Cell::Bool(x) => x.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width must match header");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

/// `q,mass,provenance` rows.
pub fn curve_csv(points: &[CurvePoint]) -> String {
    let mut t = CsvTable::new(&["q", "mass", "provenance"]);
    for p in points {
        t.push(vec![
            p.q.into(),
            p.mass.into(),
            p.provenance.to_string().into(),
        ]);
    }
    t.render()
}

/// One `p` column, ascending.
pub fn sample_csv(sample: &ProbSample) -> String {
    let mut t = CsvTable::new(&["p"]);
    for &p in sample.values() {
        t.push(vec![p.into()]);
    }
    t.render()
}

pub fn draws_csv(draws: &[ContinuousDraw]) -> String {
    let mut t = CsvTable::new(&["x1", "x2", "x3", "p"]);
    for d in draws {
        t.push(vec![d.x1.into(), d.x2.into(), d.x3.into(), d.p.into()]);
    }
    t.render()
}

/// One `pair` row per elemental estimate followed by a `summary` row.
pub fn fit_report_csv(fit: &TailFit) -> String {
    let mut t = CsvTable::new(&[
        "record", "i", "j", "delta", "alpha", "status", "u", "m", "robust", "g_at_u",
    ]);
    for p in &fit.pairs {
        t.push(vec![
            "pair".into(),
            p.i.into(),
            p.j.into(),
            p.delta.into(),
            p.alpha.into(),
            p.status.to_string().into(),
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
        ]);
    }
    let params = fit.model.params();
    t.push(vec![
        "summary".into(),
        Cell::Empty,
        Cell::Empty,
        params.delta().into(),
        params.alpha().into(),
        Cell::Empty,
        fit.model.u().into(),
        fit.m.into(),
        fit.robust.to_string().into(),
        fit.model.g_at_u().into(),
    ]);
    t.render()
}

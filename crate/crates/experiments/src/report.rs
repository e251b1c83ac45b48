//! Result tables, CSV output and SVG line charts.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use crate::fit::SlopeFit;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    /// Fixed formatting so reruns give identical bytes.
    pub fn render(&self) -> String {
        match self {
            Self::Int(v) => v.to_string(),
            Self::Float(v) => format_float(*v),
            Self::Text(s) => s.clone(),
            Self::Bool(b) => b.to_string(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Self::Int(v) => Some(*v as f64),
            Self::Float(v) => Some(*v),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Self::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Self::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Self::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Self::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Self::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Self::Text(v)
    }
}

pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.12e}")
    }
}

/// A named slope fit attached to a table.
#[derive(Clone, Debug, PartialEq)]
pub struct SlopeRow {
    pub label: String,
    pub fit: SlopeFit,
}

/// Which columns to draw, and whether the axes are logarithmic.
#[derive(Clone, Debug, PartialEq)]
pub struct PlotSpec {
    pub x: String,
    pub ys: Vec<String>,
    pub log_x: bool,
    pub log_y: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResultTable {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub slopes: Vec<SlopeRow>,
    pub plot: Option<PlotSpec>,
}

impl ResultTable {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            slopes: Vec::new(),
            plot: None,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            bail!("{}: row has {} cells for {} columns", self.name, row.len(), self.columns.len());
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn with_plot(mut self, x: &str, ys: &[&str], log_x: bool, log_y: bool) -> Self {
        self.plot = Some(PlotSpec {
            x: x.into(),
            ys: ys.iter().map(|s| s.to_string()).collect(),
            log_x,
            log_y,
        });
        self
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .with_context(|| format!("{}: no column `{name}`", self.name))
    }

    /// Numeric values of one column; text cells are skipped.
    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let j = self.column_index(name)?;
        Ok(self.rows.iter().filter_map(|r| r[j].as_f64()).collect())
    }

    pub fn slope(&self, label: &str) -> Option<&SlopeFit> {
        self.slopes.iter().find(|s| s.label == label).map(|s| &s.fit)
    }

    /// Writes `<name>.csv`, `<name>_slopes.csv` (if any) and `<name>.svg`
    /// (if a plot is set) into `dir`; returns the paths written.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let mut written = Vec::new();
        let path = dir.join(format!("{}.csv", self.name));
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()?;
        written.push(path);
        if !self.slopes.is_empty() {
            let path = dir.join(format!("{}_slopes.csv", self.name));
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record(["fit", "slope", "half_width_95", "intercept", "residual", "points", "notes"])?;
            for s in &self.slopes {
                w.write_record([
                    s.label.clone(),
                    format_float(s.fit.slope),
                    format_float(s.fit.half_width),
                    format_float(s.fit.intercept),
                    format_float(s.fit.residual),
                    s.fit.points.to_string(),
                    s.fit.notes.join("; "),
                ])?;
            }
            w.flush()?;
            written.push(path);
        }
        if let Some(svg) = self.svg()? {
            let path = dir.join(format!("{}.svg", self.name));
            std::fs::write(&path, svg)?;
            written.push(path);
        }
        Ok(written)
    }

    /// Static line chart of the plot columns, or `None` without a plot spec.
    pub fn svg(&self) -> Result<Option<String>> {
        let Some(plot) = &self.plot else {
            return Ok(None);
        };
        let xi = self.column_index(&plot.x)?;
        let mut series = Vec::new();
        for y in &plot.ys {
            let yi = self.column_index(y)?;
            let pts: Vec<(f64, f64)> = self
                .rows
                .iter()
                .filter_map(|r| Some((r[xi].as_f64()?, r[yi].as_f64()?)))
                .filter(|(x, y)| (!plot.log_x || *x > 0.0) && (!plot.log_y || *y > 0.0))
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .map(|(x, y)| {
                    (if plot.log_x { x.log10() } else { x }, if plot.log_y { y.log10() } else { y })
                })
                .collect();
            series.push((y.as_str(), pts));
        }
        Ok(Some(line_chart(&self.name, &plot.x, plot.log_x, plot.log_y, &series)))
    }
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn line_chart(title: &str, x_label: &str, log_x: bool, log_y: bool, series: &[(&str, Vec<(f64, f64)>)]) -> String {
    let (w, h, pad) = (640.0, 420.0, 60.0);
    let all = series.iter().flat_map(|(_, p)| p.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x0 > x1 {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-300 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-300 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| pad + (x - x0) / (x1 - x0) * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - (y - y0) / (y1 - y0) * (h - 2.0 * pad);
    let axis = |log: bool, v: f64| if log { format!("1e{v:.2}") } else { format!("{v:.3e}") };
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{title}</text>"#, w / 2.0);
    let _ = writeln!(
        s,
        r#"<path d="M{pad},{pad} V{b} H{r}" fill="none" stroke="black"/>"#,
        b = h - pad,
        r = w - pad
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{x_label}{}</text>"#, w / 2.0, h - 15.0, if log_x { " (log10)" } else { "" });
    let _ = writeln!(s, r#"<text x="{pad}" y="{}" text-anchor="start">{}</text>"#, h - pad + 15.0, axis(log_x, x0));
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, w - pad, h - pad + 15.0, axis(log_x, x1));
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, pad - 4.0, h - pad, axis(log_y, y0));
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, pad - 4.0, pad + 4.0, axis(log_y, y1));
    for (k, (name, pts)) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        if !pts.is_empty() {
            let d: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
            let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, d.join(" "));
            for &(x, y) in pts {
                let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#, sx(x), sy(y));
            }
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" fill="{color}">{name}{}</text>"#,
            w - pad + 4.0 - 120.0,
            pad + 16.0 * k as f64,
            if log_y { " (log10)" } else { "" }
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_must_match_columns() {
        let mut t = ResultTable::new("t", &["a", "b"]);
        assert!(t.push(vec![1.0.into()]).is_err());
        t.push(vec![1.0.into(), "x".into()]).unwrap();
        assert_eq!(t.column("a").unwrap(), vec![1.0]);
        assert!(t.column("c").is_err());
    }

    #[test]
    fn floats_have_fixed_format() {
        assert_eq!(format_float(0.1), "1.000000000000e-1");
        assert_eq!(format_float(f64::INFINITY), "inf");
        assert_eq!(Cell::Int(3).render(), "3");
    }

    #[test]
    fn svg_only_with_plot() {
        let mut t = ResultTable::new("t", &["x", "y"]);
        t.push(vec![1.0.into(), 2.0.into()]).unwrap();
        t.push(vec![2.0.into(), 8.0.into()]).unwrap();
        assert!(t.svg().unwrap().is_none());
        let t = t.with_plot("x", &["y"], true, true);
        let svg = t.svg().unwrap().unwrap();
        assert!(svg.starts_with("<svg") && svg.contains("polyline"));
    }
}

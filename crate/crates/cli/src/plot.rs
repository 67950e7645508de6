//! Minimal deterministic SVG line and band plots from CSV files.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn column(&self, name: &str) -> Result<Vec<f64>, CliError> {
        let idx = self
            .headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Schema(format!("missing column `{name}`")))?;
        Ok(self.rows.iter().map(|r| r[idx]).collect())
    }
}

pub fn read_csv(path: &Path) -> Result<CsvTable, CliError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.kind() {
        csv::ErrorKind::Io(_) => CliError::Schema(format!("{}: {e}", path.display())),
        _ => CliError::Csv(e),
    })?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))?
        .iter()
        .map(str::to_string)
        .collect();
    if headers.iter().all(|h| h.is_empty()) {
        return Err(CliError::Schema(format!("{}: no header", path.display())));
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))?;
        let row = rec
            .iter()
            .map(|v| v.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::Schema(format!("{}: row {}: {e}", path.display(), i + 2)))?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::Schema(format!("{}: no data rows", path.display())));
    }
    Ok(CsvTable { headers, rows })
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlotKind {
    /// Mean line with a shaded `mean ± std` band.
    Band { mean: String, std: String },
    /// One line per column.
    Lines(Vec<String>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub title: String,
    pub x: String,
    pub kind: PlotKind,
    pub log_y: bool,
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 6] = ["#c0392b", "#2471a3", "#229954", "#7d3c98", "#d68910", "#515a5a"];

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn new(values: impl Iterator<Item = f64>, log: bool) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter(|v| v.is_finite() && (!log || *v > 0.0)) {
            let v = if log { v.log10() } else { v };
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if hi - lo < 1e-12 {
            lo -= 0.5;
            hi += 0.5;
        }
        Self { lo, hi, log }
    }

    /// Maps a value to `[0, 1]`; non-positive values on a log axis sit at the bottom.
    fn frac(&self, v: f64) -> f64 {
        let v = if self.log {
            if v > 0.0 {
                v.log10()
            } else {
                self.lo
            }
        } else {
            v
        };
        ((v - self.lo) / (self.hi - self.lo)).clamp(0.0, 1.0)
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            let (a, b) = (self.lo.floor() as i32, self.hi.ceil() as i32);
            return (a..=b)
                .map(|e| e as f64)
                .filter(|e| *e >= self.lo - 1e-9 && *e <= self.hi + 1e-9)
                .map(|e| ((e - self.lo) / (self.hi - self.lo), format!("1e{}", e as i32)))
                .collect();
        }
        (0..=4)
            .map(|k| {
                let f = k as f64 / 4.0;
                (f, format!("{:.3e}", self.lo + f * (self.hi - self.lo)))
            })
            .collect()
    }
}

fn px(f: f64) -> f64 {
    LEFT + f * (WIDTH - LEFT - RIGHT)
}

fn py(f: f64) -> f64 {
    HEIGHT - BOTTOM - f * (HEIGHT - TOP - BOTTOM)
}

fn polyline(points: &[(f64, f64)], color: &str, out: &mut String) {
    let pts: Vec<String> = points.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    let _ = writeln!(
        out,
        r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
        pts.join(" ")
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn render_svg(table: &CsvTable, spec: &PlotSpec) -> Result<String, CliError> {
    if table.rows.is_empty() {
        return Err(CliError::Schema("no data rows".into()));
    }
    let x = table.column(&spec.x)?;
    let series: Vec<(String, Vec<f64>)> = match &spec.kind {
        PlotKind::Band { mean, std } => {
            let m = table.column(mean)?;
            let s = table.column(std)?;
            let lo: Vec<f64> = m.iter().zip(&s).map(|(m, s)| m - s).collect();
            let hi: Vec<f64> = m.iter().zip(&s).map(|(m, s)| m + s).collect();
            vec![(mean.clone(), m), ("lo".into(), lo), ("hi".into(), hi)]
        }
        PlotKind::Lines(cols) => {
            if cols.is_empty() {
                return Err(CliError::Schema("no columns to plot".into()));
            }
            cols.iter()
                .map(|c| Ok((c.clone(), table.column(c)?)))
                .collect::<Result<_, CliError>>()?
        }
    };
    let xa = Axis::new(x.iter().copied(), false);
    let ya = Axis::new(series.iter().flat_map(|(_, v)| v.iter().copied()), spec.log_y);
    let pts = |v: &[f64]| -> Vec<(f64, f64)> {
        x.iter()
            .zip(v)
            .map(|(&x, &y)| (px(xa.frac(x)), py(ya.frac(y))))
            .collect()
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(&spec.title)
    );
    let (x0, x1, y0, y1) = (px(0.0), px(1.0), py(0.0), py(1.0));
    let _ = writeln!(
        out,
        r#"<rect x="{x0:.2}" y="{y1:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y0 - y1
    );
    for (f, label) in xa.ticks() {
        let _ = writeln!(
            out,
            r#"<line x1="{0:.2}" y1="{y0:.2}" x2="{0:.2}" y2="{1:.2}" stroke="black"/><text x="{0:.2}" y="{2:.2}" text-anchor="middle">{label}</text>"#,
            px(f),
            y0 + 5.0,
            y0 + 18.0
        );
    }
    for (f, label) in ya.ticks() {
        let _ = writeln!(
            out,
            r#"<line x1="{0:.2}" y1="{1:.2}" x2="{x0:.2}" y2="{1:.2}" stroke="black"/><text x="{2:.2}" y="{3:.2}" text-anchor="end">{label}</text>"#,
            x0 - 5.0,
            py(f),
            x0 - 8.0,
            py(f) + 4.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 12.0,
        escape(&spec.x)
    );

    match &spec.kind {
        PlotKind::Band { .. } => {
            let lo = pts(&series[1].1);
            let hi = pts(&series[2].1);
            let outline: Vec<String> = hi
                .iter()
                .chain(lo.iter().rev())
                .map(|(x, y)| format!("{x:.2},{y:.2}"))
                .collect();
            let _ = writeln!(
                out,
                r#"<polygon fill="{}" fill-opacity="0.25" stroke="none" points="{}"/>"#,
                PALETTE[1],
                outline.join(" ")
            );
            polyline(&pts(&series[0].1), PALETTE[1], &mut out);
            legend(&[(series[0].0.as_str(), PALETTE[1])], &mut out);
        }
        PlotKind::Lines(_) => {
            let mut entries = Vec::new();
            for (k, (name, v)) in series.iter().enumerate() {
                let color = PALETTE[k % PALETTE.len()];
                polyline(&pts(v), color, &mut out);
                entries.push((name.as_str(), color));
            }
            legend(&entries, &mut out);
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn legend(entries: &[(&str, &str)], out: &mut String) {
    for (k, (name, color)) in entries.iter().enumerate() {
        let y = TOP + 14.0 + 16.0 * k as f64;
        let x = WIDTH - RIGHT - 150.0;
        let _ = writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            x + 20.0,
            x + 26.0,
            y + 4.0,
            escape(name)
        );
    }
}

/// Renders `csv` according to `spec` and writes the SVG to `out`.
pub fn emit_plot(csv: &Path, spec: &PlotSpec, out: &Path) -> Result<(), CliError> {
    let table = read_csv(csv)?;
    let svg = render_svg(&table, spec)?;
    std::fs::write(out, svg).map_err(|e| CliError::io(out, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> CsvTable {
        CsvTable {
            headers: vec!["t".into(), "mean".into(), "std".into()],
            rows: (0..20)
                .map(|i| vec![i as f64 * 0.1, (-(i as f64) * 0.1).exp(), 0.01 * i as f64])
                .collect(),
        }
    }

    fn band() -> PlotSpec {
        PlotSpec {
            title: "chi".into(),
            x: "t".into(),
            kind: PlotKind::Band {
                mean: "mean".into(),
                std: "std".into(),
            },
            log_y: false,
        }
    }

    #[test]
    fn rendering_is_deterministic() {
        let a = render_svg(&table(), &band()).unwrap();
        assert_eq!(a, render_svg(&table(), &band()).unwrap());
        assert!(a.contains("<polygon"));
        assert!(a.starts_with("<svg"));
    }

    #[test]
    fn log_axis_labels_decades() {
        let spec = PlotSpec {
            kind: PlotKind::Lines(vec!["mean".into(), "std".into()]),
            log_y: true,
            ..band()
        };
        let svg = render_svg(&table(), &spec).unwrap();
        assert!(svg.contains(">1e-1<") || svg.contains(">1e0<"));
        assert_eq!(svg.matches("<polyline").count(), 2);
    }

    #[test]
    fn missing_column_is_a_schema_error() {
        let spec = PlotSpec {
            kind: PlotKind::Lines(vec!["fidelity_mean".into()]),
            ..band()
        };
        assert!(matches!(render_svg(&table(), &spec), Err(CliError::Schema(_))));
    }
}

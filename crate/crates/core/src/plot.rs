//! Self-contained SVG line charts of per-site CSV tables.
//!
//! Output depends only on the input table: coordinates are printed with a
//! fixed number of decimals and series are drawn in column order.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::experiment::write_file;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 50.0;
const PALETTE: [&str; 8] = [
    "#d62728", "#2ca02c", "#1f77b4", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// A parsed numeric CSV table whose first column is the site index.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Vec<String> = lines
            .next()
            .ok_or_else(|| Error::Parse("empty CSV".into()))?
            .split(',')
            .map(|h| h.trim().to_string())
            .collect();
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            let row = line
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse(format!("CSV row {}: {e}", i + 2)))?;
            if row.len() != header.len() {
                return Err(Error::Parse(format!(
                    "CSV row {} has {} fields, header has {}",
                    i + 2,
                    row.len(),
                    header.len()
                )));
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::Parse("CSV has no data rows".into()));
        }
        Ok(Self { header, rows })
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Render the selected columns (all non-site columns when `columns` is
/// empty) against the first column.
pub fn render_svg(table: &Table, columns: &[String], title: &str) -> Result<String> {
    let selected: Vec<String> = if columns.is_empty() {
        table.header.iter().skip(1).cloned().collect()
    } else {
        columns.to_vec()
    };
    let series = selected
        .iter()
        .map(|name| {
            table
                .column(name)
                .map(|c| (name.clone(), c))
                .ok_or_else(|| Error::Parse(format!("CSV has no column {name:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = table.rows.iter().map(|r| r[0]).collect();

    let x_min = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let mut x_max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if x_max <= x_min {
        x_max = x_min + 1.0;
    }
    let y_max = series
        .iter()
        .flat_map(|(_, c)| c.iter().copied())
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max);
    let y_max = if y_max > 0.0 { y_max } else { 1.0 };
    let y_min = series
        .iter()
        .flat_map(|(_, c)| c.iter().copied())
        .filter(|v| v.is_finite())
        .fold(0.0, f64::min);

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let px = |x: f64| MARGIN_LEFT + (x - x_min) / (x_max - x_min) * plot_w;
    let py = |y: f64| MARGIN_TOP + (1.0 - (y - y_min) / (y_max - y_min)) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        escape(title)
    );

    // axes and ticks
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for k in 0..=5 {
        let fx = x_min + (x_max - x_min) * k as f64 / 5.0;
        let fy = y_min + (y_max - y_min) * k as f64 / 5.0;
        let (x, y) = (px(fx), py(fy));
        let bottom = MARGIN_TOP + plot_h;
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{MARGIN_TOP}" x2="{x:.2}" y2="{bottom}" stroke="#dddddd"/>"##
        );
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{fx:.0}</text>"#,
            bottom + 16.0
        );
        let _ = writeln!(
            s,
            r##"<line x1="{MARGIN_LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/>"##,
            MARGIN_LEFT + plot_w
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{fy:.3e}</text>"#,
            MARGIN_LEFT - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 12.0,
        escape(&table.header[0])
    );

    // series, drawn thick-to-thin so overlapping curves stay visible
    let n = series.len();
    for (i, (name, values)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let width = 1.5 + 2.0 * (n - i - 1) as f64 / n.max(1) as f64;
        let points: Vec<String> = xs
            .iter()
            .zip(values)
            .filter(|(_, y)| y.is_finite())
            .map(|(x, y)| format!("{:.2},{:.2}", px(*x), py(*y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="{width:.2}" points="{}"/>"#,
            points.join(" ")
        );
        let ly = MARGIN_TOP + 10.0 + 18.0 * i as f64;
        let lx = MARGIN_LEFT + plot_w + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="3"/>"#,
            lx + 20.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 26.0,
            ly + 4.0,
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// Read a CSV, render it, and write the SVG. Nothing is written on error.
pub fn plot_file(csv: &Path, svg: &Path, columns: &[String]) -> Result<()> {
    let text = std::fs::read_to_string(csv).map_err(|e| Error::io(csv, e))?;
    let table = Table::parse(&text)?;
    let title = csv.file_stem().and_then(|s| s.to_str()).unwrap_or("distribution");
    let rendered = render_svg(&table, columns, title)?;
    write_file(svg, &rendered)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CSV: &str = "site,a,b\n1,0.0,0.5\n2,1.0,0.25\n3,0.5,0.0\n";

    #[test]
    fn parse_table() {
        let t = Table::parse(CSV).unwrap();
        assert_eq!(t.header, vec!["site", "a", "b"]);
        assert_eq!(t.column("b").unwrap(), vec![0.5, 0.25, 0.0]);
        assert!(t.column("zz").is_none());
    }

    #[test]
    fn empty_tables_are_rejected() {
        assert!(Table::parse("").is_err());
        assert!(Table::parse("site,a\n").is_err());
        assert!(Table::parse("site,a\n1,2,3\n").is_err());
        assert!(Table::parse("site,a\n1,x\n").is_err());
    }

    #[test]
    fn render_is_deterministic_and_complete() {
        let t = Table::parse(CSV).unwrap();
        let a = render_svg(&t, &[], "demo").unwrap();
        let b = render_svg(&t, &[], "demo").unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.trim_end().ends_with("</svg>"));
        assert_eq!(a.matches("<polyline").count(), 2);
        let only_a = render_svg(&t, &["a".to_string()], "demo").unwrap();
        assert_eq!(only_a.matches("<polyline").count(), 1);
        assert!(render_svg(&t, &["nope".to_string()], "demo").is_err());
    }
}

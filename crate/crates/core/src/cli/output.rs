//! Deterministic CSV, SVG and summary writers.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;

/// `printf("%.12g")`-style formatting so output is byte-stable.
pub fn fmt_num(x: f64) -> String {
    fmt_general(x, 12)
}

fn fmt_general(x: f64, precision: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", precision - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= precision as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (precision as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Column-oriented numeric table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width mismatch");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| fmt_num(v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Line chart of every column against the first one.
    pub fn to_svg(&self, title: &str) -> String {
        const W: f64 = 720.0;
        const H: f64 = 420.0;
        const PAD: f64 = 50.0;
        const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

        let finite = |v: f64| v.is_finite();
        let xs: Vec<f64> = self.rows.iter().map(|r| r[0]).collect();
        let (x0, x1) = bounds(xs.iter().copied().filter(|&v| finite(v)));
        let (y0, y1) = bounds(self.rows.iter().flat_map(|r| r[1..].iter().copied()).filter(|&v| finite(v)));
        let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
        let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);

        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
        );
        let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            svg,
            r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            W - 2.0 * PAD,
            H - 2.0 * PAD
        );
        let _ = writeln!(svg, r#"<text x="{}" y="30" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(title));
        let _ = writeln!(svg, r#"<text x="{PAD}" y="{}" font-size="11">{}</text>"#, H - PAD + 16.0, fmt_general(x0, 4));
        let _ = writeln!(svg, r#"<text x="{}" y="{}" font-size="11" text-anchor="end">{}</text>"#, W - PAD, H - PAD + 16.0, fmt_general(x1, 4));
        let _ = writeln!(svg, r#"<text x="{}" y="{}" font-size="11" text-anchor="end">{}</text>"#, PAD - 4.0, H - PAD, fmt_general(y0, 4));
        let _ = writeln!(svg, r#"<text x="{}" y="{}" font-size="11" text-anchor="end">{}</text>"#, PAD - 4.0, PAD + 10.0, fmt_general(y1, 4));
        let _ = writeln!(svg, r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">{}</text>"#, W / 2.0, H - 12.0, escape(&self.columns[0]));

        for (k, name) in self.columns.iter().enumerate().skip(1) {
            let color = COLORS[(k - 1) % COLORS.len()];
            let points: Vec<String> = self
                .rows
                .iter()
                .filter(|r| finite(r[0]) && finite(r[k]))
                .map(|r| format!("{:.2},{:.2}", sx(r[0]), sy(r[k])))
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                points.join(" ")
            );
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{}" font-size="11" fill="{color}">{}</text>"#,
                W - PAD - 150.0,
                PAD + 14.0 * k as f64,
                escape(name)
            );
        }
        svg.push_str("</svg>\n");
        svg
    }
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-300 {
        return (lo - 0.5, hi + 0.5);
    }
    (lo, hi)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Ordered `key = value` pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary(Vec<(String, f64)>);

impl Summary {
    pub fn insert(&mut self, key: impl Into<String>, value: f64) {
        let key = key.into();
        match self.0.iter_mut().find(|(k, _)| *k == key) {
            Some(slot) => slot.1 = value,
            None => self.0.push((key, value)),
        }
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn render(&self) -> String {
        self.0.iter().map(|(k, v)| format!("{k} = {}\n", fmt_num(*v))).collect()
    }
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), contents)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn general_format_matches_printf() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(-2.5), "-2.5");
        assert_eq!(fmt_num(0.1), "0.1");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(123456.789), "123456.789");
        assert_eq!(fmt_num(1e-5), "1e-05");
        assert_eq!(fmt_num(1.5e-7), "1.5e-07");
        assert_eq!(fmt_num(1e12), "1e+12");
        assert_eq!(fmt_num(999999999999.0), "999999999999");
        assert_eq!(fmt_num(0.0001), "0.0001");
        assert_eq!(fmt_num(f64::NAN), "nan");
    }

    #[test]
    fn csv_and_summary() {
        let mut t = Table::new(&["t", "y"]);
        t.push(vec![0.0, 1.0]);
        t.push(vec![0.5, 0.25]);
        assert_eq!(t.to_csv(), "t,y\n0,1\n0.5,0.25\n");
        let svg = t.to_svg("demo");
        assert!(svg.starts_with("<svg") && svg.contains("polyline"));

        let mut s = Summary::default();
        s.insert("a", 1.0);
        s.insert("b", 2.0);
        s.insert("a", 3.0);
        assert_eq!(s.render(), "a = 3\nb = 2\n");
        assert_eq!(s.get("b"), Some(2.0));
    }
}

//! CSV and SVG output.
//!
//! CSV rows are `experiment,seed,quantity,value,meta` with values printed as
//! `{:.16e}` (17 significant digits, round-trip exact) and LF line endings.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 5] = ["experiment", "seed", "quantity", "value", "meta"];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Record {
    pub experiment: String,
    pub seed: u64,
    pub quantity: String,
    pub value: f64,
    pub meta: String,
}

impl Record {
    pub fn new(experiment: &str, seed: u64, quantity: impl Into<String>, value: f64) -> Self {
        Self { experiment: experiment.into(), seed, quantity: quantity.into(), value, meta: String::new() }
    }

    pub fn with_meta(mut self, meta: impl Into<String>) -> Self {
        self.meta = meta.into();
        self
    }
}

/// Measured constant against a theoretical bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub experiment: String,
    /// `N̂`, a lower bound on the true best constant.
    pub measured: f64,
    pub theoretical: f64,
    pub ratio: f64,
    pub per_trial: Vec<f64>,
}

impl BoundReport {
    pub fn new(experiment: &str, measured: f64, theoretical: f64, per_trial: Vec<f64>) -> Result<Self> {
        let ratio = measured / theoretical;
        if !(measured.is_finite() && theoretical.is_finite() && ratio.is_finite()) {
            return Err(Error::NonFinite(format!("{experiment}: N̂={measured}, bound={theoretical}")));
        }
        Ok(Self { experiment: experiment.into(), measured, theoretical, ratio, per_trial })
    }

    pub fn records(&self, seed: u64) -> Vec<Record> {
        let mut out = vec![
            Record::new(&self.experiment, seed, "measured", self.measured),
            Record::new(&self.experiment, seed, "theoretical", self.theoretical),
            Record::new(&self.experiment, seed, "ratio", self.ratio),
        ];
        out.extend(
            self.per_trial
                .iter()
                .enumerate()
                .map(|(k, &v)| Record::new(&self.experiment, seed, "trial", v).with_meta(format!("trial={k}"))),
        );
        out
    }
}

/// Serialize records to CSV text; any non-finite value is an error.
pub fn to_csv(records: &[Record]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in records {
        if !r.value.is_finite() {
            return Err(Error::NonFinite(format!("{}/{} = {}", r.experiment, r.quantity, r.value)));
        }
        w.write_record([
            r.experiment.as_str(),
            &r.seed.to_string(),
            r.quantity.as_str(),
            &format!("{:.16e}", r.value),
            r.meta.as_str(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn write_csv(path: &Path, records: &[Record]) -> Result<()> {
    std::fs::write(path, to_csv(records)?)?;
    Ok(())
}

pub fn read_csv(text: &str) -> Result<Vec<Record>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = r.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Parse(format!("unexpected header {header:?}")));
    }
    let mut out = Vec::new();
    for row in r.records() {
        let row = row?;
        let field = |k: usize| row.get(k).unwrap_or_default();
        let num = |k: usize, what: &str| Error::Parse(format!("bad {what} {:?}", field(k)));
        out.push(Record {
            experiment: field(0).into(),
            seed: field(1).parse().map_err(|_| num(1, "seed"))?,
            quantity: field(2).into(),
            value: field(3).parse().map_err(|_| num(3, "value"))?,
            meta: field(4).into(),
        });
    }
    Ok(out)
}

/// One plotted series.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// A plain-text SVG line/scatter plot with linear axes.
pub fn svg_plot(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const M: f64 = 50.0;
    const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
    let pts = series.iter().flat_map(|s| s.points.iter()).filter(|(x, y)| x.is_finite() && y.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        (x0, x1, y0, y1) = (x0.min(x), x1.max(x), y0.min(y), y1.max(y));
    }
    if !(x0 < x1) {
        (x0, x1) = (x0.min(0.0) - 0.5, x1.max(0.0) + 0.5);
    }
    if !(y0 < y1) {
        (y0, y1) = (y0.min(0.0) - 0.5, y1.max(0.0) + 0.5);
    }
    let sx = |x: f64| M + (x - x0) / (x1 - x0) * (W - 2.0 * M);
    let sy = |y: f64| H - M - (y - y0) / (y1 - y0) * (H - 2.0 * M);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(title));
    let _ = writeln!(
        s,
        r#"<path d="M{M} {M} L{M} {b} L{r} {b}" stroke="black" fill="none"/>"#,
        b = H - M,
        r = W - M
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">{}</text>"#, W / 2.0, H - 10.0, escape(x_label));
    let _ = writeln!(
        s,
        r#"<text x="15" y="{}" text-anchor="middle" font-size="12" transform="rotate(-90 15 {})">{}</text>"#,
        H / 2.0,
        H / 2.0,
        escape(y_label)
    );
    for (v, anchor, x, y) in [(x0, "start", M, H - M + 15.0), (x1, "end", W - M, H - M + 15.0)] {
        let _ = writeln!(s, r#"<text x="{x}" y="{y}" text-anchor="{anchor}" font-size="10">{v:.3e}</text>"#);
    }
    for (v, y) in [(y0, H - M), (y1, M)] {
        let _ = writeln!(s, r#"<text x="{}" y="{y}" text-anchor="end" font-size="10">{v:.3e}</text>"#, M - 4.0);
    }
    for (k, ser) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let fin: Vec<_> = ser.points.iter().filter(|(x, y)| x.is_finite() && y.is_finite()).collect();
        if fin.len() > 1 {
            let path: Vec<String> = fin.iter().map(|&&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
            let _ = writeln!(s, r#"<polyline points="{}" stroke="{color}" fill="none"/>"#, path.join(" "));
        }
        for &&(x, y) in &fin {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, sx(x), sy(y));
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="11" fill="{color}">{}</text>"#,
            W - M - 120.0,
            M + 14.0 * k as f64,
            escape(&ser.name)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Where [`emit_report`] writes.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OutputPaths {
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

/// Write the CSV (always header + rows) and, if requested, one SVG with one
/// series per quantity (value against row index within the quantity).
pub fn emit_report(title: &str, records: &[Record], paths: &OutputPaths) -> Result<()> {
    let csv = to_csv(records)?;
    if let Some(p) = &paths.csv {
        std::fs::write(p, &csv)?;
    }
    if let Some(p) = &paths.svg {
        let mut series: Vec<Series> = Vec::new();
        for r in records {
            let name = format!("{}:{}", r.experiment, r.quantity);
            let idx = match series.iter().position(|s| s.name == name) {
                Some(i) => i,
                None => {
                    series.push(Series { name, points: Vec::new() });
                    series.len() - 1
                }
            };
            let x = series[idx].points.len() as f64;
            series[idx].points.push((x, r.value));
        }
        std::fs::write(p, svg_plot(title, "index", "value", &series))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_is_header_only() {
        assert_eq!(to_csv(&[]).unwrap(), "experiment,seed,quantity,value,meta\n");
    }

    #[test]
    fn non_finite_rejected() {
        assert!(matches!(to_csv(&[Record::new("x", 0, "q", f64::NAN)]), Err(Error::NonFinite(_))));
        assert!(to_csv(&[Record::new("x", 0, "q", f64::INFINITY)]).is_err());
        assert!(BoundReport::new("x", 1.0, 0.0, vec![]).is_err());
    }

    #[test]
    fn format_is_fixed() {
        let csv = to_csv(&[Record::new("two_weight", 42, "ratio", 0.1).with_meta("a=1,b=2")]).unwrap();
        assert_eq!(csv.lines().nth(1).unwrap(), "two_weight,42,ratio,1.0000000000000001e-1,\"a=1,b=2\"");
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn svg_is_well_formed() {
        let s = svg_plot("t<1>", "x", "y", &[Series { name: "a&b".into(), points: vec![(0.0, 1.0), (1.0, 3.0)] }]);
        let doc = roxmltree::Document::parse(&s).unwrap();
        assert_eq!(doc.root_element().tag_name().name(), "svg");
        let empty = svg_plot("empty", "x", "y", &[]);
        roxmltree::Document::parse(&empty).unwrap();
    }

    #[test]
    fn emit_writes_files() {
        let dir = tempfile::tempdir().unwrap();
        let paths = OutputPaths { csv: Some(dir.path().join("a.csv")), svg: Some(dir.path().join("a.svg")) };
        let recs = BoundReport::new("e", 2.0, 4.0, vec![1.0, 2.0]).unwrap().records(7);
        emit_report("e", &recs, &paths).unwrap();
        let back = read_csv(&std::fs::read_to_string(paths.csv.unwrap()).unwrap()).unwrap();
        assert_eq!(back, recs);
        roxmltree::Document::parse(&std::fs::read_to_string(paths.svg.unwrap()).unwrap()).unwrap();
        let bad = OutputPaths { csv: Some(dir.path().join("missing/dir/a.csv")), svg: None };
        assert!(matches!(emit_report("e", &recs, &bad), Err(Error::Io(_))));
    }

    proptest! {
        #[test]
        fn csv_round_trips_exactly(vals in prop::collection::vec(-1e300f64..1e300, 0..20), seed in any::<u64>()) {
            let recs: Vec<Record> = vals.iter().enumerate()
                .map(|(k, &v)| Record::new("p", seed, format!("q{k}"), v).with_meta("m=\"x\""))
                .collect();
            let back = read_csv(&to_csv(&recs).unwrap()).unwrap();
            prop_assert_eq!(back, recs);
        }
    }
}

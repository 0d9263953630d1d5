//! CSV, JSON and SVG artifacts, written atomically.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::correlation::CorrelationTrace;
use crate::interferometry::InterferencePattern;
use crate::montecarlo::MCAHistogram;
use crate::spectral::SpectralAmplitude;
use crate::tuning::{PairWindow, TuningCurve};
use crate::{Error, Result, SCHEMA_VERSION};

/// Output flavour selected with `--format`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    /// CSV data plus a JSON metadata sidecar.
    #[default]
    Csv,
    /// One JSON document holding metadata and columns.
    Json,
    /// CSV, sidecar and an SVG line plot.
    Svg,
}

/// Columnar table with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Self { headers: headers.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push<I, S>(&mut self, row: I)
    where
        I: IntoIterator<Item = S>,
        S: ToString,
    {
        self.rows.push(row.into_iter().map(|v| v.to_string()).collect());
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
    }

    /// Columns as a JSON object; numeric cells become numbers.
    pub fn to_json_columns(&self) -> Value {
        let mut cols = Map::new();
        for (j, h) in self.headers.iter().enumerate() {
            let col: Vec<Value> = self
                .rows
                .iter()
                .map(|r| match r[j].parse::<f64>() {
                    Ok(v) if v.is_finite() => json!(v),
                    _ => json!(r[j]),
                })
                .collect();
            cols.insert(h.clone(), Value::Array(col));
        }
        Value::Object(cols)
    }
}

pub fn spectrum_table(t: &SpectralAmplitude) -> Table {
    let mut tab = Table::new(&["nu_rad_per_fs", "re", "im", "abs"]);
    for (nu, v) in t.grid.nu().iter().zip(&t.values) {
        tab.push([*nu, v.re, v.im, v.norm()]);
    }
    tab
}

pub fn trace_table(tr: &CorrelationTrace) -> Table {
    let mut tab = Table::new(&["tau_fs", "value"]);
    for (t, v) in tr.tau.iter().zip(&tr.values) {
        tab.push([*t, *v]);
    }
    tab
}

pub fn pattern_table(p: &InterferencePattern) -> Table {
    let mut tab = Table::new(&["tau_fs", "rate"]);
    for (t, r) in p.tau.iter().zip(&p.rate) {
        tab.push([*t, *r]);
    }
    tab
}

pub fn tuning_table(curves: &[TuningCurve]) -> Table {
    let mut tab = Table::new(&["lambda_nm", "theta_ext_deg", "branch"]);
    for c in curves {
        for (l, th) in c.lambda.iter().zip(&c.theta_ext) {
            tab.push([l.to_string(), th.to_string(), c.branch.as_str().to_string()]);
        }
    }
    tab
}

pub fn pair_window_table(pw: &PairWindow) -> Table {
    let mut tab = Table::new(&["nu_rad_per_fs", "weight"]);
    for (nu, w) in pw.nu.iter().zip(&pw.weight) {
        tab.push([*nu, *w]);
    }
    tab
}

pub fn histogram_table(h: &MCAHistogram) -> Table {
    let mut tab = Table::new(&["bin_start_ns", "bin_end_ns", "counts"]);
    for (k, c) in h.counts.iter().enumerate() {
        tab.push([h.bin_edges[k].to_string(), h.bin_edges[k + 1].to_string(), c.to_string()]);
    }
    tab
}

/// Adds `schema_version` and `kind` to a metadata object.
pub fn with_schema(kind: &str, meta: Value) -> Value {
    let mut obj = match meta {
        Value::Object(m) => m,
        Value::Null => Map::new(),
        other => {
            let mut m = Map::new();
            m.insert("value".into(), other);
            m
        }
    };
    obj.insert("schema_version".into(), json!(SCHEMA_VERSION));
    obj.insert("kind".into(), json!(kind));
    Value::Object(obj)
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let io = |source| Error::Io { path: path.to_path_buf(), source };
    std::fs::create_dir_all(dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.flush().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Series for [`svg_plot`].
pub struct Series<'a> {
    pub label: &'a str,
    pub x: &'a [f64],
    pub y: &'a [f64],
}

const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// Minimal line plot with axis extents printed at the corners.
pub fn svg_plot(title: &str, xlabel: &str, ylabel: &str, series: &[Series]) -> String {
    let (w, h, m) = (640.0, 400.0, 50.0);
    let finite = |v: &&f64| v.is_finite();
    let xs = series.iter().flat_map(|s| s.x.iter()).filter(finite);
    let (x0, x1) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let ys = series.iter().flat_map(|s| s.y.iter()).filter(finite);
    let (y0, y1) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let (x1, y1) = (if x1 > x0 { x1 } else { x0 + 1.0 }, if y1 > y0 { y1 } else { y0 + 1.0 });
    let px = |x: f64| m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
    let py = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);

    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" font-family=\"sans-serif\" font-size=\"12\">\n\
         <rect x=\"{m}\" y=\"{m}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n\
         <text x=\"{}\" y=\"20\" text-anchor=\"middle\">{}</text>\n\
         <text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n\
         <text x=\"12\" y=\"{}\" transform=\"rotate(-90 12 {})\" text-anchor=\"middle\">{}</text>\n\
         <text x=\"{m}\" y=\"{}\">{x0:.4}</text><text x=\"{}\" y=\"{}\" text-anchor=\"end\">{x1:.4}</text>\n\
         <text x=\"{}\" y=\"{}\" text-anchor=\"end\">{y0:.4}</text><text x=\"{}\" y=\"{}\" text-anchor=\"end\">{y1:.4}</text>\n",
        w - 2.0 * m,
        h - 2.0 * m,
        w / 2.0,
        xml(title),
        w / 2.0,
        h - 10.0,
        xml(xlabel),
        h / 2.0,
        h / 2.0,
        xml(ylabel),
        h - m + 15.0,
        w - m,
        h - m + 15.0,
        m - 4.0,
        h - m,
        m - 4.0,
        m + 4.0,
    );
    for (i, s) in series.iter().enumerate() {
        let pts: Vec<String> = s
            .x
            .iter()
            .zip(s.y)
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|(&x, &y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let color = COLORS[i % COLORS.len()];
        out.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.2\" points=\"{}\"/>\n\
             <text x=\"{}\" y=\"{}\" fill=\"{color}\">{}</text>\n",
            pts.join(" "),
            m + 8.0,
            m + 16.0 + 14.0 * i as f64,
            xml(s.label)
        ));
    }
    out.push_str("</svg>\n");
    out
}

fn xml(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// One artifact ready to be written.
pub struct Artifact<'a> {
    pub stem: &'a str,
    pub kind: &'a str,
    pub table: Table,
    pub meta: Value,
    /// Column indices of x and y for the SVG plot.
    pub plot: Option<(usize, usize)>,
}

/// Writes an artifact in `format` under `dir`; returns the paths written.
pub fn write_artifact(dir: &Path, format: Format, a: &Artifact) -> Result<Vec<PathBuf>> {
    let meta = with_schema(a.kind, a.meta.clone());
    let mut written = Vec::new();
    let mut put = |name: String, body: &[u8]| -> Result<()> {
        let path = dir.join(name);
        write_atomic(&path, body)?;
        written.push(path);
        Ok(())
    };
    match format {
        Format::Json => {
            let mut doc = meta;
            doc["data"] = a.table.to_json_columns();
            put(format!("{}.json", a.stem), pretty(&doc).as_bytes())?;
        }
        Format::Csv | Format::Svg => {
            put(format!("{}.csv", a.stem), a.table.to_csv().as_bytes())?;
            put(format!("{}.json", a.stem), pretty(&meta).as_bytes())?;
            if format == Format::Svg {
                if let Some((ix, iy)) = a.plot {
                    let col = |j: usize| -> Vec<f64> {
                        a.table.rows.iter().map(|r| r[j].parse().unwrap_or(f64::NAN)).collect()
                    };
                    let (x, y) = (col(ix), col(iy));
                    let svg = svg_plot(
                        a.stem,
                        &a.table.headers[ix],
                        &a.table.headers[iy],
                        &[Series { label: a.kind, x: &x, y: &y }],
                    );
                    put(format!("{}.svg", a.stem), svg.as_bytes())?;
                }
            }
        }
    }
    Ok(written)
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_roundtrip_and_json_columns() {
        let mut t = Table::new(&["tau_fs", "value"]);
        t.push([0.0, 1.0]);
        t.push([0.5, 0.25]);
        assert_eq!(t.to_csv(), "tau_fs,value\n0,1\n0.5,0.25\n");
        let cols = t.to_json_columns();
        assert_eq!(cols["value"][1], json!(0.25));
    }

    #[test]
    fn schema_version_always_present() {
        let v = with_schema("g1", json!({"source": "x"}));
        assert_eq!(v["schema_version"], json!(SCHEMA_VERSION));
        assert_eq!(with_schema("g1", Value::Null)["kind"], json!("g1"));
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.csv");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn svg_contains_polyline() {
        let x = [0.0, 1.0, 2.0];
        let y = [0.0, 1.0, 0.0];
        let s = svg_plot("t", "x", "y", &[Series { label: "a<b", x: &x, y: &y }]);
        assert!(s.contains("<polyline"));
        assert!(s.contains("a&lt;b"));
    }
}

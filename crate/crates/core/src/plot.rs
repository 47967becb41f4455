//! Self-contained SVG figures from the CSV tables.
//!
//! | kind       | input                   | figure                                  |
//! |------------|-------------------------|-----------------------------------------|
//! | `phase`    | `squeezing_surface.csv` | best S over z against LO phase          |
//! | `length`   | `squeezing_surface.csv` | S against z at the optimum phase        |
//! | `heatmap`  | `squeezing_surface.csv` | S in dB over the (z, θ) plane           |
//! | `detuning` | `detuning_scan.csv`     | S* against log₁₀(δτ_p + 1)              |
//! | `pressure` | `pressure_scan.csv`     | S* and detection length against pressure |
//!
//! Line plots draw the ±1 standard-error band.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::output::write_atomic;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotKind {
    Phase,
    Length,
    Heatmap,
    Detuning,
    Pressure,
}

impl PlotKind {
    pub const ALL: [PlotKind; 5] = [
        PlotKind::Phase,
        PlotKind::Length,
        PlotKind::Heatmap,
        PlotKind::Detuning,
        PlotKind::Pressure,
    ];

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    pub fn name(self) -> &'static str {
        match self {
            PlotKind::Phase => "phase",
            PlotKind::Length => "length",
            PlotKind::Heatmap => "heatmap",
            PlotKind::Detuning => "detuning",
            PlotKind::Pressure => "pressure",
        }
    }
}

/// A numeric CSV table.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvData {
    pub source: PathBuf,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

fn bad(source: &Path, message: impl Into<String>) -> Error {
    Error::PlotInput {
        path: source.to_path_buf(),
        message: message.into(),
    }
}

impl CsvData {
    pub fn parse(text: &str, source: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let header: Vec<String> = reader
            .headers()
            .map_err(|e| bad(source, e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        if header.iter().all(|h| h.is_empty()) {
            return Err(bad(source, "missing header row"));
        }
        let mut rows = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record.map_err(|e| bad(source, e.to_string()))?;
            let row = record
                .iter()
                .map(|cell| {
                    cell.parse::<f64>().map_err(|_| {
                        bad(source, format!("row {}: `{cell}` is not a number", i + 2))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(bad(source, "no data rows"));
        }
        Ok(CsvData {
            source: source.to_path_buf(),
            header,
            rows,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| bad(path, e.to_string()))?;
        Self::parse(&text, path)
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let j = self
            .header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| bad(&self.source, format!("missing column `{name}`")))?;
        Ok(self.rows.iter().map(|r| r[j]).collect())
    }
}

/// Render `data` as `kind`.
pub fn render(data: &CsvData, kind: PlotKind) -> Result<String> {
    match kind {
        PlotKind::Phase | PlotKind::Length => {
            let s = SurfaceColumns::from(data)?;
            let series = if kind == PlotKind::Phase {
                s.best_over_z()
            } else {
                s.at_best_phase()
            };
            let (xlabel, title) = if kind == PlotKind::Phase {
                ("LO phase θ (rad)", "Optimum squeezing against LO phase")
            } else {
                ("propagation length z (mm)", "Squeezing along the fiber at the optimum phase")
            };
            let mut svg = Svg::new(640.0, 420.0);
            svg.title(title);
            svg.line_chart(&series.to_db(), Frame::single(), xlabel, "S (dB)", true)?;
            Ok(svg.finish())
        }
        PlotKind::Heatmap => {
            let s = SurfaceColumns::from(data)?;
            let mut svg = Svg::new(680.0, 440.0);
            svg.title("Squeezing over propagation length and LO phase");
            svg.heatmap(&s)?;
            Ok(svg.finish())
        }
        PlotKind::Detuning => {
            let x = match data.column("log10_delta_plus_1") {
                Ok(x) => x,
                Err(_) => data.column("delta")?.iter().map(|d| (d + 1.0).log10()).collect(),
            };
            let series = Series::new(x, data.column("S_opt")?, data.column("stderr")?);
            let mut svg = Svg::new(640.0, 420.0);
            svg.title("Optimum squeezing against detuning");
            svg.line_chart(&series.to_db(), Frame::single(), "log₁₀(δ·τ_p + 1)", "S* (dB)", true)?;
            Ok(svg.finish())
        }
        PlotKind::Pressure => {
            let p = data.column("pressure")?;
            let s = Series::new(p.clone(), data.column("S_opt")?, data.column("stderr")?);
            let l = data.column("L_opt")?.iter().map(|v| v * 1e3).collect::<Vec<_>>();
            let zero = vec![0.0; l.len()];
            let mut svg = Svg::new(640.0, 640.0);
            svg.title("Optimum squeezing and detection length against pressure");
            svg.line_chart(&s.to_db(), Frame::upper(), "pressure (Pa)", "S* (dB)", true)?;
            svg.line_chart(&Series::new(p, l, zero), Frame::lower(), "pressure (Pa)", "L_opt (mm)", false)?;
            Ok(svg.finish())
        }
    }
}

/// Read `csv`, render `kind`, write `out` atomically.
pub fn plot_file(csv: &Path, kind: PlotKind, out: &Path) -> Result<()> {
    let data = CsvData::read(csv)?;
    let svg = render(&data, kind)?;
    write_atomic(out, svg.as_bytes())
}

#[derive(Clone, Debug)]
struct Series {
    x: Vec<f64>,
    y: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    /// Points dropped because they have no finite representation.
    dropped: usize,
}

impl Series {
    fn new(x: Vec<f64>, y: Vec<f64>, err: Vec<f64>) -> Self {
        let lo = y.iter().zip(&err).map(|(v, e)| v - e).collect();
        let hi = y.iter().zip(&err).map(|(v, e)| v + e).collect();
        Series {
            x,
            y,
            lo,
            hi,
            dropped: 0,
        }
    }

    /// Convert a linear ratio with its band to decibels. Points with S ≤ 0
    /// are dropped; a non-positive lower band edge is clamped to the point.
    fn to_db(&self) -> Series {
        let db = |v: f64| 10.0 * v.log10();
        let mut out = Series {
            x: vec![],
            y: vec![],
            lo: vec![],
            hi: vec![],
            dropped: self.dropped,
        };
        for i in 0..self.x.len() {
            let (y, lo, hi) = (self.y[i], self.lo[i], self.hi[i]);
            if !(y > 0.0) || !self.x[i].is_finite() {
                out.dropped += 1;
                continue;
            }
            out.x.push(self.x[i]);
            out.y.push(db(y));
            out.lo.push(if lo > 0.0 { db(lo) } else { db(y) });
            out.hi.push(db(hi.max(y)));
        }
        out
    }
}

struct SurfaceColumns {
    z: Vec<f64>,
    theta: Vec<f64>,
    s: Vec<f64>,
    err: Vec<f64>,
}

impl SurfaceColumns {
    fn from(data: &CsvData) -> Result<Self> {
        Ok(SurfaceColumns {
            z: data.column("z")?,
            theta: data.column("theta")?,
            s: data.column("S")?,
            err: data.column("stderr")?,
        })
    }

    fn distinct(v: &[f64]) -> Vec<f64> {
        let mut d = v.to_vec();
        d.sort_by(f64::total_cmp);
        d.dedup();
        d
    }

    fn best(&self) -> usize {
        (0..self.s.len())
            .min_by(|&a, &b| self.s[a].total_cmp(&self.s[b]))
            .unwrap_or(0)
    }

    fn best_over_z(&self) -> Series {
        let thetas = Self::distinct(&self.theta);
        let (mut y, mut e) = (vec![], vec![]);
        for &t in &thetas {
            let i = (0..self.s.len())
                .filter(|&i| self.theta[i] == t)
                .min_by(|&a, &b| self.s[a].total_cmp(&self.s[b]))
                .unwrap();
            y.push(self.s[i]);
            e.push(self.err[i]);
        }
        Series::new(thetas, y, e)
    }

    fn at_best_phase(&self) -> Series {
        let t = self.theta[self.best()];
        let idx: Vec<usize> = (0..self.s.len()).filter(|&i| self.theta[i] == t).collect();
        Series::new(
            idx.iter().map(|&i| self.z[i] * 1e3).collect(),
            idx.iter().map(|&i| self.s[i]).collect(),
            idx.iter().map(|&i| self.err[i]).collect(),
        )
    }
}

/// Plot area inside the SVG canvas, as fractions of its height.
#[derive(Clone, Copy)]
struct Frame {
    top: f64,
    bottom: f64,
}

impl Frame {
    fn single() -> Self {
        Frame { top: 0.0, bottom: 1.0 }
    }
    fn upper() -> Self {
        Frame { top: 0.0, bottom: 0.5 }
    }
    fn lower() -> Self {
        Frame { top: 0.5, bottom: 1.0 }
    }
}

/// Round tick positions covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let span = (hi - lo).abs().max(1e-300);
    let raw = span / target.max(1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| span / s <= target as f64)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn label(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 {
        "0".into()
    } else if !(1e-3..1e4).contains(&a) {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        let pad = if lo == 0.0 { 1.0 } else { 0.1 * lo.abs() };
        (lo - pad, hi + pad)
    }
}

struct Svg {
    width: f64,
    height: f64,
    body: String,
}

const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_TOP: f64 = 50.0;
const MARGIN_BOTTOM: f64 = 60.0;

impl Svg {
    fn new(width: f64, height: f64) -> Self {
        Svg {
            width,
            height,
            body: String::new(),
        }
    }

    fn title(&mut self, t: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="16">{}</text>"#,
            self.width / 2.0,
            escape(t)
        );
    }

    fn line_chart(&mut self, s: &Series, frame: Frame, xlabel: &str, ylabel: &str, zero_line: bool) -> Result<()> {
        if s.x.is_empty() {
            return Err(Error::PlotInput {
                path: PathBuf::new(),
                message: "no plottable points".into(),
            });
        }
        let h = self.height - MARGIN_TOP;
        let (x0, x1) = (MARGIN_LEFT, self.width - MARGIN_RIGHT);
        let y0 = MARGIN_TOP + frame.top * h;
        let y1 = MARGIN_TOP + frame.bottom * h - MARGIN_BOTTOM;
        let fold = |v: &[f64], f: fn(f64, f64) -> f64, init: f64| v.iter().copied().fold(init, f);
        let (xmin, xmax) = padded(fold(&s.x, f64::min, f64::INFINITY), fold(&s.x, f64::max, f64::NEG_INFINITY));
        let mut ymin = fold(&s.lo, f64::min, f64::INFINITY);
        let mut ymax = fold(&s.hi, f64::max, f64::NEG_INFINITY);
        if zero_line {
            ymin = ymin.min(0.0);
            ymax = ymax.max(0.0);
        }
        let (ymin, ymax) = padded(ymin, ymax);
        let px = |x: f64| x0 + (x - xmin) / (xmax - xmin) * (x1 - x0);
        let py = |y: f64| y1 - (y - ymin) / (ymax - ymin) * (y1 - y0);

        let b = &mut self.body;
        let _ = writeln!(b, r#"<g class="chart">"#);
        let _ = writeln!(
            b,
            "<rect x=\"{x0:.1}\" y=\"{y0:.1}\" width=\"{:.1}\" height=\"{:.1}\" fill=\"none\" stroke=\"#444\"/>",
            x1 - x0,
            y1 - y0
        );
        for t in ticks(xmin, xmax, 6) {
            let x = px(t);
            let _ = writeln!(
                b,
                "<line x1=\"{x:.1}\" y1=\"{y1:.1}\" x2=\"{x:.1}\" y2=\"{:.1}\" stroke=\"#444\"/><text x=\"{x:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"11\">{}</text>",
                y1 + 5.0,
                y1 + 18.0,
                label(t)
            );
        }
        for t in ticks(ymin, ymax, 6) {
            let y = py(t);
            let _ = writeln!(
                b,
                "<line x1=\"{:.1}\" y1=\"{y:.1}\" x2=\"{x0:.1}\" y2=\"{y:.1}\" stroke=\"#444\"/><text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\" font-size=\"11\">{}</text>",
                x0 - 5.0,
                x0 - 8.0,
                y + 4.0,
                label(t)
            );
        }
        let _ = writeln!(
            b,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="13">{}</text>"#,
            0.5 * (x0 + x1),
            y1 + 40.0,
            escape(xlabel)
        );
        let _ = writeln!(
            b,
            r#"<text transform="translate({:.1},{:.1}) rotate(-90)" text-anchor="middle" font-size="13">{}</text>"#,
            x0 - 55.0,
            0.5 * (y0 + y1),
            escape(ylabel)
        );
        if zero_line && ymin < 0.0 && ymax > 0.0 {
            let _ = writeln!(
                b,
                "<line class=\"reference\" x1=\"{x0:.1}\" y1=\"{0:.1}\" x2=\"{x1:.1}\" y2=\"{0:.1}\" stroke=\"#888\" stroke-dasharray=\"4 3\"/>",
                py(0.0)
            );
        }
        // Error band: upper edge left to right, lower edge back.
        let mut band = String::new();
        for i in 0..s.x.len() {
            let _ = write!(band, "{:.2},{:.2} ", px(s.x[i]), py(s.hi[i]));
        }
        for i in (0..s.x.len()).rev() {
            let _ = write!(band, "{:.2},{:.2} ", px(s.x[i]), py(s.lo[i]));
        }
        let _ = writeln!(
            b,
            "<polygon class=\"error-band\" points=\"{}\" fill=\"#1f77b4\" fill-opacity=\"0.25\" stroke=\"none\"/>",
            band.trim_end()
        );
        let line: Vec<String> = (0..s.x.len())
            .map(|i| format!("{:.2},{:.2}", px(s.x[i]), py(s.y[i])))
            .collect();
        let _ = writeln!(
            b,
            "<polyline class=\"series\" points=\"{}\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.8\"/>",
            line.join(" ")
        );
        for i in 0..s.x.len() {
            let _ = writeln!(
                b,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"#1f77b4\"/>",
                px(s.x[i]),
                py(s.y[i])
            );
        }
        if s.dropped > 0 {
            let _ = writeln!(
                b,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="end" font-size="11">{} points with S ≤ 0 not shown</text>"#,
                x1 - 4.0,
                y0 + 14.0,
                s.dropped
            );
        }
        let _ = writeln!(b, "</g>");
        Ok(())
    }

    fn heatmap(&mut self, s: &SurfaceColumns) -> Result<()> {
        let zs = SurfaceColumns::distinct(&s.z);
        let ts = SurfaceColumns::distinct(&s.theta);
        let (x0, x1) = (MARGIN_LEFT, self.width - MARGIN_RIGHT - 70.0);
        let (y0, y1) = (MARGIN_TOP, self.height - MARGIN_BOTTOM);
        let db: Vec<f64> = s.s.iter().map(|&v| if v > 0.0 { 10.0 * v.log10() } else { f64::NAN }).collect();
        let limit = db.iter().filter(|v| v.is_finite()).fold(0.0f64, |m, v| m.max(v.abs()));
        let limit = if limit > 0.0 { limit } else { 1.0 };
        let cw = (x1 - x0) / zs.len() as f64;
        let ch = (y1 - y0) / ts.len() as f64;
        let b = &mut self.body;
        let _ = writeln!(b, r#"<g class="heatmap">"#);
        for i in 0..s.s.len() {
            let iz = zs.iter().position(|&z| z == s.z[i]).unwrap();
            let it = ts.iter().position(|&t| t == s.theta[i]).unwrap();
            let _ = writeln!(
                b,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                x0 + iz as f64 * cw,
                y1 - (it + 1) as f64 * ch,
                cw + 0.3,
                ch + 0.3,
                color(db[i], limit)
            );
        }
        let _ = writeln!(
            b,
            "<rect x=\"{x0:.1}\" y=\"{y0:.1}\" width=\"{:.1}\" height=\"{:.1}\" fill=\"none\" stroke=\"#444\"/>",
            x1 - x0,
            y1 - y0
        );
        let (zmin, zmax) = (zs[0] * 1e3, zs[zs.len() - 1] * 1e3);
        let (tmin, tmax) = (ts[0], ts[ts.len() - 1]);
        for t in ticks(zmin, zmax, 6) {
            let x = if zmax > zmin { x0 + (t - zmin) / (zmax - zmin) * (x1 - x0 - cw) + 0.5 * cw } else { 0.5 * (x0 + x1) };
            let _ = writeln!(
                b,
                "<line x1=\"{x:.1}\" y1=\"{y1:.1}\" x2=\"{x:.1}\" y2=\"{:.1}\" stroke=\"#444\"/><text x=\"{x:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"11\">{}</text>",
                y1 + 5.0,
                y1 + 18.0,
                label(t)
            );
        }
        for t in ticks(tmin, tmax, 6) {
            let y = if tmax > tmin { y1 - (t - tmin) / (tmax - tmin) * (y1 - y0 - ch) - 0.5 * ch } else { 0.5 * (y0 + y1) };
            let _ = writeln!(
                b,
                "<line x1=\"{:.1}\" y1=\"{y:.1}\" x2=\"{x0:.1}\" y2=\"{y:.1}\" stroke=\"#444\"/><text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\" font-size=\"11\">{}</text>",
                x0 - 5.0,
                x0 - 8.0,
                y + 4.0,
                label(t)
            );
        }
        let _ = writeln!(
            b,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="13">propagation length z (mm)</text>"#,
            0.5 * (x0 + x1),
            y1 + 40.0
        );
        let _ = writeln!(
            b,
            r#"<text transform="translate({:.1},{:.1}) rotate(-90)" text-anchor="middle" font-size="13">LO phase θ (rad)</text>"#,
            x0 - 55.0,
            0.5 * (y0 + y1)
        );
        // Colour bar.
        let (bx, bw, steps) = (x1 + 25.0, 16.0, 40);
        for k in 0..steps {
            let v = limit * (1.0 - 2.0 * (k as f64 + 0.5) / steps as f64);
            let _ = writeln!(
                b,
                r#"<rect x="{bx:.1}" y="{:.2}" width="{bw:.1}" height="{:.2}" fill="{}"/>"#,
                y0 + k as f64 * (y1 - y0) / steps as f64,
                (y1 - y0) / steps as f64 + 0.3,
                color(v, limit)
            );
        }
        for (v, y) in [(limit, y0), (0.0, 0.5 * (y0 + y1)), (-limit, y1)] {
            let _ = writeln!(
                b,
                r#"<text x="{:.1}" y="{:.1}" font-size="11">{}</text>"#,
                bx + bw + 4.0,
                y + 4.0,
                label(v)
            );
        }
        let _ = writeln!(
            b,
            r#"<text x="{:.1}" y="{:.1}" font-size="12">S (dB)</text>"#,
            bx - 4.0,
            y0 - 8.0
        );
        // Statistical resolution of the map.
        let max_err = s.err.iter().zip(&s.s).filter(|(_, v)| **v > 0.0).fold(0.0f64, |m, (e, v)| {
            m.max(10.0 / std::f64::consts::LN_10 * e / v)
        });
        let _ = writeln!(
            b,
            r#"<text class="error-band" x="{x0:.1}" y="{:.1}" font-size="11">largest standard error {:.3} dB</text>"#,
            y0 - 8.0,
            max_err
        );
        let _ = writeln!(b, "</g>");
        Ok(())
    }

    fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.body,
            w = self.width,
            h = self.height
        )
    }
}

/// Diverging map: blue below 0 dB (squeezed), red above, grey for S ≤ 0.
fn color(db: f64, limit: f64) -> String {
    if !db.is_finite() {
        return "#999999".into();
    }
    let t = (db / limit).clamp(-1.0, 1.0);
    let (r, g, bl) = if t < 0.0 {
        let a = -t;
        (255.0 * (1.0 - a), 255.0 * (1.0 - 0.6 * a), 255.0)
    } else {
        (255.0, 255.0 * (1.0 - 0.8 * t), 255.0 * (1.0 - t))
    };
    format!("#{:02x}{:02x}{:02x}", r as u8, g as u8, bl as u8)
}

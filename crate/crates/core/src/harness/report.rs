//! Error tables as `kappa,err_sup,err_l2,stderr_l2` CSV and an 800x600
//! log-log SVG with the `L^2` points, the fitted line and the reference line.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::{ErrorTable, ExperimentConfig};
use crate::error::{Error, Result};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 70.0;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportPaths {
    pub csv: PathBuf,
    pub svg: PathBuf,
}

pub fn render_csv(table: &ErrorTable) -> String {
    let mut s = String::from("kappa,err_sup,err_l2,stderr_l2\n");
    for r in &table.rows {
        writeln!(s, "{},{},{},{}", r.kappa, r.err_sup, r.err_l2, r.stderr_l2).unwrap();
    }
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Log-scale axis covering `[lo, hi]` padded to whole decades when narrow.
struct LogAxis {
    lo: f64,
    hi: f64,
    start: f64,
    end: f64,
}

impl LogAxis {
    fn new(lo: f64, hi: f64, start: f64, end: f64) -> Self {
        let (mut lo, mut hi) = (lo.log10(), hi.log10());
        if hi - lo < 1e-9 {
            lo -= 0.5;
            hi += 0.5;
        }
        let pad = 0.05 * (hi - lo);
        Self {
            lo: lo - pad,
            hi: hi + pad,
            start,
            end,
        }
    }

    fn map(&self, v: f64) -> f64 {
        self.start + (v.log10() - self.lo) / (self.hi - self.lo) * (self.end - self.start)
    }

    fn decades(&self) -> impl Iterator<Item = i32> {
        (self.lo.ceil() as i32)..=(self.hi.floor() as i32)
    }
}

pub fn render_svg(table: &ErrorTable, config: &ExperimentConfig) -> String {
    let pts: Vec<(f64, f64)> = table
        .rows
        .iter()
        .filter(|r| r.err_l2 > 0.0)
        .map(|r| (r.kappa as f64, r.err_l2))
        .collect();
    let kmin = table.rows.iter().map(|r| r.kappa as f64).fold(f64::INFINITY, f64::min).max(1.0);
    let kmax = table.rows.iter().map(|r| r.kappa as f64).fold(1.0, f64::max);

    // reference line through the first point with the theoretical slope
    let reference = match (table.theoretical_slope, pts.first()) {
        (Some(s), Some(&(k0, e0))) => Some(move |k: f64| e0 * (k / k0).powf(s)),
        _ => None,
    };
    let fit = table.fitted_l2;

    let mut ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    for k in [kmin, kmax] {
        if let Some(r) = &reference {
            ys.push(r(k));
        }
        if let Some(f) = fit {
            ys.push(f.predict(k));
        }
    }
    let (ymin, ymax) = if ys.is_empty() {
        (0.1, 1.0)
    } else {
        (
            ys.iter().copied().fold(f64::INFINITY, f64::min),
            ys.iter().copied().fold(0.0, f64::max),
        )
    };
    let xa = LogAxis::new(kmin, kmax, LEFT, WIDTH - RIGHT);
    let ya = LogAxis::new(ymin, ymax, HEIGHT - BOTTOM, TOP);

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="13">"#
    )
    .unwrap();
    writeln!(s, "<desc>{}</desc>", escape(&config.to_json())).unwrap();
    writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<text x="{}" y="28" text-anchor="middle" font-size="16">{} truncation error ({})</text>"#,
        WIDTH / 2.0,
        table.kind,
        match config.spectrum.decay() {
            Some((c, a)) => format!("C = {c}, alpha = {a}"),
            None => "tabulated".into(),
        }
    )
    .unwrap();
    // axes frame and ticks
    writeln!(
        s,
        r#"<path d="M{LEFT} {TOP} V{y0} H{x1}" fill="none" stroke="black"/>"#,
        y0 = HEIGHT - BOTTOM,
        x1 = WIDTH - RIGHT
    )
    .unwrap();
    let mut ticks = String::new();
    for d in xa.decades() {
        let x = xa.map(10f64.powi(d));
        write!(ticks, "M{x:.2} {} v6 ", HEIGHT - BOTTOM).unwrap();
        writeln!(
            s,
            r#"<text x="{x:.2}" y="{}" text-anchor="middle">1e{d}</text>"#,
            HEIGHT - BOTTOM + 22.0
        )
        .unwrap();
    }
    for r in &table.rows {
        let x = xa.map(r.kappa.max(1) as f64);
        write!(ticks, "M{x:.2} {} v4 ", HEIGHT - BOTTOM).unwrap();
    }
    for d in ya.decades() {
        let y = ya.map(10f64.powi(d));
        write!(ticks, "M{LEFT} {y:.2} h-6 ").unwrap();
        writeln!(
            s,
            r#"<text x="{}" y="{:.2}" text-anchor="end">1e{d}</text>"#,
            LEFT - 10.0,
            y + 4.0
        )
        .unwrap();
    }
    writeln!(s, r#"<path d="{}" stroke="black"/>"#, ticks.trim_end()).unwrap();
    writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">band limit kappa</text>"#,
        (LEFT + WIDTH - RIGHT) / 2.0,
        HEIGHT - 20.0
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="20" y="{y}" text-anchor="middle" transform="rotate(-90 20 {y})">RMS L2 error</text>"#,
        y = (TOP + HEIGHT - BOTTOM) / 2.0
    )
    .unwrap();

    let line = |s: &mut String, f: &dyn Fn(f64) -> f64, color: &str, dash: &str, label: &str| {
        writeln!(
            s,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="2"{dash}><title>{label}</title></line>"#,
            xa.map(kmin),
            ya.map(f(kmin)),
            xa.map(kmax),
            ya.map(f(kmax)),
        )
        .unwrap();
    };
    let mut legend = Vec::new();
    if let Some(f) = fit {
        let label = format!("fitted slope {:.3}", f.slope);
        line(&mut s, &|k| f.predict(k), "#1f77b4", "", &label);
        legend.push(("#1f77b4", label));
    }
    if let (Some(r), Some(slope)) = (&reference, table.theoretical_slope) {
        let label = format!("theoretical slope {slope:.3}");
        line(&mut s, r, "#d62728", r#" stroke-dasharray="8 5""#, &label);
        legend.push(("#d62728", label));
    }
    writeln!(s, r#"<g class="points" fill="black">"#).unwrap();
    for &(k, e) in &pts {
        writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="4"><title>kappa {k}: {e}</title></circle>"#,
            xa.map(k),
            ya.map(e)
        )
        .unwrap();
    }
    writeln!(s, "</g>").unwrap();
    for (i, (color, label)) in legend.iter().enumerate() {
        let y = TOP + 20.0 + 20.0 * i as f64;
        writeln!(
            s,
            r#"<rect x="{}" y="{}" width="18" height="4" fill="{color}"/><text x="{}" y="{}">{label}</text>"#,
            WIDTH - RIGHT - 220.0,
            y - 4.0,
            WIDTH - RIGHT - 195.0,
            y + 1.0
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}

/// Writes `<prefix>.csv` and `<prefix>.svg`; on any failure neither file is
/// left behind.
pub fn emit_report(
    table: &ErrorTable,
    config: &ExperimentConfig,
    prefix: impl AsRef<Path>,
) -> Result<ReportPaths> {
    if table.rows.is_empty() {
        return Err(Error::Degenerate("cannot report an empty table".into()));
    }
    let prefix = prefix.as_ref();
    let with_ext = |ext: &str| {
        let mut p = prefix.as_os_str().to_owned();
        p.push(ext);
        PathBuf::from(p)
    };
    let paths = ReportPaths {
        csv: with_ext(".csv"),
        svg: with_ext(".svg"),
    };
    let csv = render_csv(table);
    let svg = render_svg(table, config);
    fs::write(&paths.csv, csv).map_err(|e| Error::io(&paths.csv, e))?;
    if let Err(e) = fs::write(&paths.svg, svg) {
        let _ = fs::remove_file(&paths.csv);
        let _ = fs::remove_file(&paths.svg);
        return Err(Error::io(&paths.svg, e));
    }
    Ok(paths)
}

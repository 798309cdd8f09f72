//! Peak-footprint measurements across run lengths and a log-log fit.

use std::fmt::Write as _;
use std::thread;

use thiserror::Error;

use crate::holo::{holo_run, HoloError};
use crate::ledger::ScreenLedger;
use crate::machine::{MachineSpec, Symbol};

pub fn ceil_sqrt(t: u64) -> u64 {
    let r = t.isqrt();
    if r * r < t {
        r + 1
    } else {
        r
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockRule {
    /// `b = ⌈√t⌉`
    Sqrt,
    /// `b = 2⌈√t⌉`
    TwiceSqrt,
    Fixed(u64),
}

impl BlockRule {
    pub fn block_size(self, t: u64) -> u64 {
        match self {
            BlockRule::Sqrt => ceil_sqrt(t).max(1),
            BlockRule::TwiceSqrt => 2 * ceil_sqrt(t).max(1),
            BlockRule::Fixed(b) => b,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalingError {
    #[error("a fit needs at least 4 points, got {0}")]
    TooFewPoints(usize),
    #[error("bad grid `{0}`: expected values like 1024, 2^10, or a range 2^10..2^18")]
    BadGrid(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingRow {
    /// Requested horizon.
    pub horizon: u64,
    /// Steps actually simulated.
    pub t: u64,
    pub b: u64,
    pub leaves: u64,
    pub k: usize,
    pub volume: u64,
    pub max_screen: u64,
    pub max_book: u64,
    pub max_total: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in natural-log units.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingReport {
    pub machine: String,
    pub rows: Vec<ScalingRow>,
    pub failures: Vec<(u64, HoloError)>,
    pub fit: Option<Fit>,
}

/// Least squares of `ln y` against `ln x`.
pub fn fit_loglog(points: &[(f64, f64)]) -> Result<Fit, ScalingError> {
    if points.len() < 4 {
        return Err(ScalingError::TooFewPoints(points.len()));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (intercept + slope * x)).powi(2))
        .sum();
    Ok(Fit {
        slope,
        intercept,
        residual: (sse / n).sqrt(),
    })
}

/// Runs the streaming simulator once per grid point, in parallel, and fits
/// `max_screen` against `t`. Failed grid points are recorded, not fatal.
pub fn area_law_study(
    m: &MachineSpec,
    input_for: &(dyn Fn(u64) -> Vec<Symbol> + Sync),
    grid: &[u64],
    rule: BlockRule,
    c_int: u64,
) -> ScalingReport {
    let results: Vec<(u64, Result<ScalingRow, HoloError>)> = thread::scope(|s| {
        let handles: Vec<_> = grid
            .iter()
            .map(|&horizon| {
                s.spawn(move || {
                    let input = input_for(horizon);
                    let b = rule.block_size(horizon);
                    let mut ledger = ScreenLedger::new();
                    let res = holo_run(m, &input, horizon, b, c_int, &mut |_| {}, &mut ledger)
                        .map(|out| ScalingRow {
                            horizon,
                            t: out.t,
                            b,
                            leaves: out.leaves,
                            k: m.tapes(),
                            volume: out.t * m.tapes() as u64,
                            max_screen: ledger.max_screen(),
                            max_book: ledger.max_book(),
                            max_total: ledger.max_total(),
                        });
                    (horizon, res)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("grid worker panicked"))
            .collect()
    });
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (horizon, r) in results {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => failures.push((horizon, e)),
        }
    }
    rows.sort_by_key(|r| r.t);
    let points: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.t as f64, r.max_screen as f64))
        .collect();
    ScalingReport {
        machine: m.name().to_owned(),
        fit: fit_loglog(&points).ok(),
        rows,
        failures,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VolumeRow {
    pub volume: u64,
    pub max_screen: u64,
    pub ratio: f64,
}

/// `max_screen / √V_t` per row, with `V_t = k·t`.
pub fn volume_vs_screen(report: &ScalingReport) -> Vec<VolumeRow> {
    report
        .rows
        .iter()
        .map(|r| VolumeRow {
            volume: r.volume,
            max_screen: r.max_screen,
            ratio: r.max_screen as f64 / (r.volume as f64).sqrt(),
        })
        .collect()
}

pub const CSV_HEADER: &str =
    "machine,t,b,T,k,volume,max_screen,max_book,max_total,exponent_fit,residual";

pub fn report_csv(report: &ScalingReport) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    let (slope, residual) = match report.fit {
        Some(f) => (format!("{:.6}", f.slope), format!("{:.6}", f.residual)),
        None => (String::new(), String::new()),
    };
    for r in &report.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            report.machine,
            r.t,
            r.b,
            r.leaves,
            r.k,
            r.volume,
            r.max_screen,
            r.max_book,
            r.max_total,
            slope,
            residual
        )
        .unwrap();
    }
    out
}

fn parse_value(tok: &str) -> Option<u64> {
    let tok = tok.trim();
    match tok.split_once('^') {
        Some((base, exp)) => {
            let base: u64 = base.trim().parse().ok()?;
            let exp: u32 = exp.trim().parse().ok()?;
            base.checked_pow(exp)
        }
        None => tok.parse().ok(),
    }
}

/// Parses `2^10..2^18` (every power of two in range), or a comma list of
/// values such as `1024,2^12`.
pub fn parse_grid(spec: &str) -> Result<Vec<u64>, ScalingError> {
    let bad = || ScalingError::BadGrid(spec.to_owned());
    if let Some((lo, hi)) = spec.split_once("..") {
        let (lo, hi) = (parse_value(lo).ok_or_else(bad)?, parse_value(hi).ok_or_else(bad)?);
        if lo == 0 || hi < lo {
            return Err(bad());
        }
        let mut v = lo.next_power_of_two();
        let mut out = Vec::new();
        if lo != v {
            out.push(lo);
        }
        while v <= hi {
            out.push(v);
            v = v.checked_mul(2).ok_or_else(bad)?;
        }
        return Ok(out);
    }
    let out: Vec<u64> = spec
        .split(',')
        .map(|tok| parse_value(tok).filter(|&v| v > 0))
        .collect::<Option<_>>()
        .ok_or_else(bad)?;
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

/// Label, colour, value.
type Series = (&'static str, &'static str, fn(&ScalingRow) -> u64);

/// Self-contained log-log chart of the peak footprints against `t`.
pub fn report_svg(report: &ScalingReport) -> String {
    const W: f64 = 640.0;
    const H: f64 = 420.0;
    const PAD: f64 = 60.0;
    let rows = &report.rows;
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{}: peak cells vs t (log-log)</text>\n",
        W / 2.0,
        report.machine
    );
    if rows.is_empty() {
        out.push_str("</svg>\n");
        return out;
    }
    let series: [Series; 3] = [
        ("max_screen", "#1f77b4", |r| r.max_screen),
        ("max_book", "#ff7f0e", |r| r.max_book),
        ("max_total", "#2ca02c", |r| r.max_total),
    ];
    let lx = |t: u64| (t.max(1) as f64).log2();
    let (x0, x1) = (lx(rows[0].t), lx(rows[rows.len() - 1].t));
    let ys: Vec<f64> = rows
        .iter()
        .flat_map(|r| series.iter().map(move |s| lx((s.2)(r))))
        .collect();
    let y0 = ys.iter().cloned().fold(f64::INFINITY, f64::min).floor();
    let y1 = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max).ceil();
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0).max(1e-9) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0).max(1e-9) * (H - 2.0 * PAD);
    writeln!(
        out,
        "<line x1=\"{PAD}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n\
         <line x1=\"{PAD}\" y1=\"{PAD}\" x2=\"{PAD}\" y2=\"{}\" stroke=\"black\"/>",
        H - PAD,
        W - PAD,
        H - PAD,
        H - PAD
    )
    .unwrap();
    for r in rows {
        writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">2^{:.1}</text>",
            sx(lx(r.t)),
            H - PAD + 16.0,
            lx(r.t)
        )
        .unwrap();
    }
    let mut y = y0;
    while y <= y1 {
        writeln!(
            out,
            "<text x=\"{}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">2^{y}</text>",
            PAD - 6.0,
            sy(y) + 3.0
        )
        .unwrap();
        y += 1.0;
    }
    for (i, (name, color, get)) in series.iter().enumerate() {
        let pts: Vec<String> = rows
            .iter()
            .map(|r| format!("{:.1},{:.1}", sx(lx(r.t)), sy(lx(get(r)))))
            .collect();
        writeln!(
            out,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" points=\"{}\"/>",
            pts.join(" ")
        )
        .unwrap();
        writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"{color}\">{name}</text>",
            PAD + 10.0,
            PAD + 14.0 * i as f64
        )
        .unwrap();
    }
    if let Some(f) = report.fit {
        writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">screen exponent {:.3}</text>",
            W - PAD,
            PAD,
            f.slope
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}

//! Deterministic output encoders: CSV, JSON and the portrait SVG.
//!
//! Identical inputs must produce byte-identical files, so everything here
//! avoids locale, hash ordering and timestamps. CSV numbers use Rust's
//! shortest round-trip `Display`; JSON numbers are fixed at 17 significant
//! digits so reports diff cleanly across runs.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

pub fn fmt_csv_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x == 0.0 {
        // canonical zero: -0.0 would round-trip but reads badly in tables
        "0".to_string()
    } else {
        format!("{x}")
    }
}

pub fn csv_line(fields: &[String]) -> String {
    let mut s = fields.join(",");
    s.push('\n');
    s
}

/// Minimal JSON tree with insertion-ordered objects.
pub enum Json {
    Bool(bool),
    Int(i64),
    Num(f64),
    Str(String),
    Arr(Vec<Json>),
    Obj(Vec<(&'static str, Json)>),
}

impl Json {
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, 0);
        out.push('\n');
        out
    }

    fn write(&self, out: &mut String, depth: usize) {
        match self {
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::Int(i) => out.push_str(&i.to_string()),
            Json::Num(x) => {
                if x.is_finite() {
                    out.push_str(&format!("{x:.16e}"));
                } else {
                    out.push_str("null");
                }
            }
            Json::Str(s) => {
                out.push('"');
                for c in s.chars() {
                    match c {
                        '"' => out.push_str("\\\""),
                        '\\' => out.push_str("\\\\"),
                        '\n' => out.push_str("\\n"),
                        c if (c as u32) < 0x20 => {
                            out.push_str(&format!("\\u{:04x}", c as u32))
                        }
                        c => out.push(c),
                    }
                }
                out.push('"');
            }
            Json::Arr(items) => {
                if items.is_empty() {
                    out.push_str("[]");
                    return;
                }
                out.push('[');
                for (k, item) in items.iter().enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    indent(out, depth + 1);
                    item.write(out, depth + 1);
                }
                out.push('\n');
                indent(out, depth);
                out.push(']');
            }
            Json::Obj(fields) => {
                if fields.is_empty() {
                    out.push_str("{}");
                    return;
                }
                out.push('{');
                for (k, (name, value)) in fields.iter().enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    indent(out, depth + 1);
                    out.push('"');
                    out.push_str(name);
                    out.push_str("\": ");
                    value.write(out, depth + 1);
                }
                out.push('\n');
                indent(out, depth);
                out.push('}');
            }
        }
    }
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

/// Write to the path, or to stdout when no path was given.
pub fn write_output(path: Option<&Path>, text: &str) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, text),
        None => io::stdout().write_all(text.as_bytes()),
    }
}

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

/// One polyline per trajectory in the `(f, f′)` plane; fixed viewBox, no
/// external assets.
pub fn portrait_svg(trajectories: &[(usize, Vec<(f64, f64, f64)>)]) -> String {
    const W: f64 = 800.0;
    const H: f64 = 600.0;
    const PAD: f64 = 40.0;

    let mut fmin = f64::INFINITY;
    let mut fmax = f64::NEG_INFINITY;
    let mut dmin = f64::INFINITY;
    let mut dmax = f64::NEG_INFINITY;
    for (_, samples) in trajectories {
        for &(_, f, df) in samples {
            fmin = fmin.min(f);
            fmax = fmax.max(f);
            dmin = dmin.min(df);
            dmax = dmax.max(df);
        }
    }
    if !(fmin < fmax) {
        fmin -= 1.0;
        fmax += 1.0;
    }
    if !(dmin < dmax) {
        dmin -= 1.0;
        dmax += 1.0;
    }
    let fspan = fmax - fmin;
    let dspan = dmax - dmin;
    let sx = |f: f64| PAD + (f - fmin) / fspan * (W - 2.0 * PAD);
    let sy = |df: f64| H - PAD - (df - dmin) / dspan * (H - 2.0 * PAD);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {W} {H}\">\n"
    ));
    svg.push_str(&format!(
        "  <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n"
    ));
    if fmin < 0.0 && fmax > 0.0 {
        svg.push_str(&format!(
            "  <line x1=\"{:.2}\" y1=\"{PAD}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#cccccc\"/>\n",
            sx(0.0),
            sx(0.0),
            H - PAD
        ));
    }
    if dmin < 0.0 && dmax > 0.0 {
        svg.push_str(&format!(
            "  <line x1=\"{PAD}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#cccccc\"/>\n",
            sy(0.0),
            W - PAD,
            sy(0.0)
        ));
    }
    for (traj_id, samples) in trajectories {
        let color = PALETTE[traj_id % PALETTE.len()];
        let mut points = String::new();
        for &(_, f, df) in samples {
            points.push_str(&format!("{:.2},{:.2} ", sx(f), sy(df)));
        }
        svg.push_str(&format!(
            "  <polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
            points.trim_end()
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

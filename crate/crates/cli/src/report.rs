//! Deterministic artifact writers. Floats go through the shortest
//! round-trip formatter in CSV and JSON, and through fixed precision in
//! SVG coordinates, so identical data always produces identical bytes.

use std::fs;
use std::io;
use std::path::Path;

use serde::Serialize;

pub fn write_text(path: &Path, text: &str) -> io::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

pub fn csv(header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

const SVG_SIZE: f64 = 720.0;
const SVG_MARGIN: f64 = 40.0;

fn svg_open(w: f64, h: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
         viewBox=\"0 0 {w} {h}\">\n<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n"
    )
}

/// Map data bounds to the drawing area, preserving aspect ratio.
struct Frame {
    x0: f64,
    y0: f64,
    scale: f64,
}

impl Frame {
    fn fit(points: &[(f64, f64)]) -> Frame {
        let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in points {
            xmin = xmin.min(x);
            xmax = xmax.max(x);
            ymin = ymin.min(y);
            ymax = ymax.max(y);
        }
        let span = (xmax - xmin).max(ymax - ymin).max(1e-12);
        let scale = (SVG_SIZE - 2.0 * SVG_MARGIN) / span;
        Frame {
            x0: (xmin + xmax) / 2.0,
            y0: (ymin + ymax) / 2.0,
            scale,
        }
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        (
            SVG_SIZE / 2.0 + (x - self.x0) * self.scale,
            // SVG y grows downward.
            SVG_SIZE / 2.0 - (y - self.y0) * self.scale,
        )
    }
}

/// Scatter plot of raw points; caller thins dense clouds beforehand.
pub fn svg_scatter(points: &[(f64, f64)], radius: f64, title: &str) -> String {
    let frame = Frame::fit(points);
    let mut out = svg_open(SVG_SIZE, SVG_SIZE);
    out.push_str(&format!(
        "<text x=\"{SVG_MARGIN}\" y=\"24\" font-family=\"monospace\" font-size=\"14\">{title}</text>\n"
    ));
    for &(x, y) in points {
        let (px, py) = frame.map(x, y);
        out.push_str(&format!(
            "<circle cx=\"{px:.3}\" cy=\"{py:.3}\" r=\"{radius}\" fill=\"black\" fill-opacity=\"0.55\"/>\n"
        ));
    }
    out.push_str("</svg>\n");
    out
}

/// Polyline through (x, y) samples with light axis annotation at the
/// extremes; enough for a trend check, not a plotting library.
pub fn svg_line(points: &[(f64, f64)], title: &str) -> String {
    let frame = Frame::fit(points);
    let mut out = svg_open(SVG_SIZE, SVG_SIZE);
    out.push_str(&format!(
        "<text x=\"{SVG_MARGIN}\" y=\"24\" font-family=\"monospace\" font-size=\"14\">{title}</text>\n"
    ));
    let coords: Vec<String> = points
        .iter()
        .map(|&(x, y)| {
            let (px, py) = frame.map(x, y);
            format!("{px:.3},{py:.3}")
        })
        .collect();
    out.push_str(&format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n",
        coords.join(" ")
    ));
    for &(x, y) in points {
        let (px, py) = frame.map(x, y);
        out.push_str(&format!(
            "<circle cx=\"{px:.3}\" cy=\"{py:.3}\" r=\"3\" fill=\"black\"/>\n"
        ));
    }
    if let (Some(first), Some(last)) = (points.first(), points.last()) {
        out.push_str(&format!(
            "<text x=\"{SVG_MARGIN}\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"12\">{} .. {}</text>\n",
            SVG_SIZE - 12.0,
            first.0,
            last.0
        ));
    }
    out.push_str("</svg>\n");
    out
}

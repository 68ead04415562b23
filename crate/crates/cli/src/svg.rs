//! Barcode diagrams on a logarithmic action axis.
//!
//! One horizontal segment per bar. Infinite bars run to the right edge and end in an
//! arrowhead, censored bars are dashed up to the censoring value.

use std::fmt::Write;

use lchpm_core::persistence::{Barcode, Death};

const WIDTH: f64 = 720.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 40.0;
const TOP: f64 = 40.0;
const ROW: f64 = 18.0;
const AXIS: f64 = 40.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Renders `barcode`; `header` lines (the run manifest) go into a leading comment.
pub fn render_svg(barcode: &Barcode, title: &str, header: &[String]) -> String {
    let bars = barcode.bars();
    let mut values: Vec<f64> = Vec::new();
    for b in bars {
        values.push(b.birth.to_f64());
        match &b.death {
            Death::Finite(d) | Death::Censored(d) => values.push(d.to_f64()),
            Death::Infinite => {}
        }
    }
    if let Some(t) = barcode.truncation() {
        values.push(t.to_f64());
    }
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if values.is_empty() {
        (1.0, 10.0)
    } else if hi <= lo {
        (lo / 2.0, lo * 2.0)
    } else {
        (lo / 1.2, hi * 1.2)
    };
    let plot = WIDTH - LEFT - RIGHT;
    let x = |v: f64| LEFT + (v.ln() - lo.ln()) / (hi.ln() - lo.ln()) * plot;
    let height = TOP + ROW * bars.len().max(1) as f64 + AXIS;

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height:.1}" viewBox="0 0 {WIDTH} {height:.1}">"#
    )
    .unwrap();
    if !header.is_empty() {
        s.push_str("<!--\n");
        for line in header {
            writeln!(s, "  {}", line.replace("--", "- -")).unwrap();
        }
        s.push_str("-->\n");
    }
    writeln!(
        s,
        r#"<text x="{LEFT}" y="20" font-family="monospace" font-size="13">{}</text>"#,
        escape(title)
    )
    .unwrap();
    let right_edge = WIDTH - RIGHT;
    for (i, b) in bars.iter().enumerate() {
        let y = TOP + ROW * i as f64 + ROW / 2.0;
        let x0 = x(b.birth.to_f64());
        let label = if b.multiplicity > 1 {
            format!("{} x{}", b.birth, b.multiplicity)
        } else {
            b.birth.to_string()
        };
        match &b.death {
            Death::Finite(d) => {
                writeln!(
                    s,
                    r#"<line class="bar finite" x1="{x0:.2}" y1="{y:.1}" x2="{:.2}" y2="{y:.1}" stroke="black" stroke-width="3"/>"#,
                    x(d.to_f64())
                )
                .unwrap();
            }
            Death::Censored(d) => {
                writeln!(
                    s,
                    r#"<line class="bar censored" x1="{x0:.2}" y1="{y:.1}" x2="{:.2}" y2="{y:.1}" stroke="gray" stroke-width="3" stroke-dasharray="6 4"/>"#,
                    x(d.to_f64())
                )
                .unwrap();
            }
            Death::Infinite => {
                let tip = right_edge;
                writeln!(
                    s,
                    r#"<line class="bar infinite" x1="{x0:.2}" y1="{y:.1}" x2="{:.2}" y2="{y:.1}" stroke="black" stroke-width="3"/>"#,
                    tip - 8.0
                )
                .unwrap();
                writeln!(
                    s,
                    r#"<polygon class="arrowhead" points="{:.2},{:.1} {tip:.2},{y:.1} {:.2},{:.1}" fill="black"/>"#,
                    tip - 10.0,
                    y - 5.0,
                    tip - 10.0,
                    y + 5.0
                )
                .unwrap();
            }
        }
        writeln!(
            s,
            r#"<text x="{:.2}" y="{:.1}" font-family="monospace" font-size="10" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            y + 3.0,
            escape(&label)
        )
        .unwrap();
    }
    let axis_y = height - AXIS + 10.0;
    writeln!(
        s,
        r#"<line class="axis" x1="{LEFT}" y1="{axis_y:.1}" x2="{right_edge}" y2="{axis_y:.1}" stroke="black"/>"#
    )
    .unwrap();
    let mut ticks: Vec<(f64, String)> = bars
        .iter()
        .map(|b| (b.birth.to_f64(), b.birth.to_string()))
        .chain(barcode.truncation().map(|t| (t.to_f64(), t.to_string())))
        .collect();
    ticks.sort_by(|a, b| a.0.total_cmp(&b.0));
    ticks.dedup_by(|a, b| a.1 == b.1);
    for (v, label) in ticks {
        let tx = x(v);
        writeln!(
            s,
            r#"<line x1="{tx:.2}" y1="{axis_y:.1}" x2="{tx:.2}" y2="{:.1}" stroke="black"/><text x="{tx:.2}" y="{:.1}" font-family="monospace" font-size="10" text-anchor="middle">{}</text>"#,
            axis_y + 4.0,
            axis_y + 16.0,
            escape(&label)
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}

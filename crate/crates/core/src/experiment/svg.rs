use std::fmt::Write;

use super::data::Dataset;
use super::metrics::DecisionGrid;
use super::{ModelRun, PoolEvent};

const CLASS_FILL: [&str; 2] = ["#cfe2f3", "#f9d9c9"];
const CLASS_DOT: [&str; 2] = ["#1f5fa8", "#c2410c"];
const SERIES: [&str; 2] = ["#1f5fa8", "#c2410c"];

fn header(out: &mut String, width: u32, height: u32) {
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="{width}" height="{height}" fill="white"/>"#).unwrap();
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Grid heatmap over the unit square with the points drawn on top. Runs of
/// equal cells in a row are drawn as one rectangle.
pub fn boundary_svg(grid: &DecisionGrid, data: &Dataset, title: &str) -> String {
    let (size, margin) = (500.0, 40.0);
    let r = grid.resolution;
    let cell = size / r as f64;
    let mut out = String::new();
    header(&mut out, (size + 2.0 * margin) as u32, (size + 2.0 * margin) as u32);
    writeln!(out, r#"<text x="{margin}" y="24">{}</text>"#, escape(title)).unwrap();
    writeln!(out, r#"<g shape-rendering="crispEdges">"#).unwrap();
    for j in 0..r {
        // row j sits at x2 = (j + 0.5) / r; the y axis points up
        let y = margin + size - (j + 1) as f64 * cell;
        let mut i = 0;
        while i < r {
            let label = grid.get(i, j);
            let start = i;
            while i < r && grid.get(i, j) == label {
                i += 1;
            }
            writeln!(
                out,
                r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{}"/>"#,
                margin + start as f64 * cell,
                y,
                (i - start) as f64 * cell,
                cell,
                CLASS_FILL[label as usize]
            )
            .unwrap();
        }
    }
    writeln!(out, "</g>").unwrap();
    writeln!(
        out,
        r##"<rect x="{margin}" y="{margin}" width="{size}" height="{size}" fill="none" stroke="#333"/>"##
    )
    .unwrap();
    for p in data.points() {
        writeln!(
            out,
            r#"<circle cx="{:.3}" cy="{:.3}" r="3" fill="{}" stroke="white" stroke-width="0.5"/>"#,
            margin + p.x1 * size,
            margin + size - p.x2 * size,
            CLASS_DOT[p.label as usize]
        )
        .unwrap();
    }
    writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">x1</text>"#, margin + size / 2.0, size + margin + 28.0)
        .unwrap();
    writeln!(
        out,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">x2</text>"#,
        margin + size / 2.0,
        margin + size / 2.0
    )
    .unwrap();
    out.push_str("</svg>\n");
    out
}

/// Loss per epoch on a log scale, one polyline per model, with dashed
/// markers at epochs where pooling merged neurons.
pub fn loss_curves_svg(models: &[ModelRun]) -> String {
    let (w, h, left, right, top, bottom) = (900.0, 420.0, 70.0, 20.0, 30.0, 40.0);
    let (pw, ph) = (w - left - right, h - top - bottom);
    let mut out = String::new();
    header(&mut out, w as u32, h as u32);

    let losses = models.iter().flat_map(|m| m.epochs.iter().map(|e| e.loss)).filter(|l| *l > 0.0);
    let (lo, hi) = losses.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), l| (a.min(l), b.max(l)));
    let max_epoch = models.iter().filter_map(|m| m.epochs.last()).map(|e| e.epoch).max().unwrap_or(0);
    writeln!(out, r##"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>"##).unwrap();
    if max_epoch == 0 || !lo.is_finite() {
        writeln!(out, r#"<text x="{}" y="{}">no epochs logged</text>"#, left + 10.0, top + 20.0).unwrap();
        out.push_str("</svg>\n");
        return out;
    }
    let (lo_exp, hi_exp) = (lo.log10().floor(), hi.log10().ceil().max(lo.log10().floor() + 1.0));
    let x_of = |epoch: usize| left + pw * epoch as f64 / max_epoch as f64;
    let y_of = |loss: f64| {
        let t = (loss.max(lo).log10() - lo_exp) / (hi_exp - lo_exp);
        top + ph * (1.0 - t)
    };

    for k in lo_exp as i32..=hi_exp as i32 {
        let y = y_of(10f64.powi(k));
        writeln!(out, r##"<line x1="{left}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#ddd"/>"##, left + pw).unwrap();
        writeln!(out, r#"<text x="{}" y="{:.2}" text-anchor="end">1e{k}</text>"#, left - 6.0, y + 4.0).unwrap();
    }
    writeln!(out, r#"<text x="{left}" y="{}">0</text>"#, top + ph + 16.0).unwrap();
    writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{max_epoch}</text>"#, left + pw, top + ph + 16.0).unwrap();
    writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">epoch</text>"#, left + pw / 2.0, top + ph + 32.0)
        .unwrap();

    let events: Vec<&PoolEvent> = models.iter().flat_map(|m| &m.events).collect();
    let mut marked = Vec::new();
    for e in events {
        if marked.last() != Some(&e.epoch) {
            marked.push(e.epoch);
            let x = x_of(e.epoch);
            writeln!(
                out,
                r##"<line x1="{x:.2}" y1="{top}" x2="{x:.2}" y2="{}" stroke="#888" stroke-dasharray="4 3"/>"##,
                top + ph
            )
            .unwrap();
        }
    }

    for (k, m) in models.iter().enumerate() {
        let color = SERIES[k % SERIES.len()];
        out.push_str(&format!(r#"<polyline fill="none" stroke="{color}" stroke-width="1" points=""#));
        for e in &m.epochs {
            write!(out, "{:.2},{:.2} ", x_of(e.epoch), y_of(e.loss)).unwrap();
        }
        out.push_str("\"/>\n");
        let ly = top + 16.0 + 16.0 * k as f64;
        writeln!(
            out,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            w - right - 120.0,
            w - right - 100.0
        )
        .unwrap();
        writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, w - right - 94.0, ly + 4.0, m.kind).unwrap();
    }
    out.push_str("</svg>\n");
    out
}

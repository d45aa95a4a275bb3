//! Minimal SVG scatter plots of 2-coordinate projections.

use std::fmt::Write;

use crate::codec::{QuantizedScalar, TupleDataset};

const SIZE: f64 = 480.0;
const MARGIN: f64 = 40.0;

fn to_px(v: QuantizedScalar, flip: bool) -> f64 {
    let span = SIZE - 2.0 * MARGIN;
    let unit = (v.to_f64().clamp(-1.0, 1.0) + 1.0) / 2.0;
    MARGIN + span * if flip { 1.0 - unit } else { unit }
}

/// Renders the first two columns of `d` over the fixed window `[-1, 1]^2`.
/// Points are emitted as circles in row order, so equal datasets give
/// byte-identical documents.
pub fn scatter_svg(d: &TupleDataset, title: &str, x_label: &str, y_label: &str) -> String {
    let mut s = String::with_capacity(256 + d.m_rows() * 48);
    let lo = MARGIN;
    let hi = SIZE - MARGIN;
    let mid = SIZE / 2.0;
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{mid}" y="20" text-anchor="middle" font-family="sans-serif" font-size="14">{}</text>"#,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{lo}" y="{lo}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        hi - lo,
        hi - lo
    );
    let _ = writeln!(
        s,
        r#"<line x1="{lo}" y1="{mid}" x2="{hi}" y2="{mid}" stroke="gray" stroke-width="0.5"/>"#
    );
    let _ = writeln!(
        s,
        r#"<line x1="{mid}" y1="{lo}" x2="{mid}" y2="{hi}" stroke="gray" stroke-width="0.5"/>"#
    );
    for (label, x, y, anchor) in [
        ("-1", lo, hi + 14.0, "middle"),
        ("1", hi, hi + 14.0, "middle"),
        ("-1", lo - 4.0, hi, "end"),
        ("1", lo - 4.0, lo + 4.0, "end"),
    ] {
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{y}" text-anchor="{anchor}" font-family="sans-serif" font-size="10">{label}</text>"#
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{mid}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12">{}</text>"#,
        SIZE - 8.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="12" y="{mid}" text-anchor="middle" font-family="sans-serif" font-size="12" transform="rotate(-90 12 {mid})">{}</text>"#,
        escape(y_label)
    );
    s.push_str("<g fill=\"steelblue\" fill-opacity=\"0.5\">\n");
    for row in d.rows() {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="1"/>"#,
            to_px(row[0], false),
            to_px(row[1], true)
        );
    }
    s.push_str("</g>\n</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

//! SVG renderings of evaluation reports and explanations.

use std::fmt::Write;

use crisk::lime::Explanation;
use crisk::{Error, Result};
use serde_json::Value;

use crate::documents::{EvaluationDocument, ExplanationDocument};

pub const BAD_PAYER_COLOR: &str = "#c0392b";
pub const GOOD_PAYER_COLOR: &str = "#27ae60";
const CURVE_COLORS: [&str; 4] = ["#1f77b4", "#ff7f0e", "#9467bd", "#8c564b"];
const MAX_CURVE_POINTS: usize = 1000;

/// Renders whichever document `doc` is.
pub fn render(doc: &Value) -> Result<String> {
    match doc.get("kind").and_then(Value::as_str) {
        Some("evaluation") => {
            let d: EvaluationDocument = from_value(doc)?;
            Ok(lorenz_svg(&d))
        }
        Some("explanation") => {
            let d: ExplanationDocument = from_value(doc)?;
            Ok(explanation_svg(&d.explanation))
        }
        Some(other) => Err(Error::Document(format!("cannot plot a {other:?} document"))),
        None => Err(Error::Document("document has no kind".into())),
    }
}

fn from_value<T: serde::de::DeserializeOwned>(doc: &Value) -> Result<T> {
    serde_json::from_value(doc.clone()).map_err(|e| Error::Document(e.to_string()))
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Keeps at most `MAX_CURVE_POINTS` evenly spaced points, always including
/// both ends.
fn thin(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    if points.len() <= MAX_CURVE_POINTS {
        return points.to_vec();
    }
    let last = points.len() - 1;
    (0..MAX_CURVE_POINTS)
        .map(|k| points[k * last / (MAX_CURVE_POINTS - 1)])
        .collect()
}

pub fn lorenz_svg(doc: &EvaluationDocument) -> String {
    let (left, top, size) = (70.0, 30.0, 400.0);
    let px = |x: f64| left + x * size;
    let py = |y: f64| top + (1.0 - y) * size;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"##,
        w = left + size + 30.0,
        h = top + size + 60.0 + 18.0 * doc.models.len() as f64,
    );
    let _ = writeln!(s, r##"<text x="{}" y="18" text-anchor="middle" font-size="14">Lorenz curve</text>"##, px(0.5));
    let _ = writeln!(
        s,
        r##"<rect class="frame" x="{left}" y="{top}" width="{size}" height="{size}" fill="none" stroke="#444"/>"##
    );
    let _ = writeln!(
        s,
        r##"<line class="diagonal" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#999" stroke-dasharray="4 3"/>"##,
        px(0.0),
        py(0.0),
        px(1.0),
        py(1.0)
    );
    for (k, model) in doc.models.iter().enumerate() {
        let color = CURVE_COLORS[k % CURVE_COLORS.len()];
        let pts: Vec<String> = thin(&model.report.lorenz_points)
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let _ = writeln!(
            s,
            r##"<polyline class="lorenz" data-label="{}" points="{}" fill="none" stroke="{color}" stroke-width="2"/>"##,
            escape(&model.label),
            pts.join(" ")
        );
        let ly = top + size + 45.0 + 18.0 * k as f64;
        let _ = writeln!(
            s,
            r##"<line x1="{left}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="2"/>"##,
            ly - 4.0,
            left + 24.0,
            ly - 4.0
        );
        let _ = writeln!(
            s,
            r##"<text class="legend" x="{:.2}" y="{ly:.2}">{} ({}): Gini {:.4}</text>"##,
            left + 30.0,
            escape(&model.label),
            escape(&model.kind),
            model.report.gini
        );
    }
    let _ = writeln!(
        s,
        r##"<text x="{:.2}" y="{:.2}" text-anchor="middle">Share of population, riskiest first</text>"##,
        px(0.5),
        top + size + 20.0
    );
    let _ = writeln!(
        s,
        r##"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">Share of defaults</text>"##,
        py(0.5),
        py(0.5)
    );
    s.push_str("</svg>\n");
    s
}

pub fn explanation_svg(e: &Explanation) -> String {
    let bars = &e.contributions;
    let (label_w, half, top, row_h) = (200.0, 180.0, 110.0, 26.0);
    let axis = label_w + half;
    let scale = bars.iter().map(|c| c.value.abs()).fold(0.0, f64::max);
    let unit = if scale > 0.0 { (half - 10.0) / scale } else { 0.0 };
    let mut s = String::new();
    let _ = writeln!(
        s,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"##,
        w = axis + half + 20.0,
        h = top + row_h * bars.len() as f64 + 50.0,
    );
    let header = [
        format!("Unit {}", e.unit_id),
        format!("Black-box prediction: {:.4}", e.blackbox_prediction),
        format!("LIME prediction: {:.4}", e.surrogate_prediction),
        format!("Model R²: {:.4}", e.surrogate_r_squared),
        format!("Intercept: {:.4}", e.intercept),
    ];
    for (i, line) in header.iter().enumerate() {
        let _ = writeln!(s, r##"<text class="header" x="10" y="{}">{}</text>"##, 18 + 18 * i, escape(line));
    }
    for (i, c) in bars.iter().enumerate() {
        let y = top + row_h * i as f64;
        let len = c.value.abs() * unit;
        let (x, class, color) = if c.value >= 0.0 {
            (axis, "bar bad-payer", BAD_PAYER_COLOR)
        } else {
            (axis - len, "bar good-payer", GOOD_PAYER_COLOR)
        };
        let _ = writeln!(
            s,
            r##"<rect class="{class}" data-feature="{}" data-value="{}" x="{x:.2}" y="{:.2}" width="{len:.2}" height="{:.2}" fill="{color}"/>"##,
            escape(&c.feature),
            c.value,
            y + 3.0,
            row_h - 6.0
        );
        let _ = writeln!(
            s,
            r##"<text class="label" x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
            label_w - 8.0,
            y + row_h / 2.0 + 4.0,
            escape(&c.feature)
        );
    }
    let bottom = top + row_h * bars.len() as f64;
    let _ = writeln!(
        s,
        r##"<line class="axis" x1="{axis:.2}" y1="{:.2}" x2="{axis:.2}" y2="{bottom:.2}" stroke="#333"/>"##,
        top - 4.0
    );
    let _ = writeln!(
        s,
        r##"<text x="{:.2}" y="{:.2}" text-anchor="end" fill="{GOOD_PAYER_COLOR}">towards good payer</text>"##,
        axis - 6.0,
        bottom + 22.0
    );
    let _ = writeln!(
        s,
        r##"<text x="{:.2}" y="{:.2}" fill="{BAD_PAYER_COLOR}">towards bad payer</text>"##,
        axis + 6.0,
        bottom + 22.0
    );
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thinning_keeps_ends() {
        let pts: Vec<(f64, f64)> = (0..5000).map(|i| (i as f64, i as f64)).collect();
        let t = thin(&pts);
        assert_eq!(t.len(), MAX_CURVE_POINTS);
        assert_eq!(t[0], pts[0]);
        assert_eq!(*t.last().unwrap(), pts[4999]);
    }

    #[test]
    fn escapes_markup() {
        assert_eq!(escape("a<b & \"c\">"), "a&lt;b &amp; &quot;c&quot;&gt;");
    }
}

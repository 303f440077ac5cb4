//! Static SVG drawing of a tangent construction: the starting potential and
//! `c` as solid curves, each tangent dashed, step intervals under the axis.

use std::fmt::Write;

use crate::construct::EmbeddingPlan;
use crate::potential::PLConcave;

const W: f64 = 720.0;
const H: f64 = 480.0;
const MARGIN: f64 = 56.0;
const BAND: f64 = 10.0;

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    bottom: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (W - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        self.bottom - (y - self.y0) / (self.y1 - self.y0) * (self.bottom - MARGIN)
    }
}

/// Vertices of `f` on `[x0, x1]`.
fn vertices(f: &PLConcave, x0: f64, x1: f64) -> Vec<(f64, f64)> {
    let mut xs = vec![x0];
    xs.extend(f.kinks().iter().map(|k| k.x).filter(|&x| x > x0 && x < x1));
    xs.push(x1);
    xs.into_iter().map(|x| (x, f.eval(x))).collect()
}

fn polyline(out: &mut String, fr: &Frame, pts: &[(f64, f64)], style: &str) {
    let coords: Vec<String> = pts
        .iter()
        .map(|&(x, y)| format!("{:.2},{:.2}", fr.px(x), fr.py(y)))
        .collect();
    writeln!(out, r#"<polyline points="{}" {style}/>"#, coords.join(" ")).unwrap();
}

pub fn render(plan: &EmbeddingPlan) -> String {
    let u0 = plan.initial_potential();
    let c = plan.target_potential();

    let mut xs: Vec<f64> = plan
        .mu0
        .positions()
        .chain(plan.target.positions())
        .collect();
    for s in &plan.steps {
        xs.extend(s.interval.lower());
        xs.extend(s.interval.upper());
    }
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let pad = 0.25 * (hi - lo).max(2.0);
    let (x0, x1) = (lo - pad, hi + pad);

    let curves = [vertices(&u0, x0, x1), vertices(&c, x0, x1)];
    let ys = curves.iter().flatten().map(|p| p.1);
    let y0 = ys.clone().fold(f64::INFINITY, f64::min);
    let y1 = ys.fold(f64::NEG_INFINITY, f64::max);
    let ypad = 0.1 * (y1 - y0).max(1.0);
    let fr = Frame {
        x0,
        x1,
        y0: y0 - ypad,
        y1: y1 + ypad,
        bottom: H - MARGIN - BAND * plan.steps.len() as f64,
    };

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    )
    .unwrap();
    writeln!(
        out,
        r#"<defs><clipPath id="plot"><rect x="{MARGIN}" y="{MARGIN}" width="{:.2}" height="{:.2}"/></clipPath></defs>"#,
        W - 2.0 * MARGIN,
        fr.bottom - MARGIN
    )
    .unwrap();
    writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#).unwrap();

    // Axes and ticks.
    let axis_y = fr.bottom;
    writeln!(
        out,
        r#"<line x1="{MARGIN}" y1="{axis_y:.2}" x2="{:.2}" y2="{axis_y:.2}" stroke="black"/>"#,
        W - MARGIN
    )
    .unwrap();
    writeln!(
        out,
        r#"<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{axis_y:.2}" stroke="black"/>"#
    )
    .unwrap();
    for i in 0..=4 {
        let x = x0 + (x1 - x0) * i as f64 / 4.0;
        let y = fr.y0 + (fr.y1 - fr.y0) * i as f64 / 4.0;
        writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle">{x:.2}</text>"#,
            fr.px(x),
            H - 12.0
        )
        .unwrap();
        writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{y:.2}</text>"#,
            MARGIN - 6.0,
            fr.py(y) + 4.0
        )
        .unwrap();
    }

    writeln!(out, r#"<g clip-path="url(#plot)" fill="none">"#).unwrap();
    for (k, s) in plan.steps.iter().enumerate() {
        let t = s.tangent;
        let pts = [(x0, t.at(x0)), (x1, t.at(x1))];
        polyline(
            &mut out,
            &fr,
            &pts,
            &format!(r#"class="tangent" data-step="{k}" stroke="gray" stroke-dasharray="6 4""#),
        );
    }
    polyline(
        &mut out,
        &fr,
        &curves[0],
        r#"class="u0" stroke="black" stroke-width="2""#,
    );
    polyline(
        &mut out,
        &fr,
        &curves[1],
        r#"class="c" stroke="steelblue" stroke-width="2""#,
    );
    writeln!(out, "</g>").unwrap();

    for (k, s) in plan.steps.iter().enumerate() {
        let a = s.interval.lo().max(x0);
        let b = s.interval.hi().min(x1);
        let y = axis_y + BAND * (k as f64 + 1.0);
        writeln!(
            out,
            r#"<line class="interval" x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="firebrick" stroke-width="3"/>"#,
            fr.px(a),
            fr.px(b)
        )
        .unwrap();
    }
    writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="12">C = {:.4}</text>"#,
        MARGIN + 4.0,
        MARGIN - 10.0,
        plan.c
    )
    .unwrap();
    out.push_str("</svg>\n");
    out
}

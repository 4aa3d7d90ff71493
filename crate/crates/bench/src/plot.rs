//! Minimal SVG line chart of mean rank per method and group.

use std::fmt::Write as _;

use crate::experiment::ExperimentResult;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// One polyline per method over the groups in result order, with the
/// group labels on the x axis and mean rank on the y axis.
pub fn rank_chart(result: &ExperimentResult, title: &str) -> String {
    let mut groups: Vec<&str> = Vec::new();
    let mut methods = Vec::new();
    for r in &result.rows {
        if !groups.contains(&r.t_band.as_str()) {
            groups.push(&r.t_band);
        }
        if !methods.contains(&r.method) {
            methods.push(r.method);
        }
    }
    let y_max = result.rows.iter().map(|r| r.mean_rank).fold(1.0f64, f64::max) * 1.1;
    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let x_of = |i: usize| {
        if groups.len() <= 1 {
            MARGIN + plot_w / 2.0
        } else {
            MARGIN + plot_w * i as f64 / (groups.len() - 1) as f64
        }
    };
    let y_of = |v: f64| HEIGHT - MARGIN - plot_h * v / y_max;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let (x0, y0) = (MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        svg,
        r#"<path d="M{x0} {MARGIN} L{x0} {y0} L{} {y0}" stroke="black" fill="none"/>"#,
        WIDTH - MARGIN
    );
    for tick in 0..=4 {
        let v = y_max * tick as f64 / 4.0;
        let y = y_of(v);
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{:.1}" text-anchor="end">{:.1}</text>"#,
            x0 - 6.0,
            y + 4.0,
            v
        );
    }
    for (i, g) in groups.iter().enumerate() {
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{}" text-anchor="middle">{}</text>"#,
            x_of(i),
            y0 + 18.0,
            escape(g)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{}" transform="rotate(-90 16 {})" text-anchor="middle">mean rank</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
    for (mi, m) in methods.iter().enumerate() {
        let color = COLORS[mi % COLORS.len()];
        let points: Vec<String> = groups
            .iter()
            .enumerate()
            .filter_map(|(i, g)| {
                result
                    .rows
                    .iter()
                    .find(|r| r.method == *m && r.t_band == *g)
                    .map(|r| format!("{:.1},{:.1}", x_of(i), y_of(r.mean_rank)))
            })
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" stroke="{color}" stroke-width="2" fill="none"/>"#,
            points.join(" ")
        );
        for p in &points {
            let (x, y) = p.split_once(',').expect("formatted pair");
            let _ = writeln!(svg, r#"<circle cx="{x}" cy="{y}" r="3" fill="{color}"/>"#);
        }
        let ly = MARGIN + 16.0 * mi as f64;
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{ly}" fill="{color}">{}</text>"#,
            WIDTH - MARGIN - 80.0,
            m
        );
    }
    svg.push_str("</svg>\n");
    svg
}

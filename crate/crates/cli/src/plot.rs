//! Minimal SVG line chart: mean SHD against sample size, one series per
//! (graph, model, dimension) cell group.

use std::fmt::Write as _;

use tam_core::experiment::CellSummary;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

pub fn shd_chart(summaries: &[CellSummary]) -> String {
    let (w, h) = (640.0, 420.0);
    let (ml, mr, mt, mb) = (60.0, 160.0, 20.0, 50.0);
    let (pw, ph) = (w - ml - mr, h - mt - mb);

    // group by (graph, model, d), preserving first-seen order
    type SeriesKey = (String, String, usize);
    let mut series: Vec<(SeriesKey, Vec<(usize, f64)>)> = Vec::new();
    for c in summaries {
        let key = (c.graph.clone(), c.model.clone(), c.d);
        match series.iter_mut().find(|(k, _)| *k == key) {
            Some((_, pts)) => pts.push((c.n, c.shd_mean)),
            None => series.push((key, vec![(c.n, c.shd_mean)])),
        }
    }
    for (_, pts) in &mut series {
        pts.sort_by_key(|&(n, _)| n);
    }

    let xs: Vec<usize> = {
        let mut v: Vec<usize> = summaries.iter().map(|c| c.n).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let (x_min, x_max) = (*xs.first().unwrap_or(&0) as f64, *xs.last().unwrap_or(&1) as f64);
    let y_max = summaries
        .iter()
        .map(|c| c.shd_mean)
        .fold(1.0f64, f64::max)
        .ceil();
    let x_of = |n: f64| {
        if x_max > x_min {
            ml + (n - x_min) / (x_max - x_min) * pw
        } else {
            ml + pw / 2.0
        }
    };
    let y_of = |v: f64| mt + (1.0 - v / y_max) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    // axes
    let _ = writeln!(
        s,
        r#"<line x1="{ml}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        mt + ph,
        ml + pw,
        mt + ph
    );
    let _ = writeln!(s, r#"<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{}" stroke="black"/>"#, mt + ph);
    for &n in &xs {
        let x = x_of(n as f64);
        let _ = writeln!(
            s,
            r#"<line x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="black"/>"#,
            mt + ph,
            mt + ph + 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{}" font-size="12" text-anchor="middle">{n}</text>"#,
            mt + ph + 20.0
        );
    }
    let y_ticks = 5;
    for t in 0..=y_ticks {
        let v = y_max * t as f64 / y_ticks as f64;
        let y = y_of(v);
        let _ = writeln!(s, r#"<line x1="{}" y1="{y}" x2="{ml}" y2="{y}" stroke="black"/>"#, ml - 5.0);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="12" text-anchor="end">{v:.1}</text>"#,
            ml - 9.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="13" text-anchor="middle">sample size n</text>"#,
        ml + pw / 2.0,
        h - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" font-size="13" text-anchor="middle" transform="rotate(-90 16 {})">mean SHD</text>"#,
        mt + ph / 2.0,
        mt + ph / 2.0
    );

    for (i, ((graph, model, d), pts)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let path: Vec<String> = pts
            .iter()
            .map(|&(n, v)| format!("{:.1},{:.1}", x_of(n as f64), y_of(v)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            path.join(" ")
        );
        for &(n, v) in pts {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="{color}"/>"#,
                x_of(n as f64),
                y_of(v)
            );
        }
        let ly = mt + 16.0 + 18.0 * i as f64;
        let lx = ml + pw + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            lx + 18.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="12">{graph}/{model} d={d}</text>"#,
            lx + 24.0,
            ly + 4.0
        );
    }
    s.push_str("</svg>\n");
    s
}

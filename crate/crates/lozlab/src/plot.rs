//! Static SVG views of sampler output: the lozenge picture of a single
//! pattern on the triangular grid, a density histogram of rescaled row-1
//! positions with the standard normal curve overlaid, and grouped bar
//! charts for moment tables. Every function returns a self-contained SVG
//! document as a string; no renderer dependencies, no external assets.

use crate::error::{invalid, Result};
use crate::tiling::GTPattern;
use std::fmt::Write as _;

/// One row of a moment comparison table.
#[derive(Clone, Copy, Debug)]
pub struct MomentRow {
    pub r: usize,
    pub analytic: f64,
    pub empirical: f64,
    pub stderr: f64,
}

const DIAMOND_FILL: &str = "#e8a33d";
const UP_FILL: &str = "#a9c7e8";
const DOWN_FILL: &str = "#dfe8f0";
const INK: &str = "#333333";
const ACCENT: &str = "#b4541f";

fn svg_open(out: &mut String, w: f64, h: f64) {
    let _ = write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" \
         viewBox=\"0 0 {w:.0} {h:.0}\" font-family=\"sans-serif\">\n\
         <rect width=\"{w:.0}\" height=\"{h:.0}\" fill=\"#ffffff\"/>\n"
    );
}

fn escape_text(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// The lozenge picture of one pattern. Vertical line k of the trapezoid
/// carries the pattern's k horizontal lozenges, drawn as diamonds spanning
/// lines k-1 and k+1; the remaining area is filled by the two slanted tile
/// types, paired strip by strip. Diamonds on the last line protrude past
/// the right edge, which is drawn dashed when `free_boundary` is set (they
/// are the tiles the boundary is allowed to cut) and solid otherwise.
pub fn lozenge_svg(p: &GTPattern, free_boundary: bool) -> Result<String> {
    let depth = p.depth();
    let m = p.ceiling();

    // grid coordinates: x in lines, heights in half units so everything
    // stays integral; a diamond at position t on line k has its lower
    // corner at dy = 2t - k
    let width_units = (depth as f64 + 1.0) * 0.866;
    let height_units = m as f64 + depth as f64 + 1.0;
    let unit = (760.0 / width_units.max(height_units)).clamp(7.0, 42.0);
    let ux = 0.866 * unit;
    let margin = 0.75 * unit + 6.0;
    let dy_top = 2 * m + depth as i64;
    let dy_bot = -(depth as i64);
    let w = margin * 2.0 + (depth as f64 + 1.0) * ux;
    let h = margin * 2.0 + (dy_top - dy_bot) as f64 * unit / 2.0;
    let sx = |x: f64| margin + x * ux;
    let sy = |dy: i64| margin + (dy_top - dy) as f64 * unit / 2.0;

    let mut out = String::new();
    svg_open(&mut out, w, h);
    let stroke = (unit / 26.0).max(0.5);
    let quad = |out: &mut String, pts: [(f64, i64); 4], fill: &str| {
        let _ = write!(out, "<polygon points=\"");
        for (i, &(x, dy)) in pts.iter().enumerate() {
            let sep = if i == 0 { "" } else { " " };
            let _ = write!(out, "{sep}{:.2},{:.2}", sx(x), sy(dy));
        }
        let _ = writeln!(
            out,
            "\" fill=\"{fill}\" stroke=\"{INK}\" stroke-width=\"{stroke:.2}\" \
             stroke-linejoin=\"round\"/>"
        );
    };

    // slanted tiles first so the diamonds paint over shared edges
    for s in 0..depth {
        let left: Vec<i64> = if s == 0 { Vec::new() } else { p.positions(s)?.entries };
        let right = p.positions(s + 1)?.entries;
        let mut free_left: Vec<i64> =
            (0..m + s as i64).filter(|t| !left.contains(t)).collect();
        let mut free_right: Vec<i64> =
            (0..=m + s as i64).filter(|t| !right.contains(t)).collect();
        free_left.sort_unstable();
        free_right.sort_unstable();
        for (&t, &tp) in free_left.iter().zip(free_right.iter()) {
            let x = s as f64;
            let dy = 2 * t - s as i64;
            if tp == t {
                quad(
                    &mut out,
                    [(x, dy), (x + 1.0, dy - 1), (x + 1.0, dy + 1), (x, dy + 2)],
                    DOWN_FILL,
                );
            } else if tp == t + 1 {
                quad(
                    &mut out,
                    [(x, dy), (x + 1.0, dy + 1), (x + 1.0, dy + 3), (x, dy + 2)],
                    UP_FILL,
                );
            } else {
                return Err(invalid("strip tiles fail to pair; pattern is not interlaced"));
            }
        }
    }
    for k in 1..=depth {
        for &t in &p.positions(k)?.entries {
            let x = k as f64;
            let dy = 2 * t - k as i64;
            quad(
                &mut out,
                [(x - 1.0, dy + 1), (x, dy), (x + 1.0, dy + 1), (x, dy + 2)],
                DIAMOND_FILL,
            );
        }
    }

    // domain outline on top; the right edge is the boundary of record
    let d = depth as f64;
    let _ = writeln!(
        out,
        "<path d=\"M {lx:.2} {ly0:.2} L {lx:.2} {ly1:.2} L {rx:.2} {ry1:.2} L {rx:.2} {ry0:.2} Z\" \
         fill=\"none\" stroke=\"{INK}\" stroke-width=\"{ow:.2}\"{dash}/>",
        lx = sx(0.0),
        ly0 = sy(0),
        ly1 = sy(2 * m),
        rx = sx(d),
        ry1 = sy(dy_top),
        ry0 = sy(dy_bot),
        ow = stroke * 2.0,
        dash = if free_boundary {
            format!(" stroke-dasharray=\"{:.1} {:.1}\"", unit * 0.4, unit * 0.3)
        } else {
            String::new()
        },
    );
    out.push_str("</svg>\n");
    Ok(out)
}

/// Density histogram of the given values with the standard normal curve
/// overlaid. Values are binned over an interval covering both the data
/// and [-4, 4] so the reference curve is always fully visible.
pub fn histogram_svg(values: &[f64], bins: usize, title: &str) -> Result<String> {
    if values.len() < 2 {
        return Err(invalid("need at least two values to bin"));
    }
    if bins < 2 || bins > 400 {
        return Err(invalid("need between 2 and 400 bins"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(invalid("values must be finite"));
    }
    let lo = values.iter().cloned().fold(-4.0f64, f64::min);
    let hi = values.iter().cloned().fold(4.0f64, f64::max);
    let bw = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    for &v in values {
        let i = (((v - lo) / bw) as usize).min(bins - 1);
        counts[i] += 1;
    }
    let dens: Vec<f64> =
        counts.iter().map(|&c| c as f64 / (values.len() as f64 * bw)).collect();
    let peak = dens.iter().cloned().fold(0.4, f64::max) * 1.12;

    let (w, h) = (640.0, 400.0);
    let (ml, mr, mt, mb) = (48.0, 20.0, 34.0, 40.0);
    let px = |v: f64| ml + (v - lo) / (hi - lo) * (w - ml - mr);
    let py = |d: f64| mt + (1.0 - d / peak) * (h - mt - mb);

    let mut out = String::new();
    svg_open(&mut out, w, h);
    let _ = writeln!(
        out,
        "<text x=\"{:.0}\" y=\"22\" font-size=\"15\" fill=\"{INK}\" \
         text-anchor=\"middle\">{}</text>",
        w / 2.0,
        escape_text(title)
    );
    for (i, &d) in dens.iter().enumerate() {
        if d == 0.0 {
            continue;
        }
        let x0 = px(lo + i as f64 * bw);
        let x1 = px(lo + (i + 1) as f64 * bw);
        let _ = writeln!(
            out,
            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" \
             fill=\"{UP_FILL}\" stroke=\"{INK}\" stroke-width=\"0.5\"/>",
            x0,
            py(d),
            x1 - x0,
            py(0.0) - py(d)
        );
    }
    let _ = write!(out, "<polyline fill=\"none\" stroke=\"{ACCENT}\" stroke-width=\"2\" points=\"");
    for i in 0..=240 {
        let z = lo + (hi - lo) * i as f64 / 240.0;
        let d = (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let sep = if i == 0 { "" } else { " " };
        let _ = write!(out, "{sep}{:.2},{:.2}", px(z), py(d));
    }
    let _ = writeln!(out, "\"/>");
    // axes with integer ticks
    let _ = writeln!(
        out,
        "<line x1=\"{ml}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{INK}\"/>",
        py(0.0),
        w - mr,
        py(0.0)
    );
    let mut z = lo.ceil();
    while z <= hi {
        let _ = writeln!(
            out,
            "<line x1=\"{x:.2}\" y1=\"{y:.2}\" x2=\"{x:.2}\" y2=\"{y2:.2}\" stroke=\"{INK}\"/>\
             <text x=\"{x:.2}\" y=\"{ty:.2}\" font-size=\"11\" fill=\"{INK}\" \
             text-anchor=\"middle\">{z}</text>",
            x = px(z),
            y = py(0.0),
            y2 = py(0.0) + 5.0,
            ty = py(0.0) + 18.0,
        );
        z += 1.0;
    }
    for frac in [0.25, 0.5, 0.75, 1.0] {
        let d = peak * frac / 1.12;
        let _ = writeln!(
            out,
            "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{ml}\" y2=\"{y:.2}\" stroke=\"{INK}\"/>\
             <text x=\"{:.2}\" y=\"{ty:.2}\" font-size=\"11\" fill=\"{INK}\" \
             text-anchor=\"end\">{d:.2}</text>",
            ml - 5.0,
            ml - 8.0,
            y = py(d),
            ty = py(d) + 4.0,
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Grouped bar chart of a moment table: one pair of bars per order r
/// (reference value next to the sampled estimate) with a whisker of plus
/// or minus three standard errors on the estimate.
pub fn moments_svg(rows: &[MomentRow], title: &str) -> Result<String> {
    if rows.is_empty() {
        return Err(invalid("need at least one moment row"));
    }
    if rows
        .iter()
        .any(|r| !(r.analytic.is_finite() && r.empirical.is_finite() && r.stderr >= 0.0))
    {
        return Err(invalid("moment rows must be finite with nonnegative stderr"));
    }
    let top = rows
        .iter()
        .map(|r| r.analytic.max(r.empirical + 3.0 * r.stderr))
        .fold(0.0f64, f64::max)
        .max(1e-12)
        * 1.15;
    let bot = rows
        .iter()
        .map(|r| r.analytic.min(r.empirical - 3.0 * r.stderr))
        .fold(0.0f64, f64::min)
        * 1.15;

    let (w, h) = (640.0, 400.0);
    let (ml, mr, mt, mb) = (56.0, 20.0, 34.0, 42.0);
    let group = (w - ml - mr) / rows.len() as f64;
    let bar = group * 0.3;
    let py = |v: f64| mt + (top - v) / (top - bot) * (h - mt - mb);

    let mut out = String::new();
    svg_open(&mut out, w, h);
    let _ = writeln!(
        out,
        "<text x=\"{:.0}\" y=\"22\" font-size=\"15\" fill=\"{INK}\" \
         text-anchor=\"middle\">{}</text>",
        w / 2.0,
        escape_text(title)
    );
    for (i, row) in rows.iter().enumerate() {
        let cx = ml + (i as f64 + 0.5) * group;
        for (v, off, fill) in
            [(row.analytic, -bar, DOWN_FILL), (row.empirical, 0.0, DIAMOND_FILL)]
        {
            let (y0, y1) = (py(v.max(0.0)), py(v.min(0.0)));
            let _ = writeln!(
                out,
                "<rect x=\"{:.2}\" y=\"{y0:.2}\" width=\"{bar:.2}\" height=\"{:.2}\" \
                 fill=\"{fill}\" stroke=\"{INK}\" stroke-width=\"0.7\"/>",
                cx + off,
                (y1 - y0).max(0.5),
            );
        }
        let (wx, lo, hi) = (
            cx + bar / 2.0,
            py(row.empirical - 3.0 * row.stderr),
            py(row.empirical + 3.0 * row.stderr),
        );
        let _ = writeln!(
            out,
            "<line x1=\"{wx:.2}\" y1=\"{lo:.2}\" x2=\"{wx:.2}\" y2=\"{hi:.2}\" \
             stroke=\"{INK}\" stroke-width=\"1.4\"/>\
             <line x1=\"{:.2}\" y1=\"{lo:.2}\" x2=\"{:.2}\" y2=\"{lo:.2}\" stroke=\"{INK}\"/>\
             <line x1=\"{:.2}\" y1=\"{hi:.2}\" x2=\"{:.2}\" y2=\"{hi:.2}\" stroke=\"{INK}\"/>",
            wx - 4.0,
            wx + 4.0,
            wx - 4.0,
            wx + 4.0,
        );
        let _ = writeln!(
            out,
            "<text x=\"{cx:.2}\" y=\"{:.2}\" font-size=\"12\" fill=\"{INK}\" \
             text-anchor=\"middle\">r={}</text>",
            h - mb + 18.0,
            row.r
        );
    }
    let _ = writeln!(
        out,
        "<line x1=\"{ml}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"{INK}\"/>",
        w - mr,
        y = py(0.0)
    );
    for frac in [0.0, 0.5, 1.0] {
        let v = bot + (top - bot) * frac;
        let _ = writeln!(
            out,
            "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{ml}\" y2=\"{y:.2}\" stroke=\"{INK}\"/>\
             <text x=\"{:.2}\" y=\"{ty:.2}\" font-size=\"11\" fill=\"{INK}\" \
             text-anchor=\"end\">{v:.3}</text>",
            ml - 5.0,
            ml - 8.0,
            y = py(v),
            ty = py(v) + 4.0,
        );
    }
    let _ = writeln!(
        out,
        "<rect x=\"{x:.0}\" y=\"38\" width=\"11\" height=\"11\" fill=\"{DOWN_FILL}\" \
         stroke=\"{INK}\" stroke-width=\"0.7\"/>\
         <text x=\"{tx:.0}\" y=\"48\" font-size=\"11\" fill=\"{INK}\">reference</text>\
         <rect x=\"{x:.0}\" y=\"54\" width=\"11\" height=\"11\" fill=\"{DIAMOND_FILL}\" \
         stroke=\"{INK}\" stroke-width=\"0.7\"/>\
         <text x=\"{tx:.0}\" y=\"64\" font-size=\"11\" fill=\"{INK}\">sampled</text>",
        x = w - mr - 96.0,
        tx = w - mr - 80.0,
    );
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::{mcmc_sample_free, RngStream};
    use crate::tiling::{enumerate_free, enumerate_hex};

    fn polygon_count(svg: &str) -> usize {
        svg.matches("<polygon").count()
    }

    #[test]
    fn every_small_pattern_renders_with_the_right_tile_count() {
        // depth n and ceiling m give n(n+1)/2 diamonds and m tiles per strip
        for (n, m) in [(3usize, 2i64), (2, 3), (4, 1), (3, 0)] {
            for p in enumerate_free(n, m).unwrap() {
                let svg = lozenge_svg(&p, true).unwrap();
                assert_eq!(polygon_count(&svg), n * (n + 1) / 2 + m as usize * n);
                assert!(svg.contains("stroke-dasharray"));
                assert!(svg.starts_with("<svg ") && svg.trim_end().ends_with("</svg>"));
            }
        }
    }

    #[test]
    fn hexagon_pattern_renders_with_a_solid_boundary() {
        for p in enumerate_hex(1, 2).unwrap() {
            let svg = lozenge_svg(&p, false).unwrap();
            assert!(!svg.contains("stroke-dasharray"));
            assert_eq!(polygon_count(&svg), 2 * 3 / 2 + 2 * 2);
        }
    }

    #[test]
    fn large_sample_renders_within_bounds() {
        let mut rng = RngStream::new(7, 0);
        let (samples, _) =
            mcmc_sample_free(12, 12, &mut rng, 1, Some(200), Some(1)).unwrap();
        let svg = lozenge_svg(&samples[0], true).unwrap();
        assert!(svg.len() < 200_000);
        assert!(!svg.contains("NaN"));
    }

    #[test]
    fn histogram_covers_the_reference_window() {
        let mut rng = RngStream::new(11, 0);
        let vals: Vec<f64> = (0..400)
            .map(|_| crate::gue::sample_gue_corners(1, &mut rng).unwrap().level(1)[0])
            .collect();
        let svg = histogram_svg(&vals, 24, "row 1 & normal").unwrap();
        assert!(svg.contains("polyline"));
        assert!(svg.contains("&amp;"));
        assert!(!svg.contains("NaN"));
        assert!(histogram_svg(&vals[..1], 24, "t").is_err());
        assert!(histogram_svg(&vals, 1, "t").is_err());
        assert!(histogram_svg(&[f64::NAN, 0.0], 4, "t").is_err());
    }

    #[test]
    fn moment_chart_draws_one_group_per_row() {
        let rows = vec![
            MomentRow { r: 1, analytic: 1.5, empirical: 1.49, stderr: 0.01 },
            MomentRow { r: 2, analytic: 3.08, empirical: 3.11, stderr: 0.02 },
        ];
        let svg = moments_svg(&rows, "moments").unwrap();
        assert_eq!(svg.matches("<rect").count(), 1 + 4 + 2); // canvas, bars, legend
        assert!(svg.contains("r=1") && svg.contains("r=2"));
        assert!(moments_svg(&[], "t").is_err());
        let bad = vec![MomentRow { r: 1, analytic: 1.0, empirical: 1.0, stderr: -0.1 }];
        assert!(moments_svg(&bad, "t").is_err());
    }
}

//! SVG figure of a 1.5D solution: intervals, the realization, the shaded
//! visibility region, the taut path through the corridor and the tower.

use std::fmt::Write as _;
use std::path::Path;

use watchtower_core::geom::{to_f64, Point2, Scalar};
use watchtower_core::terrain::ImpreciseTerrain1D;
use watchtower_core::visibility::visibility_region;
use watchtower_core::watchtower1d::{compute_pi, Solution1D};

const WIDTH: u32 = 800;
const HEIGHT: u32 = 400;

struct Frame {
    x0: f64,
    y_top: f64,
}

impl Frame {
    /// SVG y grows downwards; the drawing flips it.
    fn map(&self, x: f64, y: f64) -> (String, String) {
        (format!("{:.4}", x - self.x0), format!("{:.4}", self.y_top - y))
    }

    fn pt(&self, p: &Point2) -> (String, String) {
        self.map(to_f64(&p.x), to_f64(&p.y))
    }

    fn pair(&self, x: f64, y: f64) -> String {
        let (x, y) = self.map(x, y);
        format!("{x},{y}")
    }
}

fn polyline_attr(frame: &Frame, points: &[Point2]) -> String {
    points
        .iter()
        .map(|p| frame.pair(to_f64(&p.x), to_f64(&p.y)))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn svg_string(terrain: &ImpreciseTerrain1D, solution: &Solution1D) -> String {
    let poly = solution.realization.polyline();
    let x_min = to_f64(terrain.x_min());
    let x_max = to_f64(terrain.x_max());
    let lows = terrain.vertices().iter().map(|v| to_f64(&v.low));
    let highs = terrain.vertices().iter().map(|v| to_f64(&v.high));
    let y_min = lows.fold(f64::INFINITY, f64::min);
    let y_max = highs.fold(to_f64(&solution.tower.top.y), f64::max);
    let span = (x_max - x_min).max(y_max - y_min).max(1.0);
    let pad = 0.08 * span;
    // Room above the terrain so the region's shading stays visible.
    let ceiling = y_max + 0.25 * span;
    let frame = Frame {
        x0: x_min - pad,
        y_top: ceiling + pad,
    };
    let view_w = x_max - x_min + 2.0 * pad;
    let view_h = ceiling - y_min + 2.0 * pad;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {view_w:.4} {view_h:.4}">"#
    );
    s.push_str(
        "<style>line,polyline,polygon,circle{vector-effect:non-scaling-stroke}\
         .interval{stroke:#888;stroke-width:3}\
         .region{fill:#4a90d9;fill-opacity:0.18;stroke:#4a90d9;stroke-width:1.5}\
         .terrain{fill:none;stroke:#222;stroke-width:2}\
         .pi{fill:none;stroke:#2a9d4a;stroke-width:1.5;stroke-dasharray:6 4}\
         .tower{stroke:#d62828;stroke-width:3}\
         .mark{fill:#d62828}</style>\n",
    );

    for v in terrain.vertices() {
        let (bx, by) = frame.pt(&v.bottom());
        if v.is_precise() {
            let _ = writeln!(
                s,
                r#"<circle class="mark" cx="{bx}" cy="{by}" r="{:.4}" fill-opacity="0.4"/>"#,
                0.004 * span
            );
        } else {
            let (tx, ty) = frame.pt(&v.top());
            let _ = writeln!(s, r#"<line class="interval" x1="{bx}" y1="{by}" x2="{tx}" y2="{ty}"/>"#);
        }
    }

    if let Ok(region) = visibility_region(poly) {
        let mut xs: Vec<Scalar> = vec![terrain.x_min().clone()];
        xs.extend(
            region
                .breakpoints()
                .iter()
                .filter(|b| *b > terrain.x_min() && *b < terrain.x_max())
                .cloned(),
        );
        xs.push(terrain.x_max().clone());
        let mut pts: Vec<String> = xs
            .iter()
            .map(|x| frame.pair(to_f64(x), to_f64(&region.boundary_at(x)).min(ceiling)))
            .collect();
        pts.push(frame.pair(x_max, ceiling));
        pts.push(frame.pair(x_min, ceiling));
        let _ = writeln!(s, r#"<polygon class="region" points="{}"/>"#, pts.join(" "));
    }

    if let Ok(pi) = compute_pi(terrain) {
        let _ = writeln!(s, r#"<polyline class="pi" points="{}"/>"#, polyline_attr(&frame, pi.points()));
    }
    let _ = writeln!(s, r#"<polyline class="terrain" points="{}"/>"#, polyline_attr(&frame, poly));

    let tower = &solution.tower;
    let (bx, by) = frame.pt(&tower.base);
    if tower.base == tower.top {
        let _ = writeln!(s, r#"<circle class="mark" cx="{bx}" cy="{by}" r="{:.4}"/>"#, 0.008 * span);
    } else {
        let (tx, ty) = frame.pt(&tower.top);
        let _ = writeln!(s, r#"<line class="tower" x1="{bx}" y1="{by}" x2="{tx}" y2="{ty}"/>"#);
        let _ = writeln!(s, r#"<circle class="mark" cx="{tx}" cy="{ty}" r="{:.4}"/>"#, 0.006 * span);
    }
    s.push_str("</svg>\n");
    s
}

pub fn render_svg(terrain: &ImpreciseTerrain1D, solution: &Solution1D, path: &Path) -> std::io::Result<()> {
    std::fs::write(path, svg_string(terrain, solution))
}

//! SVG documents for orbits and the parameter-plane class map.

use std::fmt::Write as _;

use super::Grid;
use crate::curve::{derive_params, uniformize, AngleCoord, LevelSetParams, RealLocusClass, Regime};
use crate::error::Result;
use crate::kepler::trajectory_arc;
use crate::poincare::{ConfigPoint, Orbit};

const WIDTH: f64 = 640.0;
const PAD: f64 = 24.0;
const ARC_SAMPLES: usize = 96;
const CURVE_SAMPLES: usize = 720;

/// Affine map from a data rectangle onto the drawing, `y` pointing up.
struct Frame {
    x0: f64,
    y1: f64,
    scale: f64,
    height: f64,
}

impl Frame {
    fn fit(points: impl Iterator<Item = (f64, f64)>) -> Frame {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for (x, y) in points.filter(|p| p.0.is_finite() && p.1.is_finite()) {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if x0 > x1 {
            (x0, x1, y0, y1) = (-1.0, 1.0, -1.0, 1.0);
        }
        let span = (x1 - x0).max(y1 - y0).max(1e-9);
        let scale = (WIDTH - 2.0 * PAD) / span;
        Frame {
            x0,
            y1,
            scale,
            height: (y1 - y0) * scale + 2.0 * PAD,
        }
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        (
            PAD + (x - self.x0) * self.scale,
            PAD + (self.y1 - y) * self.scale,
        )
    }

    fn open(&self, out: &mut String, title: &str) {
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}">"#,
            w = WIDTH,
            h = self.height
        );
        let _ = writeln!(out, "<title>{title}</title>");
        let _ = writeln!(
            out,
            r#"<rect x="0" y="0" width="{w:.0}" height="{h:.0}" fill="white"/>"#,
            w = WIDTH,
            h = self.height
        );
    }
}

fn polyline(frame: &Frame, pts: &[(f64, f64)]) -> String {
    let mut d = String::new();
    for (k, &(x, y)) in pts.iter().enumerate() {
        let (u, v) = frame.map(x, y);
        let _ = write!(d, "{}{u:.3} {v:.3}", if k == 0 { "M" } else { " L" });
    }
    d
}

/// Physical plane: the wall `x₂ = 1`, the centre at the origin, and one
/// `<path class="arc">` per collision step.
pub fn physical_svg(orbit: &Orbit) -> Result<String> {
    let params = &orbit.params;
    let steps = orbit.points.len().saturating_sub(1);
    let arcs = orbit.points[..steps]
        .iter()
        .map(|&c| trajectory_arc(c, params, ARC_SAMPLES))
        .collect::<Result<Vec<_>>>()?;
    let mut extent: Vec<(f64, f64)> = arcs.iter().flatten().copied().collect();
    extent.push((0.0, 0.0));
    extent.extend(orbit.points.iter().map(|c| (c.x, 1.0)));
    let frame = Frame::fit(extent.iter().copied());
    let xs = extent.iter().map(|p| p.0);
    let (lo, hi) = xs.fold((f64::MAX, f64::MIN), |(a, b), x| (a.min(x), b.max(x)));

    let mut out = String::new();
    frame.open(
        &mut out,
        &format!("orbit D={} E={} steps={steps}", params.d, params.e),
    );
    let (wa, wy) = frame.map(lo, 1.0);
    let (wb, _) = frame.map(hi, 1.0);
    let _ = writeln!(
        out,
        r#"<line class="wall" x1="{wa:.3}" y1="{wy:.3}" x2="{wb:.3}" y2="{wy:.3}" stroke="black" stroke-width="2"/>"#
    );
    let (cx, cy) = frame.map(0.0, 0.0);
    let _ = writeln!(
        out,
        r#"<circle class="centre" cx="{cx:.3}" cy="{cy:.3}" r="4" fill="black"/>"#
    );
    for (k, arc) in arcs.iter().enumerate() {
        let _ = writeln!(
            out,
            r##"<path class="arc" data-step="{k}" d="{}" fill="none" stroke="#1f5fa8" stroke-width="1.5"/>"##,
            polyline(&frame, arc)
        );
    }
    for (k, c) in orbit.points.iter().enumerate() {
        let (u, v) = frame.map(c.x, 1.0);
        let _ = writeln!(
            out,
            r##"<circle class="collision" data-step="{k}" cx="{u:.3}" cy="{v:.3}" r="3" fill="#c0392b"/>"##
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// `(A₁, L)` of the canonical representative of a point.
fn oval_coords(c: ConfigPoint, params: &LevelSetParams) -> (f64, f64) {
    let p = params.to_canonical(c);
    let (d, e) = params.canonical();
    let z = (1.0 - p.a1 * p.a1) * p.x + p.a1 * (p.a2 + d);
    (p.a1, z / (d + 2.0 * e).sqrt())
}

/// The real locus in the `(A₁, L)` plane, one `<path class="component">` per
/// connected component, and one `<circle class="iterate">` per orbit point
/// carrying its step and component index.
pub fn level_set_svg(orbit: &Orbit) -> Result<String> {
    let params = &orbit.params;
    let regime = params.regime()?;
    let components: &[u8] = if regime == Regime::Unipartite {
        &[0]
    } else {
        &[0, 1]
    };
    let mut curves: Vec<Vec<Option<(f64, f64)>>> = Vec::new();
    for &eps in components {
        let curve = (0..=CURVE_SAMPLES)
            .map(|k| {
                let theta = (k % CURVE_SAMPLES) as f64 / CURVE_SAMPLES as f64;
                uniformize(AngleCoord::new(theta, eps), params)
                    .ok()
                    .map(|c| oval_coords(c, params))
            })
            .collect();
        curves.push(curve);
    }
    let iterates: Vec<(f64, f64)> = orbit
        .points
        .iter()
        .map(|&c| oval_coords(c, params))
        .collect();
    let frame = Frame::fit(
        curves
            .iter()
            .flatten()
            .flatten()
            .copied()
            .chain(iterates.iter().copied()),
    );

    let mut out = String::new();
    frame.open(
        &mut out,
        &format!(
            "level set D={} E={} class {}",
            params.d, params.e, params.class
        ),
    );
    for (eps, curve) in curves.iter().enumerate() {
        let mut d = String::new();
        let mut pen_down = false;
        for p in curve {
            match p {
                Some((x, y)) => {
                    let (u, v) = frame.map(*x, *y);
                    let _ = write!(d, "{}{u:.3} {v:.3}", if pen_down { " L" } else { " M" });
                    pen_down = true;
                }
                None => pen_down = false,
            }
        }
        let _ = writeln!(
            out,
            r##"<path class="component" data-eps="{eps}" d="{}" fill="none" stroke="#555555" stroke-width="1"/>"##,
            d.trim_start()
        );
    }
    for (k, (&(x, y), c)) in iterates.iter().zip(&orbit.points).enumerate() {
        let eps = crate::curve::angle_of(*c, params).map_or(0, |a| a.eps);
        let (u, v) = frame.map(x, y);
        let _ = writeln!(
            out,
            r##"<circle class="iterate" data-step="{k}" data-eps="{eps}" cx="{u:.3}" cy="{v:.3}" r="3.5" fill="#c0392b"/>"##
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn class_colour(c: RealLocusClass) -> &'static str {
    match c {
        RealLocusClass::I => "#8fbf8f",
        RealLocusClass::IIplus => "#8fa8d8",
        RealLocusClass::IIminus => "#d8b08f",
        RealLocusClass::Empty => "#f4f4f4",
        RealLocusClass::NegativeAngularMomentumSide => "#d6d6d6",
        RealLocusClass::DegenerateTangent | RealLocusClass::NodalD | RealLocusClass::NodalR => {
            "#202020"
        }
    }
}

/// Class map over the grid, one `<rect>` per cell.
pub fn class_map_svg(grid: &Grid) -> String {
    let n = grid.n;
    let cell = (WIDTH - 2.0 * PAD) / n as f64;
    let height = WIDTH;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0}" height="{height:.0}" viewBox="0 0 {WIDTH:.0} {height:.0}">"#
    );
    let _ = writeln!(
        out,
        "<title>classes on D in [{}, {}], E in [{}, {}]</title>",
        grid.d_min, grid.d_max, grid.e_min, grid.e_max
    );
    for (row, e) in grid.e_values().into_iter().enumerate() {
        for (col, d) in grid.d_values().into_iter().enumerate() {
            let class = derive_params(d, e).class;
            let x = PAD + col as f64 * cell;
            let y = PAD + (n - 1 - row) as f64 * cell;
            let _ = writeln!(
                out,
                r#"<rect class="cell" data-class="{class}" x="{x:.3}" y="{y:.3}" width="{cell:.3}" height="{cell:.3}" fill="{}"/>"#,
                class_colour(class)
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

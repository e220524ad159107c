//! SVG rendering of planar graphs.

use std::fmt::Write as _;

use crate::environment::{Environment, PointPattern, Realization};
use crate::error::{Error, Result};
use crate::graphs::SpatialGraph;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RenderStyle {
    /// Sizes are fractions of the longer window side.
    pub point_radius: f64,
    pub stroke_width: f64,
    pub point_color: &'static str,
    pub edge_color: &'static str,
    pub environment_color: &'static str,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle {
            point_radius: 0.004,
            stroke_width: 0.0015,
            point_color: "#1f3b73",
            edge_color: "#c0392b",
            environment_color: "#9aa5b1",
        }
    }
}

struct Fmt {
    prec: usize,
}

impl Fmt {
    fn new(scale: f64) -> Self {
        let mag = scale.abs().max(1e-300).log10().floor() as i64;
        Fmt {
            prec: (5 - mag).clamp(0, 12) as usize,
        }
    }

    fn f(&self, v: f64) -> String {
        let s = format!("{:.*}", self.prec, v);
        if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
            s[1..].to_owned()
        } else {
            s
        }
    }
}

/// Points become `<circle>` elements and edges `<line>` elements; the
/// optional environment is drawn as `<path>` elements underneath. The
/// y axis points up.
pub fn render_svg(
    p: &PointPattern,
    g: &SpatialGraph,
    env: Option<&Environment>,
    style: &RenderStyle,
) -> Result<String> {
    let w = &p.window;
    if w.dim != 2 {
        return Err(Error::UnsupportedDimension(w.dim));
    }
    let (x0, y0) = (w.lower[0], w.lower[1]);
    let (x1, y1) = (w.upper[0], w.upper[1]);
    let side = (x1 - x0).max(y1 - y0);
    let fmt = Fmt::new(side);
    let f = |v: f64| fmt.f(v);
    let flip = |y: f64| y0 + y1 - y;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\">",
        f(x0),
        f(y0),
        f(x1 - x0),
        f(y1 - y0)
    );
    let _ = writeln!(
        out,
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"white\"/>",
        f(x0),
        f(y0),
        f(x1 - x0),
        f(y1 - y0)
    );
    if let Some(env) = env {
        let sw = f(style.stroke_width * side);
        match &env.realization {
            Realization::Segments { segments, .. } => {
                let mut d = String::new();
                for s in &segments.segments {
                    let _ = write!(d, "M{} {}L{} {}", f(s.a.x()), f(flip(s.a.y())), f(s.b.x()), f(flip(s.b.y())));
                }
                let _ = writeln!(
                    out,
                    "<path d=\"{d}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{sw}\"/>",
                    style.environment_color
                );
            }
            Realization::Modulated { centers, radius, .. } | Realization::ShotNoise { germs: centers, radius, .. } => {
                let mut d = String::new();
                let r = f(*radius);
                for c in centers {
                    let _ = write!(
                        d,
                        "M{} {}a{r} {r} 0 1 0 {} 0a{r} {r} 0 1 0 {} 0",
                        f(c.x() - radius),
                        f(flip(c.y())),
                        f(2.0 * radius),
                        f(-2.0 * radius)
                    );
                }
                let _ = writeln!(
                    out,
                    "<path d=\"{d}\" fill=\"{}\" fill-opacity=\"0.35\" stroke=\"none\"/>",
                    style.environment_color
                );
            }
            Realization::Uniform { .. } => {}
        }
    }
    let sw = f(style.stroke_width * side);
    let _ = writeln!(out, "<g stroke=\"{}\" stroke-width=\"{sw}\">", style.edge_color);
    for (a, b) in g.edges() {
        let pa = p.points[a];
        let v = w.displacement(&pa, &p.points[b]);
        let _ = writeln!(
            out,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>",
            f(pa.x()),
            f(flip(pa.y())),
            f(pa.x() + v[0]),
            f(flip(pa.y() + v[1]))
        );
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, "<g fill=\"{}\">", style.point_color);
    let pr = f(style.point_radius * side);
    for x in &p.points {
        let _ = writeln!(out, "<circle cx=\"{}\" cy=\"{}\" r=\"{pr}\"/>", f(x.x()), f(flip(x.y())));
    }
    let _ = writeln!(out, "</g>");
    out.push_str("</svg>\n");
    Ok(out)
}

//! SVG pictures of one path family in three equivalent styles.
//!
//! `Paths` draws the square `(t, x)` lattice. `Surface` and `Rhombi` use the
//! affine image `(t, x) -> (t w, x e - t e / 2)` with edge `e = 20` and
//! `w = e cos 30deg`, where up steps run at +30 degrees and flat steps at -30
//! degrees. In the tiling a particle at `(t, x)` is the vertical edge from
//! `(t, x)` to `(t, x + 1)`; a step is the lozenge swept by that edge, and an
//! unoccupied site strictly between the first and last time is the lozenge
//! with that vertical diagonal. Every element carries the class `up`, `flat`
//! or `gap` so pictures can be audited mechanically.

use std::fmt::Write;

use hahn_paths::process::Trajectory;
use hahn_paths::{ModelParams, Step};

use crate::config::Style;

/// Length of a lattice edge in user units.
pub const EDGE: f64 = 20.0;
const MARGIN: f64 = 10.0;

fn width() -> f64 {
    EDGE * 3f64.sqrt() / 2.0
}

/// Coordinates printed to three decimals, with no negative zero.
fn num(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

#[derive(Default)]
struct Canvas {
    body: String,
    min: (f64, f64),
    max: (f64, f64),
    empty: bool,
}

impl Canvas {
    fn new() -> Self {
        Self {
            empty: true,
            ..Self::default()
        }
    }

    /// Records a point in picture coordinates (y up) and returns it in SVG
    /// coordinates (y down).
    fn point(&mut self, p: (f64, f64)) -> (f64, f64) {
        let q = (p.0, -p.1);
        if self.empty {
            self.min = q;
            self.max = q;
            self.empty = false;
        } else {
            self.min = (self.min.0.min(q.0), self.min.1.min(q.1));
            self.max = (self.max.0.max(q.0), self.max.1.max(q.1));
        }
        q
    }

    fn polygon(&mut self, class: &str, pts: &[(f64, f64)]) {
        let coords: Vec<String> = pts
            .iter()
            .map(|&p| {
                let q = self.point(p);
                format!("{},{}", num(q.0), num(q.1))
            })
            .collect();
        let _ = writeln!(self.body, r#"<polygon class="{class}" points="{}"/>"#, coords.join(" "));
    }

    fn line(&mut self, class: &str, a: (f64, f64), b: (f64, f64)) {
        let (a, b) = (self.point(a), self.point(b));
        let _ = writeln!(
            self.body,
            r#"<line class="{class}" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
            num(a.0),
            num(a.1),
            num(b.0),
            num(b.1)
        );
    }

    fn dot(&mut self, p: (f64, f64)) {
        let q = self.point(p);
        let _ = writeln!(
            self.body,
            r#"<circle class="particle" cx="{}" cy="{}" r="2.500"/>"#,
            num(q.0),
            num(q.1)
        );
    }

    fn finish(self) -> String {
        let (x0, y0) = (self.min.0 - MARGIN, self.min.1 - MARGIN);
        let (w, h) = (
            self.max.0 - self.min.0 + 2.0 * MARGIN,
            self.max.1 - self.min.1 + 2.0 * MARGIN,
        );
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" width="{}" height="{}">"#,
            num(x0),
            num(y0),
            num(w),
            num(h),
            num(w),
            num(h)
        );
        out.push_str(
            "<style>\
.up{fill:#e8a33d;stroke:#333;stroke-width:0.5}\
.flat{fill:#4f86c6;stroke:#333;stroke-width:0.5}\
.gap{fill:#d9d9d9;stroke:#333;stroke-width:0.5}\
line.up,line.flat{stroke-width:2;stroke:#333}\
.outline{fill:none;stroke:#000;stroke-width:1.5}\
.particle{fill:#000}\
</style>\n",
        );
        out.push_str(&self.body);
        out.push_str("</svg>\n");
        out
    }
}

/// Hexagon corners in lattice coordinates, counter-clockwise from the origin,
/// for sites `x` up to `top` above the lower boundary.
fn hexagon_corners(model: &ModelParams, top: f64) -> [(f64, f64); 6] {
    let (n, s, tt) = model.nst();
    let (n, s, tt) = (n as f64, s as f64, tt as f64);
    let c = tt - s;
    [
        (0.0, 0.0),
        (c, 0.0),
        (tt, s),
        (tt, s + n - 1.0 + top),
        (s, s + n - 1.0 + top),
        (0.0, n - 1.0 + top),
    ]
}

fn skew(t: f64, x: f64) -> (f64, f64) {
    (t * width(), x * EDGE - t * EDGE / 2.0)
}

fn square(t: f64, x: f64) -> (f64, f64) {
    (t * EDGE, x * EDGE)
}

/// Renders `traj` (already validated against `model`).
pub fn render(model: &ModelParams, traj: &Trajectory, style: Style) -> String {
    let mut canvas = Canvas::new();
    let cfg = &traj.configurations;
    let steps = traj.moves();
    let class = |s: Step| if s == Step::Up { "up" } else { "flat" };
    match style {
        Style::Paths => {
            let outline: Vec<_> = hexagon_corners(model, 0.0)
                .iter()
                .map(|&(t, x)| square(t, x))
                .collect();
            canvas.polygon("outline", &outline);
            for (i, path) in steps.iter().enumerate() {
                for (t, &s) in path.iter().enumerate() {
                    let (x0, x1) = (cfg[t].positions[i] as f64, cfg[t + 1].positions[i] as f64);
                    canvas.line(class(s), square(t as f64, x0), square(t as f64 + 1.0, x1));
                }
            }
            for c in cfg {
                for &x in &c.positions {
                    canvas.dot(square(c.t as f64, x as f64));
                }
            }
        }
        Style::Surface => {
            let outline: Vec<_> = hexagon_corners(model, 1.0)
                .iter()
                .map(|&(t, x)| skew(t, x))
                .collect();
            canvas.polygon("outline", &outline);
            for (i, path) in steps.iter().enumerate() {
                for (t, &s) in path.iter().enumerate() {
                    let (x0, x1) = (cfg[t].positions[i] as f64, cfg[t + 1].positions[i] as f64);
                    canvas.line(
                        class(s),
                        skew(t as f64, x0 + 0.5),
                        skew(t as f64 + 1.0, x1 + 0.5),
                    );
                }
            }
        }
        Style::Rhombi => {
            for (i, path) in steps.iter().enumerate() {
                for (t, &s) in path.iter().enumerate() {
                    let (t0, t1) = (t as f64, t as f64 + 1.0);
                    let x = cfg[t].positions[i] as f64;
                    let d = if s == Step::Up { 1.0 } else { 0.0 };
                    canvas.polygon(
                        class(s),
                        &[skew(t0, x), skew(t1, x + d), skew(t1, x + d + 1.0), skew(t0, x + 1.0)],
                    );
                }
            }
            for c in &cfg[1..cfg.len() - 1] {
                let t = c.t as f64;
                for x in model.support(c.t).filter(|x| !c.contains(*x)) {
                    let x = x as f64;
                    canvas.polygon(
                        "gap",
                        &[skew(t, x), skew(t + 1.0, x + 1.0), skew(t, x + 1.0), skew(t - 1.0, x)],
                    );
                }
            }
            let outline: Vec<_> = hexagon_corners(model, 1.0)
                .iter()
                .map(|&(t, x)| skew(t, x))
                .collect();
            canvas.polygon("outline", &outline);
        }
    }
    canvas.finish()
}

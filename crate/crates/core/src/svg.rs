//! SVG pictures of planar periodic tilings.

use std::fmt::Write as _;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::lattice::{basis_gram, integer_points_in_ellipsoid};
use crate::polytope::ConvexPolytope;
use crate::rational::{rational_below, QVector, Rational};
use crate::tiling::PeriodicTiling;

const PALETTE: [&str; 12] = [
    "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462", "#b3de69", "#fccde5", "#d9d9d9", "#bc80bd",
    "#ccebc5", "#ffed6f",
];

/// Viewing rectangle in Cartesian coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Window {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        if !(x0 < x1 && y0 < y1) || ![x0, y0, x1, y1].iter().all(|v| v.is_finite()) {
            return Err(Error::Parse(format!("empty window {x0} {y0} {x1} {y1}")));
        }
        Ok(Window { x0, y0, x1, y1 })
    }

    fn meets(&self, pts: &[DVector<f64>]) -> bool {
        let (mut lx, mut ly, mut hx, mut hy) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        for p in pts {
            lx = lx.min(p[0]);
            ly = ly.min(p[1]);
            hx = hx.max(p[0]);
            hy = hy.max(p[1]);
        }
        lx <= self.x1 && hx >= self.x0 && ly <= self.y1 && hy >= self.y0
    }
}

impl Default for Window {
    fn default() -> Self {
        Window { x0: -2.0, y0: -2.0, x1: 2.0, y1: 2.0 }
    }
}

/// Vertices of a planar polygon in cyclic order.
fn boundary_cycle(p: &ConvexPolytope) -> Vec<QVector> {
    let edges = p.edges();
    let mut cycle = vec![p.vertices()[0].clone()];
    let mut prev: Option<QVector> = None;
    while cycle.len() < p.vertices().len() {
        let cur = cycle.last().expect("nonempty").clone();
        let next = edges
            .iter()
            .filter_map(|(a, b)| {
                if *a == cur {
                    Some(b)
                } else if *b == cur {
                    Some(a)
                } else {
                    None
                }
            })
            .find(|v| Some(*v) != prev.as_ref())
            .expect("polygon boundary is a cycle")
            .clone();
        prev = Some(cur);
        cycle.push(next);
    }
    cycle
}

/// One `<path>` per tile meeting the window, classed by prototile index.
pub fn render_svg(t: &PeriodicTiling, window: &Window) -> Result<String> {
    if t.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: t.dim() });
    }
    let frame = t.frame();
    let labels = t.prototile_labels();
    let classes = labels.iter().max().map_or(0, |m| m + 1);
    let polys: Vec<Vec<QVector>> = t.cell_tiles().iter().map(boundary_cycle).collect();

    // Lattice translates whose tiles can reach the window.
    let reach = t
        .cell_tiles()
        .iter()
        .flat_map(|c| c.vertices())
        .map(|v| frame.cartesian(v).norm())
        .fold(0.0f64, f64::max);
    let cx = 0.5 * (window.x0 + window.x1);
    let cy = 0.5 * (window.y0 + window.y1);
    let half_diag = 0.5 * (window.x1 - window.x0).hypot(window.y1 - window.y0);
    let radius = half_diag + reach + 1.0;
    let inv = frame.embed().clone().try_inverse().expect("embedding is invertible");
    let cf = &inv * DVector::from_vec(vec![cx, cy]);
    let center = QVector::new(vec![rational_below(cf[0], 1 << 20), rational_below(cf[1], 1 << 20)]);
    let center_lat = t.lattice_coords(&center);
    let lgram = basis_gram(frame.gram(), t.lattice());
    let r2 = rational_below(radius * radius, 1) + Rational::from_integer(1.into());
    let ks = integer_points_in_ellipsoid(&lgram, &center_lat, &r2);

    let mut out = String::new();
    let (w, h) = (window.x1 - window.x0, window.y1 - window.y0);
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{:.6} {:.6} {:.6} {:.6}\">",
        window.x0, -window.y1, w, h
    )
    .expect("write to string");
    out.push_str("<style>\n");
    out.push_str(&format!("path {{ stroke: #222; stroke-width: {:.6}; stroke-linejoin: round; }}\n", w.max(h) / 400.0));
    for c in 0..classes {
        out.push_str(&format!(".prototile-{c} {{ fill: {}; }}\n", PALETTE[c % PALETTE.len()]));
    }
    out.push_str("</style>\n");
    for k in &ks {
        let shift = t.lattice().mul_vec(k);
        for (i, poly) in polys.iter().enumerate() {
            let pts: Vec<DVector<f64>> = poly.iter().map(|v| frame.cartesian(&(v + &shift))).collect();
            if !window.meets(&pts) {
                continue;
            }
            let mut d = String::new();
            for (j, p) in pts.iter().enumerate() {
                let cmd = if j == 0 { 'M' } else { 'L' };
                write!(d, "{cmd}{:.6} {:.6} ", p[0], -p[1]).expect("write to string");
            }
            d.push('Z');
            writeln!(out, "<path class=\"prototile-{}\" d=\"{d}\"/>", labels[i]).expect("write to string");
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::scalar::Rational;
use crate::vector::TropVector;

use super::polytope::{coefficient_levels, TropPolytope};

const SIZE: f64 = 400.0;
const MARGIN: f64 = 30.0;

/// Renders a 2-D polytope as dense grid samples with extremal points marked.
pub fn render_svg(p: &TropPolytope, extremal: &[TropVector]) -> Result<String> {
    if p.dim() != 2 {
        return Err(Error::Invalid(format!("only 2-d polytopes can be drawn, got dimension {}", p.dim())));
    }
    let samples = p.grid_points(&coefficient_levels(&Rational::new(1.into(), 32.into()), 96));
    let xy = |v: &TropVector| (v.coord(0).to_f64(), v.coord(1).to_f64());
    let (mut lo_x, mut hi_x, mut lo_y, mut hi_y) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for v in p.generators() {
        let (x, y) = xy(v);
        lo_x = lo_x.min(x);
        hi_x = hi_x.max(x);
        lo_y = lo_y.min(y);
        hi_y = hi_y.max(y);
    }
    let span = (hi_x - lo_x).max(hi_y - lo_y).max(1e-9);
    let sx = |x: f64| MARGIN + (x - lo_x) / span * (SIZE - 2.0 * MARGIN);
    let sy = |y: f64| SIZE - MARGIN - (y - lo_y) / span * (SIZE - 2.0 * MARGIN);

    let mut out = String::new();
    writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#).unwrap();
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    for v in &samples {
        let (x, y) = xy(v);
        writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="1.2" fill="steelblue"/>"#, sx(x), sy(y)).unwrap();
    }
    for v in extremal {
        let (x, y) = xy(v);
        writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="5" fill="none" stroke="crimson" stroke-width="2"/>"#, sx(x), sy(y)).unwrap();
        writeln!(out, r#"<text x="{:.2}" y="{:.2}" font-size="11" font-family="monospace">{v}</text>"#, sx(x) + 7.0, sy(y) - 7.0).unwrap();
    }
    out.push_str("</svg>\n");
    Ok(out)
}

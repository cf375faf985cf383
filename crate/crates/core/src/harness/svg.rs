//! SVG rendering of a planar body with its unit circle, contact points and
//! attached k-ball.

use std::fmt::Write;

use super::json::BodyFile;
use super::HarnessError;
use crate::bodies::{self, ConvexBody};
use crate::error::GeomError;
use crate::linalg::{self, Vector};

const SIZE: f64 = 480.0;
const OUTLINE_SAMPLES: usize = 720;

/// Boundary points in counterclockwise order.
fn outline(body: &ConvexBody) -> Result<Vec<Vector>, GeomError> {
    match body {
        ConvexBody::Ball(_) => linalg::circle_directions(OUTLINE_SAMPLES)
            .into_iter()
            .map(|u| bodies::gauge(body, &u).map(|g| u / g))
            .collect(),
        _ => {
            let mut pts = bodies::extreme_points(body)?;
            let c = linalg::centroid(&pts);
            pts.sort_by(|a, b| {
                let ang = |p: &Vector| (p[1] - c[1]).atan2(p[0] - c[0]);
                ang(a).total_cmp(&ang(b))
            });
            Ok(pts)
        }
    }
}

fn path(points: &[Vector], map: &impl Fn(&Vector) -> (f64, f64)) -> String {
    let mut d = String::new();
    for (i, p) in points.iter().enumerate() {
        let (x, y) = map(p);
        let _ = write!(d, "{}{x:.3},{y:.3} ", if i == 0 { "M" } else { "L" });
    }
    d.push('Z');
    d
}

pub fn plot2d(file: &BodyFile) -> Result<String, HarnessError> {
    let body = &file.body;
    if body.dim() != 2 {
        return Err(HarnessError::Geom(GeomError::WrongDimension { expected: 2, got: body.dim() }));
    }
    let boundary = outline(body)?;
    let extent = boundary.iter().map(|p| p.amax()).fold(1.0, f64::max) * 1.1;
    let scale = SIZE / (2.0 * extent);
    let map = |p: &Vector| (SIZE / 2.0 + p[0] * scale, SIZE / 2.0 - p[1] * scale);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"##
    );
    let _ = writeln!(out, r##"<rect width="100%" height="100%" fill="white"/>"##);
    let _ = writeln!(
        out,
        r##"<path d="{}" fill="#dbe8f5" stroke="#1f4e79" stroke-width="1.5"/>"##,
        path(&boundary, &map)
    );
    let _ = writeln!(
        out,
        r##"<circle cx="{c:.3}" cy="{c:.3}" r="{r:.3}" fill="none" stroke="#888" stroke-dasharray="4 3"/>"##,
        c = SIZE / 2.0,
        r = scale
    );
    if let Some(cert) = &file.certificate {
        if let Some(e) = &cert.kball {
            let ends: Vec<Vector> = linalg::circle_directions(64)
                .iter()
                .filter_map(|u| match e.k() {
                    1 => None,
                    _ => Some(e.point(&Vector::from_vec(vec![u[0], u[1]]))),
                })
                .collect();
            if e.k() == 1 {
                let a = map(&e.point(&Vector::from_vec(vec![1.0])));
                let b = map(&e.point(&Vector::from_vec(vec![-1.0])));
                let _ = writeln!(
                    out,
                    r##"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="#c0392b" stroke-width="2.5"/>"##,
                    a.0, a.1, b.0, b.1
                );
            } else {
                let _ = writeln!(
                    out,
                    r##"<path d="{}" fill="none" stroke="#c0392b" stroke-width="2"/>"##,
                    path(&ends, &map)
                );
            }
        }
        for p in &cert.decomposition.contacts {
            let (x, y) = map(p);
            let _ = writeln!(out, r##"<circle cx="{x:.3}" cy="{y:.3}" r="3.5" fill="#2e7d32"/>"##);
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::small_asym_body;

    #[test]
    fn renders_planar_construction() {
        let c = small_asym_body(2, 1, 1.5).unwrap();
        let svg = plot2d(&c.into()).unwrap();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("<line") && svg.contains("#2e7d32"));
    }

    #[test]
    fn rejects_other_dimensions() {
        let c = small_asym_body(3, 1, 1.2).unwrap();
        assert!(plot2d(&c.into()).is_err());
    }
}

use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::Point;

/// A domain described by user supplied closures.
pub struct CustomDomain {
    pub name: String,
    pub signed_distance: Box<dyn Fn(Point) -> f64 + Send + Sync>,
    pub boundary_projection: Box<dyn Fn(Point) -> Point + Send + Sync>,
    pub diameter: f64,
    /// Smallest radius of curvature of the boundary, `None` for polygons.
    pub min_curvature_radius: Option<f64>,
}

#[derive(Clone)]
pub enum DomainKind {
    Disk { radius: f64 },
    Ellipse { a: f64, b: f64 },
    Custom(Arc<CustomDomain>),
}

/// Signed distance description of a bounded planar domain; negative inside.
#[derive(Clone)]
pub struct DomainGeometry {
    kind: DomainKind,
}

impl fmt::Debug for DomainGeometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            DomainKind::Disk { radius } => write!(f, "Disk(R={radius})"),
            DomainKind::Ellipse { a, b } => write!(f, "Ellipse(a={a}, b={b})"),
            DomainKind::Custom(c) => write!(f, "Custom({})", c.name),
        }
    }
}

impl DomainGeometry {
    pub fn disk(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(invalid(format!("disk radius must be positive, got {radius}")));
        }
        Ok(Self {
            kind: DomainKind::Disk { radius },
        })
    }

    /// Axis-aligned ellipse with semi-axes `a` (along x) and `b` (along y).
    pub fn ellipse(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(invalid(format!("ellipse semi-axes must be positive, got ({a}, {b})")));
        }
        Ok(Self {
            kind: DomainKind::Ellipse { a, b },
        })
    }

    pub fn custom(domain: CustomDomain) -> Self {
        Self {
            kind: DomainKind::Custom(Arc::new(domain)),
        }
    }

    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    pub fn diameter(&self) -> f64 {
        match &self.kind {
            DomainKind::Disk { radius } => 2.0 * radius,
            DomainKind::Ellipse { a, b } => 2.0 * a.max(*b),
            DomainKind::Custom(c) => c.diameter,
        }
    }

    pub fn min_curvature_radius(&self) -> Option<f64> {
        match &self.kind {
            DomainKind::Disk { radius } => Some(*radius),
            DomainKind::Ellipse { a, b } => {
                let (major, minor) = if a >= b { (*a, *b) } else { (*b, *a) };
                Some(minor * minor / major)
            }
            DomainKind::Custom(c) => c.min_curvature_radius,
        }
    }

    pub fn signed_distance(&self, p: Point) -> f64 {
        match &self.kind {
            DomainKind::Disk { radius } => p[0].hypot(p[1]) - radius,
            DomainKind::Ellipse { a, b } => {
                let (_, dist) = ellipse_closest_point(*a, *b, p);
                let inside = (p[0] / a).powi(2) + (p[1] / b).powi(2) < 1.0;
                if inside {
                    -dist
                } else {
                    dist
                }
            }
            DomainKind::Custom(c) => (c.signed_distance)(p),
        }
    }

    /// Closest point on the boundary curve.
    pub fn boundary_projection(&self, p: Point) -> Point {
        match &self.kind {
            DomainKind::Disk { radius } => {
                let r = p[0].hypot(p[1]);
                if r == 0.0 {
                    [*radius, 0.0]
                } else {
                    [radius * p[0] / r, radius * p[1] / r]
                }
            }
            DomainKind::Ellipse { a, b } => ellipse_closest_point(*a, *b, p).0,
            DomainKind::Custom(c) => (c.boundary_projection)(p),
        }
    }
}

/// Closest point on the ellipse `(x/a)^2 + (y/b)^2 = 1` and its distance,
/// computed by bisection on the Lagrange multiplier (robust for all inputs).
fn ellipse_closest_point(a: f64, b: f64, p: Point) -> (Point, f64) {
    // Work with e0 >= e1 in the first quadrant.
    let swap = b > a;
    let (e0, e1) = if swap { (b, a) } else { (a, b) };
    let (px, py) = if swap { (p[1], p[0]) } else { (p[0], p[1]) };
    let (y0, y1) = (px.abs(), py.abs());

    let (x0, x1) = if y1 > 0.0 {
        if y0 > 0.0 {
            let z0 = y0 / e0;
            let z1 = y1 / e1;
            let g = z0 * z0 + z1 * z1 - 1.0;
            if g != 0.0 {
                let r0 = (e0 / e1) * (e0 / e1);
                let sbar = ellipse_root(r0, z0, z1, g);
                (r0 * y0 / (sbar + r0), y1 / (sbar + 1.0))
            } else {
                (y0, y1)
            }
        } else {
            (0.0, e1)
        }
    } else {
        let numer0 = e0 * y0;
        let denom0 = e0 * e0 - e1 * e1;
        if numer0 < denom0 {
            let xde0 = numer0 / denom0;
            (e0 * xde0, e1 * (1.0 - xde0 * xde0).max(0.0).sqrt())
        } else {
            (e0, 0.0)
        }
    };
    let dist = (x0 - y0).hypot(x1 - y1);
    let qx = x0.copysign(px);
    let qy = x1.copysign(py);
    let q = if swap { [qy, qx] } else { [qx, qy] };
    (q, dist)
}

fn ellipse_root(r0: f64, z0: f64, z1: f64, mut g: f64) -> f64 {
    let n0 = r0 * z0;
    let mut s0 = z1 - 1.0;
    let mut s1 = if g < 0.0 { 0.0 } else { n0.hypot(z1) - 1.0 };
    let mut s = 0.0;
    for _ in 0..2000 {
        s = 0.5 * (s0 + s1);
        if s == s0 || s == s1 {
            break;
        }
        let ratio0 = n0 / (s + r0);
        let ratio1 = z1 / (s + 1.0);
        g = ratio0 * ratio0 + ratio1 * ratio1 - 1.0;
        if g > 0.0 {
            s0 = s;
        } else if g < 0.0 {
            s1 = s;
        } else {
            break;
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `radius(dir)` is the distance from the origin to the boundary along `dir`.
    fn ray_signs(d: &DomainGeometry, radius: impl Fn([f64; 2]) -> f64) {
        for i in 0..24 {
            let t = i as f64 * std::f64::consts::TAU / 24.0 + 0.1;
            let dir = [t.cos(), t.sin()];
            let rb = radius(dir);
            assert!(d.signed_distance([rb * dir[0], rb * dir[1]]).abs() < 1e-12);
            for &s in &[0.1, 0.5, 0.9] {
                assert!(d.signed_distance([s * rb * dir[0], s * rb * dir[1]]) < 0.0);
            }
            assert!(d.signed_distance([1.1 * rb * dir[0], 1.1 * rb * dir[1]]) > 0.0);
        }
    }

    #[test]
    fn disk_signs_and_projection() {
        let d = DomainGeometry::disk(2.0).unwrap();
        ray_signs(&d, |_| 2.0);
        assert_eq!(d.signed_distance([0.0, 0.0]), -2.0);
        let q = d.boundary_projection([0.3, -0.4]);
        assert!(d.signed_distance(q).abs() <= 1e-12 * d.diameter());
    }

    #[test]
    fn ellipse_distance_matches_brute_force() {
        let (a, b) = (1.5, 1.0);
        let d = DomainGeometry::ellipse(a, b).unwrap();
        ray_signs(&d, |u| 1.0 / ((u[0] / a).powi(2) + (u[1] / b).powi(2)).sqrt());
        let pts = [[0.3, 0.2], [1.2, -0.1], [-1.7, 0.4], [0.0, 0.5], [0.9, 0.0], [2.0, 2.0]];
        for p in pts {
            let brute = (0..200_000)
                .map(|i| {
                    let t = i as f64 * std::f64::consts::TAU / 200_000.0;
                    (a * t.cos() - p[0]).hypot(b * t.sin() - p[1])
                })
                .fold(f64::INFINITY, f64::min);
            assert!((d.signed_distance(p).abs() - brute).abs() < 1e-8, "{p:?}");
            let q = d.boundary_projection(p);
            assert!(d.signed_distance(q).abs() <= 1e-12 * d.diameter());
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(DomainGeometry::disk(0.0).is_err());
        assert!(DomainGeometry::ellipse(1.0, -1.0).is_err());
    }

    #[test]
    fn curvature_radius() {
        let d = DomainGeometry::ellipse(2.0, 1.0).unwrap();
        assert_eq!(d.min_curvature_radius(), Some(0.5));
    }
}

//! Small 3D vector and angle helpers shared by the geometry-facing modules.
//!
//! Conventions: the base station ground point is the world origin, the panel
//! boresight points along +y (north), +x is east, +z is up. Azimuth is
//! measured from boresight toward +x, elevation from the horizontal plane
//! upward; both in degrees.

use crate::num::Real;
use serde::{Deserialize, Serialize};

/// 3D point/vector in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vec3<R> {
    pub x: R,
    pub y: R,
    pub z: R,
}

impl<R: Real> Vec3<R> {
    pub fn new(x: R, y: R, z: R) -> Self {
        Self { x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(R::zero(), R::zero(), R::zero())
    }

    pub fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }

    pub fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }

    pub fn scale(self, s: R) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn norm(self) -> R {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn distance(self, o: Self) -> R {
        self.sub(o).norm()
    }

    /// Distance in the horizontal (x, y) plane.
    pub fn hypot_xy(self) -> R {
        (self.x * self.x + self.y * self.y).sqrt()
    }
}

/// Azimuth/elevation (degrees) of `to` as seen from `from`.
pub fn az_el_deg<R: Real>(from: Vec3<R>, to: Vec3<R>) -> (R, R) {
    let d = to.sub(from);
    let az = d.x.atan2(d.y).to_degrees();
    let el = d.z.atan2(d.hypot_xy()).to_degrees();
    (az, el)
}

/// Convex polygon in the ground plane, counter-clockwise vertex order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvexPolygon<R> {
    pub vertices: Vec<Vec3<R>>,
}

impl<R: Real> ConvexPolygon<R> {
    /// Point-in-polygon test on (x, y); boundary points count as inside.
    pub fn contains_xy(&self, p: Vec3<R>) -> bool {
        let n = self.vertices.len();
        let eps = R::of(-1e-9);
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
            if cross < eps {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn az_el_of_boresight_point() {
        let bs = Vec3::new(0.0f64, 0.0, 30.0);
        let ue = Vec3::new(0.0, 100.0, 30.0);
        let (az, el) = az_el_deg(bs, ue);
        assert!(az.abs() < 1e-12);
        assert!(el.abs() < 1e-12);
    }

    #[test]
    fn az_positive_east_el_negative_below() {
        let bs = Vec3::new(0.0f64, 0.0, 30.0);
        let (az, el) = az_el_deg(bs, Vec3::new(100.0, 100.0, 1.5));
        assert!((az - 45.0).abs() < 1e-12);
        assert!(el < 0.0);
    }

    #[test]
    fn polygon_contains() {
        let square = ConvexPolygon {
            vertices: vec![
                Vec3::new(0.0f64, 0.0, 0.0),
                Vec3::new(1.0, 0.0, 0.0),
                Vec3::new(1.0, 1.0, 0.0),
                Vec3::new(0.0, 1.0, 0.0),
            ],
        };
        assert!(square.contains_xy(Vec3::new(0.5, 0.5, 0.0)));
        assert!(!square.contains_xy(Vec3::new(1.5, 0.5, 0.0)));
    }
}

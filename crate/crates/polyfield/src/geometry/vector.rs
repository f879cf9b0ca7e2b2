use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

/// Point or direction in time-space. `x` is the time axis t, `y` and `z` are spatial.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Point or direction in a spatial slice.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }
}

impl From<Vec3> for [f64; 3] {
    fn from(v: Vec3) -> Self {
        [v.x, v.y, v.z]
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from(a: [f64; 2]) -> Self {
        Vec2::new(a[0], a[1])
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };
    pub const E_T: Vec3 = Vec3 { x: 1.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    /// Builds a time-space point from a time and a spatial position.
    pub fn from_time_space(t: f64, s: Vec2) -> Self {
        Vec3::new(t, s.x, s.y)
    }

    pub fn t(self) -> f64 {
        self.x
    }

    pub fn spatial(self) -> Vec2 {
        Vec2::new(self.y, self.z)
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn normalized(self) -> Vec3 {
        self / self.norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn max_abs(self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    pub fn dist(self, o: Vec3) -> f64 {
        (self - o).norm()
    }

    /// Lexicographic comparison (x, then y, then z).
    pub fn lex_cmp(self, o: Vec3) -> std::cmp::Ordering {
        let c = |a: f64, b: f64| a.partial_cmp(&b).unwrap_or_else(|| a.total_cmp(&b));
        c(self.x, o.x).then(c(self.y, o.y)).then(c(self.z, o.z))
    }

    pub fn triple(a: Vec3, b: Vec3, c: Vec3) -> f64 {
        a.dot(b.cross(c))
    }
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    /// Counter-clockwise rotation by a right angle.
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn normalized(self) -> Vec2 {
        self / self.norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

macro_rules! impl_ops {
    ($t:ident, $($f:ident),+) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, o: $t) -> $t { $t { $($f: self.$f + o.$f),+ } }
        }
        impl AddAssign for $t {
            fn add_assign(&mut self, o: $t) { $(self.$f += o.$f;)+ }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, o: $t) -> $t { $t { $($f: self.$f - o.$f),+ } }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t { $t { $($f: -self.$f),+ } }
        }
        impl Mul<f64> for $t {
            type Output = $t;
            fn mul(self, s: f64) -> $t { $t { $($f: self.$f * s),+ } }
        }
        impl Mul<$t> for f64 {
            type Output = $t;
            fn mul(self, v: $t) -> $t { $t { $($f: v.$f * self),+ } }
        }
        impl Div<f64> for $t {
            type Output = $t;
            fn div(self, s: f64) -> $t { $t { $($f: self.$f / s),+ } }
        }
    };
}

impl_ops!(Vec3, x, y, z);
impl_ops!(Vec2, x, y);

/// Solves the 2x2 system with rows `r0`, `r1`; `None` when singular relative to `tol`.
pub fn solve2(r0: Vec2, r1: Vec2, b: Vec2, tol: f64) -> Option<Vec2> {
    let det = r0.cross(r1);
    let scale = r0.norm() * r1.norm();
    if det.abs() <= tol * scale || scale == 0.0 {
        return None;
    }
    Some(Vec2::new(
        (b.x * r1.y - b.y * r0.y) / det,
        (r0.x * b.y - r1.x * b.x) / det,
    ))
}

/// Solves the 3x3 system with rows `r0`, `r1`, `r2` by Cramer's rule.
pub fn solve3(r0: Vec3, r1: Vec3, r2: Vec3, b: Vec3, tol: f64) -> Option<Vec3> {
    let c12 = r1.cross(r2);
    let det = r0.dot(c12);
    let scale = r0.norm() * r1.norm() * r2.norm();
    if det.abs() <= tol * scale || scale == 0.0 {
        return None;
    }
    let c20 = r2.cross(r0);
    let c01 = r0.cross(r1);
    Some((c12 * b.x + c20 * b.y + c01 * b.z) / det)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve3_recovers_point() {
        let p = Vec3::new(0.3, -1.2, 2.5);
        let r = [Vec3::new(1.0, 2.0, 0.5), Vec3::new(-0.3, 1.0, 1.0), Vec3::new(0.0, 0.2, -1.0)];
        let b = Vec3::new(r[0].dot(p), r[1].dot(p), r[2].dot(p));
        let x = solve3(r[0], r[1], r[2], b, 1e-12).unwrap();
        assert!(x.dist(p) < 1e-13);
    }

    #[test]
    fn solve2_singular() {
        assert!(solve2(Vec2::new(1.0, 1.0), Vec2::new(2.0, 2.0), Vec2::new(1.0, 0.0), 1e-12).is_none());
        let x = solve2(Vec2::new(1.0, 0.0), Vec2::new(0.0, 2.0), Vec2::new(3.0, 4.0), 1e-12).unwrap();
        assert_eq!(x, Vec2::new(3.0, 2.0));
    }

    #[test]
    fn serde_as_arrays() {
        let v = Vec3::new(1.0, 2.5, -3.0);
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, "[1.0,2.5,-3.0]");
        let back: Vec3 = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }
}

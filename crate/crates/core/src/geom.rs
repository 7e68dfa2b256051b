//! Vectors, tolerance policy and deterministic direction/point sampling.
//!
//! Points of the plane are stored with a zero third coordinate, so every
//! routine works on one three-component type and the ambient dimension is
//! carried by the [`Scene`](crate::scene::Scene).

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point or direction of R² or R³.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vector(pub [f64; 3]);

impl Vector {
    pub const ZERO: Vector = Vector([0.0; 3]);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vector([x, y, z])
    }

    pub const fn xy(x: f64, y: f64) -> Self {
        Vector([x, y, 0.0])
    }

    /// Builds a vector from 2 or 3 coordinates.
    pub fn from_slice(c: &[f64]) -> Result<Self> {
        let v = match c.len() {
            2 => Vector::xy(c[0], c[1]),
            3 => Vector::new(c[0], c[1], c[2]),
            n => return Err(Error::Validation(format!("expected 2 or 3 coordinates, got {n}"))),
        };
        if !v.is_finite() {
            return Err(Error::Validation("non-finite coordinate".into()));
        }
        Ok(v)
    }

    pub fn x(&self) -> f64 {
        self.0[0]
    }
    pub fn y(&self) -> f64 {
        self.0[1]
    }
    pub fn z(&self) -> f64 {
        self.0[2]
    }

    pub fn dot(&self, o: &Vector) -> f64 {
        self.0[0] * o.0[0] + self.0[1] * o.0[1] + self.0[2] * o.0[2]
    }

    pub fn cross(&self, o: &Vector) -> Vector {
        let [a, b, c] = self.0;
        let [d, e, f] = o.0;
        Vector::new(b * f - c * e, c * d - a * f, a * e - b * d)
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn dist(&self, o: &Vector) -> f64 {
        (*self - *o).norm()
    }

    /// Unit vector in the same direction, `None` for (near) zero input.
    pub fn normalized(&self) -> Option<Vector> {
        let n = self.norm();
        if n > 1e-300 && n.is_finite() {
            Some(*self / n)
        } else {
            None
        }
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn lerp(&self, o: &Vector, t: f64) -> Vector {
        *self + (*o - *self) * t
    }

    /// Angle in `[0, π]` between two nonzero vectors.
    pub fn angle(&self, o: &Vector) -> f64 {
        let c = self.dot(o) / (self.norm() * o.norm());
        c.clamp(-1.0, 1.0).acos()
    }

    /// Any unit vector orthogonal to `self` (which must be nonzero).
    pub fn any_orthogonal(&self) -> Vector {
        let [x, y, z] = self.0;
        let t = if x.abs() <= y.abs() && x.abs() <= z.abs() {
            Vector::new(1.0, 0.0, 0.0)
        } else if y.abs() <= z.abs() {
            Vector::new(0.0, 1.0, 0.0)
        } else {
            Vector::new(0.0, 0.0, 1.0)
        };
        self.cross(&t).normalized().unwrap_or(Vector::new(1.0, 0.0, 0.0))
    }

    /// Coordinates truncated to the ambient dimension.
    pub fn coords(&self, dim: usize) -> &[f64] {
        &self.0[..dim]
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for Vector {
    type Output = Vector;
    fn add(self, o: Vector) -> Vector {
        Vector([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl AddAssign for Vector {
    fn add_assign(&mut self, o: Vector) {
        *self = *self + o;
    }
}

impl Sub for Vector {
    type Output = Vector;
    fn sub(self, o: Vector) -> Vector {
        Vector([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Mul<f64> for Vector {
    type Output = Vector;
    fn mul(self, s: f64) -> Vector {
        Vector([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }
}

impl Div<f64> for Vector {
    type Output = Vector;
    fn div(self, s: f64) -> Vector {
        Vector([self.0[0] / s, self.0[1] / s, self.0[2] / s])
    }
}

impl Neg for Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        Vector([-self.0[0], -self.0[1], -self.0[2]])
    }
}

/// Numerical tolerance policy shared by every computation.
///
/// The thresholds form the chain `0 < eps_dist < eps_cluster < sep_tol < t_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Agreement of computed distances.
    pub eps_dist: f64,
    /// Single-linkage merge radius for nearest-point clustering.
    pub eps_cluster: f64,
    /// Slack allowed in the length of unit vectors.
    pub eps_unit: f64,
    /// Minimum nearest-set diameter for medial membership.
    pub sep_tol: f64,
    /// Cap standing in for an infinite reaching radius.
    pub t_max: f64,
    /// Seed of every deterministic sampler.
    pub seed: u64,
}

impl Tolerances {
    pub fn new(eps_dist: f64, eps_cluster: f64, eps_unit: f64, sep_tol: f64, t_max: f64, seed: u64) -> Result<Self> {
        let t = Tolerances { eps_dist, eps_cluster, eps_unit, sep_tol, t_max, seed };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.eps_dist, self.eps_cluster, self.eps_unit, self.sep_tol, self.t_max];
        if all.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(Error::Validation("tolerances must be finite and positive".into()));
        }
        if !(self.eps_dist < self.eps_cluster && self.eps_cluster < self.sep_tol && self.sep_tol < self.t_max) {
            return Err(Error::Validation("tolerances must satisfy eps_dist < eps_cluster < sep_tol < t_max".into()));
        }
        Ok(())
    }

    /// `true` when `v` is unit length within `eps_unit`.
    pub fn is_unit(&self, v: &Vector) -> bool {
        (v.norm() - 1.0).abs() <= self.eps_unit
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        default_tolerances()
    }
}

/// The documented default tolerance policy.
pub fn default_tolerances() -> Tolerances {
    Tolerances { eps_dist: 1e-9, eps_cluster: 1e-5, eps_unit: 1e-9, sep_tol: 1e-3, t_max: 1e6, seed: 42 }
}

/// Radical inverse of `i` in base `b`, the building block of Halton sequences.
pub fn radical_inverse(mut i: u64, b: u64) -> f64 {
    let inv = 1.0 / b as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % b) as f64;
        i /= b;
        f *= inv;
    }
    r
}

/// Deterministic low-discrepancy points in the ball `B(center, radius)`.
///
/// The seed offsets the Halton index so different seeds give different, but
/// reproducible, point sets.
pub fn halton_ball(center: Vector, radius: f64, dim: usize, count: usize, seed: u64) -> Vec<Vector> {
    let mut out = Vec::with_capacity(count);
    let mut i = 1 + (seed % 1024);
    while out.len() < count {
        let u = [radical_inverse(i, 2), radical_inverse(i, 3), radical_inverse(i, 5)];
        i += 1;
        let mut p = Vector::new(2.0 * u[0] - 1.0, 2.0 * u[1] - 1.0, 0.0);
        if dim == 3 {
            p.0[2] = 2.0 * u[2] - 1.0;
        }
        if p.norm_sq() <= 1.0 {
            out.push(center + p * radius);
        }
    }
    out
}

/// `count` unit directions equally spaced on the unit circle of the xy-plane.
pub fn circle_directions(count: usize) -> Vec<Vector> {
    (0..count)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / count as f64;
            Vector::xy(t.cos(), t.sin())
        })
        .collect()
}

/// Fibonacci-lattice directions on the unit sphere.
pub fn sphere_directions(count: usize) -> Vec<Vector> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|k| {
            let z = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * k as f64;
            Vector::new(r * phi.cos(), r * phi.sin(), z)
        })
        .collect()
}

/// Unit directions covering the unit sphere of R^dim.
pub fn unit_directions(dim: usize, count: usize) -> Vec<Vector> {
    if dim == 2 {
        circle_directions(count)
    } else {
        sphere_directions(count)
    }
}

/// Directions `cos(t) e1 + sin(t) e2` for `count` equally spaced angles.
pub fn circle_in_plane(e1: Vector, e2: Vector, count: usize) -> Vec<Vector> {
    (0..count)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / count as f64;
            e1 * t.cos() + e2 * t.sin()
        })
        .collect()
}

/// Maximal angular gap from each direction of `from` to the set `to`.
///
/// Returns `0` for empty `from` and `π` when `to` is empty but `from` is not.
pub fn one_sided_angular_hausdorff(from: &[Vector], to: &[Vector]) -> f64 {
    from.iter().map(|u| to.iter().map(|w| u.angle(w)).fold(PI, f64::min)).fold(0.0, f64::max)
}

/// Symmetric angular Hausdorff distance between two direction sets.
pub fn angular_hausdorff(a: &[Vector], b: &[Vector]) -> f64 {
    one_sided_angular_hausdorff(a, b).max(one_sided_angular_hausdorff(b, a))
}

/// One-sided Euclidean Hausdorff distance from `from` into `to`.
pub fn one_sided_hausdorff(from: &[Vector], to: &[Vector]) -> f64 {
    from.iter().map(|u| to.iter().map(|w| u.dist(w)).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
}

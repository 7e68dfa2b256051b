//! Trim predicates for quadric patches.
//!
//! A patch keeps the points of its carrier that lie outside every excluded
//! [`Region`]. A region is an intersection of strict inequalities `f(p) < 0`,
//! so it is open and the kept set is closed.

use serde::{Deserialize, Serialize};

use crate::geom::Vector;

/// One strict inequality `f(p) < 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Condition {
    /// `normal · p < offset`
    HalfSpace { normal: Vec<f64>, offset: f64 },
    /// `|p - center| < radius`
    Ball { center: Vec<f64>, radius: f64 },
    /// distance from `p` to the line `point + s dir` is `< radius`
    Cylinder { point: Vec<f64>, dir: Vec<f64>, radius: f64 },
}

/// Condition with its vectors resolved and normalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Cond {
    HalfSpace { normal: Vector, offset: f64 },
    Ball { center: Vector, radius: f64 },
    Cylinder { point: Vector, dir: Vector, radius: f64 },
}

impl Cond {
    pub(crate) fn value(&self, p: &Vector) -> f64 {
        match *self {
            Cond::HalfSpace { normal, offset } => normal.dot(p) - offset,
            Cond::Ball { center, radius } => p.dist(&center) - radius,
            Cond::Cylinder { point, dir, radius } => {
                let q = *p - point;
                (q - dir * q.dot(&dir)).norm() - radius
            }
        }
    }
}

/// An excluded open region: the points where every condition is negative.
pub(crate) type Region = Vec<Cond>;

/// `true` when `p` lies outside every excluded region.
pub(crate) fn is_kept(regions: &[Region], p: &Vector) -> bool {
    regions.iter().all(|r| r.iter().any(|c| c.value(p) >= 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_cylinder_exclusion() {
        // open half-cylinder {y^2 + (z-1)^2 < 1, x > 0}
        let region = vec![
            Cond::Cylinder { point: Vector::new(0.0, 0.0, 1.0), dir: Vector::new(1.0, 0.0, 0.0), radius: 1.0 },
            Cond::HalfSpace { normal: Vector::new(-1.0, 0.0, 0.0), offset: 0.0 },
        ];
        let regions = vec![region];
        assert!(!is_kept(&regions, &Vector::new(0.5, 0.0, 0.5)));
        assert!(is_kept(&regions, &Vector::new(-0.5, 0.0, 0.5)));
        assert!(is_kept(&regions, &Vector::new(0.5, 0.0, 3.0)));
        // boundary points are kept (closed complement)
        assert!(is_kept(&regions, &Vector::new(0.0, 0.0, 0.5)));
        assert!(is_kept(&regions, &Vector::ZERO));
    }
}

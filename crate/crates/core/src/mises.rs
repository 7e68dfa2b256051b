//! One-sided directional derivatives of the distance function.
//!
//! Off X the derivative in direction `v` is the minimum of `−⟨v, u⟩` over the
//! unit vectors `u` pointing from `a` to its nearest points. The minimum is
//! taken over the clustered representatives, so for continuum nearest sets it
//! carries the angular mesh error of the sample (at most 0.4 rad).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{halton_ball, Tolerances, Vector};
use crate::nearest::Field;

pub const DEFAULT_FD_STEP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeResult {
    pub base: Vector,
    pub dir: Vector,
    pub value: f64,
    pub witnesses: Vec<Vector>,
}

fn require_off_x<F: Field + ?Sized>(s: &F, a: &Vector, tol: &Tolerances) -> Result<f64> {
    let d = s.distance(a, tol);
    if d <= tol.eps_dist {
        Err(Error::OnX(a.to_string()))
    } else {
        Ok(d)
    }
}

pub fn directional_derivative<F: Field + ?Sized>(
    s: &F,
    a: &Vector,
    v: &Vector,
    tol: &Tolerances,
) -> Result<DerivativeResult> {
    require_off_x(s, a, tol)?;
    if !tol.is_unit(v) {
        return Err(Error::Validation(format!("direction {v} is not a unit vector")));
    }
    let ns = s.nearest_set(a, tol);
    let terms: Vec<(f64, Vector)> =
        ns.representatives().into_iter().map(|x| (-v.dot(&((x - *a) / x.dist(a))), x)).collect();
    let value = terms.iter().map(|t| t.0).fold(f64::INFINITY, f64::min);
    let witnesses = terms.iter().filter(|t| t.0 <= value + 1e-12).map(|t| t.1).collect();
    Ok(DerivativeResult { base: *a, dir: *v, value, witnesses })
}

/// One-sided forward difference `(d(a + h v) − d(a)) / h`.
pub fn directional_derivative_fd<F: Field + ?Sized>(
    s: &F,
    a: &Vector,
    v: &Vector,
    h: f64,
    tol: &Tolerances,
) -> Result<f64> {
    let d = require_off_x(s, a, tol)?;
    if !(h > 0.0) {
        return Err(Error::Validation(format!("step must be positive, got {h}")));
    }
    Ok((s.distance(&(*a + *v * h), tol) - d) / h)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FdEstimate {
    pub h: f64,
    pub forward: f64,
    pub forward_2h: f64,
    /// `2·D(h) − D(2h)`.
    pub richardson: f64,
}

impl FdEstimate {
    /// Whether the two steps agree to `tolerance`.
    pub fn consistent(&self, tolerance: f64) -> bool {
        (self.forward - self.forward_2h).abs() <= tolerance
    }
}

pub fn fd_with_richardson<F: Field + ?Sized>(
    s: &F,
    a: &Vector,
    v: &Vector,
    h: f64,
    tol: &Tolerances,
) -> Result<FdEstimate> {
    let forward = directional_derivative_fd(s, a, v, h, tol)?;
    let forward_2h = directional_derivative_fd(s, a, v, 2.0 * h, tol)?;
    Ok(FdEstimate { h, forward, forward_2h, richardson: 2.0 * forward - forward_2h })
}

/// `½(d(v, m̂)² − |v|² − 1)` with `m̂` the nearest set rescaled to the unit
/// sphere around `a`. Homogeneous of degree one in `v`.
pub fn derivative_via_sphere<F: Field + ?Sized>(s: &F, a: &Vector, v: &Vector, tol: &Tolerances) -> Result<f64> {
    require_off_x(s, a, tol)?;
    let ns = s.nearest_set(a, tol);
    let d = ns.distance;
    let gap_sq = ns.representatives().into_iter().map(|x| (*v - (x - *a) / d).norm_sq()).fold(f64::INFINITY, f64::min);
    Ok(0.5 * (gap_sq - v.norm_sq() - 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MisesSample {
    pub base: Vector,
    pub dir: Vector,
    pub formula: f64,
    pub finite_difference: f64,
    pub sphere: f64,
}

/// Random `(a, v)` pairs with `a` uniform in `B(center, radius)` and
/// `d(a) > min_distance`, evaluated by the formula, the forward difference
/// and the sphere form.
pub fn mises_samples<F: Field + ?Sized>(
    s: &F,
    center: &Vector,
    radius: f64,
    count: usize,
    min_distance: f64,
    tol: &Tolerances,
) -> Result<Vec<MisesSample>> {
    use rayon::prelude::*;
    let dim = s.dim();
    let mut bases = Vec::with_capacity(count);
    let mut pool = 4 * count;
    while bases.len() < count && pool <= 1 << 20 {
        bases = halton_ball(*center, radius, dim, pool, tol.seed)
            .into_iter()
            .filter(|a| s.distance(a, tol) > min_distance)
            .take(count)
            .collect();
        pool *= 4;
    }
    if bases.len() < count {
        return Err(Error::TooFewSamples(format!("{} of {count} bases with d > {min_distance}", bases.len())));
    }
    let dirs: Vec<Vector> = halton_ball(Vector::ZERO, 1.0, dim, 2 * count, tol.seed.wrapping_add(1))
        .into_iter()
        .filter_map(|u| if u.norm() > 0.1 { u.normalized() } else { None })
        .take(count)
        .collect();
    bases
        .par_iter()
        .zip(dirs.par_iter())
        .map(|(a, v)| {
            Ok(MisesSample {
                base: *a,
                dir: *v,
                formula: directional_derivative(s, a, v, tol)?.value,
                finite_difference: directional_derivative_fd(s, a, v, DEFAULT_FD_STEP, tol)?,
                sphere: derivative_via_sphere(s, a, v, tol)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::parse_scene;

    fn two_points() -> crate::Scene {
        parse_scene(r#"{"name":"p","dim":2,"primitives":[{"kind":"point_set","points":[[1,0],[-1,0]]}]}"#).unwrap()
    }

    #[test]
    fn both_nearest_points_are_witnesses_along_the_bisector() {
        let s = two_points();
        let t = crate::default_tolerances();
        let r = directional_derivative(&s, &Vector::ZERO, &Vector::xy(0.0, 1.0), &t).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.witnesses.len(), 2);
    }

    #[test]
    fn rejects_non_unit_direction() {
        let s = two_points();
        let t = crate::default_tolerances();
        assert!(directional_derivative(&s, &Vector::ZERO, &Vector::xy(0.0, 2.0), &t).is_err());
        // the sphere form accepts any length
        let v = derivative_via_sphere(&s, &Vector::xy(0.0, 0.5), &Vector::xy(0.0, 2.0), &t).unwrap();
        let u = directional_derivative(&s, &Vector::xy(0.0, 0.5), &Vector::xy(0.0, 1.0), &t).unwrap();
        assert!((v - 2.0 * u.value).abs() < 1e-12);
    }
}

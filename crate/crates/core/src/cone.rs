//! Tangent cones of the medial axis and medial axes of nearest sets.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{
    angular_hausdorff, circle_directions, one_sided_angular_hausdorff, sphere_directions, Tolerances, Vector,
};
use crate::medial::MedialCloud;
use crate::nearest::Field;

/// Two secant directions closer than this are the same cone direction.
pub const CONE_MATCH: f64 = 0.1;

/// Directions on the unit circle used by [`sphere_medial`] in the plane.
pub const PLANE_GRID: usize = 360;

/// Directions on the unit sphere used by [`sphere_medial`] in space.
pub const SPACE_GRID: usize = 4000;

/// Angular step at which continuum nearest sets are resampled.
pub const CONTINUUM_RESAMPLE: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphericalCloud {
    pub anchor: Vector,
    pub directions: Vec<Vector>,
    /// Annulus scales at which each direction was observed.
    pub scale_tags: Vec<Vec<f64>>,
}

impl SphericalCloud {
    pub fn empty(anchor: Vector) -> Self {
        SphericalCloud { anchor, directions: Vec::new(), scale_tags: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    /// CSV with columns `ux,uy[,uz],scales` (scales joined by `;`).
    pub fn to_csv(&self, dim: usize) -> String {
        let mut out = ["ux", "uy", "uz"][..dim].join(",");
        out.push_str(",scales\n");
        for (u, tags) in self.directions.iter().zip(&self.scale_tags) {
            for k in 0..dim {
                out.push_str(&format!("{},", u[k]));
            }
            let tags: Vec<String> = tags.iter().map(|t| t.to_string()).collect();
            out.push_str(&tags.join(";"));
            out.push('\n');
        }
        out
    }
}

/// Secant directions of the cloud around `a` that persist across scales.
///
/// At scale `r` the directions `(x − a)/|x − a|` of samples with
/// `|x − a| ∈ [r/2, r]` are collected; a direction is kept when every scale
/// has a direction within [`CONE_MATCH`] of it.
pub fn tangent_cone_directions(
    cloud: &MedialCloud,
    a: &Vector,
    scales: &[f64],
    _tol: &Tolerances,
) -> Result<SphericalCloud> {
    if scales.is_empty() || scales.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Validation("scales must be nonempty and strictly decreasing".into()));
    }
    if scales.iter().any(|&r| r <= 2.0 * cloud.step) {
        return Err(Error::Validation(format!("every scale must exceed twice the step {}", cloud.step)));
    }
    let mut per_scale: Vec<Vec<Vector>> = Vec::new();
    for &r in scales {
        let dirs: Vec<Vector> = cloud
            .samples
            .iter()
            .filter_map(|s| {
                let rho = s.point.dist(a);
                (rho >= r / 2.0 && rho <= r).then(|| (s.point - *a) / rho)
            })
            .collect();
        if dirs.len() < 3 {
            return Err(Error::TooFewSamples(format!("{} samples in the annulus [{}, {r}]", dirs.len(), r / 2.0)));
        }
        per_scale.push(dirs);
    }
    let mut candidates: Vec<Vector> = Vec::new();
    for dirs in &per_scale {
        for u in dirs {
            if candidates.iter().all(|c| c.angle(u) > CONE_MATCH / 5.0) {
                candidates.push(*u);
            }
        }
    }
    let mut out = SphericalCloud::empty(*a);
    for u in candidates {
        if per_scale.iter().all(|dirs| dirs.iter().any(|w| w.angle(&u) <= CONE_MATCH)) {
            out.directions.push(u);
            out.scale_tags.push(scales.to_vec());
        }
    }
    Ok(out)
}

/// Angular spacing of the direction grid used in dimension `dim`.
pub fn grid_resolution(dim: usize) -> f64 {
    if dim == 2 {
        std::f64::consts::TAU / PLANE_GRID as f64
    } else {
        (4.0 * std::f64::consts::PI / SPACE_GRID as f64).sqrt()
    }
}

fn direction_grid(dim: usize) -> Vec<Vector> {
    if dim == 2 {
        circle_directions(PLANE_GRID)
    } else {
        sphere_directions(SPACE_GRID)
    }
}

/// Points of a spherical sample joined when their angular distance is at
/// most `link`.
fn sample_graph(ys: &[Vector], link: f64) -> Vec<Vec<usize>> {
    (0..ys.len())
        .into_par_iter()
        .map(|i| (0..ys.len()).filter(|&j| j != i && ys[i].angle(&ys[j]) <= link).collect())
        .collect()
}

/// Whether `u` lies within `window` of the bisector of two nearest points.
///
/// Nearest candidates are the local minima of the angle to `u` on the sample
/// graph. A single arc therefore contributes one candidate however densely it
/// is sampled. The angular distance from `u` to the bisector of the best
/// candidate `y` and another one `z` is estimated as the angle gap divided
/// by `|t_y − t_z|`, where `t_y` is the unit tangent at `u` pointing away from `y`.
fn splits(u: &Vector, ys: &[Vector], graph: &[Vec<usize>], window: f64) -> bool {
    let angles: Vec<f64> = ys.iter().map(|y| u.angle(y)).collect();
    let best = angles.iter().cloned().fold(f64::INFINITY, f64::min);
    let below = |i: usize, j: usize| angles[i] < angles[j] || (angles[i] == angles[j] && i < j);
    let minima: Vec<usize> =
        (0..ys.len()).filter(|&i| angles[i] <= best + 2.0 * window && graph[i].iter().all(|&j| below(i, j))).collect();
    let Some(&first) = minima.iter().min_by(|&&i, &&j| angles[i].total_cmp(&angles[j])) else {
        return false;
    };
    let away = |y: &Vector| (*u * u.dot(y) - *y).normalized().unwrap_or(Vector::ZERO);
    let t0 = away(&ys[first]);
    minima.iter().any(|&j| j != first && angles[j] - best <= 0.75 * window * t0.dist(&away(&ys[j])))
}

/// Directions of the medial axis of `Y = m(a)`, which is a cone with vertex
/// `a`, on a deterministic direction grid.
///
/// A grid direction is medial when it has, up to the grid resolution, two
/// nearest points in `Y` at least `sep_tol` apart. Continuum nearest sets are
/// resampled every [`CONTINUUM_RESAMPLE`] radians and samples closer than 2.5
/// mesh steps are neighbours, so that a single arc never splits.
/// A singleton `m(a)` gives the empty cloud.
pub fn sphere_medial<F: Field + ?Sized>(s: &F, a: &Vector, tol: &Tolerances) -> Result<SphericalCloud> {
    let d = s.distance(a, tol);
    if d <= tol.eps_dist {
        return Err(Error::OnX(a.to_string()));
    }
    let ns = s.nearest_set_sampled(a, tol, CONTINUUM_RESAMPLE);
    if ns.multiplicity < 2 {
        return Ok(SphericalCloud::empty(*a));
    }
    let ys: Vec<Vector> = ns.representatives().iter().filter_map(|y| (*y - *a).normalized()).collect();
    let window = grid_resolution(s.dim());
    let mut link = tol.sep_tol / d;
    if ns.continuum {
        link = link.max(2.5 * CONTINUUM_RESAMPLE);
    }
    let grid = direction_grid(s.dim());
    let graph = sample_graph(&ys, link);
    let flags: Vec<bool> = grid.par_iter().map(|u| splits(u, &ys, &graph, window)).collect();
    let directions: Vec<Vector> = grid.into_iter().zip(flags).filter(|(_, f)| *f).map(|(u, _)| u).collect();
    let scale_tags = vec![Vec::new(); directions.len()];
    Ok(SphericalCloud { anchor: *a, directions, scale_tags })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConeComparison {
    pub anchor: Vector,
    /// One-sided angular distance from the sphere-medial cloud into the cone.
    pub hausdorff_included: f64,
    /// Symmetric angular distance.
    pub hausdorff_equal: f64,
    pub plane_case: bool,
    pub diam_condition_holds: bool,
    /// Smallest nearest-set diameter among samples within the smallest scale.
    pub min_diameter: f64,
    pub cone_size: usize,
    pub sphere_size: usize,
}

/// Compares the estimated tangent cone of the cloud at `a` with the medial
/// axis of `m(a)`.
pub fn compare_cone<F: Field + ?Sized>(
    s: &F,
    cloud: &MedialCloud,
    a: &Vector,
    scales: &[f64],
    tol: &Tolerances,
) -> Result<ConeComparison> {
    if !cloud.region.contains(a) {
        return Err(Error::Validation(format!("anchor {a} lies outside the scanned region")));
    }
    let cone = tangent_cone_directions(cloud, a, scales, tol)?;
    let sphere = sphere_medial(s, a, tol)?;
    let smallest = scales[scales.len() - 1];
    let min_diameter =
        cloud.samples.iter().filter(|m| m.point.dist(a) <= smallest).map(|m| m.diameter).fold(f64::INFINITY, f64::min);
    Ok(ConeComparison {
        anchor: *a,
        hausdorff_included: one_sided_angular_hausdorff(&sphere.directions, &cone.directions),
        hausdorff_equal: angular_hausdorff(&sphere.directions, &cone.directions),
        plane_case: s.dim() == 2,
        diam_condition_holds: min_diameter >= tol.sep_tol,
        min_diameter,
        cone_size: cone.len(),
        sphere_size: sphere.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConeProperty {
    pub directions: usize,
    /// Grid directions whose nearest point in `Y` changes with `λ`.
    pub mismatches: Vec<Vector>,
}

/// Checks that the nearest point of `λu` in a sample `ys` of the unit sphere
/// does not depend on `λ > 0`, which makes `M_Y` a cone.
pub fn cone_property(ys: &[Vector], dim: usize, lambdas: &[f64]) -> ConeProperty {
    let grid = direction_grid(dim);
    let nearest = |q: &Vector| {
        let dists: Vec<f64> = ys.iter().map(|y| y.dist(q)).collect();
        let best = dists.iter().cloned().fold(f64::INFINITY, f64::min);
        (dists, best)
    };
    let mismatches: Vec<Vector> = grid
        .par_iter()
        .filter(|u| {
            let (d1, b1) = nearest(u);
            let arg = d1.iter().position(|&t| t == b1).unwrap_or(0);
            lambdas.iter().any(|&l| {
                let (dl, bl) = nearest(&(**u * l));
                dl[arg] > bl + 1e-12 * (1.0 + l)
            })
        })
        .copied()
        .collect();
    ConeProperty { directions: grid.len(), mismatches }
}

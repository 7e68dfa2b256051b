//! Local dimensions of sampled sets and the dimension formulas for medial axes.

use nalgebra::{Matrix3, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{Tolerances, Vector};
use crate::medial::MedialCloud;
use crate::nearest::Field;
use crate::report::Assertion;

/// Eigenvalues below this fraction of the largest one are discarded.
pub const EIGEN_THRESHOLD: f64 = 0.01;

/// Scales, as multiples of the set diameter, used for nearest sets.
pub const NEAREST_SCALES: [f64; 3] = [0.2, 0.1, 0.05];

/// Scales, as multiples of the grid step, used for medial clouds.
pub const CLOUD_SCALES: [f64; 3] = [8.0, 4.0, 2.0];

const RESAMPLE_START: f64 = 0.05;
const RESAMPLE_MIN_POINTS: usize = 64;
const NEAREST_ANCHORS: usize = 16;
const GLOBAL_ANCHORS: usize = 400;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionEstimate {
    pub anchor: Vector,
    /// Decreasing.
    pub scales: Vec<f64>,
    /// Eigenvalues per scale, largest first.
    pub pca_spectra: Vec<Vec<f64>>,
    /// Point counts per scale.
    pub counts: Vec<usize>,
    /// Dimension read at each scale.
    pub dims: Vec<usize>,
    pub dim: usize,
    pub stable: bool,
}

impl DimensionEstimate {
    fn isolated(anchor: Vector) -> Self {
        DimensionEstimate {
            anchor,
            scales: Vec::new(),
            pca_spectra: Vec::new(),
            counts: Vec::new(),
            dims: Vec::new(),
            dim: 0,
            stable: true,
        }
    }

    /// CSV with columns `scale,count,dim,eigenvalues` (eigenvalues joined by `;`).
    pub fn spectra_csv(&self) -> String {
        let mut out = String::from("scale,count,dim,eigenvalues\n");
        for k in 0..self.scales.len() {
            let eig: Vec<String> = self.pca_spectra[k].iter().map(|e| e.to_string()).collect();
            out.push_str(&format!("{},{},{},{}\n", self.scales[k], self.counts[k], self.dims[k], eig.join(";")));
        }
        out
    }
}

/// Eigenvalues of the covariance of `pts` about their mean, largest first.
/// Planar samples have a zero third eigenvalue.
fn pca_spectrum(pts: &[Vector]) -> Vec<f64> {
    let n = pts.len() as f64;
    let mut mean = Vector::ZERO;
    for p in pts {
        mean += *p;
    }
    mean = mean / n;
    let cov = Matrix3::from_fn(|i, j| pts.iter().map(|p| (p[i] - mean[i]) * (p[j] - mean[j])).sum::<f64>() / n);
    let mut eig: Vec<f64> = SymmetricEigen::new(cov).eigenvalues.iter().map(|e| e.max(0.0)).collect();
    eig.sort_by(|a, b| b.total_cmp(a));
    eig
}

fn significant(spectrum: &[f64]) -> usize {
    let top = spectrum.first().copied().unwrap_or(0.0);
    if top <= 0.0 {
        return 0;
    }
    spectrum.iter().filter(|&&e| e >= EIGEN_THRESHOLD * top).count()
}

/// Exponent of the growth of the point count between two radii.
fn growth(count_big: usize, count_small: usize, r_big: f64, r_small: f64) -> f64 {
    (count_big as f64 / count_small as f64).ln() / (r_big / r_small).ln()
}

/// Dimension of a point sample near `a`.
///
/// At each scale `r` the points of `B(a, r)` are centred at their mean and the
/// eigenvalues of their covariance at least [`EIGEN_THRESHOLD`] times the
/// largest are counted. A reading equal to the ambient dimension is checked
/// against the growth exponent `g` of the number of points between the largest
/// and smallest scales and lowered to `⌊g + 1/4⌋`, so that a union of planes
/// through `a` reads as a plane. Fewer than three points at the smallest
/// scale make `a` isolated (dimension 0). The estimate is stable when the two
/// smallest scales agree.
pub fn local_dim(points: &[Vector], a: &Vector, scales: &[f64], _tol: &Tolerances) -> Result<DimensionEstimate> {
    if scales.is_empty() || scales.iter().any(|&r| !(r > 0.0) || !r.is_finite()) {
        return Err(Error::Validation("scales must be positive and finite".into()));
    }
    let mut scales = scales.to_vec();
    scales.sort_by(|a, b| b.total_cmp(a));
    scales.dedup();
    let balls: Vec<Vec<Vector>> =
        scales.iter().map(|&r| points.iter().filter(|p| p.dist(a) <= r).copied().collect()).collect();
    let counts: Vec<usize> = balls.iter().map(Vec::len).collect();
    let last = scales.len() - 1;
    if counts[last] < 3 {
        let mut out = DimensionEstimate::isolated(*a);
        out.dims = vec![0; scales.len()];
        out.pca_spectra = vec![Vec::new(); scales.len()];
        out.stable = last == 0 || counts[last - 1] < 3;
        out.scales = scales;
        out.counts = counts;
        return Ok(out);
    }
    if counts[0] < 8 {
        return Err(Error::TooFewSamples(format!("{} points within {} of {a}", counts[0], scales[0])));
    }
    let pca_spectra: Vec<Vec<f64>> =
        balls.iter().map(|b| if b.len() < 3 { Vec::new() } else { pca_spectrum(b) }).collect();
    let ambient = if points.iter().any(|p| p.z() != 0.0) { 3 } else { 2 };
    let cap = if last > 0 {
        (growth(counts[0], counts[last], scales[0], scales[last]) + 0.25).floor().max(0.0) as usize
    } else {
        ambient
    };
    let dims: Vec<usize> = (0..scales.len())
        .map(|k| match (counts[k], significant(&pca_spectra[k])) {
            (0..=2, _) => 0,
            (_, pca) if pca == ambient => pca.min(cap),
            (_, pca) => pca,
        })
        .collect();
    let stable = last == 0 || dims[last] == dims[last - 1];
    Ok(DimensionEstimate { anchor: *a, dim: dims[last], scales, pca_spectra, counts, dims, stable })
}

/// Dimension of the nearest set `m(a)`.
///
/// Finite nearest sets have dimension 0. Continuum nearest sets are resampled
/// until they have at least 64 points and their dimension is the local
/// dimension read at most of sixteen of those points, at scales proportional
/// to the diameter of the set. Crossings of two arcs read as planar, hence
/// the majority.
pub fn dim_m<F: Field + ?Sized>(s: &F, a: &Vector, tol: &Tolerances) -> Result<DimensionEstimate> {
    let d = s.distance(a, tol);
    if d <= tol.eps_dist {
        return Err(Error::OnX(a.to_string()));
    }
    let ns = s.nearest_set(a, tol);
    if !ns.continuum {
        return Ok(DimensionEstimate::isolated(*a));
    }
    let mut step = RESAMPLE_START;
    let mut dense = s.nearest_set_sampled(a, tol, step);
    while dense.representatives().len() < RESAMPLE_MIN_POINTS && step > RESAMPLE_START / 64.0 {
        step /= 2.0;
        dense = s.nearest_set_sampled(a, tol, step);
    }
    let reps = dense.representatives();
    let scales: Vec<f64> = NEAREST_SCALES.iter().map(|f| f * dense.diameter).collect();
    let stride = (reps.len() / NEAREST_ANCHORS).max(1);
    let estimates: Vec<Result<DimensionEstimate>> =
        reps.par_iter().step_by(stride).map(|y| local_dim(&reps, y, &scales, tol)).collect();
    let mut ok = Vec::new();
    let mut first_err = None;
    for e in estimates {
        match e {
            Ok(e) => ok.push(e),
            Err(err) => {
                first_err.get_or_insert(err);
            }
        }
    }
    let votes = |d: usize| ok.iter().filter(|e| e.dim == d).count();
    let mode = (0..=3).rev().max_by_key(|&d| votes(d)).filter(|&d| votes(d) > 0);
    match mode.and_then(|d| ok.into_iter().find(|e| e.dim == d)) {
        Some(mut b) => {
            b.anchor = *a;
            Ok(b)
        }
        None => Err(first_err.unwrap_or(Error::EmptyCloud)),
    }
}

/// Scales used on a medial cloud of the given step.
pub fn cloud_scales(step: f64) -> Vec<f64> {
    CLOUD_SCALES.iter().map(|f| f * step).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimFormulaReport {
    pub anchor: Vector,
    pub dim_medial: DimensionEstimate,
    pub dim_nearest: usize,
    pub k_min: usize,
    pub neighbors: usize,
    /// `dim_a M_X + dim m(a)`.
    pub pointwise_sum: usize,
    /// Whether the pointwise sum equals `n − 1`.
    pub generic: bool,
    pub assertions: Vec<Assertion>,
}

/// `dim_a M_X + k_min = n − 1`, with `k_min` the least dimension of `m(x)`
/// over medial samples `x` within `neighborhood` of `a`.
pub fn verify_dim_formula<F: Field + ?Sized>(
    s: &F,
    cloud: &MedialCloud,
    a: &Vector,
    neighborhood: f64,
    tol: &Tolerances,
) -> Result<DimFormulaReport> {
    if !cloud.region.contains(a) {
        return Err(Error::Validation(format!("anchor {a} lies outside the scanned region")));
    }
    let n = s.dim();
    let dim_medial = local_dim(&cloud.points(), a, &cloud_scales(cloud.step), tol)?;
    let near: Vec<Vector> = cloud.points().into_iter().filter(|x| x.dist(a) <= neighborhood).collect();
    if near.is_empty() {
        return Err(Error::TooFewSamples(format!("no medial samples within {neighborhood} of {a}")));
    }
    let dims: Vec<usize> = near.par_iter().map(|x| dim_m(s, x, tol).map(|e| e.dim)).collect::<Result<_>>()?;
    let k_min = dims.iter().copied().min().unwrap_or(0);
    let dim_nearest = dim_m(s, a, tol)?.dim;
    let pointwise_sum = dim_medial.dim + dim_nearest;
    let assertions = vec![
        Assertion::equal("dim M + k_min = n - 1", n - 1, dim_medial.dim + k_min),
        Assertion::holds("k_min <= dim m(a)", k_min <= dim_nearest),
    ];
    Ok(DimFormulaReport {
        anchor: *a,
        dim_medial,
        dim_nearest,
        k_min,
        neighbors: near.len(),
        pointwise_sum,
        generic: pointwise_sum == n - 1,
        assertions,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlobalDimReport {
    pub max_local_dim: usize,
    pub min_dim_m: usize,
    /// `n − 1 − min dim m`.
    pub predicted: usize,
    pub anchors: usize,
    pub assertions: Vec<Assertion>,
}

/// Largest local dimension of the cloud against `n − 1 − min dim m(x)` over
/// the samples.
pub fn global_dim<F: Field + ?Sized>(s: &F, cloud: &MedialCloud, tol: &Tolerances) -> Result<GlobalDimReport> {
    if cloud.samples.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let pts = cloud.points();
    let scales = cloud_scales(cloud.step);
    let stride = (pts.len() / GLOBAL_ANCHORS).max(1);
    let local: Vec<usize> =
        pts.par_iter().step_by(stride).filter_map(|a| local_dim(&pts, a, &scales, tol).ok().map(|e| e.dim)).collect();
    if local.is_empty() {
        return Err(Error::TooFewSamples("no anchor of the cloud admits an estimate".into()));
    }
    let dims: Vec<usize> = pts.par_iter().map(|x| dim_m(s, x, tol).map(|e| e.dim)).collect::<Result<_>>()?;
    let max_local_dim = local.iter().copied().max().unwrap_or(0);
    let min_dim_m = dims.iter().copied().min().unwrap_or(0);
    let predicted = (s.dim() - 1).saturating_sub(min_dim_m);
    Ok(GlobalDimReport {
        max_local_dim,
        min_dim_m,
        predicted,
        anchors: local.len(),
        assertions: vec![Assertion::equal("dim M = n - 1 - min dim m", predicted, max_local_dim)],
    })
}

//! Sampled medial axis, virtual offsets and checks on the graph of the
//! distance function.
//!
//! Clouds are a sep_tol-medial approximation: a point is reported when its
//! nearest set splits into clusters at least `sep_tol` apart. Frontier points
//! of the medial axis, where the separation tends to zero, are not detected
//! here; see [`crate::reach::frontier_classify`].

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{halton_ball, one_sided_hausdorff, Tolerances, Vector};
use crate::nearest::{single_linkage, Cluster, Field, NearestSet};
use crate::report::Assertion;

pub const CLOUD_LABEL: &str = "sep_tol-medial approximation";

/// Axis-aligned box scanned on a regular grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Region {
    pub dim: usize,
    pub lo: Vector,
    pub hi: Vector,
    pub step: f64,
}

impl Region {
    pub fn new(lo: Vector, hi: Vector, step: f64, dim: usize) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::Validation(format!("step must be positive, got {step}")));
        }
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Validation("region corners must be finite".into()));
        }
        if (0..dim).any(|k| lo[k] >= hi[k]) {
            return Err(Error::EmptyRegion);
        }
        Ok(Region { dim, lo, hi, step })
    }

    /// Box `[lo, hi]` in every coordinate.
    pub fn cube(lo: f64, hi: f64, step: f64, dim: usize) -> Result<Self> {
        let corner = |c: f64| {
            if dim == 2 {
                Vector::xy(c, c)
            } else {
                Vector::new(c, c, c)
            }
        };
        Region::new(corner(lo), corner(hi), step, dim)
    }

    pub fn contains(&self, p: &Vector) -> bool {
        (0..self.dim).all(|k| p[k] >= self.lo[k] - 1e-12 && p[k] <= self.hi[k] + 1e-12)
    }

    fn intervals(&self, k: usize) -> (usize, bool) {
        let q = (self.hi[k] - self.lo[k]) / self.step;
        let n = (q + 1e-9).floor();
        (n as usize, (q - n).abs() <= 1e-9 * q.max(1.0))
    }

    /// Grid points per axis.
    pub fn shape(&self) -> Vec<usize> {
        (0..self.dim).map(|k| self.intervals(k).0 + 1).collect()
    }

    pub fn len(&self) -> usize {
        self.shape().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn coord(&self, k: usize, i: usize) -> f64 {
        let (n, exact) = self.intervals(k);
        if exact && n > 0 {
            // interpolating between the corners keeps symmetric grids symmetric
            let t = i as f64 / n as f64;
            self.lo[k] * (1.0 - t) + self.hi[k] * t
        } else {
            self.lo[k] + i as f64 * self.step
        }
    }

    /// Grid point with linear index `idx` (first axis fastest).
    pub fn point(&self, idx: usize) -> Vector {
        let shape = self.shape();
        let mut rest = idx;
        let mut p = Vector::ZERO;
        for k in 0..self.dim {
            p.0[k] = self.coord(k, rest % shape[k]);
            rest /= shape[k];
        }
        p
    }

    fn neighbor(&self, idx: usize, k: usize) -> Option<usize> {
        let shape = self.shape();
        let stride: usize = shape[..k].iter().product();
        let i = (idx / stride) % shape[k];
        (i + 1 < shape[k]).then_some(idx + stride)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MedialSample {
    pub point: Vector,
    pub distance: f64,
    pub multiplicity: usize,
    pub diameter: f64,
    /// Found by bisection along a grid edge rather than at a grid point.
    pub refined: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MedialCloud {
    pub scene: String,
    pub label: String,
    pub region: Region,
    pub step: f64,
    pub samples: Vec<MedialSample>,
}

impl MedialCloud {
    pub fn points(&self) -> Vec<Vector> {
        self.samples.iter().map(|s| s.point).collect()
    }

    pub fn dim(&self) -> usize {
        self.region.dim
    }

    /// CSV with columns `x,y[,z],distance,multiplicity,diameter,refined`.
    pub fn to_csv(&self) -> String {
        let axes = ["x", "y", "z"];
        let mut out = String::new();
        out.push_str(&axes[..self.dim()].join(","));
        out.push_str(",distance,multiplicity,diameter,refined\n");
        for s in &self.samples {
            for k in 0..self.dim() {
                out.push_str(&format!("{},", s.point[k]));
            }
            out.push_str(&format!("{},{},{},{}\n", s.distance, s.multiplicity, s.diameter, s.refined));
        }
        out
    }
}

fn is_medial(ns: &NearestSet, tol: &Tolerances) -> bool {
    ns.multiplicity >= 2 && ns.diameter >= tol.sep_tol && ns.distance > tol.eps_dist
}

/// Smallest distance between representatives of two nearest sets.
fn jump(a: &NearestSet, b: &NearestSet) -> f64 {
    let mut best = f64::INFINITY;
    for ca in &a.clusters {
        for cb in &b.clusters {
            best = best.min(ca.representative.dist(&cb.representative));
        }
    }
    best
}

fn sample_from(ns: &NearestSet, refined: bool) -> MedialSample {
    MedialSample {
        point: ns.query,
        distance: ns.distance,
        multiplicity: ns.multiplicity,
        diameter: ns.diameter,
        refined,
    }
}

/// Grid scan of a region for medial points.
///
/// Grid points whose nearest set is separated by at least `sep_tol` are
/// reported directly. Grid edges whose nearest sets jump by more than
/// `2·sep_tol` are bisected; a continuous motion of the nearest point is
/// dismissed as soon as the jump across the bracket falls below `sep_tol`,
/// and a genuine crossing is reported.
pub fn scan_medial<F: Field + ?Sized>(s: &F, r: &Region, tol: &Tolerances) -> Result<MedialCloud> {
    if r.dim != s.dim() {
        return Err(Error::Validation(format!("region is {}D, scene is {}D", r.dim, s.dim())));
    }
    if r.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let n = r.len();
    let sets: Vec<NearestSet> = (0..n).into_par_iter().map(|i| s.nearest_set(&r.point(i), tol)).collect();
    let medial: Vec<bool> = sets.iter().map(|ns| is_medial(ns, tol)).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for k in 0..r.dim {
            if let Some(j) = r.neighbor(i, k) {
                if !medial[i] && !medial[j] && jump(&sets[i], &sets[j]) > 2.0 * tol.sep_tol {
                    edges.push((i, j));
                }
            }
        }
    }
    let crossings: Vec<(usize, Option<MedialSample>)> = edges
        .par_iter()
        .map(|&(i, j)| {
            let hit = bisect_crossing(s, &sets[i], &sets[j], tol).ok().map(|c| c.sample(s, tol));
            (i, hit.filter(|smp| is_valid_sample(smp, tol)))
        })
        .collect();
    let mut samples = Vec::new();
    let mut c = 0;
    for i in 0..n {
        if medial[i] {
            samples.push(sample_from(&sets[i], false));
        }
        while c < crossings.len() && crossings[c].0 == i {
            if let Some(smp) = &crossings[c].1 {
                samples.push(smp.clone());
            }
            c += 1;
        }
    }
    Ok(MedialCloud {
        scene: s.name().to_string(),
        label: CLOUD_LABEL.to_string(),
        region: r.clone(),
        step: r.step,
        samples,
    })
}

fn is_valid_sample(smp: &MedialSample, tol: &Tolerances) -> bool {
    smp.multiplicity >= 2 && smp.diameter >= tol.sep_tol && smp.distance > tol.eps_dist
}

struct Crossing {
    point: Vector,
    lo: NearestSet,
    hi: NearestSet,
}

impl Crossing {
    fn sample<F: Field + ?Sized>(&self, s: &F, tol: &Tolerances) -> MedialSample {
        let here = s.nearest_set(&self.point, tol);
        if is_medial(&here, tol) {
            return sample_from(&here, true);
        }
        let members: Vec<Vector> =
            self.lo.clusters.iter().chain(&self.hi.clusters).flat_map(|c| c.members.iter().copied()).collect();
        let merged: Vec<Cluster> = single_linkage(&members, tol.eps_cluster);
        let ns = NearestSet::from_clusters(self.point, here.distance, merged, here.continuum);
        sample_from(&ns, true)
    }
}

fn bisect_crossing<F: Field + ?Sized>(s: &F, ns0: &NearestSet, ns1: &NearestSet, tol: &Tolerances) -> Result<Crossing> {
    if jump(ns0, ns1) <= tol.sep_tol {
        return Err(Error::NoCrossing);
    }
    let mut lo = ns0.clone();
    let mut hi = ns1.clone();
    for _ in 0..200 {
        if lo.query.dist(&hi.query) <= tol.eps_dist {
            break;
        }
        let mid = lo.query.lerp(&hi.query, 0.5);
        let nm = s.nearest_set(&mid, tol);
        if is_medial(&nm, tol) {
            return Ok(Crossing { point: mid, lo, hi });
        }
        if jump(&nm, &lo) <= jump(&nm, &hi) {
            lo = nm;
        } else {
            hi = nm;
        }
        if jump(&lo, &hi) <= tol.sep_tol {
            return Err(Error::NoCrossing);
        }
    }
    if jump(&lo, &hi) <= tol.sep_tol {
        return Err(Error::NoCrossing);
    }
    let p = lo.query.lerp(&hi.query, 0.5);
    let da = lo.representatives().iter().map(|q| q.dist(&p)).fold(f64::INFINITY, f64::min);
    let db = hi.representatives().iter().map(|q| q.dist(&p)).fold(f64::INFINITY, f64::min);
    if (da - db).abs() > 10.0 * tol.eps_dist * p.norm().max(1.0) {
        return Err(Error::NoCrossing);
    }
    Ok(Crossing { point: p, lo, hi })
}

/// Point of `[x0, x1]` where the nearest set switches between two clusters
/// separated by more than `sep_tol`.
pub fn refine_crossing<F: Field + ?Sized>(s: &F, x0: &Vector, x1: &Vector, tol: &Tolerances) -> Result<Vector> {
    let ns0 = s.nearest_set(x0, tol);
    let ns1 = s.nearest_set(x1, tol);
    bisect_crossing(s, &ns0, &ns1, tol).map(|c| c.point)
}

/// The offset `X^ε = {d ≤ ε}` seen through the distance function of X.
#[derive(Debug, Clone)]
pub struct OffsetView<'a, F: ?Sized> {
    pub base: &'a F,
    pub eps: f64,
    name: String,
}

pub fn offset_view<F: Field + ?Sized>(s: &F, eps: f64) -> Result<OffsetView<'_, F>> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::Validation(format!("offset radius must be positive, got {eps}")));
    }
    Ok(OffsetView { base: s, eps, name: format!("{}^{}", s.name(), eps) })
}

impl<F: Field + ?Sized> Field for OffsetView<'_, F> {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn name(&self) -> &str {
        &self.name
    }

    fn distance(&self, x: &Vector, tol: &Tolerances) -> f64 {
        (self.base.distance(x, tol) - self.eps).max(0.0)
    }

    fn nearest_set(&self, x: &Vector, tol: &Tolerances) -> NearestSet {
        self.shrink(x, self.base.nearest_set(x, tol), tol)
    }

    fn nearest_set_sampled(&self, x: &Vector, tol: &Tolerances, step: f64) -> NearestSet {
        self.shrink(x, self.base.nearest_set_sampled(x, tol, step), tol)
    }
}

impl<F: Field + ?Sized> OffsetView<'_, F> {
    /// Homothety of ratio `(d − ε)/d` centred at `x`.
    fn shrink(&self, x: &Vector, ns: NearestSet, tol: &Tolerances) -> NearestSet {
        if ns.distance <= self.eps {
            let own = Cluster { representative: *x, members: vec![*x] };
            return NearestSet::from_clusters(*x, 0.0, vec![own], false);
        }
        let ratio = (ns.distance - self.eps) / ns.distance;
        let members: Vec<Vector> =
            ns.clusters.iter().flat_map(|c| c.members.iter().map(|m| *x + (*m - *x) * ratio)).collect();
        let clusters = single_linkage(&members, tol.eps_cluster);
        NearestSet::from_clusters(*x, ns.distance - self.eps, clusters, ns.continuum)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OffsetMedialReport {
    pub eps: f64,
    pub base_samples: usize,
    pub offset_samples: usize,
    pub base_to_offset: f64,
    pub offset_to_base: f64,
    /// Samples of either cloud farther than `2·step` from the other cloud.
    pub discrepancies: Vec<Vector>,
    pub assertions: Vec<Assertion>,
}

/// Compares the medial cloud of the offset view with that of the scene,
/// both restricted to `{d > ε + sep_tol}`.
pub fn offset_medial_check<F: Field + ?Sized>(
    s: &F,
    eps: f64,
    r: &Region,
    tol: &Tolerances,
) -> Result<OffsetMedialReport> {
    let view = offset_view(s, eps)?;
    let floor = eps + tol.sep_tol;
    let base: Vec<Vector> =
        scan_medial(s, r, tol)?.samples.into_iter().filter(|m| m.distance > floor).map(|m| m.point).collect();
    let off: Vec<Vector> =
        scan_medial(&view, r, tol)?.samples.into_iter().filter(|m| m.distance + eps > floor).map(|m| m.point).collect();
    let bound = 2.0 * r.step;
    let far = |from: &[Vector], to: &[Vector]| -> Vec<Vector> {
        from.iter().filter(|p| to.iter().all(|q| q.dist(p) > bound)).copied().collect()
    };
    let mut discrepancies = far(&base, &off);
    discrepancies.extend(far(&off, &base));
    let base_to_offset = one_sided_hausdorff(&base, &off);
    let offset_to_base = one_sided_hausdorff(&off, &base);
    let assertions = vec![
        Assertion::holds("both clouds nonempty or both empty", base.is_empty() == off.is_empty()),
        Assertion::at_most("hausdorff base to offset", base_to_offset, bound),
        Assertion::at_most("hausdorff offset to base", offset_to_base, bound),
    ];
    Ok(OffsetMedialReport {
        eps,
        base_samples: base.len(),
        offset_samples: off.len(),
        base_to_offset,
        offset_to_base,
        discrepancies,
        assertions,
    })
}

/// Per-probe outcome of [`gamma_checks`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaProbe {
    pub probe: Vector,
    pub distance: f64,
    pub multiplicity: usize,
    pub lipschitz_ok: bool,
    pub segment_ok: bool,
    pub epigraph_multiplicities: Vec<usize>,
    pub epigraph_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaReport {
    pub probes: Vec<GammaProbe>,
    pub assertions: Vec<Assertion>,
}

pub const GAMMA_LIPSCHITZ_SAMPLES: usize = 32;
const SEGMENT_PARAMS: [f64; 3] = [0.25, 0.5, 0.75];

/// Heights `y < d(a)` at which the epigraph nearest set of `(a, y)` is tested,
/// as multiples of `d(a)`.
const EPIGRAPH_HEIGHTS: [f64; 4] = [-1.5, -0.5, 0.0, 0.5];

/// Checks the three properties of the graph `Γ = {(x, d(x))}` at each probe:
/// the Lipschitz cone misses Γ, segments from `(a, d(a))` to `(v, 0)` lie in Γ
/// for `v ∈ m(a)`, and the epigraph nearest set over `a` has the same number
/// of points as `m(a)`.
pub fn gamma_checks<F: Field + ?Sized>(s: &F, probes: &[Vector], tol: &Tolerances) -> Result<GammaReport> {
    for a in probes {
        if s.distance(a, tol) <= tol.eps_dist {
            return Err(Error::ProbeOnX(a.to_string()));
        }
    }
    let out: Vec<(GammaProbe, Vec<Assertion>)> =
        probes.par_iter().enumerate().map(|(i, a)| gamma_probe(s, a, i as u64, tol)).collect();
    let mut report = GammaReport { probes: Vec::new(), assertions: Vec::new() };
    for (p, a) in out {
        report.probes.push(p);
        report.assertions.extend(a);
    }
    Ok(report)
}

fn gamma_probe<F: Field + ?Sized>(s: &F, a: &Vector, index: u64, tol: &Tolerances) -> (GammaProbe, Vec<Assertion>) {
    let ns = s.nearest_set(a, tol);
    let d = ns.distance;
    let mut assertions = Vec::new();

    // (1) Lipschitz cone
    let radius = (2.0 * d).max(1.0);
    let mut worst: f64 = f64::NEG_INFINITY;
    for x in halton_ball(*a, radius, s.dim(), GAMMA_LIPSCHITZ_SAMPLES, tol.seed.wrapping_add(index)) {
        worst = worst.max((s.distance(&x, tol) - d).abs() - x.dist(a));
    }
    let lipschitz_ok = worst <= tol.eps_dist;
    assertions.push(Assertion::at_most(format!("lipschitz cone at {a}"), worst, tol.eps_dist));

    // (2) segments toward nearest points
    let mut segment_ok = true;
    for v in ns.representatives() {
        for t in SEGMENT_PARAMS {
            let p = v * t + *a * (1.0 - t);
            let here = s.nearest_set(&p, tol);
            let dist_ok = (here.distance - (1.0 - t) * d).abs() <= tol.eps_dist;
            let single = here.multiplicity == 1 && here.touches(&v, tol.eps_cluster);
            segment_ok &= dist_ok && single;
        }
    }
    assertions.push(Assertion::holds(format!("segments in graph at {a}"), segment_ok));

    // (3) epigraph nearest set over the probe
    let gamma_pts: Vec<(Vector, f64)> = halton_ball(*a, radius, s.dim(), 64, tol.seed.wrapping_add(index))
        .into_iter()
        .map(|x| (x, s.distance(&x, tol)))
        .collect();
    let reps = ns.representatives();
    let mut epigraph_multiplicities = Vec::new();
    let mut epigraph_ok = true;
    for h in EPIGRAPH_HEIGHTS {
        let y = h * d;
        let (ratio, height) = if y <= -d { (1.0, 0.0) } else { ((d - y) / (2.0 * d), (d + y) / 2.0) };
        let feet: Vec<Vector> = reps.iter().map(|v| *a + (*v - *a) * ratio).collect();
        let gap = |q: &Vector, qy: f64| ((*a - *q).norm_sq() + (y - qy).powi(2)).sqrt();
        let delta = gap(&feet[0], height);
        let scale = tol.eps_dist * d.max(1.0);
        let equidistant = feet.iter().all(|q| (gap(q, height) - delta).abs() <= scale);
        let on_graph = feet.iter().all(|q| (s.distance(q, tol) - height).abs() <= tol.eps_dist);
        let minimal = gamma_pts.iter().all(|(x, dx)| gap(x, *dx) >= delta - scale);
        let mult = single_linkage(&feet, tol.eps_cluster * ratio).len();
        epigraph_multiplicities.push(mult);
        epigraph_ok &= equidistant && on_graph && minimal && mult == ns.multiplicity;
    }
    assertions.push(Assertion::holds(format!("epigraph nearest set at {a}"), epigraph_ok));

    let probe = GammaProbe {
        probe: *a,
        distance: d,
        multiplicity: ns.multiplicity,
        lipschitz_ok,
        segment_ok,
        epigraph_multiplicities,
        epigraph_ok,
    };
    (probe, assertions)
}

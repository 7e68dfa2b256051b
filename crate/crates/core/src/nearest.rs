//! The distance function and the nearest-point multifunction of a scene.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{angular_hausdorff, halton_ball, Tolerances, Vector};
use crate::scene::{Scene, CONTINUUM_STEP};

/// Hard cap on the number of clusters kept for continuum nearest sets.
pub const MAX_CLUSTERS: usize = 64;

/// Step used to confirm that a candidate direction is a proximal normal.
pub const NORMAL_PROBE_STEP: f64 = 1e-4;

/// Angular resolution used to deduplicate sampled normal fans.
pub const FAN_RESOLUTION: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cluster {
    pub representative: Vector,
    pub members: Vec<Vector>,
}

/// `d(x)` together with a clustered sample of `m(x)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NearestSet {
    pub query: Vector,
    pub distance: f64,
    pub clusters: Vec<Cluster>,
    pub multiplicity: usize,
    /// Largest distance between two cluster representatives.
    pub diameter: f64,
    /// Some primitive returned a curve or surface of minimizers.
    pub continuum: bool,
}

impl NearestSet {
    pub fn from_clusters(query: Vector, distance: f64, clusters: Vec<Cluster>, continuum: bool) -> Self {
        let mut diameter: f64 = 0.0;
        for i in 0..clusters.len() {
            for j in i + 1..clusters.len() {
                diameter = diameter.max(clusters[i].representative.dist(&clusters[j].representative));
            }
        }
        NearestSet { query, distance, multiplicity: clusters.len(), clusters, diameter, continuum }
    }

    pub fn representatives(&self) -> Vec<Vector> {
        self.clusters.iter().map(|c| c.representative).collect()
    }

    /// Whether some member of some cluster is within `radius` of `p`.
    pub fn touches(&self, p: &Vector, radius: f64) -> bool {
        self.clusters.iter().any(|c| c.members.iter().any(|m| m.dist(p) <= radius))
    }

    /// Smallest distance from `p` to a cluster member.
    pub fn gap_to(&self, p: &Vector) -> f64 {
        self.clusters.iter().flat_map(|c| c.members.iter()).map(|m| m.dist(p)).fold(f64::INFINITY, f64::min)
    }

    /// Unit directions from the query toward each cluster representative.
    pub fn directions(&self) -> Vec<Vector> {
        self.clusters.iter().filter_map(|c| (c.representative - self.query).normalized()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FanKind {
    ExactAtPoint,
    LimitingWithRadius { eta: f64 },
}

/// A sample of unit normal directions at a base point of X.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalFan {
    pub base: Vector,
    pub directions: Vec<Vector>,
    pub kind: FanKind,
}

/// A closed set known through its distance function and nearest-point map.
pub trait Field: Sync {
    fn dim(&self) -> usize;
    fn name(&self) -> &str;
    fn distance(&self, x: &Vector, tol: &Tolerances) -> f64;
    fn nearest_set(&self, x: &Vector, tol: &Tolerances) -> NearestSet;

    /// Nearest set with continua sampled every `step` radians.
    fn nearest_set_sampled(&self, x: &Vector, tol: &Tolerances, step: f64) -> NearestSet {
        let _ = step;
        self.nearest_set(x, tol)
    }
}

impl Field for Scene {
    fn dim(&self) -> usize {
        self.dim
    }

    fn name(&self) -> &str {
        &self.name
    }

    fn distance(&self, x: &Vector, tol: &Tolerances) -> f64 {
        Scene::distance(self, x, tol)
    }

    fn nearest_set(&self, x: &Vector, tol: &Tolerances) -> NearestSet {
        nearest_set(self, x, tol)
    }

    fn nearest_set_sampled(&self, x: &Vector, tol: &Tolerances, step: f64) -> NearestSet {
        nearest_set_sampled(self, x, tol, step)
    }
}

/// `d(x, X)`.
pub fn distance(s: &Scene, x: &Vector, tol: &Tolerances) -> f64 {
    s.distance(x, tol)
}

/// Clustered nearest-point set of `x`.
pub fn nearest_set(s: &Scene, x: &Vector, tol: &Tolerances) -> NearestSet {
    nearest_set_sampled(s, x, tol, CONTINUUM_STEP)
}

/// Nearest-point set with continua sampled every `step` radians. Below the
/// default step the cluster cap is lifted.
pub fn nearest_set_sampled(s: &Scene, x: &Vector, tol: &Tolerances, step: f64) -> NearestSet {
    let projections: Vec<_> = s.primitives.iter().map(|p| p.nearest_sampled(x, tol, step)).collect();
    let distance = projections.iter().map(|p| p.distance).fold(f64::INFINITY, f64::min);
    let mut points = Vec::new();
    let mut continuum = false;
    for p in &projections {
        if p.distance <= distance + tol.eps_dist {
            continuum |= p.continuum;
            points.extend(p.reps.iter().copied());
        }
    }
    let mut clusters = single_linkage(&points, tol.eps_cluster);
    if step >= CONTINUUM_STEP && clusters.len() > MAX_CLUSTERS {
        clusters.truncate(MAX_CLUSTERS);
        continuum = true;
    }
    NearestSet::from_clusters(*x, distance, clusters, continuum)
}

/// Single-linkage clustering; points at distance exactly `radius` merge.
pub(crate) fn single_linkage(points: &[Vector], radius: f64) -> Vec<Cluster> {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if points[i].dist(&points[j]) <= radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[b.max(a)] = a.min(b);
                }
            }
        }
    }
    let mut order: Vec<usize> = Vec::new();
    let mut groups: Vec<Vec<Vector>> = Vec::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        match order.iter().position(|&r| r == root) {
            Some(k) => groups[k].push(points[i]),
            None => {
                order.push(root);
                groups.push(vec![points[i]]);
            }
        }
    }
    groups.into_iter().map(|members| Cluster { representative: members[0], members }).collect()
}

/// Whether `a` is a nearest point of `a + t v`: the distance there equals `t`
/// and some nearest cluster is within `eps_cluster` of `a`.
pub fn is_nearest_along<F: Field + ?Sized>(s: &F, a: &Vector, v: &Vector, t: f64, tol: &Tolerances) -> bool {
    let y = *a + *v * t;
    let ns = s.nearest_set(&y, tol);
    ns.distance >= t - tol.eps_dist * t.max(1.0) && ns.touches(a, tol.eps_cluster)
}

fn require_on_x(s: &Scene, a: &Vector, tol: &Tolerances) -> Result<()> {
    let d = s.distance(a, tol);
    if d <= tol.eps_dist * a.norm().max(1.0) {
        Ok(())
    } else {
        Err(Error::NotOnX(a.to_string()))
    }
}

fn push_unique(dirs: &mut Vec<Vector>, v: Vector, resolution: f64) {
    if !dirs.iter().any(|w| w.angle(&v) <= resolution) {
        dirs.push(v);
    }
}

/// Normal directions at a point of X.
///
/// Candidates come from every primitive through `a`; a candidate is kept
/// when `a` stays a nearest point of `a + h v` for `h = NORMAL_PROBE_STEP`,
/// which removes directions that another primitive blocks at junctions.
pub fn normal_directions(s: &Scene, a: &Vector, tol: &Tolerances) -> Result<NormalFan> {
    require_on_x(s, a, tol)?;
    let mut cands = Vec::new();
    for p in s.primitives_at(a, tol) {
        for v in p.normals(a, s.dim, tol)? {
            push_unique(&mut cands, v, 1e-9);
        }
    }
    let directions = cands.into_iter().filter(|v| is_nearest_along(s, a, v, NORMAL_PROBE_STEP, tol)).collect();
    Ok(NormalFan { base: *a, directions, kind: FanKind::ExactAtPoint })
}

/// Deterministic sample of `X ∩ B(a, eta) \ {a}` with `min_count` points
/// when the local piece of X allows it.
pub fn sample_near(s: &Scene, a: &Vector, eta: f64, min_count: usize, tol: &Tolerances) -> Vec<Vector> {
    let mut out: Vec<Vector> = Vec::new();
    let mut count = 2 * min_count.max(16);
    while count <= 1 << 14 {
        out.clear();
        for q in halton_ball(*a, eta, s.dim, count, tol.seed) {
            for p in &s.primitives {
                for r in p.nearest(&q, tol).reps {
                    let d = r.dist(a);
                    if d <= eta && d > 1e-12 && !out.iter().any(|o| o.dist(&r) <= 1e-9) {
                        out.push(r);
                    }
                }
            }
        }
        if out.len() >= min_count {
            out.truncate(min_count);
            break;
        }
        count *= 4;
    }
    out
}

/// Union of the normal fans of points of X within `eta` of `a`, plus `V_a`.
pub fn limiting_normals(s: &Scene, a: &Vector, eta: f64, tol: &Tolerances) -> Result<NormalFan> {
    if !(eta > 0.0) {
        return Err(Error::Validation(format!("eta must be positive, got {eta}")));
    }
    let exact = normal_directions(s, a, tol)?;
    let mut directions = exact.directions.clone();
    let samples = sample_near(s, a, eta, 64, tol);
    let fans: Vec<Vec<Vector>> = {
        use rayon::prelude::*;
        samples.par_iter().map(|x| normal_directions(s, x, tol).map(|f| f.directions).unwrap_or_default()).collect()
    };
    for fan in fans {
        for v in fan {
            push_unique(&mut directions, v, FAN_RESOLUTION);
        }
    }
    Ok(NormalFan { base: *a, directions, kind: FanKind::LimitingWithRadius { eta } })
}

/// Limiting fans for a decreasing schedule of radii.
pub fn limiting_normals_sequence(s: &Scene, a: &Vector, etas: &[f64], tol: &Tolerances) -> Result<Vec<NormalFan>> {
    etas.iter().map(|&eta| limiting_normals(s, a, eta, tol)).collect()
}

/// Whether the last three fans of a sequence differ pairwise by less than
/// `1e-2` in angular Hausdorff distance.
pub fn fan_stabilized(fans: &[NormalFan]) -> bool {
    fans.len() >= 3
        && fans[fans.len() - 3..].windows(2).all(|w| angular_hausdorff(&w[0].directions, &w[1].directions) < 1e-2)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityViolation {
    pub probe: Vector,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityReport {
    pub base: Vector,
    pub checks: usize,
    pub violations: Vec<ConvexityViolation>,
}

/// Checks that convex combinations of points having `a` as a nearest point
/// still have `a` as a nearest point.
pub fn normal_set_probe(s: &Scene, a: &Vector, witnesses: &[Vector], tol: &Tolerances) -> Result<ConvexityReport> {
    let has_a = |x: &Vector| {
        let ns = nearest_set(s, x, tol);
        let ok = ns.touches(a, tol.eps_cluster) && (x.dist(a) - ns.distance).abs() <= tol.eps_cluster;
        (ok, ns.gap_to(a))
    };
    for w in witnesses {
        if !has_a(w).0 {
            return Err(Error::BadWitness(w.to_string()));
        }
    }
    let mut checks = 0;
    let mut violations = Vec::new();
    for i in 0..witnesses.len() {
        for j in i + 1..witnesses.len() {
            for t in [0.25, 0.5, 0.75] {
                let p = witnesses[i] * t + witnesses[j] * (1.0 - t);
                checks += 1;
                let (ok, gap) = has_a(&p);
                if !ok {
                    violations.push(ConvexityViolation { probe: p, gap });
                }
            }
        }
    }
    Ok(ConvexityReport { base: *a, checks, violations })
}

/// Offsets `1e-4 · 2^-k` of the approach sequences used by [`usc_probe`].
pub const USC_STEPS: std::ops::RangeInclusive<i32> = 4..=10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UscViolation {
    pub base: Vector,
    pub near: Vector,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UscReport {
    pub bases: usize,
    pub checks: usize,
    pub violations: Vec<UscViolation>,
}

/// Upper semicontinuity of `m` at each base: along sequences `x_k → x_0`,
/// every cluster of `m(x_k)` lies within `10·eps_cluster` of `m(x_0)`.
pub fn usc_probe(s: &Scene, bases: &[Vector], tol: &Tolerances) -> UscReport {
    use rayon::prelude::*;
    let bound = 10.0 * tol.eps_cluster;
    let dirs = crate::geom::unit_directions(s.dim, if s.dim == 2 { 8 } else { 14 });
    let per_base: Vec<(usize, Vec<UscViolation>)> = bases
        .par_iter()
        .map(|x0| {
            let m0 = nearest_set(s, x0, tol);
            let mut checks = 0;
            let mut bad = Vec::new();
            for u in &dirs {
                for k in USC_STEPS {
                    let xk = *x0 + *u * (1e-4 * 2f64.powi(-k));
                    for c in nearest_set(s, &xk, tol).clusters {
                        checks += 1;
                        let gap = m0.gap_to(&c.representative);
                        if gap > bound {
                            bad.push(UscViolation { base: *x0, near: xk, gap });
                        }
                    }
                }
            }
            (checks, bad)
        })
        .collect();
    UscReport {
        bases: bases.len(),
        checks: per_base.iter().map(|p| p.0).sum(),
        violations: per_base.into_iter().flat_map(|p| p.1).collect(),
    }
}

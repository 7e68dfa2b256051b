use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::geom::{circle_in_plane, sphere_directions, unit_directions, Tolerances, Vector};

use super::spline::Spline;
use super::trim::{is_kept, Region};

/// Angular spacing of representatives sampled on a continuum of minimizers.
pub const CONTINUUM_STEP: f64 = 0.4;

/// Normal-circle sample count for curves embedded in R³.
pub const CURVE_NORMAL_SAMPLES: usize = 16;

/// Result of a nearest-point query against one primitive.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub distance: f64,
    pub reps: Vec<Vector>,
    /// The minimizers form a curve or surface; `reps` is a spread sample.
    pub continuum: bool,
}

impl Projection {
    fn single(x: &Vector, p: Vector) -> Self {
        Projection { distance: x.dist(&p), reps: vec![p], continuum: false }
    }

    fn empty() -> Self {
        Projection { distance: f64::INFINITY, reps: Vec::new(), continuum: false }
    }

    fn from_candidates(x: &Vector, cands: impl IntoIterator<Item = Vector>, eps: f64) -> Self {
        let scored: Vec<(f64, Vector)> = cands.into_iter().map(|p| (x.dist(&p), p)).collect();
        let best = scored.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
        let mut reps: Vec<Vector> = Vec::new();
        for (d, p) in scored {
            if d <= best + eps && !reps.iter().any(|r| r.dist(&p) <= 1e-12) {
                reps.push(p);
            }
        }
        Projection { distance: best, reps, continuum: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Line {
    pub point: Vector,
    /// Unit direction.
    pub dir: Vector,
    pub t_min: f64,
    pub t_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Arc {
    pub center: Vector,
    pub radius: f64,
    /// Orthonormal frame of the carrier plane; angle 0 lies along `e1`.
    pub e1: Vector,
    pub e2: Vector,
    pub start: f64,
    /// Angular extent in `(0, 2π]`.
    pub sweep: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpherePatch {
    pub center: Vector,
    pub radius: f64,
    pub(crate) exclude: Vec<Region>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CylinderPatch {
    pub axis_point: Vector,
    /// Unit axis direction.
    pub axis_dir: Vector,
    pub radius: f64,
    pub h_min: f64,
    pub h_max: f64,
    /// Includes the axial bounds translated into half-space exclusions.
    pub(crate) exclude: Vec<Region>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanePatch {
    pub point: Vector,
    /// Unit normal.
    pub normal: Vector,
    pub e1: Vector,
    pub e2: Vector,
    /// Polygon vertices in the `(e1, e2)` frame anchored at `point`.
    pub polygon: Vec<[f64; 2]>,
}

/// A closed piece of the scene with certified nearest-point queries.
#[derive(Debug, Clone, PartialEq)]
pub enum Primitive {
    PointSet(Vec<Vector>),
    Segment(Vector, Vector),
    Line(Line),
    Arc(Arc),
    SpherePatch(SpherePatch),
    CylinderPatch(CylinderPatch),
    PlanePatch(PlanePatch),
    SampledCurve(Spline),
}

impl Primitive {
    pub fn kind(&self) -> &'static str {
        match self {
            Primitive::PointSet(_) => "point_set",
            Primitive::Segment(..) => "segment",
            Primitive::Line(_) => "line",
            Primitive::Arc(_) => "arc",
            Primitive::SpherePatch(_) => "sphere_patch",
            Primitive::CylinderPatch(_) => "cylinder_patch",
            Primitive::PlanePatch(_) => "plane_patch",
            Primitive::SampledCurve(_) => "sampled_curve",
        }
    }

    /// Distance from `x` and a sample of the minimizers.
    pub fn nearest(&self, x: &Vector, tol: &Tolerances) -> Projection {
        self.nearest_sampled(x, tol, CONTINUUM_STEP)
    }

    /// As [`Primitive::nearest`], with curves or surfaces of minimizers
    /// sampled every `step` radians.
    pub fn nearest_sampled(&self, x: &Vector, tol: &Tolerances, step: f64) -> Projection {
        let eps = tol.eps_dist;
        match self {
            Primitive::PointSet(points) => Projection::from_candidates(x, points.iter().copied(), eps),
            Primitive::Segment(a, b) => Projection::single(x, project_on_segment(x, a, b)),
            Primitive::Line(l) => {
                let t = (*x - l.point).dot(&l.dir).clamp(l.t_min, l.t_max);
                Projection::single(x, l.point + l.dir * t)
            }
            Primitive::Arc(arc) => arc.nearest(x, eps, step),
            Primitive::SpherePatch(s) => s.nearest(x, eps, step),
            Primitive::CylinderPatch(c) => c.nearest(x, eps, step),
            Primitive::PlanePatch(p) => p.nearest(x, eps),
            Primitive::SampledCurve(s) => {
                let cands = s.nearest_candidates(x).into_iter().map(|t| s.point(t));
                Projection::from_candidates(x, cands, eps)
            }
        }
    }

    /// Whether `a` lies on the primitive within `eps_dist` (relative to |a|).
    pub fn contains(&self, a: &Vector, tol: &Tolerances) -> bool {
        self.nearest(a, tol).distance <= on_tolerance(a, tol)
    }

    /// Sample of unit normal directions at a point `a` of the primitive.
    ///
    /// Curves and isolated points contribute their full normal cone; surface
    /// patches contribute the two directions of their carrier's normal line.
    pub fn normals(&self, a: &Vector, dim: usize, tol: &Tolerances) -> Result<Vec<Vector>> {
        if !self.contains(a, tol) {
            return Err(Error::OffPrimitive(a.to_string()));
        }
        let end_tol = 10.0 * on_tolerance(a, tol);
        let dirs = match self {
            Primitive::PointSet(_) => unit_directions(dim, if dim == 2 { 32 } else { 64 }),
            Primitive::Segment(p, q) => {
                let t = (*q - *p).normalized().expect("validated segment");
                let end = if a.dist(p) <= end_tol {
                    Some(-t)
                } else if a.dist(q) <= end_tol {
                    Some(t)
                } else {
                    None
                };
                curve_normals(t, end, dim, None)
            }
            Primitive::Line(l) => {
                let s = (*a - l.point).dot(&l.dir);
                let end = if (s - l.t_min).abs() <= end_tol {
                    Some(-l.dir)
                } else if (s - l.t_max).abs() <= end_tol {
                    Some(l.dir)
                } else {
                    None
                };
                curve_normals(l.dir, end, dim, None)
            }
            Primitive::Arc(arc) => {
                let q = *a - arc.center;
                let phi = q.dot(&arc.e2).atan2(q.dot(&arc.e1));
                let tangent = arc.e2 * phi.cos() - arc.e1 * phi.sin();
                let inward = -(arc.e1 * phi.cos() + arc.e2 * phi.sin());
                let mut end = None;
                if arc.sweep < TAU {
                    let p0 = arc.point_at(arc.start);
                    let p1 = arc.point_at(arc.start + arc.sweep);
                    if a.dist(&p0) <= end_tol {
                        end = Some(-arc.tangent_at(arc.start));
                    } else if a.dist(&p1) <= end_tol {
                        end = Some(arc.tangent_at(arc.start + arc.sweep));
                    }
                }
                curve_normals(tangent, end, dim, Some(inward))
            }
            Primitive::SpherePatch(s) => {
                let n = (*a - s.center).normalized().expect("point on sphere");
                vec![n, -n]
            }
            Primitive::CylinderPatch(c) => {
                let q = *a - c.axis_point;
                let n = (q - c.axis_dir * q.dot(&c.axis_dir)).normalized().expect("point on cylinder");
                vec![n, -n]
            }
            Primitive::PlanePatch(p) => vec![p.normal, -p.normal],
            Primitive::SampledCurve(s) => {
                let t = s
                    .nearest_candidates(a)
                    .into_iter()
                    .min_by(|u, v| a.dist(&s.point(*u)).total_cmp(&a.dist(&s.point(*v))))
                    .unwrap_or(0.0);
                let (_, d, dd) = s.eval(t);
                let tangent = d.normalized().unwrap_or(Vector::xy(1.0, 0.0));
                let end = if t <= 1e-9 {
                    Some(-tangent)
                } else if t >= s.max_param() - 1e-9 {
                    Some(tangent)
                } else {
                    None
                };
                let curv = dd - tangent * dd.dot(&tangent);
                curve_normals(tangent, end, dim, curv.normalized())
            }
        };
        Ok(dirs)
    }

    /// Whether `a` is an interior point of a C²-smooth piece of the
    /// primitive (away from curve ends and trim boundaries).
    pub fn is_regular_at(&self, a: &Vector, tol: &Tolerances) -> bool {
        let margin = 1e-6;
        match self {
            Primitive::PointSet(_) => true,
            Primitive::Segment(p, q) => a.dist(p) > margin && a.dist(q) > margin,
            Primitive::Line(l) => {
                let s = (*a - l.point).dot(&l.dir);
                s - l.t_min > margin && l.t_max - s > margin
            }
            Primitive::Arc(arc) => {
                arc.sweep >= TAU
                    || (a.dist(&arc.point_at(arc.start)) > margin
                        && a.dist(&arc.point_at(arc.start + arc.sweep)) > margin)
            }
            Primitive::SpherePatch(s) => strictly_kept(&s.exclude, a, margin),
            Primitive::CylinderPatch(c) => strictly_kept(&c.exclude, a, margin),
            Primitive::PlanePatch(p) => {
                let q = *a - p.point;
                let uv = [q.dot(&p.e1), q.dot(&p.e2)];
                point_in_polygon(uv, &p.polygon) && polygon_boundary_distance(uv, &p.polygon) > margin
            }
            Primitive::SampledCurve(s) => {
                let pts = s.points();
                let _ = tol;
                a.dist(&pts[0]) > margin && a.dist(&pts[pts.len() - 1]) > margin
            }
        }
    }
}

pub(crate) fn on_tolerance(a: &Vector, tol: &Tolerances) -> f64 {
    tol.eps_dist * a.norm().max(1.0)
}

fn strictly_kept(regions: &[Region], p: &Vector, margin: f64) -> bool {
    regions.iter().all(|r| r.iter().any(|c| c.value(p) > margin))
}

fn project_on_segment(x: &Vector, a: &Vector, b: &Vector) -> Vector {
    let ab = *b - *a;
    let t = ((*x - *a).dot(&ab) / ab.norm_sq()).clamp(0.0, 1.0);
    *a + ab * t
}

/// Normal directions of a curve with unit tangent `t`. At a curve end,
/// `end_out` is the outward tangent and the normal cone is the closed
/// half-space `{v · end_out ≥ 0}`.
fn curve_normals(t: Vector, end_out: Option<Vector>, dim: usize, hint: Option<Vector>) -> Vec<Vector> {
    if dim == 2 {
        let perp = Vector::xy(-t.y(), t.x());
        return match end_out {
            None => vec![perp, -perp],
            Some(out) => {
                let side = Vector::xy(-out.y(), out.x());
                (0..=16)
                    .map(|k| {
                        let ang = -PI / 2.0 + PI * k as f64 / 16.0;
                        out * ang.cos() + side * ang.sin()
                    })
                    .collect()
            }
        };
    }
    let e1 = hint.and_then(|h| (h - t * h.dot(&t)).normalized()).unwrap_or_else(|| t.any_orthogonal());
    let e2 = t.cross(&e1);
    let mut dirs = circle_in_plane(e1, e2, CURVE_NORMAL_SAMPLES);
    if let Some(out) = end_out {
        dirs.push(out);
        dirs.extend(sphere_directions(128).into_iter().filter(|v| v.dot(&out) > 0.0));
    }
    dirs
}

/// Spread sample of the angles of `[start, start + sweep]`.
fn continuum_angles(start: f64, sweep: f64, step: f64) -> Vec<f64> {
    if sweep >= TAU {
        let n = (TAU / step).ceil() as usize;
        (0..n).map(|k| start + TAU * k as f64 / n as f64).collect()
    } else {
        let n = ((sweep / step).ceil() as usize).max(1);
        (0..=n).map(|k| start + sweep * k as f64 / n as f64).collect()
    }
}

impl Arc {
    pub fn point_at(&self, theta: f64) -> Vector {
        self.center + (self.e1 * theta.cos() + self.e2 * theta.sin()) * self.radius
    }

    fn tangent_at(&self, theta: f64) -> Vector {
        self.e2 * theta.cos() - self.e1 * theta.sin()
    }

    pub fn in_range(&self, phi: f64) -> bool {
        self.sweep >= TAU || (phi - self.start).rem_euclid(TAU) <= self.sweep
    }

    fn nearest(&self, x: &Vector, eps: f64, step: f64) -> Projection {
        let q = *x - self.center;
        let (u, w) = (q.dot(&self.e1), q.dot(&self.e2));
        let rho = u.hypot(w);
        if 2.0 * self.radius * rho <= eps {
            // every arc point is a minimizer up to eps
            let reps: Vec<Vector> =
                continuum_angles(self.start, self.sweep, step).into_iter().map(|t| self.point_at(t)).collect();
            let h = q - self.e1 * u - self.e2 * w;
            let distance = (self.radius * self.radius + h.norm_sq()).sqrt();
            return Projection { distance, reps, continuum: true };
        }
        let phi = w.atan2(u);
        if self.in_range(phi) {
            return Projection::single(x, self.point_at(phi));
        }
        let ends = [self.point_at(self.start), self.point_at(self.start + self.sweep)];
        Projection::from_candidates(x, ends, eps)
    }
}

const META_GRID: usize = 64;
const LINE_GRID: usize = 64;
const BISECT_ITERS: usize = 60;
const COARSE_WIDTH: f64 = 1e-7;
const FINE_WIDTH: f64 = 1e-12;
const GOLDEN_WIDTH: f64 = 1e-11;

impl SpherePatch {
    fn nearest(&self, x: &Vector, eps: f64, step: f64) -> Projection {
        let q = *x - self.center;
        let rho = q.norm();
        let r = self.radius;
        if 2.0 * r * rho <= eps {
            let count = ((8.0 * PI / (step * step)) as usize).max(4096);
            let kept: Vec<Vector> = sphere_directions(count)
                .into_iter()
                .map(|u| self.center + u * r)
                .filter(|p| is_kept(&self.exclude, p))
                .collect();
            if kept.is_empty() {
                return Projection::empty();
            }
            let reps = spread_subset(&kept, continuum_cap(step), step * r);
            return Projection { distance: r, reps, continuum: true };
        }
        let axis = q / rho;
        let proj = self.center + axis * r;
        if is_kept(&self.exclude, &proj) {
            return Projection::single(x, proj);
        }
        // Distance grows with the polar angle measured from the projection,
        // so along each meridian the minimizer is the first kept point.
        let e1 = axis.any_orthogonal();
        let e2 = axis.cross(&e1);
        let point = |theta: f64, phi: f64| {
            self.center + (axis * theta.cos() + (e1 * phi.cos() + e2 * phi.sin()) * theta.sin()) * r
        };
        let first_kept = |phi: f64, width: f64| -> f64 {
            let mut prev = 0.0;
            for k in 1..=LINE_GRID {
                let th = PI * k as f64 / LINE_GRID as f64;
                if is_kept(&self.exclude, &point(th, phi)) {
                    return bisect_boundary(prev, th, width, |t| is_kept(&self.exclude, &point(t, phi)));
                }
                prev = th;
            }
            f64::INFINITY
        };
        let minima =
            periodic_minimize(|phi| first_kept(phi, COARSE_WIDTH), |phi| first_kept(phi, FINE_WIDTH), META_GRID);
        let cands = minima.into_iter().map(|(phi, th)| point(th, phi));
        Projection::from_candidates(x, cands, eps)
    }
}

impl CylinderPatch {
    fn nearest(&self, x: &Vector, eps: f64, step: f64) -> Projection {
        let d = self.axis_dir;
        let q = *x - self.axis_point;
        let h = q.dot(&d);
        let radial = q - d * h;
        let rho = radial.norm();
        let r = self.radius;
        let base = self.axis_point + d * h;
        if 2.0 * r * rho <= eps {
            let e1 = d.any_orthogonal();
            let e2 = d.cross(&e1);
            let ring: Vec<Vector> = (0..720)
                .map(|k| {
                    let t = TAU * k as f64 / 720.0;
                    base + (e1 * t.cos() + e2 * t.sin()) * r
                })
                .collect();
            if let Some(reps) = kept_runs_sample(&ring, |p| is_kept(&self.exclude, p), step, r) {
                return Projection { distance: r, reps, continuum: true };
            }
        }
        let e1 = radial.normalized().unwrap_or_else(|| d.any_orthogonal());
        let e2 = d.cross(&e1);
        let point = |dh: f64, alpha: f64| base + d * dh + (e1 * alpha.cos() + e2 * alpha.sin()) * r;
        let proj = point(0.0, 0.0);
        if is_kept(&self.exclude, &proj) {
            return Projection::single(x, proj);
        }
        // For a fixed angle the distance grows with |Δh|: find the kept point
        // closest to the query height, then minimize over the angle.
        let step = r / 32.0;
        let nearest_offset = |alpha: f64, width: f64| -> f64 {
            let kept = |dh: f64| is_kept(&self.exclude, &point(dh, alpha));
            if kept(0.0) {
                return 0.0;
            }
            let mut prev = 0.0;
            let mut cur = step;
            let limit = 1e3 * r.max(rho);
            while cur <= limit {
                for sign in [1.0, -1.0] {
                    if kept(sign * cur) {
                        let t = bisect_boundary(prev, cur, width, |s| kept(sign * s));
                        let other = -sign;
                        // the opposite side may also hit within the bracket
                        if kept(other * cur) {
                            let t2 = bisect_boundary(prev, cur, width, |s| kept(other * s));
                            if t2 < t {
                                return other * t2;
                            }
                        }
                        return sign * t;
                    }
                }
                prev = cur;
                cur = if cur < 4.0 * r { cur + step } else { cur * 1.25 };
            }
            f64::INFINITY
        };
        let cost = |alpha: f64, width: f64| {
            let dh = nearest_offset(alpha, width);
            if dh.is_finite() {
                dh * dh - 2.0 * r * rho * alpha.cos()
            } else {
                f64::INFINITY
            }
        };
        let minima = periodic_minimize(|a| cost(a, COARSE_WIDTH), |a| cost(a, FINE_WIDTH), META_GRID);
        let cands = minima
            .into_iter()
            .filter_map(|(alpha, c)| c.is_finite().then(|| point(nearest_offset(alpha, FINE_WIDTH), alpha)));
        Projection::from_candidates(x, cands, eps)
    }
}

impl PlanePatch {
    fn nearest(&self, x: &Vector, eps: f64) -> Projection {
        let q = *x - self.point;
        let uv = [q.dot(&self.e1), q.dot(&self.e2)];
        let to_world = |c: [f64; 2]| self.point + self.e1 * c[0] + self.e2 * c[1];
        if point_in_polygon(uv, &self.polygon) {
            return Projection::single(x, to_world(uv));
        }
        let n = self.polygon.len();
        let cands = (0..n).map(|i| {
            let a = to_world(self.polygon[i]);
            let b = to_world(self.polygon[(i + 1) % n]);
            project_on_segment(x, &a, &b)
        });
        Projection::from_candidates(x, cands, eps)
    }
}

fn point_in_polygon(p: [f64; 2], poly: &[[f64; 2]]) -> bool {
    if polygon_boundary_distance(p, poly) <= 1e-12 {
        return true;
    }
    let mut inside = false;
    let n = poly.len();
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let xc = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if p[0] < xc {
                inside = !inside;
            }
        }
    }
    inside
}

fn polygon_boundary_distance(p: [f64; 2], poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    let pv = Vector::xy(p[0], p[1]);
    (0..n)
        .map(|i| {
            let a = Vector::xy(poly[i][0], poly[i][1]);
            let b = Vector::xy(poly[(i + 1) % n][0], poly[(i + 1) % n][1]);
            pv.dist(&project_on_segment(&pv, &a, &b))
        })
        .fold(f64::INFINITY, f64::min)
}

/// Shrinks the bracket `[out, inside]` where `kept(out)` fails and
/// `kept(inside)` holds; returns the kept end.
/// Bisects between an excluded and a kept parameter until they are `width`
/// apart, relative to the magnitude of the parameter.
fn bisect_boundary(mut out: f64, mut inside: f64, width: f64, kept: impl Fn(f64) -> bool) -> f64 {
    for _ in 0..BISECT_ITERS {
        let mid = 0.5 * (out + inside);
        if mid == out || mid == inside || (inside - out).abs() <= width * inside.abs().max(1.0) {
            break;
        }
        if kept(mid) {
            inside = mid;
        } else {
            out = mid;
        }
    }
    inside
}

/// Local minima of a 2π-periodic function: grid search followed by
/// golden-section refinement inside each grid bracket.
/// The grid uses `coarse`, the refinement `fine`.
fn periodic_minimize(coarse: impl Fn(f64) -> f64, f: impl Fn(f64) -> f64, grid: usize) -> Vec<(f64, f64)> {
    let h = TAU / grid as f64;
    let vals: Vec<f64> = (0..grid).map(|i| coarse(i as f64 * h)).collect();
    let best = vals.iter().copied().fold(f64::INFINITY, f64::min);
    if !best.is_finite() {
        return Vec::new();
    }
    let mut out = Vec::new();
    for i in 0..grid {
        let (l, c, r) = (vals[(i + grid - 1) % grid], vals[i], vals[(i + 1) % grid]);
        // a plateau is refined once, and brackets that cannot reach the best value are skipped
        let reach = 2.0 * (l - c).abs().max((r - c).abs()) + 1e-9 * best.abs().max(1.0);
        if c.is_finite() && c < l && c <= r && c - reach <= best {
            let center = i as f64 * h;
            let (a, b) = (center - h, center + h);
            let (x, fx) = golden_min(&f, a, b);
            let fc = f(center);
            let (x, fx) = if fx <= fc { (x, fx) } else { (center, fc) };
            out.push((x, fx));
        }
    }
    if out.is_empty() {
        let i = vals.iter().position(|&v| v == best).unwrap_or(0);
        out.push((i as f64 * h, best));
    }
    out
}

fn golden_min(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > GOLDEN_WIDTH {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Points of `pts` at mutual distance ≥ `spacing`, at most `cap` of them.
/// Cap on continuum samples: 64 at the default step, unbounded in practice
/// for finer steps.
fn continuum_cap(step: f64) -> usize {
    if step >= CONTINUUM_STEP {
        64
    } else {
        1 << 16
    }
}

pub(crate) fn spread_subset(pts: &[Vector], cap: usize, spacing: f64) -> Vec<Vector> {
    let mut out: Vec<Vector> = Vec::new();
    for p in pts {
        if out.len() >= cap {
            break;
        }
        if out.iter().all(|q| q.dist(p) >= spacing) {
            out.push(*p);
        }
    }
    out
}

/// Samples of the kept runs of a closed ring of points: run ends plus
/// interior points every `step` radians. `None` when nothing is kept.
fn kept_runs_sample(ring: &[Vector], kept: impl Fn(&Vector) -> bool, step: f64, r: f64) -> Option<Vec<Vector>> {
    let flags: Vec<bool> = ring.iter().map(&kept).collect();
    let n = ring.len();
    if !flags.iter().any(|&f| f) {
        return None;
    }
    if flags.iter().all(|&f| f) {
        return Some(spread_subset(ring, continuum_cap(step), step * r * 0.99));
    }
    let mut reps = Vec::new();
    let start = (0..n).find(|&i| !flags[i]).unwrap();
    let per = (step / (TAU / n as f64)).round().max(1.0) as usize;
    let mut i = 0;
    while i < n {
        let k = (start + i) % n;
        if flags[k] {
            let mut len = 0;
            while len < n && flags[(k + len) % n] {
                len += 1;
            }
            for j in (0..len).step_by(per) {
                reps.push(ring[(k + j) % n]);
            }
            if (len - 1) % per != 0 {
                reps.push(ring[(k + len - 1) % n]);
            }
            i += len;
        } else {
            i += 1;
        }
    }
    reps.truncate(64);
    Some(reps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::default_tolerances;

    fn unit_circle() -> Primitive {
        Primitive::Arc(Arc {
            center: Vector::ZERO,
            radius: 1.0,
            e1: Vector::xy(1.0, 0.0),
            e2: Vector::xy(0.0, 1.0),
            start: 0.0,
            sweep: TAU,
        })
    }

    #[test]
    fn segment_foot_of_perpendicular() {
        let s = Primitive::Segment(Vector::xy(-1.0, 0.0), Vector::xy(1.0, 0.0));
        let p = s.nearest(&Vector::xy(0.0, 1.0), &default_tolerances());
        assert_eq!(p.distance, 1.0);
        assert_eq!(p.reps, vec![Vector::ZERO]);
    }

    #[test]
    fn circle_center_is_continuum() {
        let p = unit_circle().nearest(&Vector::ZERO, &default_tolerances());
        assert_eq!(p.distance, 1.0);
        assert!(p.continuum);
        assert!(p.reps.len() >= 8);
        assert_eq!(p.reps.len(), 16);
    }

    #[test]
    fn arc_outside_range_goes_to_endpoint() {
        let arc = Primitive::Arc(Arc {
            center: Vector::ZERO,
            radius: 2.0,
            e1: Vector::xy(1.0, 0.0),
            e2: Vector::xy(0.0, 1.0),
            start: -PI / 3.0,
            sweep: 2.0 * PI / 3.0,
        });
        let p = arc.nearest(&Vector::xy(0.0, 0.5), &default_tolerances());
        assert!(p.reps[0].dist(&Vector::xy(1.0, 3f64.sqrt())) < 1e-12);
    }

    #[test]
    fn circle_normals_are_radial() {
        let n = unit_circle().normals(&Vector::xy(1.0, 0.0), 2, &default_tolerances()).unwrap();
        assert_eq!(n.len(), 2);
        assert!(n.iter().any(|v| v.dist(&Vector::xy(1.0, 0.0)) < 1e-12));
        assert!(n.iter().any(|v| v.dist(&Vector::xy(-1.0, 0.0)) < 1e-12));
    }

    #[test]
    fn off_primitive_is_rejected() {
        assert!(matches!(
            unit_circle().normals(&Vector::xy(0.5, 0.0), 2, &default_tolerances()),
            Err(Error::OffPrimitive(_))
        ));
    }

    #[test]
    fn z_axis_normals_lie_in_xy_plane() {
        let l = Primitive::Line(Line {
            point: Vector::ZERO,
            dir: Vector::new(0.0, 0.0, 1.0),
            t_min: f64::NEG_INFINITY,
            t_max: f64::INFINITY,
        });
        let n = l.normals(&Vector::ZERO, 3, &default_tolerances()).unwrap();
        assert_eq!(n.len(), 16);
        assert!(n.iter().all(|v| v.z().abs() < 1e-12 && (v.norm() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn segment_endpoint_normal_cone() {
        // segment along the negative x-axis ending at the origin
        let s = Primitive::Segment(Vector::xy(-1.0, 0.0), Vector::ZERO);
        let n = s.normals(&Vector::ZERO, 2, &default_tolerances()).unwrap();
        // analytic cone: {v : v_x >= 0}
        assert!(n.iter().all(|v| v.x() >= -1e-12));
        for want in [Vector::xy(1.0, 0.0), Vector::xy(0.0, 1.0), Vector::xy(0.0, -1.0)] {
            assert!(n.iter().any(|v| v.dist(&want) < 1e-12), "missing {want}");
        }
    }

    #[test]
    fn plane_patch_projects_inside_and_to_edges() {
        let p = Primitive::PlanePatch(PlanePatch {
            point: Vector::ZERO,
            normal: Vector::new(0.0, 0.0, 1.0),
            e1: Vector::new(1.0, 0.0, 0.0),
            e2: Vector::new(0.0, 1.0, 0.0),
            polygon: vec![[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]],
        });
        let tol = default_tolerances();
        assert_eq!(p.nearest(&Vector::new(0.2, 0.3, 2.0), &tol).distance, 2.0);
        let out = p.nearest(&Vector::new(3.0, 0.0, 0.0), &tol);
        assert!((out.distance - 2.0).abs() < 1e-12);
    }

    #[test]
    fn kept_runs_cover_partial_ring() {
        let ring: Vec<Vector> = circle_in_plane(Vector::xy(1.0, 0.0), Vector::xy(0.0, 1.0), 720);
        let reps = kept_runs_sample(&ring, |p| p.x() > 0.99, 0.4, 1.0).unwrap();
        assert!(reps.len() >= 2);
        assert!(reps.iter().all(|p| p.x() > 0.99));
    }
}

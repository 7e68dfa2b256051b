//! Reaching radii along normals and the closure of the medial axis.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{halton_ball, Tolerances, Vector};
use crate::medial::offset_view;
use crate::nearest::{is_nearest_along, limiting_normals, normal_directions, sample_near, Field, NORMAL_PROBE_STEP};
use crate::report::{ser_num, ser_nums, ser_opt_num, Assertion};
use crate::scene::Scene;

/// Default radius schedule for limiting quantities.
pub const DEFAULT_ETAS: [f64; 3] = [0.2, 0.1, 0.05];

/// Angular slack when matching a direction against a sampled limiting fan.
pub const FAN_MATCH: f64 = 0.05;

/// Agreement required between radii that the theory makes equal.
pub const RADIUS_MATCH: f64 = 5e-2;

const MIN_PAIRS: usize = 32;
const MIN_NEAR: usize = 32;

fn require_on_x<F: Field + ?Sized>(s: &F, a: &Vector, tol: &Tolerances) -> Result<()> {
    if s.distance(a, tol) <= tol.eps_dist * a.norm().max(1.0) {
        Ok(())
    } else {
        Err(Error::NotOnX(a.to_string()))
    }
}

fn require_unit(v: &Vector, tol: &Tolerances) -> Result<()> {
    if tol.is_unit(v) {
        Ok(())
    } else {
        Err(Error::Validation(format!("direction {v} is not a unit vector")))
    }
}

fn require_etas(etas: &[f64]) -> Result<()> {
    if etas.is_empty() || etas.iter().any(|&e| !(e > 0.0)) || etas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Validation("radii must be positive and strictly decreasing".into()));
    }
    Ok(())
}

/// `r_v(a) = sup { t ≥ 0 : a ∈ m(a + t v) }`, or infinity when `a` is still
/// a nearest point at `t_max`.
///
/// The set of such `t` is an interval, so the supremum is bracketed by
/// growing `t` from [`NORMAL_PROBE_STEP`] and then bisected to width `eps_dist`.
pub fn directional_radius<F: Field + ?Sized>(s: &F, a: &Vector, v: &Vector, tol: &Tolerances) -> Result<f64> {
    require_on_x(s, a, tol)?;
    require_unit(v, tol)?;
    radius_to(s, a, v, tol, tol.eps_dist)
}

/// Relative width to which radii entering minima over samples are bisected.
const SAMPLE_WIDTH: f64 = 1e-6;

fn radius_to<F: Field + ?Sized>(s: &F, a: &Vector, v: &Vector, tol: &Tolerances, width: f64) -> Result<f64> {
    let holds = |t: f64| is_nearest_along(s, a, v, t, tol);
    let mut lo = NORMAL_PROBE_STEP;
    if !holds(lo) {
        return Err(Error::NotNormal(v.to_string()));
    }
    let mut hi = 1e-2;
    while hi < tol.t_max && holds(hi) {
        lo = hi;
        hi *= if hi < 8.0 { 2.0 } else { 10.0 };
    }
    if hi >= tol.t_max {
        if holds(tol.t_max) {
            return Ok(f64::INFINITY);
        }
        hi = tol.t_max;
    }
    while hi - lo > width * lo.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if holds(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

fn sample_radius<F: Field + ?Sized>(s: &F, a: &Vector, v: &Vector, tol: &Tolerances) -> Option<f64> {
    radius_to(s, a, v, tol, SAMPLE_WIDTH).ok()
}

/// Pairs `(x, v_x)` with `x ∈ B(a, eta)` a nearest point of some query `y`,
/// `v_x = (y − x)/|y − x|` and `|v_x − v| < eta`.
///
/// Queries fill the ball of radius `eta/2` around `a + (eta/2) v`, so every
/// pair is a genuine proximal normal of the field.
pub fn proximal_pairs<F: Field + ?Sized>(
    s: &F,
    a: &Vector,
    v: &Vector,
    eta: f64,
    tol: &Tolerances,
) -> Vec<(Vector, Vector)> {
    let center = *a + *v * (eta / 2.0);
    let mut count = MIN_PAIRS + MIN_PAIRS / 4;
    loop {
        let found: Vec<Vec<(Vector, Vector)>> = halton_ball(center, eta / 2.0, s.dim(), count, tol.seed)
            .par_iter()
            .map(|y| {
                let ns = s.nearest_set(y, tol);
                if ns.distance <= NORMAL_PROBE_STEP {
                    return Vec::new();
                }
                ns.representatives()
                    .into_iter()
                    .filter_map(|x| {
                        let w = (*y - x).normalized()?;
                        (x.dist(a) <= eta && w.dist(v) < eta).then_some((x, w))
                    })
                    .collect()
            })
            .collect();
        let mut pairs: Vec<(Vector, Vector)> = Vec::new();
        for (x, w) in found.into_iter().flatten() {
            if !pairs.iter().any(|(p, u)| p.dist(&x) <= 1e-9 && u.angle(&w) <= 1e-9) {
                pairs.push((x, w));
            }
        }
        if pairs.len() >= MIN_PAIRS || count >= 1 << 13 {
            return pairs;
        }
        count *= 2;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitingRadius {
    pub base: Vector,
    pub dir: Vector,
    pub etas: Vec<f64>,
    /// Minimum directional radius over the pairs sampled at each radius.
    #[serde(serialize_with = "ser_nums")]
    pub values: Vec<f64>,
    pub pairs: Vec<usize>,
    /// The last value.
    #[serde(serialize_with = "ser_num")]
    pub liminf: f64,
    /// Whether the last two values agree within [`RADIUS_MATCH`].
    pub stabilized: bool,
}

fn agree(x: f64, y: f64, tolerance: f64) -> bool {
    if x.is_infinite() || y.is_infinite() {
        x == y
    } else {
        (x - y).abs() <= tolerance
    }
}

fn limiting_on_field<F: Field + ?Sized>(
    s: &F,
    a: &Vector,
    v: &Vector,
    etas: &[f64],
    tol: &Tolerances,
) -> Result<LimitingRadius> {
    require_on_x(s, a, tol)?;
    require_unit(v, tol)?;
    require_etas(etas)?;
    let own =
        if is_nearest_along(s, a, v, NORMAL_PROBE_STEP, tol) { Some(directional_radius(s, a, v, tol)?) } else { None };
    let mut values = Vec::new();
    let mut counts = Vec::new();
    for &eta in etas {
        let pairs = proximal_pairs(s, a, v, eta, tol);
        let radii: Vec<f64> = pairs.par_iter().filter_map(|(x, w)| sample_radius(s, x, w, tol)).collect();
        let value = radii.iter().copied().chain(own).fold(f64::INFINITY, f64::min);
        counts.push(radii.len() + own.is_some() as usize);
        values.push(value);
    }
    if counts.iter().all(|&c| c == 0) {
        return Err(Error::DirectionNotLimiting(v.to_string()));
    }
    let n = values.len();
    let liminf = values[n - 1];
    let stabilized = n >= 2 && agree(values[n - 1], values[n - 2], RADIUS_MATCH);
    Ok(LimitingRadius { base: *a, dir: *v, etas: etas.to_vec(), values, pairs: counts, liminf, stabilized })
}

/// `r̃_v(a)`, the lim inf of `r_{v_x}(x)` over proximal pairs `(x, v_x) → (a, v)`,
/// estimated as the minimum over pairs within each `eta`.
pub fn limiting_directional_radius(
    s: &Scene,
    a: &Vector,
    v: &Vector,
    etas: &[f64],
    tol: &Tolerances,
) -> Result<LimitingRadius> {
    require_etas(etas)?;
    require_unit(v, tol)?;
    let fan = limiting_normals(s, a, etas[etas.len() - 1], tol)?;
    if !fan.directions.iter().any(|w| w.angle(v) <= FAN_MATCH) {
        return Err(Error::DirectionNotLimiting(v.to_string()));
    }
    limiting_on_field(s, a, v, etas, tol)
}

/// Radii for every direction of a fan, in parallel. Directions that fail the
/// normal probe are dropped.
fn fan_radii<F: Field + ?Sized>(s: &F, a: &Vector, fan: &[Vector], tol: &Tolerances, width: f64) -> Vec<(Vector, f64)> {
    fan.par_iter().filter_map(|v| radius_to(s, a, v, tol, width).ok().map(|r| (*v, r))).collect()
}

fn weak_to(s: &Scene, a: &Vector, tol: &Tolerances, width: f64) -> Result<f64> {
    let fan = normal_directions(s, a, tol)?;
    Ok(fan_radii(s, a, &fan.directions, tol, width).into_iter().map(|(_, r)| r).fold(f64::INFINITY, f64::min))
}

/// `r'(a) = inf_{v ∈ V_a} r_v(a)` over the sampled normal fan.
pub fn weak_radius(s: &Scene, a: &Vector, tol: &Tolerances) -> Result<f64> {
    weak_to(s, a, tol, tol.eps_dist)
}

/// `r(a) = inf r̃_v(a)` over the limiting fan at the smallest radius.
pub fn reaching_radius(s: &Scene, a: &Vector, tol: &Tolerances) -> Result<f64> {
    reaching_radius_with(s, a, &DEFAULT_ETAS, tol)
}

pub fn reaching_radius_with(s: &Scene, a: &Vector, etas: &[f64], tol: &Tolerances) -> Result<f64> {
    require_etas(etas)?;
    let fan = limiting_normals(s, a, etas[etas.len() - 1], tol)?;
    let values: Vec<f64> = fan
        .directions
        .iter()
        .filter_map(|v| limiting_on_field(s, a, v, &etas[etas.len() - 1..], tol).ok().map(|l| l.liminf))
        .collect();
    Ok(values.into_iter().fold(f64::INFINITY, f64::min))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BdRadius {
    pub base: Vector,
    pub etas: Vec<f64>,
    /// Minimum of the weak radius over `X ∩ B(a, eta)` at each radius.
    #[serde(serialize_with = "ser_nums")]
    pub values: Vec<f64>,
    pub samples: Vec<usize>,
    #[serde(serialize_with = "ser_num")]
    pub value: f64,
    pub stabilized: bool,
}

/// `ṙ(a) = lim inf_{x → a} r'(x)`, estimated as the minimum of the weak
/// radius over samples of `X ∩ B(a, eta)` together with `a`.
pub fn bd_radius(s: &Scene, a: &Vector, etas: &[f64], tol: &Tolerances) -> Result<BdRadius> {
    require_on_x(s, a, tol)?;
    require_etas(etas)?;
    let own = weak_radius(s, a, tol)?;
    let mut values = Vec::new();
    let mut samples = Vec::new();
    for &eta in etas {
        let near = sample_near(s, a, eta, MIN_NEAR, tol);
        let radii: Vec<f64> = near.par_iter().filter_map(|x| weak_to(s, x, tol, SAMPLE_WIDTH).ok()).collect();
        samples.push(radii.len() + 1);
        values.push(radii.into_iter().fold(own, f64::min));
    }
    let n = values.len();
    let stabilized = n >= 2 && agree(values[n - 1], values[n - 2], RADIUS_MATCH);
    Ok(BdRadius { base: *a, etas: etas.to_vec(), value: values[n - 1], values, samples, stabilized })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    InClosure,
    NotInClosure,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrontierVerdict {
    pub query: Vector,
    pub nearest: Vector,
    pub dir: Vector,
    #[serde(serialize_with = "ser_num")]
    pub distance: f64,
    #[serde(serialize_with = "ser_num")]
    pub r_tilde: f64,
    pub verdict: Verdict,
}

/// Whether a point with a single nearest point `a` lies in the closure of the
/// medial axis, by comparing `d(x)` with `r̃_v(a)` for `v = (x − a)/|x − a|`.
/// A limiting radius below `sep_tol` is inconclusive.
pub fn frontier_classify(s: &Scene, x: &Vector, tol: &Tolerances) -> Result<FrontierVerdict> {
    frontier_classify_with(s, x, &DEFAULT_ETAS, tol)
}

pub fn frontier_classify_with(s: &Scene, x: &Vector, etas: &[f64], tol: &Tolerances) -> Result<FrontierVerdict> {
    let ns = s.nearest_set(x, tol);
    if ns.distance <= tol.eps_dist {
        return Err(Error::OnX(x.to_string()));
    }
    if ns.multiplicity >= 2 {
        return Err(Error::OnMedial(x.to_string()));
    }
    let a = ns.representatives()[0];
    let v = (*x - a).normalized().ok_or_else(|| Error::OnX(x.to_string()))?;
    let r_tilde = limiting_on_field(s, &a, &v, etas, tol)?.liminf;
    let verdict = if r_tilde <= tol.sep_tol {
        Verdict::Inconclusive
    } else if ns.distance >= r_tilde - 10.0 * tol.eps_dist {
        Verdict::InClosure
    } else {
        Verdict::NotInClosure
    };
    Ok(FrontierVerdict { query: *x, nearest: a, dir: v, distance: ns.distance, r_tilde, verdict })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OffsetRadiusReport {
    pub eps: f64,
    pub base: LimitingRadius,
    pub offset: LimitingRadius,
    pub assertions: Vec<Assertion>,
}

/// `r̃_v(a) = r̃^ε_v(a + ε v) + ε`, with the right side computed on the
/// offset field.
pub fn offset_radius_check(
    s: &Scene,
    a: &Vector,
    v: &Vector,
    eps: f64,
    tol: &Tolerances,
) -> Result<OffsetRadiusReport> {
    let base = limiting_directional_radius(s, a, v, &DEFAULT_ETAS, tol)?;
    if !(base.liminf > eps + tol.sep_tol) {
        return Err(Error::RadiusTooSmall { radius: base.liminf, eps });
    }
    let view = offset_view(s, eps)?;
    let b = *a + *v * eps;
    let offset = limiting_on_field(&view, &b, v, &DEFAULT_ETAS, tol)?;
    let assertions =
        vec![Assertion::close("r~(a) = r~eps(a + eps v) + eps", base.liminf, offset.liminf + eps, RADIUS_MATCH)];
    Ok(OffsetRadiusReport { eps, base, offset, assertions })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuityReport {
    pub base: Vector,
    pub etas: Vec<f64>,
    /// `max − min` of the weak radius over `X ∩ B(a, eta)`.
    #[serde(serialize_with = "ser_nums")]
    pub oscillations: Vec<f64>,
    pub assertions: Vec<Assertion>,
}

fn oscillation(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if max == min {
        0.0
    } else {
        max - min
    }
}

/// Oscillation of the weak radius near a smooth point; it should vanish as
/// the radius shrinks.
pub fn radius_continuity_probe(s: &Scene, a: &Vector, etas: &[f64], tol: &Tolerances) -> Result<ContinuityReport> {
    require_on_x(s, a, tol)?;
    require_etas(etas)?;
    let own = weak_radius(s, a, tol)?;
    let mut oscillations = Vec::new();
    for &eta in etas {
        let near = sample_near(s, a, eta, MIN_NEAR / 2, tol);
        let mut radii: Vec<f64> = near.par_iter().filter_map(|x| weak_to(s, x, tol, SAMPLE_WIDTH).ok()).collect();
        radii.push(own);
        oscillations.push(oscillation(&radii));
    }
    let last = oscillations[oscillations.len() - 1];
    Ok(ContinuityReport {
        base: *a,
        etas: etas.to_vec(),
        assertions: vec![Assertion::at_most("oscillation at the smallest radius", last, 0.1)],
        oscillations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SemicontinuityViolation {
    pub dir: Vector,
    pub perturbed: Vector,
    #[serde(serialize_with = "ser_num")]
    pub radius: f64,
    #[serde(serialize_with = "ser_num")]
    pub perturbed_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SemicontinuityReport {
    pub base: Vector,
    pub directions: usize,
    pub checks: usize,
    pub violations: Vec<SemicontinuityViolation>,
    pub assertions: Vec<Assertion>,
}

/// Angles by which fan directions are perturbed.
pub const PERTURBATIONS: [f64; 2] = [1e-3, 1e-4];

fn perturbations(v: &Vector, dim: usize, delta: f64) -> Vec<Vector> {
    let e1 = v.any_orthogonal();
    let mut axes = vec![e1, -e1];
    if dim == 3 {
        let e2 = v.cross(&e1);
        axes.extend([e2, -e2]);
    }
    axes.into_iter().filter_map(|e| (*v * delta.cos() + e * delta.sin()).normalized()).collect()
}

/// Upper semicontinuity of `v ↦ r_v(a)` on `V_a`: directions of the fan
/// rotated by small angles inside `V_a` must not reach beyond `r_v(a) + 0.05`.
pub fn rho_semicontinuity_probe(s: &Scene, a: &Vector, tol: &Tolerances) -> Result<SemicontinuityReport> {
    let fan = normal_directions(s, a, tol)?;
    let radii = fan_radii(s, a, &fan.directions, tol, tol.eps_dist);
    let results: Vec<(usize, Vec<SemicontinuityViolation>)> = radii
        .par_iter()
        .map(|(v, r)| {
            let mut checks = 0;
            let mut bad = Vec::new();
            for &delta in &PERTURBATIONS {
                for w in perturbations(v, s.dim, delta) {
                    if let Ok(rw) = directional_radius(s, a, &w, tol) {
                        checks += 1;
                        if r.is_finite() && (rw.is_infinite() || rw > r + RADIUS_MATCH) {
                            bad.push(SemicontinuityViolation {
                                dir: *v,
                                perturbed: w,
                                radius: *r,
                                perturbed_radius: rw,
                            });
                        }
                    }
                }
            }
            (checks, bad)
        })
        .collect();
    let checks = results.iter().map(|r| r.0).sum();
    let violations: Vec<SemicontinuityViolation> = results.into_iter().flat_map(|r| r.1).collect();
    let assertions = vec![Assertion::equal("semicontinuity violations", 0, violations.len())];
    Ok(SemicontinuityReport { base: *a, directions: radii.len(), checks, violations, assertions })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadiusEqualityReport {
    pub base: Vector,
    #[serde(serialize_with = "ser_num")]
    pub reaching: f64,
    #[serde(serialize_with = "ser_num")]
    pub bd: f64,
    pub assertions: Vec<Assertion>,
}

/// `r(a) = ṙ(a)`; two unbounded radii agree.
pub fn denkowski_equality_check(s: &Scene, a: &Vector, tol: &Tolerances) -> Result<RadiusEqualityReport> {
    let reaching = reaching_radius(s, a, tol)?;
    let bd = bd_radius(s, a, &DEFAULT_ETAS, tol)?.value;
    let assertions = vec![Assertion::close("r(a) = bd radius", reaching, bd, RADIUS_MATCH)];
    Ok(RadiusEqualityReport { base: *a, reaching, bd, assertions })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadiusReport {
    pub base: Vector,
    pub dir: Option<Vector>,
    #[serde(serialize_with = "ser_opt_num")]
    pub r_v: Option<f64>,
    pub r_tilde_v: Option<LimitingRadius>,
    #[serde(serialize_with = "ser_num")]
    pub r_weak: f64,
    #[serde(serialize_with = "ser_num")]
    pub r_reach: f64,
    #[serde(serialize_with = "ser_num")]
    pub r_bd: f64,
    pub normals: usize,
}

/// Every radius at `a`, and the directional ones along `v` when given.
pub fn radius_report(s: &Scene, a: &Vector, v: Option<&Vector>, tol: &Tolerances) -> Result<RadiusReport> {
    let normals = normal_directions(s, a, tol)?.directions.len();
    let (r_v, r_tilde_v) = match v {
        Some(v) => {
            (Some(directional_radius(s, a, v, tol)?), Some(limiting_directional_radius(s, a, v, &DEFAULT_ETAS, tol)?))
        }
        None => (None, None),
    };
    Ok(RadiusReport {
        base: *a,
        dir: v.copied(),
        r_v,
        r_tilde_v,
        r_weak: weak_radius(s, a, tol)?,
        r_reach: reaching_radius(s, a, tol)?,
        r_bd: bd_radius(s, a, &DEFAULT_ETAS, tol)?.value,
        normals,
    })
}

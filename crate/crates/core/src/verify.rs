//! Verification suites over the shipped golden scenes.
//!
//! Each suite loads its scenes through [`load_scene`], runs the checks of the
//! owning module at fixed anchors and reports named assertions.

use serde::Serialize;
use serde_json::{json, Value};

use crate::cone::{compare_cone, sphere_medial, tangent_cone_directions};
use crate::dimension::{global_dim, verify_dim_formula};
use crate::error::{Error, Result};
use crate::geom::{angular_hausdorff, halton_ball, Tolerances, Vector};
use crate::library::load_scene;
use crate::medial::{gamma_checks, offset_medial_check, scan_medial, Region};
use crate::mises::mises_samples;
use crate::nearest::nearest_set;
use crate::reach::{denkowski_equality_check, frontier_classify, limiting_directional_radius, offset_radius_check};
use crate::reach::{Verdict, RADIUS_MATCH};
use crate::report::{num, Assertion};

pub const SUITES: [&str; 8] = ["mises", "gamma", "stozek", "plane-case", "dimension", "offset", "miurat", "denkowski"];

pub const PLANE_SCENES: [&str; 4] = ["circle", "two_points", "parabola", "wristwatch"];

pub const GOLDEN_SCENES: [&str; 7] =
    ["circle", "two_points", "parabola", "wristwatch", "double_x", "cross_sphere", "chazal"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub results: Value,
    pub assertions: Vec<Assertion>,
    pub pass: bool,
}

impl SuiteReport {
    fn new(suite: &str, results: Vec<Value>, assertions: Vec<Assertion>) -> Self {
        let pass = assertions.iter().all(|a| a.pass);
        SuiteReport { suite: suite.to_string(), results: Value::Array(results), assertions, pass }
    }
}

/// Runs one suite by name, or every suite for `"all"`.
pub fn run_suite(name: &str, tol: &Tolerances) -> Result<Vec<SuiteReport>> {
    match name {
        "all" => SUITES.iter().map(|s| run_one(s, tol)).collect(),
        _ => Ok(vec![run_one(name, tol)?]),
    }
}

fn run_one(name: &str, tol: &Tolerances) -> Result<SuiteReport> {
    match name {
        "mises" => mises_suite(tol),
        "gamma" => gamma_suite(tol),
        "stozek" => cone_inclusion_suite(tol),
        "plane-case" => plane_case_suite(tol),
        "dimension" => dimension_suite(tol),
        "offset" => offset_suite(tol),
        "miurat" => frontier_suite(tol),
        "denkowski" => radius_equality_suite(tol),
        _ => Err(Error::Validation(format!("unknown suite {name:?}; expected one of {} or all", SUITES.join(", ")))),
    }
}

pub const MISES_SAMPLES: usize = 1000;
pub const MISES_TOLERANCE: f64 = 1e-4;

/// Formula against forward differences at random `(a, v)` with `d(a) > 0.1`.
pub fn mises_suite(tol: &Tolerances) -> Result<SuiteReport> {
    let mut results = Vec::new();
    let mut assertions = Vec::new();
    let mut agreements = 0;
    for name in PLANE_SCENES {
        let s = load_scene(name)?;
        let samples = mises_samples(&s, &Vector::ZERO, 2.5, MISES_SAMPLES, 0.1, tol)?;
        let errors: Vec<f64> = samples.iter().map(|m| (m.formula - m.finite_difference).abs()).collect();
        let worst = errors.iter().copied().fold(0.0, f64::max);
        let agree = errors.iter().filter(|e| **e <= MISES_TOLERANCE).count();
        agreements += agree;
        results.push(json!({"scene": name, "samples": samples.len(), "agreements": agree, "max_error": worst}));
        assertions.push(Assertion::at_most(format!("max |formula - fd| on {name}"), worst, MISES_TOLERANCE));
    }
    assertions.push(Assertion::at_least("derivative agreements", agreements as f64, 3.0 * MISES_SAMPLES as f64));
    Ok(SuiteReport::new("mises", results, assertions))
}

pub const GAMMA_PROBES: usize = 100;

fn probes_off_x(s: &crate::Scene, radius: f64, count: usize, min_distance: f64, tol: &Tolerances) -> Vec<Vector> {
    halton_ball(Vector::ZERO, radius, s.dim, 4 * count, tol.seed.wrapping_add(7))
        .into_iter()
        .filter(|x| s.distance(x, tol) > min_distance)
        .take(count)
        .collect()
}

/// The three properties of the graph of `d` at probes of every plane scene.
pub fn gamma_suite(tol: &Tolerances) -> Result<SuiteReport> {
    let mut results = Vec::new();
    let mut assertions = Vec::new();
    for name in PLANE_SCENES {
        let s = load_scene(name)?;
        let probes = probes_off_x(&s, 2.0, GAMMA_PROBES, 0.05, tol);
        let rep = gamma_checks(&s, &probes, tol)?;
        let lipschitz = rep.probes.iter().filter(|p| !p.lipschitz_ok).count();
        let segment = rep.probes.iter().filter(|p| !p.segment_ok).count();
        let epigraph = rep.probes.iter().filter(|p| !p.epigraph_ok).count();
        results.push(json!({
            "scene": name,
            "probes": rep.probes.len(),
            "lipschitz_failures": lipschitz,
            "segment_failures": segment,
            "epigraph_failures": epigraph,
        }));
        assertions.push(Assertion::equal(format!("probes on {name}"), GAMMA_PROBES, rep.probes.len()));
        assertions.push(Assertion::equal(format!("lipschitz cone failures on {name}"), 0, lipschitz));
        assertions.push(Assertion::equal(format!("segment failures on {name}"), 0, segment));
        assertions.push(Assertion::equal(format!("epigraph failures on {name}"), 0, epigraph));
    }
    Ok(SuiteReport::new("gamma", results, assertions))
}

/// A scanned scene with medial anchors and annulus scales.
pub struct ConeCase {
    pub scene: &'static str,
    pub region: Region,
    pub scales: Vec<f64>,
    pub anchors: Vec<Vector>,
}

pub fn cone_cases() -> Vec<ConeCase> {
    let square = |lo: f64, hi: f64, step: f64| Region::cube(lo, hi, step, 2).expect("valid region");
    vec![
        ConeCase {
            scene: "circle",
            region: square(-0.5, 0.5, 0.05),
            scales: vec![0.3, 0.15],
            anchors: vec![Vector::ZERO],
        },
        ConeCase {
            scene: "two_points",
            region: square(-1.0, 1.0, 0.05),
            scales: vec![0.8, 0.4, 0.2],
            anchors: vec![Vector::ZERO, Vector::xy(0.0, 0.5), Vector::xy(0.0, -0.5)],
        },
        ConeCase {
            scene: "parabola",
            region: Region::new(Vector::xy(-1.0, 0.0), Vector::xy(1.0, 2.0), 0.02, 2).expect("valid region"),
            scales: vec![0.4, 0.2, 0.1],
            anchors: vec![Vector::xy(0.0, 1.0), Vector::xy(0.0, 1.3), Vector::xy(0.0, 1.6)],
        },
        ConeCase {
            scene: "wristwatch",
            region: square(-1.0, 1.0, 0.05),
            scales: vec![0.8, 0.4, 0.2],
            anchors: vec![Vector::ZERO, Vector::xy(0.0, 0.3), Vector::xy(0.0, -0.3)],
        },
        ConeCase {
            scene: "double_x",
            region: Region::new(Vector::new(-0.84, -0.84, -0.84), Vector::new(0.86, 0.86, 0.86), 0.05, 3)
                .expect("valid region"),
            scales: vec![0.8, 0.4, 0.2],
            anchors: vec![Vector::ZERO, Vector::new(0.3, 0.0, 0.0), Vector::new(0.3, 0.4, 0.0)],
        },
    ]
}

/// Every direction of the medial axis of `m(a)` is near a tangent direction.
pub fn cone_inclusion_suite(tol: &Tolerances) -> Result<SuiteReport> {
    let mut results = Vec::new();
    let mut assertions = Vec::new();
    for case in cone_cases().into_iter().filter(|c| c.scene != "circle") {
        let s = load_scene(case.scene)?;
        let cloud = scan_medial(&s, &case.region, tol)?;
        for a in &case.anchors {
            let cmp = compare_cone(&s, &cloud, a, &case.scales, tol)?;
            results.push(json!({
                "scene": case.scene,
                "anchor": a,
                "hausdorff_included": cmp.hausdorff_included,
                "hausdorff_equal": cmp.hausdorff_equal,
                "sphere_size": cmp.sphere_size,
                "cone_size": cmp.cone_size,
            }));
            assertions.push(Assertion::at_most(
                format!("sphere-medial inside tangent cone on {} at {a}", case.scene),
                cmp.hausdorff_included,
                0.1,
            ));
        }
        if case.scene == "double_x" {
            let cmp = compare_cone(&s, &cloud, &Vector::ZERO, &case.scales, tol)?;
            assertions.push(Assertion::at_least(
                "double_x tangent cone exceeds sphere-medial",
                cmp.hausdorff_equal,
                0.5,
            ));
        }
    }
    Ok(SuiteReport::new("stozek", results, assertions))
}

/// In the plane the tangent cone and the medial axis of `m(a)` coincide.
/// An isolated medial point has neither secants nor medial directions.
pub fn plane_case_suite(tol: &Tolerances) -> Result<SuiteReport> {
    let mut results = Vec::new();
    let mut assertions = Vec::new();
    for case in cone_cases().into_iter().filter(|c| PLANE_SCENES.contains(&c.scene)) {
        let s = load_scene(case.scene)?;
        let cloud = scan_medial(&s, &case.region, tol)?;
        for a in &case.anchors {
            let sphere = sphere_medial(&s, a, tol)?;
            let cone = match tangent_cone_directions(&cloud, a, &case.scales, tol) {
                Ok(c) => c.directions,
                Err(Error::TooFewSamples(_)) => Vec::new(),
                Err(e) => return Err(e),
            };
            let gap = angular_hausdorff(&sphere.directions, &cone);
            results.push(json!({
                "scene": case.scene,
                "anchor": a,
                "hausdorff_equal": gap,
                "sphere_size": sphere.len(),
                "cone_size": cone.len(),
            }));
            assertions.push(Assertion::at_most(
                format!("cone equals sphere-medial on {} at {a}", case.scene),
                gap,
                0.1,
            ));
        }
    }
    Ok(SuiteReport::new("plane-case", results, assertions))
}

/// A scanned scene with anchors for the dimension formula.
pub struct DimCase {
    pub scene: &'static str,
    pub region: Region,
    pub neighborhood: f64,
    pub anchors: Vec<Vector>,
}

/// Three medial anchors per scene; the medial axis of the circle is its centre alone.
pub fn dim_cases() -> Vec<DimCase> {
    let square = |lo: f64, hi: f64, step: f64| Region::cube(lo, hi, step, 2).expect("valid region");
    let boxed =
        |lo: [f64; 3], hi: [f64; 3], step: f64| Region::new(Vector(lo), Vector(hi), step, 3).expect("valid region");
    vec![
        DimCase { scene: "circle", region: square(-0.5, 0.5, 0.05), neighborhood: 0.3, anchors: vec![Vector::ZERO] },
        DimCase {
            scene: "two_points",
            region: square(-1.0, 1.0, 0.05),
            neighborhood: 0.5,
            anchors: vec![Vector::ZERO, Vector::xy(0.0, 0.5), Vector::xy(0.0, -0.5)],
        },
        DimCase {
            scene: "parabola",
            region: Region::new(Vector::xy(-1.0, 0.0), Vector::xy(1.0, 2.0), 0.02, 2).expect("valid region"),
            neighborhood: 0.3,
            anchors: vec![Vector::xy(0.0, 1.0), Vector::xy(0.0, 1.3), Vector::xy(0.0, 1.6)],
        },
        DimCase {
            scene: "wristwatch",
            region: square(-0.8, 0.8, 0.05),
            neighborhood: 0.5,
            anchors: vec![Vector::ZERO, Vector::xy(0.0, 0.4), Vector::xy(0.0, -0.4)],
        },
        DimCase {
            scene: "double_x",
            region: boxed([0.5, -0.5, -0.5], [1.5, 0.5, 0.5], 0.05),
            neighborhood: 0.3,
            anchors: vec![Vector::new(1.0, 0.0, 0.0), Vector::new(1.0, 0.0, 0.2), Vector::new(1.2, 0.0, 0.0)],
        },
        DimCase {
            scene: "cross_sphere",
            region: boxed([-0.5, -0.5, -0.5], [0.5, 0.5, 0.5], 0.05),
            neighborhood: 0.3,
            anchors: vec![Vector::ZERO, Vector::new(0.2, 0.2, 0.1), Vector::new(0.2, -0.2, -0.1)],
        },
        DimCase {
            scene: "chazal",
            region: boxed([2.5, -0.3, 0.7], [3.5, 0.3, 1.3], 0.05),
            neighborhood: 0.3,
            anchors: vec![Vector::new(2.8, 0.0, 1.0), Vector::new(3.0, 0.0, 1.0), Vector::new(3.2, 0.0, 1.0)],
        },
    ]
}

/// `dim M_X + min dim m = n − 1` at anchors, and globally on each cloud.
pub fn dimension_suite(tol: &Tolerances) -> Result<SuiteReport> {
    let mut results = Vec::new();
    let mut assertions = Vec::new();
    for case in dim_cases() {
        let s = load_scene(case.scene)?;
        let cloud = scan_medial(&s, &case.region, tol)?;
        for a in &case.anchors {
            let rep = verify_dim_formula(&s, &cloud, a, case.neighborhood, tol)?;
            results.push(json!({
                "scene": case.scene,
                "anchor": a,
                "dim_medial": rep.dim_medial.dim,
                "dim_nearest": rep.dim_nearest,
                "k_min": rep.k_min,
                "pointwise_sum": rep.pointwise_sum,
                "generic": rep.generic,
            }));
            for mut t in rep.assertions {
                t.name = format!("{} on {} at {a}", t.name, case.scene);
                assertions.push(t);
            }
        }
        let g = global_dim(&s, &cloud, tol)?;
        results.push(json!({
            "scene": case.scene,
            "max_local_dim": g.max_local_dim,
            "min_dim_m": g.min_dim_m,
            "predicted": g.predicted,
        }));
        for mut t in g.assertions {
            t.name = format!("{} on {}", t.name, case.scene);
            assertions.push(t);
        }
    }
    let w = load_scene("wristwatch")?;
    let cloud = scan_medial(&w, &Region::cube(-0.8, 0.8, 0.05, 2)?, tol)?;
    let rep = verify_dim_formula(&w, &cloud, &Vector::ZERO, 0.5, tol)?;
    assertions.push(Assertion::equal("pointwise sum at the wristwatch origin", 2, rep.pointwise_sum));
    assertions.push(Assertion::equal("neighbourhood sum at the wristwatch origin", 1, rep.dim_medial.dim + rep.k_min));
    Ok(SuiteReport::new("dimension", results, assertions))
}

pub const OFFSETS: [f64; 3] = [0.1, 0.25, 0.3];

/// Offset scenes: medial clouds above the offset agree, and limiting radii
/// shift by the offset.
pub fn offset_suite(tol: &Tolerances) -> Result<SuiteReport> {
    let cases = [
        ("circle", Region::cube(-0.4, 0.4, 0.05, 2)?, Vector::xy(1.0, 0.0), Vector::xy(-1.0, 0.0)),
        ("two_points", Region::cube(-2.0, 2.0, 0.05, 2)?, Vector::xy(1.0, 0.0), Vector::xy(-1.0, 0.0)),
        (
            "parabola",
            Region::new(Vector::xy(-1.0, 0.3), Vector::xy(1.0, 2.0), 0.02, 2)?,
            Vector::ZERO,
            Vector::xy(0.0, 1.0),
        ),
    ];
    let mut results = Vec::new();
    let mut assertions = Vec::new();
    for (name, region, a, v) in cases {
        let s = load_scene(name)?;
        for eps in OFFSETS {
            let m = offset_medial_check(&s, eps, &region, tol)?;
            let r = offset_radius_check(&s, &a, &v, eps, tol)?;
            results.push(json!({
                "scene": name,
                "eps": eps,
                "base_samples": m.base_samples,
                "offset_samples": m.offset_samples,
                "base_to_offset": m.base_to_offset,
                "offset_to_base": m.offset_to_base,
                "radius": num(r.base.liminf),
                "offset_radius": num(r.offset.liminf),
            }));
            for mut t in m.assertions.into_iter().chain(r.assertions) {
                t.name = format!("{} on {name} at eps {eps}", t.name);
                assertions.push(t);
            }
        }
    }
    Ok(SuiteReport::new("offset", results, assertions))
}

pub const FRONTIER_IN: [f64; 3] = [1.2, 1.5, 1.8];
pub const FRONTIER_OUT: [f64; 2] = [0.3, 0.5];

/// The closure of the medial axis: the chazal frontier above the origin and
/// `d(x) ≥ r̃_v(a)` at medial samples of the plane scenes.
pub fn frontier_suite(tol: &Tolerances) -> Result<SuiteReport> {
    let mut results = Vec::new();
    let mut assertions = Vec::new();
    let ch = load_scene("chazal")?;
    for (t, want) in FRONTIER_IN
        .iter()
        .map(|t| (*t, Verdict::InClosure))
        .chain(FRONTIER_OUT.iter().map(|t| (*t, Verdict::NotInClosure)))
    {
        let x = Vector::new(0.0, 0.0, t);
        let f = frontier_classify(&ch, &x, tol)?;
        results.push(json!({"scene": "chazal", "query": x, "verdict": f.verdict, "r_tilde": num(f.r_tilde)}));
        assertions.push(Assertion::equal(format!("verdict on chazal at {x}"), want, f.verdict));
        assertions.push(Assertion::close(format!("r~ on chazal at {x}"), 1.0, f.r_tilde, 0.1));
    }
    for name in PLANE_SCENES {
        let s = load_scene(name)?;
        let cloud = scan_medial(&s, &Region::cube(-1.0, 1.0, 0.1, 2)?, tol)?;
        let mut worst = f64::NEG_INFINITY;
        let mut checked = 0;
        for m in cloud.samples.iter().step_by(4) {
            for a in nearest_set(&s, &m.point, tol).representatives().into_iter().take(2) {
                let Some(v) = (m.point - a).normalized() else { continue };
                let l = limiting_directional_radius(&s, &a, &v, &[0.1, 0.05], tol)?;
                if l.liminf.is_finite() {
                    worst = worst.max(l.liminf - m.distance);
                }
                checked += 1;
            }
        }
        results.push(json!({"scene": name, "checked": checked, "max_excess": num(worst)}));
        assertions.push(Assertion::at_most(format!("r~ - d at medial samples of {name}"), worst.max(0.0), 0.05));
    }
    Ok(SuiteReport::new("miurat", results, assertions))
}

/// Five designated points per golden scene; the two-point scene has only two.
pub fn radius_equality_points() -> Vec<(&'static str, Vec<Vector>)> {
    let s3 = 3f64.sqrt();
    vec![
        (
            "circle",
            vec![
                Vector::xy(1.0, 0.0),
                Vector::xy(0.0, 1.0),
                Vector::xy(-1.0, 0.0),
                Vector::xy(0.0, -1.0),
                Vector::xy(1f64.cos(), 1f64.sin()),
            ],
        ),
        ("two_points", vec![Vector::xy(1.0, 0.0), Vector::xy(-1.0, 0.0)]),
        (
            "parabola",
            vec![
                Vector::ZERO,
                Vector::xy(0.5, 0.25),
                Vector::xy(-0.5, 0.25),
                Vector::xy(1.0, 1.0),
                Vector::xy(-1.5, 2.25),
            ],
        ),
        (
            "wristwatch",
            vec![
                Vector::xy(2.0, 0.0),
                Vector::xy(-2.0, 0.0),
                Vector::xy(1.0, s3),
                Vector::xy(1.0, 3.0),
                Vector::xy(-1.0, -s3),
            ],
        ),
        (
            "double_x",
            vec![
                Vector::new(0.0, 0.0, 1.0),
                Vector::new(0.5, 0.5, 1.0),
                Vector::new(-0.5, 0.5, 1.0),
                Vector::new(0.3, -0.3, -1.0),
                Vector::new(0.0, 0.0, -1.0),
            ],
        ),
        (
            "cross_sphere",
            vec![
                Vector::new(0.0, 0.0, 1.0),
                Vector::new(0.0, 1.0, 0.0),
                Vector::new(1.0, 0.0, 0.0),
                Vector::new(0.0, 0.5f64.cos(), 0.5f64.sin()),
                Vector::new(0.5f64.sin(), 0.0, 0.5f64.cos()),
            ],
        ),
        (
            "chazal",
            vec![
                Vector::ZERO,
                Vector::new(-2.0, 0.0, 2.0),
                Vector::new(0.0, 0.0, 4.0),
                Vector::new(3.0, 0.0, 0.0),
                Vector::new(3.0, 0.0, 2.0),
            ],
        ),
    ]
}

/// `r(a) = ṙ(a)` at the designated points.
pub fn radius_equality_suite(tol: &Tolerances) -> Result<SuiteReport> {
    let mut results = Vec::new();
    let mut assertions = Vec::new();
    for (name, points) in radius_equality_points() {
        let s = load_scene(name)?;
        for a in points {
            let rep = denkowski_equality_check(&s, &a, tol)?;
            results.push(json!({"scene": name, "point": a, "reaching": num(rep.reaching), "bd": num(rep.bd)}));
            assertions.push(Assertion::close(
                format!("r = bd radius on {name} at {a}"),
                rep.reaching,
                rep.bd,
                RADIUS_MATCH,
            ));
        }
    }
    Ok(SuiteReport::new("denkowski", results, assertions))
}

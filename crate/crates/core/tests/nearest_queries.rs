use std::f64::consts::{PI, TAU};

use medialkit::nearest::{limiting_normals, normal_directions, normal_set_probe, sample_near};
use medialkit::{default_tolerances, load_scene, nearest_set, Error, Primitive, Vector};
use proptest::prelude::*;

fn tol() -> medialkit::Tolerances {
    default_tolerances()
}

/// Kept test for the trimmed Chazal sphere, written out independently of the
/// crate's trim machinery.
fn chazal_sphere_kept(p: &Vector) -> bool {
    let in_half_cylinder = p.y() * p.y() + (p.z() - 1.0).powi(2) < 1.0 && p.x() > 0.0;
    !in_half_cylinder
}

#[test]
fn chazal_sphere_patch_matches_brute_force() {
    let s = load_scene("chazal").unwrap();
    let sphere = &s.primitives[0];
    let x = Vector::new(0.0, 0.0, 1.0);
    // oracle: dense (theta, phi) grid of the trimmed sphere
    let (nt, np) = (1200, 1200);
    let mut best = (f64::INFINITY, Vector::ZERO);
    for i in 0..=nt {
        let th = PI * i as f64 / nt as f64;
        for j in 0..np {
            let ph = TAU * j as f64 / np as f64;
            let p = Vector::new(2.0 * th.sin() * ph.cos(), 2.0 * th.sin() * ph.sin(), 2.0 + 2.0 * th.cos());
            if chazal_sphere_kept(&p) {
                let d = x.dist(&p);
                if d < best.0 {
                    best = (d, p);
                }
            }
        }
    }
    assert!((best.0 - 1.0).abs() < 1e-6, "oracle {}", best.0);
    let got = sphere.nearest(&x, &tol());
    assert!((got.distance - 1.0).abs() < 1e-6, "{}", got.distance);
    assert!(got.distance <= best.0 + 1e-12);
    assert!(got.reps.iter().any(|r| r.norm() < 1e-3));
}

#[test]
fn chazal_sphere_trimmed_projection_lands_on_intersection_curve() {
    // (0.1, 0, 1): radial projection is cut away; the minimizer lies on the
    // sphere/cylinder intersection where the distance is exactly 1
    let s = load_scene("chazal").unwrap();
    let x = Vector::new(0.1, 0.0, 1.0);
    let got = s.primitives[0].nearest(&x, &tol());
    assert!((got.distance - 1.0).abs() < 1e-9, "{}", got.distance);
    assert!(got.reps.len() >= 2);
    for r in &got.reps {
        assert!(chazal_sphere_kept(r));
        assert!(((r.y().powi(2) + (r.z() - 1.0).powi(2)) - 1.0).abs() < 1e-6);
    }
}

#[test]
fn wristwatch_has_six_primitives_and_radius_two_at_origin() {
    let s = load_scene("wristwatch").unwrap();
    assert_eq!(s.primitives.len(), 6);
    // oracle: dense sampling of the boundary of B(0,2) ∪ ((-1,1)×R)
    let mut best = f64::INFINITY;
    for k in 0..100_000 {
        let t = TAU * k as f64 / 100_000.0;
        if t.cos().abs() >= 0.5 {
            best = best.min(2.0);
        }
    }
    for k in 0..10_000 {
        let y = 3f64.sqrt() + k as f64 * 1e-3;
        best = best.min((1.0 + y * y).sqrt());
    }
    let d = medialkit::distance(&s, &Vector::ZERO, &tol());
    assert!((d - best).abs() < 1e-12);
    assert!((d - 2.0).abs() < 1e-15);
}

#[test]
fn distance_examples() {
    let t = tol();
    assert_eq!(medialkit::distance(&load_scene("circle").unwrap(), &Vector::ZERO, &t), 1.0);
    let d = medialkit::distance(&load_scene("two_points").unwrap(), &Vector::xy(0.0, 2.0), &t);
    assert!((d - 5f64.sqrt()).abs() < 1e-15);
}

#[test]
fn nearest_set_examples() {
    let t = tol();
    let ns = nearest_set(&load_scene("two_points").unwrap(), &Vector::ZERO, &t);
    assert_eq!(ns.multiplicity, 2);
    assert_eq!(ns.diameter, 2.0);
    let dx = nearest_set(&load_scene("double_x").unwrap(), &Vector::ZERO, &t);
    assert_eq!(dx.multiplicity, 2);
    let reps = dx.representatives();
    assert!(reps.iter().any(|r| r.dist(&Vector::new(0.0, 0.0, 1.0)) < 1e-12));
    assert!(reps.iter().any(|r| r.dist(&Vector::new(0.0, 0.0, -1.0)) < 1e-12));
    let c = nearest_set(&load_scene("circle").unwrap(), &Vector::xy(0.5, 0.0), &t);
    assert_eq!(c.multiplicity, 1);
    assert!(c.representatives()[0].dist(&Vector::xy(1.0, 0.0)) < 1e-15);
}

#[test]
fn wristwatch_origin_nearest_set_is_two_arcs() {
    let ns = nearest_set(&load_scene("wristwatch").unwrap(), &Vector::ZERO, &tol());
    assert!(ns.continuum);
    assert!(ns.multiplicity >= 4);
    for r in ns.representatives() {
        assert!((r.norm() - 2.0).abs() < 1e-12);
        assert!(r.x().abs() >= 1.0 - 1e-12);
    }
}

#[test]
fn normal_direction_examples() {
    let t = tol();
    let circle = load_scene("circle").unwrap();
    let f = normal_directions(&circle, &Vector::xy(1.0, 0.0), &t).unwrap();
    assert_eq!(f.directions.len(), 2);
    assert!(matches!(normal_directions(&circle, &Vector::ZERO, &t), Err(Error::NotOnX(_))));

    let tp = load_scene("two_points").unwrap();
    let f = normal_directions(&tp, &Vector::xy(1.0, 0.0), &t).unwrap();
    assert!(f.directions.len() >= 16);

    let ch = load_scene("chazal").unwrap();
    let f = normal_directions(&ch, &Vector::ZERO, &t).unwrap();
    assert_eq!(f.directions.len(), 2);
    for want in [Vector::new(0.0, 0.0, 1.0), Vector::new(0.0, 0.0, -1.0)] {
        assert!(f.directions.iter().any(|v| v.dist(&want) < 1e-9));
    }
}

#[test]
fn junction_normals_exclude_blocked_directions() {
    // ray/arc junction of the wristwatch: the outer wedge has opening 2π/3
    // and carries no normals; the reflex inner side carries the wedge between
    // the ray normal (-1, 0) and the arc normal (-1/2, -√3/2)
    let s = load_scene("wristwatch").unwrap();
    let a = Vector::xy(1.0, 3f64.sqrt());
    let f = normal_directions(&s, &a, &tol()).unwrap();
    let lo = -PI;
    let hi = -2.0 * PI / 3.0;
    let mut angles: Vec<f64> = f
        .directions
        .iter()
        .map(|v| {
            let t = v.y().atan2(v.x());
            if t > 0.0 {
                t - TAU
            } else {
                t
            }
        })
        .collect();
    angles.sort_by(f64::total_cmp);
    assert!(!angles.is_empty());
    for &t in &angles {
        assert!(t >= lo - 1e-9 && t <= hi + 1e-9, "{t}");
    }
    assert!(angles[0] - lo < 0.1);
    assert!(hi - angles[angles.len() - 1] < 0.1);
}

#[test]
fn limiting_normal_examples() {
    let t = tol();
    let circle = load_scene("circle").unwrap();
    let f = limiting_normals(&circle, &Vector::xy(1.0, 0.0), 0.1, &t).unwrap();
    let exact = [Vector::xy(1.0, 0.0), Vector::xy(-1.0, 0.0)];
    assert!(f.directions.iter().all(|v| exact.iter().any(|w| v.dist(w) <= 0.11)));

    let tp = load_scene("two_points").unwrap();
    let a = Vector::xy(1.0, 0.0);
    let lim = limiting_normals(&tp, &a, 0.5, &t).unwrap();
    let ex = normal_directions(&tp, &a, &t).unwrap();
    assert_eq!(lim.directions, ex.directions);

    // Chazal origin: cylinder normals (0, -sin θ, cos θ) of nearby bottom points
    let ch = load_scene("chazal").unwrap();
    let f = limiting_normals(&ch, &Vector::ZERO, 0.1, &t).unwrap();
    assert!(f.directions.iter().any(|v| v.dist(&Vector::new(0.0, 0.0, 1.0)) < 0.05));
    let oracle: Vec<Vector> = (1..5)
        .map(|k| {
            let th = 0.02 * k as f64;
            Vector::new(0.0, -th.sin(), th.cos())
        })
        .collect();
    assert!(oracle.iter().any(|o| f.directions.iter().any(|v| v.dist(o) < 0.05 && v.y().abs() > 1e-6)));
}

#[test]
fn sample_near_stays_in_ball() {
    let s = load_scene("parabola").unwrap();
    let pts = sample_near(&s, &Vector::ZERO, 0.1, 64, &tol());
    assert!(pts.len() >= 64);
    for p in pts {
        assert!(p.norm() <= 0.1 && p.norm() > 0.0);
        assert!((p.y() - p.x() * p.x()).abs() < 1e-12);
    }
}

#[test]
fn normal_set_probe_examples() {
    let t = tol();
    let circle = load_scene("circle").unwrap();
    let a = Vector::xy(1.0, 0.0);
    let r = normal_set_probe(&circle, &a, &[Vector::xy(0.5, 0.0), Vector::xy(0.9, 0.0)], &t).unwrap();
    assert!(r.violations.is_empty());
    let r = normal_set_probe(&circle, &a, &[Vector::xy(2.0, 0.0), Vector::xy(0.5, 0.0)], &t).unwrap();
    assert!(r.violations.is_empty());
    assert_eq!(r.checks, 3);
    let tp = load_scene("two_points").unwrap();
    let r = normal_set_probe(&tp, &a, &[Vector::xy(0.5, 0.0), Vector::xy(1.0, 1.0)], &t).unwrap();
    assert!(r.violations.is_empty());
    assert!(matches!(normal_set_probe(&tp, &a, &[Vector::xy(-0.5, 0.0)], &t), Err(Error::BadWitness(_))));
}

fn curve_point(p: &Primitive, k: usize, n: usize) -> Vector {
    match p {
        Primitive::Arc(arc) => arc.point_at(arc.start + arc.sweep * k as f64 / n as f64),
        Primitive::Line(l) => {
            let t = l.t_min.max(-10.0) + (l.t_max.min(10.0) - l.t_min.max(-10.0)) * k as f64 / n as f64;
            l.point + l.dir * t
        }
        Primitive::SampledCurve(s) => s.point(s.max_param() * k as f64 / n as f64),
        _ => unreachable!(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn curve_distances_match_dense_grid(x in -2.5f64..2.5, y in -2.5f64..2.5, which in 0usize..3) {
        let s = load_scene(["circle", "wristwatch", "parabola"][which]).unwrap();
        let q = Vector::xy(x, y);
        let t = tol();
        for p in &s.primitives {
            let got = p.nearest(&q, &t);
            let n = 200_000;
            let mut grid = f64::INFINITY;
            for k in 0..=n {
                grid = grid.min(q.dist(&curve_point(p, k, n)));
            }
            // the grid can only overestimate; its error is bounded by the
            // squared mesh size over the distance
            prop_assert!(got.distance <= grid + 1e-12);
            prop_assert!(grid - got.distance <= 10.0 * t.eps_dist + 1e-3 / n as f64 * 40.0);
            for r in &got.reps {
                prop_assert!((q.dist(r) - got.distance).abs() <= t.eps_dist);
                prop_assert!(p.nearest(r, &t).distance <= t.eps_dist);
            }
        }
    }

    #[test]
    fn distance_is_one_lipschitz(a in prop::array::uniform3(-3f64..3.0), b in prop::array::uniform3(-3f64..3.0)) {
        let s = load_scene("chazal").unwrap();
        let (x, y) = (Vector(a), Vector(b));
        let t = tol();
        let dx = medialkit::distance(&s, &x, &t);
        let dy = medialkit::distance(&s, &y, &t);
        prop_assert!((dx - dy).abs() <= x.dist(&y) + 1e-12);
    }
}

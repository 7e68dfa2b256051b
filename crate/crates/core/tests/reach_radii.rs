use medialkit::nearest::is_nearest_along;
use medialkit::reach::*;
use medialkit::{default_tolerances, load_scene, scan_medial, Error, Field, Region, Vector};

fn unit(x: f64, y: f64) -> Vector {
    Vector::xy(x, y).normalized().unwrap()
}

#[test]
fn directional_radius_examples() {
    let t = default_tolerances();
    let c = load_scene("circle").unwrap();
    let r = directional_radius(&c, &Vector::xy(1.0, 0.0), &unit(-1.0, 0.0), &t).unwrap();
    assert!((r - 1.0).abs() < 1e-6, "{r}");
    assert_eq!(directional_radius(&c, &Vector::xy(1.0, 0.0), &unit(1.0, 0.0), &t).unwrap(), f64::INFINITY);
    let tp = load_scene("two_points").unwrap();
    let r = directional_radius(&tp, &Vector::xy(1.0, 0.0), &unit(-1.0, 0.0), &t).unwrap();
    assert!((r - 1.0).abs() < 1e-6);
    // tilted rays meet the bisector x = 0 at 1/cos
    let v = unit(-0.8, 0.6);
    let r = directional_radius(&tp, &Vector::xy(1.0, 0.0), &v, &t).unwrap();
    assert!((r - 1.25).abs() < 1e-6, "{r}");

    assert!(matches!(directional_radius(&c, &Vector::xy(1.0, 0.0), &unit(0.0, 1.0), &t), Err(Error::NotNormal(_))));
    assert!(matches!(directional_radius(&c, &Vector::xy(0.5, 0.0), &unit(1.0, 0.0), &t), Err(Error::NotOnX(_))));
}

#[test]
fn interval_property_holds_inside_every_radius() {
    let t = default_tolerances();
    for (name, a, v) in [
        ("circle", Vector::xy(1.0, 0.0), unit(-1.0, 0.0)),
        ("two_points", Vector::xy(1.0, 0.0), unit(-0.8, 0.6)),
        ("parabola", Vector::ZERO, unit(0.0, 1.0)),
        ("wristwatch", Vector::xy(1.2, 1.6), unit(-0.6, -0.8)),
        ("chazal", Vector::ZERO, Vector::new(0.0, 0.0, 1.0)),
    ] {
        let s = load_scene(name).unwrap();
        let r = directional_radius(&s, &a, &v, &t).unwrap();
        assert!(r.is_finite(), "{name}");
        for f in [0.25, 0.5, 0.75] {
            assert!(is_nearest_along(&s, &a, &v, f * r, &t), "{name} at {f}");
        }
        assert!(!is_nearest_along(&s, &a, &v, r * 1.01 + 1e-3, &t), "{name} beyond");
    }
}

#[test]
fn limiting_radius_examples() {
    let t = default_tolerances();
    let c = load_scene("circle").unwrap();
    let l = limiting_directional_radius(&c, &Vector::xy(1.0, 0.0), &unit(-1.0, 0.0), &DEFAULT_ETAS, &t).unwrap();
    assert!(l.values.iter().all(|r| (r - 1.0).abs() < 1e-4), "{l:?}");
    assert!(l.stabilized && l.pairs.iter().all(|&p| p >= 32));

    let ch = load_scene("chazal").unwrap();
    let l = limiting_directional_radius(&ch, &Vector::ZERO, &Vector::new(0.0, 0.0, 1.0), &DEFAULT_ETAS, &t).unwrap();
    assert!((l.liminf - 1.0).abs() < 5e-2, "{l:?}");

    // pairs inside the window tilt by up to eta, so the minimum grows like 1/eta
    // and runs off to infinity in the limit
    let tp = load_scene("two_points").unwrap();
    let l = limiting_directional_radius(&tp, &Vector::xy(1.0, 0.0), &unit(0.0, 1.0), &[0.2, 0.1, 0.05], &t).unwrap();
    for (v, eta) in l.values.iter().zip(&l.etas) {
        assert!(*v >= 0.9 / eta, "{l:?}");
    }
    assert!(l.values.windows(2).all(|w| w[1] > 1.5 * w[0]));
    assert!(!l.stabilized);

    assert!(matches!(
        limiting_directional_radius(&c, &Vector::xy(1.0, 0.0), &unit(0.0, 1.0), &DEFAULT_ETAS, &t),
        Err(Error::DirectionNotLimiting(_))
    ));
    assert!(limiting_directional_radius(&c, &Vector::xy(1.0, 0.0), &unit(-1.0, 0.0), &[0.1, 0.2], &t).is_err());
}

#[test]
fn weak_radius_examples() {
    let t = default_tolerances();
    let c = load_scene("circle").unwrap();
    assert!((weak_radius(&c, &Vector::xy(1.0, 0.0), &t).unwrap() - 1.0).abs() < 1e-6);
    let tp = load_scene("two_points").unwrap();
    assert!((weak_radius(&tp, &Vector::xy(1.0, 0.0), &t).unwrap() - 1.0).abs() < 1e-6);
    let pb = load_scene("parabola").unwrap();
    let r = weak_radius(&pb, &Vector::ZERO, &t).unwrap();
    assert!((r - 0.5).abs() < 1e-3, "{r}");
}

#[test]
fn reaching_and_bd_radius_examples() {
    let t = default_tolerances();
    let c = load_scene("circle").unwrap();
    let a = Vector::xy(1.0, 0.0);
    assert!((reaching_radius(&c, &a, &t).unwrap() - 1.0).abs() < 1e-3);
    let b = bd_radius(&c, &a, &DEFAULT_ETAS, &t).unwrap();
    assert!((b.value - 1.0).abs() < 1e-3 && b.stabilized);

    let pb = load_scene("parabola").unwrap();
    let r = reaching_radius(&pb, &Vector::ZERO, &t).unwrap();
    assert!((r - 0.5).abs() < 1e-3, "{r}");
    let b = bd_radius(&pb, &Vector::ZERO, &DEFAULT_ETAS, &t).unwrap();
    assert!((b.value - 0.5).abs() < 1e-2, "{b:?}");

    let ch = load_scene("chazal").unwrap();
    assert!(reaching_radius(&ch, &Vector::ZERO, &t).unwrap() <= 1.05);
    assert!(bd_radius(&ch, &Vector::ZERO, &DEFAULT_ETAS, &t).unwrap().value <= 1.05);

    assert!(matches!(weak_radius(&c, &Vector::ZERO, &t), Err(Error::NotOnX(_))));
}

#[test]
fn frontier_examples() {
    let t = default_tolerances();
    let ch = load_scene("chazal").unwrap();
    let f = frontier_classify(&ch, &Vector::new(0.0, 0.0, 1.5), &t).unwrap();
    assert_eq!(f.verdict, Verdict::InClosure, "{f:?}");
    assert!(f.nearest.norm() < 1e-6);
    let f = frontier_classify(&ch, &Vector::new(0.0, 0.0, 0.5), &t).unwrap();
    assert_eq!(f.verdict, Verdict::NotInClosure);
    let c = load_scene("circle").unwrap();
    let f = frontier_classify(&c, &Vector::xy(0.5, 0.0), &t).unwrap();
    assert_eq!(f.verdict, Verdict::NotInClosure);
    assert!((f.r_tilde - 1.0).abs() < 1e-3);

    assert!(matches!(frontier_classify(&c, &Vector::ZERO, &t), Err(Error::OnMedial(_))));
    assert!(matches!(frontier_classify(&c, &Vector::xy(1.0, 0.0), &t), Err(Error::OnX(_))));
}

#[test]
fn frontier_sandwich_on_chazal() {
    // r~ = 1 < r = 2 along the vertical normal at the origin
    let t = default_tolerances();
    let ch = load_scene("chazal").unwrap();
    let v = Vector::new(0.0, 0.0, 1.0);
    let r = directional_radius(&ch, &Vector::ZERO, &v, &t).unwrap();
    assert!((r - 2.0).abs() < 1e-3, "{r}");
    for z in [1.1, 1.4, 1.7, 1.9] {
        let f = frontier_classify(&ch, &Vector::new(0.0, 0.0, z), &t).unwrap();
        assert_eq!(f.verdict, Verdict::InClosure, "{z}");
    }
}

#[test]
fn medial_samples_lie_beyond_the_limiting_radius() {
    let t = default_tolerances();
    for name in ["two_points", "parabola", "wristwatch", "circle"] {
        let s = load_scene(name).unwrap();
        let cloud = scan_medial(&s, &Region::cube(-1.0, 1.0, 0.1, 2).unwrap(), &t).unwrap();
        let mut checked = 0;
        for m in cloud.samples.iter().step_by(4) {
            for a in s.nearest_set(&m.point, &t).representatives().iter().take(2) {
                let v = (m.point - *a).normalized().unwrap();
                let l = limiting_directional_radius(&s, a, &v, &[0.1, 0.05], &t).unwrap();
                assert!(m.distance >= l.liminf - 0.05, "{name} {} {l:?}", m.point);
                checked += 1;
            }
        }
        assert!(checked > 0, "{name}");
    }
}

#[test]
fn offset_radius_examples() {
    let t = default_tolerances();
    for (name, a, v, eps) in [
        ("circle", Vector::xy(1.0, 0.0), unit(-1.0, 0.0), 0.25),
        ("parabola", Vector::ZERO, unit(0.0, 1.0), 0.1),
        ("two_points", Vector::xy(1.0, 0.0), unit(-1.0, 0.0), 0.3),
    ] {
        let s = load_scene(name).unwrap();
        let rep = offset_radius_check(&s, &a, &v, eps, &t).unwrap();
        assert!(rep.assertions.iter().all(|a| a.pass), "{name}: {:?}", rep.assertions);
    }
    let c = load_scene("circle").unwrap();
    assert!(matches!(
        offset_radius_check(&c, &Vector::xy(1.0, 0.0), &unit(-1.0, 0.0), 1.5, &t),
        Err(Error::RadiusTooSmall { .. })
    ));
}

#[test]
fn continuity_and_semicontinuity_probes() {
    let t = default_tolerances();
    let c = load_scene("circle").unwrap();
    let rep = radius_continuity_probe(&c, &Vector::xy(1.0, 0.0), &DEFAULT_ETAS, &t).unwrap();
    assert!(rep.oscillations.iter().all(|o| *o <= 1e-3), "{rep:?}");
    let pb = load_scene("parabola").unwrap();
    let rep = radius_continuity_probe(&pb, &Vector::ZERO, &DEFAULT_ETAS, &t).unwrap();
    assert!(rep.assertions[0].pass, "{rep:?}");
    // the outward radius toward the ray x = 1 changes with slope about 2.6
    // along the arc, so the oscillation shrinks linearly with eta
    let w = load_scene("wristwatch").unwrap();
    let rep = radius_continuity_probe(&w, &Vector::xy(1.2, 1.6), &[0.05, 0.025, 0.0125], &t).unwrap();
    assert!(rep.oscillations.windows(2).all(|o| o[1] < 0.7 * o[0]), "{rep:?}");
    assert!(rep.assertions[0].pass, "{rep:?}");

    for (name, a) in [
        ("circle", Vector::xy(1.0, 0.0)),
        ("two_points", Vector::xy(1.0, 0.0)),
        ("double_x", Vector::new(1.0, 1.0, 1.0)),
    ] {
        let s = load_scene(name).unwrap();
        let rep = rho_semicontinuity_probe(&s, &a, &t).unwrap();
        assert!(rep.checks > 0);
        assert!(rep.violations.is_empty(), "{name}: {:?}", rep.violations);
    }
}

#[test]
fn reaching_radius_equals_bd_radius() {
    let t = default_tolerances();
    for (name, a) in [("circle", Vector::xy(1.0, 0.0)), ("parabola", Vector::ZERO), ("chazal", Vector::ZERO)] {
        let s = load_scene(name).unwrap();
        let rep = denkowski_equality_check(&s, &a, &t).unwrap();
        assert!(rep.assertions[0].pass, "{name}: {rep:?}");
    }
}

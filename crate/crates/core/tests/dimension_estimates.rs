use medialkit::dimension::{dim_m, global_dim, local_dim, verify_dim_formula};
use medialkit::geom::{halton_ball, sphere_directions};
use medialkit::{default_tolerances, load_scene, scan_medial, Error, Region, Vector};

const SCALES: [f64; 3] = [0.4, 0.2, 0.1];

fn jitter(p: Vector, k: usize) -> Vector {
    let h = halton_ball(Vector::ZERO, 1e-4, 3, k + 1, 7)[k];
    p + h
}

#[test]
fn synthetic_clouds_have_their_dimension() {
    let t = default_tolerances();
    let line: Vec<Vector> = (0..2000).map(|k| jitter(Vector::xy(0.0, -1.0 + k as f64 / 1000.0), k)).collect();
    let plane: Vec<Vector> =
        halton_ball(Vector::ZERO, 1.0, 2, 6000, 3).into_iter().enumerate().map(|(k, p)| jitter(p, k)).collect();
    let sphere: Vec<Vector> = sphere_directions(20000).into_iter().enumerate().map(|(k, p)| jitter(p, k)).collect();
    for (pts, a, want) in [
        (&line, Vector::ZERO, 1),
        (&plane, Vector::ZERO, 2),
        (&sphere, Vector::new(0.0, 0.0, 1.0), 2),
        (&sphere, Vector::new(0.6, 0.0, 0.8), 2),
    ] {
        let e = local_dim(pts, &a, &SCALES, &t).unwrap();
        assert_eq!(e.dim, want, "{a}: {e:?}");
        assert!(e.stable);
        assert_eq!(e.pca_spectra.len(), 3);
    }
}

#[test]
fn crossing_planes_read_as_a_plane() {
    let t = default_tolerances();
    let mut pts = Vec::new();
    for p in halton_ball(Vector::ZERO, 1.0, 2, 4000, 5) {
        pts.push(Vector::new(p.x(), 0.0, p.y()));
        pts.push(Vector::new(p.x(), p.y(), 0.0));
        pts.push(Vector::new(0.0, p.x(), p.y()));
    }
    let e = local_dim(&pts, &Vector::ZERO, &SCALES, &t).unwrap();
    assert_eq!(e.dim, 2, "{e:?}");
    assert_eq!(e.pca_spectra[2].iter().filter(|&&x| x > 0.01 * e.pca_spectra[2][0]).count(), 3);
}

#[test]
fn isolated_and_sparse_samples() {
    let t = default_tolerances();
    let e = local_dim(&[Vector::ZERO], &Vector::ZERO, &SCALES, &t).unwrap();
    assert_eq!(e.dim, 0);
    let sparse: Vec<Vector> = (0..5).map(|k| Vector::xy(0.02 * k as f64, 0.0)).collect();
    assert!(matches!(local_dim(&sparse, &Vector::ZERO, &SCALES, &t), Err(Error::TooFewSamples(_))));
    assert!(local_dim(&sparse, &Vector::ZERO, &[], &t).is_err());

    let c = load_scene("circle").unwrap();
    let cloud = scan_medial(&c, &Region::cube(-0.5, 0.5, 0.05, 2).unwrap(), &t).unwrap();
    let e = local_dim(&cloud.points(), &Vector::ZERO, &SCALES, &t).unwrap();
    assert_eq!(e.dim, 0);
}

#[test]
fn nearest_set_dimensions() {
    let t = default_tolerances();
    for (name, a, want) in [
        ("two_points", Vector::ZERO, 0),
        ("wristwatch", Vector::ZERO, 1),
        ("circle", Vector::ZERO, 1),
        ("wristwatch", Vector::xy(0.0, 0.3), 0),
        ("cross_sphere", Vector::ZERO, 1),
        ("double_x", Vector::new(1.0, 0.0, 0.0), 0),
    ] {
        let s = load_scene(name).unwrap();
        let e = dim_m(&s, &a, &t).unwrap();
        assert_eq!(e.dim, want, "{name} {a}: {e:?}");
    }
    let c = load_scene("circle").unwrap();
    assert!(matches!(dim_m(&c, &Vector::xy(1.0, 0.0), &t), Err(Error::OnX(_))));
}

#[test]
fn dimension_formula_with_neighborhood_minimum() {
    let t = default_tolerances();
    let w = load_scene("wristwatch").unwrap();
    let cloud = scan_medial(&w, &Region::cube(-0.8, 0.8, 0.05, 2).unwrap(), &t).unwrap();
    let rep = verify_dim_formula(&w, &cloud, &Vector::ZERO, 0.5, &t).unwrap();
    assert_eq!(rep.dim_medial.dim, 1);
    assert_eq!(rep.dim_nearest, 1);
    assert_eq!(rep.pointwise_sum, 2);
    assert!(!rep.generic);
    assert_eq!(rep.k_min, 0);
    assert!(rep.assertions.iter().all(|a| a.pass), "{:?}", rep.assertions);

    let tp = load_scene("two_points").unwrap();
    let cloud = scan_medial(&tp, &Region::cube(-1.0, 1.0, 0.05, 2).unwrap(), &t).unwrap();
    let rep = verify_dim_formula(&tp, &cloud, &Vector::ZERO, 0.5, &t).unwrap();
    assert_eq!((rep.dim_medial.dim, rep.k_min), (1, 0));
    assert!(rep.generic && rep.assertions.iter().all(|a| a.pass));

    let dx = load_scene("double_x").unwrap();
    let r = Region::new(Vector::new(0.5, -0.5, -0.5), Vector::new(1.5, 0.5, 0.5), 0.05, 3).unwrap();
    let cloud = scan_medial(&dx, &r, &t).unwrap();
    let rep = verify_dim_formula(&dx, &cloud, &Vector::new(1.0, 0.0, 0.0), 0.3, &t).unwrap();
    assert_eq!((rep.dim_medial.dim, rep.dim_nearest, rep.k_min), (2, 0, 0), "{:?}", rep.dim_medial);
    assert!(rep.assertions.iter().all(|a| a.pass));

    assert!(verify_dim_formula(&dx, &cloud, &Vector::ZERO, 0.3, &t).is_err());
}

#[test]
fn global_dimension_examples() {
    let t = default_tolerances();
    let tp = load_scene("two_points").unwrap();
    let cloud = scan_medial(&tp, &Region::cube(-1.0, 1.0, 0.05, 2).unwrap(), &t).unwrap();
    let rep = global_dim(&tp, &cloud, &t).unwrap();
    assert_eq!((rep.max_local_dim, rep.predicted), (1, 1));

    let c = load_scene("circle").unwrap();
    let cloud = scan_medial(&c, &Region::cube(-0.5, 0.5, 0.05, 2).unwrap(), &t).unwrap();
    let rep = global_dim(&c, &cloud, &t).unwrap();
    assert_eq!((rep.max_local_dim, rep.min_dim_m, rep.predicted), (0, 1, 0));
    assert!(rep.assertions[0].pass);

    let dx = load_scene("double_x").unwrap();
    let cloud = scan_medial(&dx, &Region::cube(-0.6, 0.6, 0.05, 3).unwrap(), &t).unwrap();
    let rep = global_dim(&dx, &cloud, &t).unwrap();
    assert_eq!((rep.max_local_dim, rep.min_dim_m, rep.predicted), (2, 0, 2));

    let mut empty = cloud.clone();
    empty.samples.clear();
    assert!(matches!(global_dim(&dx, &empty, &t), Err(Error::EmptyCloud)));
}

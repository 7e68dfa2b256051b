#![no_main]

use libfuzzer_sys::fuzz_target;
use medialkit::{default_tolerances, distance, nearest_set, parse_scene, Vector};

// The first 24 bytes pick a query point, the rest is the scene document.
fuzz_target!(|data: &[u8]| {
    if data.len() < 24 {
        return;
    }
    let (head, body) = data.split_at(24);
    let Ok(text) = std::str::from_utf8(body) else { return };
    let Ok(scene) = parse_scene(text) else { return };
    let c: Vec<f64> = head.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().unwrap())).collect();
    let Ok(x) = Vector::from_slice(&c[..scene.dim]) else { return };
    if x.norm() > 1e6 {
        return;
    }
    let tol = default_tolerances();
    let d = distance(&scene, &x, &tol);
    let m = nearest_set(&scene, &x, &tol);
    assert!(d >= 0.0);
    assert!((m.distance - d).abs() <= 1e-6 * d.max(1.0));
});

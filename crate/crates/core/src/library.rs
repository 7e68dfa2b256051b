//! Locating the shipped scene files.

use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::scene::Scene;

/// Environment variable overriding the scene directory.
pub const SCENES_ENV: &str = "MEDIALKIT_SCENES";

/// Scenes shipped with the repository.
pub const GOLDEN_SCENES: [&str; 7] =
    ["circle", "two_points", "parabola", "wristwatch", "double_x", "chazal", "cross_sphere"];

/// `$MEDIALKIT_SCENES`, else `./scenes` when present, else the repository copy.
pub fn scenes_dir() -> PathBuf {
    if let Some(dir) = std::env::var_os(SCENES_ENV) {
        return PathBuf::from(dir);
    }
    let local = PathBuf::from("scenes");
    if local.is_dir() {
        return local;
    }
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenes")
}

/// Resolves a scene argument: an existing path is used as is, otherwise the
/// name is looked up in [`scenes_dir`] (the `.scene` suffix is optional).
pub fn resolve_scene(name: &str) -> PathBuf {
    let direct = PathBuf::from(name);
    if direct.is_file() {
        return direct;
    }
    let file = if name.ends_with(".scene") { name.to_string() } else { format!("{name}.scene") };
    scenes_dir().join(file)
}

pub fn load_scene(name: &str) -> Result<Scene> {
    Scene::load(resolve_scene(name))
}

//! Distance functions, nearest-point sets, medial axes, tangent cones, local
//! dimensions and reaching radii of closed sets in R² and R³.
//!
//! A [`Scene`] is a finite union of exact primitives. Everything else is
//! computed from two queries on it: the distance `d(x)` and a clustered
//! sample of the nearest-point set `m(x)`.

pub mod cone;
pub mod dimension;
pub mod error;
pub mod geom;
pub mod library;
pub mod medial;
pub mod mises;
pub mod nearest;
pub mod reach;
pub mod report;
pub mod scene;
pub mod verify;

pub use error::{Error, Result};
pub use geom::{default_tolerances, Tolerances, Vector};
pub use library::load_scene;
pub use medial::{scan_medial, MedialCloud, MedialSample, Region};
pub use nearest::{distance, nearest_set, Field, NearestSet, NormalFan};
pub use report::{Assertion, Report};
pub use scene::{parse_scene, Primitive, Scene};

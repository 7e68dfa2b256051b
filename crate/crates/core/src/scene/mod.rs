//! Closed sets described as finite unions of exact primitives.
//!
//! Scene files are JSON documents:
//!
//! ```json
//! { "name": "circle", "dim": 2,
//!   "primitives": [ { "kind": "arc", "center": [0, 0], "radius": 1 } ] }
//! ```
//!
//! Primitive kinds and their fields:
//!
//! | kind | fields |
//! |------|--------|
//! | `point_set` | `points` |
//! | `segment` | `a`, `b` |
//! | `line` | `point`, `dir`, optional `t_min`, `t_max` (a ray has `t_min = 0`) |
//! | `arc` | `center`, `radius`, optional `start`, `sweep` (radians, default full circle), in R³ also `normal` and `ref` |
//! | `sphere_patch` | `center`, `radius`, optional `exclude` |
//! | `cylinder_patch` | `axis_point`, `axis_dir`, `radius`, optional `h_min`, `h_max`, `exclude` |
//! | `plane_patch` | `point`, `normal`, `polygon` (vertices in ambient coordinates) |
//! | `sampled_curve` | `points`, optional `refine` |
//!
//! `exclude` is a list of open regions removed from a patch; each region is a
//! list of [`Condition`]s that must all hold strictly.

mod primitive;
mod spline;
mod trim;

use std::f64::consts::TAU;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Tolerances, Vector};

pub use primitive::{
    Arc, CylinderPatch, Line, PlanePatch, Primitive, Projection, SpherePatch, CONTINUUM_STEP, CURVE_NORMAL_SAMPLES,
};
pub use spline::Spline;
pub use trim::Condition;

use trim::{Cond, Region};

/// Scene document as it appears on disk.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneDoc {
    pub name: String,
    pub dim: usize,
    pub primitives: Vec<PrimitiveDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PrimitiveDoc {
    PointSet {
        points: Vec<Vec<f64>>,
    },
    Segment {
        a: Vec<f64>,
        b: Vec<f64>,
    },
    Line {
        point: Vec<f64>,
        dir: Vec<f64>,
        #[serde(default)]
        t_min: Option<f64>,
        #[serde(default)]
        t_max: Option<f64>,
    },
    Arc {
        center: Vec<f64>,
        radius: f64,
        #[serde(default)]
        start: Option<f64>,
        #[serde(default)]
        sweep: Option<f64>,
        #[serde(default)]
        normal: Option<Vec<f64>>,
        #[serde(default, rename = "ref")]
        reference: Option<Vec<f64>>,
    },
    SpherePatch {
        center: Vec<f64>,
        radius: f64,
        #[serde(default)]
        exclude: Vec<Vec<Condition>>,
    },
    CylinderPatch {
        axis_point: Vec<f64>,
        axis_dir: Vec<f64>,
        radius: f64,
        #[serde(default)]
        h_min: Option<f64>,
        #[serde(default)]
        h_max: Option<f64>,
        #[serde(default)]
        exclude: Vec<Vec<Condition>>,
    },
    PlanePatch {
        point: Vec<f64>,
        normal: Vec<f64>,
        polygon: Vec<Vec<f64>>,
    },
    SampledCurve {
        points: Vec<Vec<f64>>,
        #[serde(default)]
        refine: Option<usize>,
    },
}

/// A closed nonempty set X ⊂ R^dim, dim ∈ {2, 3}.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub name: String,
    pub dim: usize,
    pub primitives: Vec<Primitive>,
}

/// Parses and validates a scene document.
pub fn parse_scene(text: &str) -> Result<Scene> {
    let doc: SceneDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    Scene::from_doc(doc)
}

impl Scene {
    pub fn load(path: impl AsRef<Path>) -> Result<Scene> {
        let text = std::fs::read_to_string(path)?;
        parse_scene(&text)
    }

    pub fn from_doc(doc: SceneDoc) -> Result<Scene> {
        if doc.dim != 2 && doc.dim != 3 {
            return Err(Error::Validation(format!("dim must be 2 or 3, got {}", doc.dim)));
        }
        if doc.primitives.is_empty() {
            return Err(Error::Validation("scene has no primitives".into()));
        }
        let dim = doc.dim;
        let primitives = doc
            .primitives
            .into_iter()
            .enumerate()
            .map(|(i, p)| {
                convert(p, dim).map_err(|e| match e {
                    Error::Validation(m) => Error::Validation(format!("primitive {i}: {m}")),
                    other => other,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Scene { name: doc.name, dim, primitives })
    }

    /// Distance to the nearest primitive.
    pub fn distance(&self, x: &Vector, tol: &Tolerances) -> f64 {
        self.primitives.iter().map(|p| p.nearest(x, tol).distance).fold(f64::INFINITY, f64::min)
    }

    /// Primitives passing through `a`.
    pub fn primitives_at<'a>(&'a self, a: &'a Vector, tol: &'a Tolerances) -> impl Iterator<Item = &'a Primitive> + 'a {
        self.primitives.iter().filter(move |p| p.contains(a, tol))
    }

    /// Whether `a` is an interior point of a C² piece of every primitive
    /// through it, and lies on exactly one primitive.
    pub fn is_regular_at(&self, a: &Vector, tol: &Tolerances) -> bool {
        let at: Vec<&Primitive> = self.primitives_at(a, tol).collect();
        at.len() == 1 && at[0].is_regular_at(a, tol)
    }
}

fn vec_of(c: &[f64], dim: usize, what: &str) -> Result<Vector> {
    if c.len() != dim {
        return Err(Error::Validation(format!("{what} must have {dim} coordinates, got {}", c.len())));
    }
    Vector::from_slice(c).map_err(|_| Error::Validation(format!("{what} has non-finite coordinates")))
}

fn unit_of(c: &[f64], dim: usize, what: &str) -> Result<Vector> {
    vec_of(c, dim, what)?.normalized().ok_or_else(|| Error::Validation(format!("{what} must be nonzero")))
}

fn positive(r: f64, what: &str) -> Result<f64> {
    if r.is_finite() && r > 0.0 {
        Ok(r)
    } else {
        Err(Error::Validation(format!("{what} must be positive and finite, got {r}")))
    }
}

fn finite(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Validation(format!("{what} must be finite")))
    }
}

fn regions(doc: Vec<Vec<Condition>>) -> Result<Vec<Region>> {
    doc.into_iter()
        .map(|conds| {
            if conds.is_empty() {
                return Err(Error::Validation("excluded region needs at least one condition".into()));
            }
            conds
                .into_iter()
                .map(|c| {
                    Ok(match c {
                        Condition::HalfSpace { normal, offset } => Cond::HalfSpace {
                            normal: unit_of(&normal, 3, "half_space normal")?,
                            offset: finite(offset, "half_space offset")? / vec_of(&normal, 3, "n")?.norm(),
                        },
                        Condition::Ball { center, radius } => Cond::Ball {
                            center: vec_of(&center, 3, "ball center")?,
                            radius: positive(radius, "ball radius")?,
                        },
                        Condition::Cylinder { point, dir, radius } => Cond::Cylinder {
                            point: vec_of(&point, 3, "cylinder point")?,
                            dir: unit_of(&dir, 3, "cylinder dir")?,
                            radius: positive(radius, "cylinder radius")?,
                        },
                    })
                })
                .collect()
        })
        .collect()
}

fn require_3d(dim: usize, kind: &str) -> Result<()> {
    if dim == 3 {
        Ok(())
    } else {
        Err(Error::Validation(format!("{kind} requires a 3-dimensional scene")))
    }
}

fn convert(doc: PrimitiveDoc, dim: usize) -> Result<Primitive> {
    Ok(match doc {
        PrimitiveDoc::PointSet { points } => {
            if points.is_empty() {
                return Err(Error::Validation("point_set is empty".into()));
            }
            Primitive::PointSet(points.iter().map(|p| vec_of(p, dim, "point")).collect::<Result<_>>()?)
        }
        PrimitiveDoc::Segment { a, b } => {
            let (a, b) = (vec_of(&a, dim, "a")?, vec_of(&b, dim, "b")?);
            if a == b {
                return Err(Error::Validation("segment endpoints coincide".into()));
            }
            Primitive::Segment(a, b)
        }
        PrimitiveDoc::Line { point, dir, t_min, t_max } => {
            let t_min = t_min.unwrap_or(f64::NEG_INFINITY);
            let t_max = t_max.unwrap_or(f64::INFINITY);
            if t_min.is_nan() || t_max.is_nan() || t_min >= t_max {
                return Err(Error::Validation("line needs t_min < t_max".into()));
            }
            Primitive::Line(Line {
                point: vec_of(&point, dim, "point")?,
                dir: unit_of(&dir, dim, "dir")?,
                t_min,
                t_max,
            })
        }
        PrimitiveDoc::Arc { center, radius, start, sweep, normal, reference } => {
            let center = vec_of(&center, dim, "center")?;
            let radius = positive(radius, "radius")?;
            let start = finite(start.unwrap_or(0.0), "start")?;
            let sweep = finite(sweep.unwrap_or(TAU), "sweep")?;
            if sweep <= 0.0 {
                return Err(Error::Validation("arc sweep must be positive".into()));
            }
            let (e1, e2) = if dim == 2 {
                if normal.is_some() || reference.is_some() {
                    return Err(Error::Validation("planar arcs take no normal/ref".into()));
                }
                (Vector::xy(1.0, 0.0), Vector::xy(0.0, 1.0))
            } else {
                let n = unit_of(normal.as_deref().unwrap_or(&[0.0, 0.0, 1.0]), 3, "normal")?;
                let e1 = match reference {
                    Some(r) => {
                        let r = vec_of(&r, 3, "ref")?;
                        (r - n * r.dot(&n))
                            .normalized()
                            .ok_or_else(|| Error::Validation("ref must not be parallel to normal".into()))?
                    }
                    None => n.any_orthogonal(),
                };
                (e1, n.cross(&e1))
            };
            Primitive::Arc(Arc { center, radius, e1, e2, start, sweep: sweep.min(TAU) })
        }
        PrimitiveDoc::SpherePatch { center, radius, exclude } => {
            require_3d(dim, "sphere_patch")?;
            Primitive::SpherePatch(SpherePatch {
                center: vec_of(&center, 3, "center")?,
                radius: positive(radius, "radius")?,
                exclude: regions(exclude)?,
            })
        }
        PrimitiveDoc::CylinderPatch { axis_point, axis_dir, radius, h_min, h_max, exclude } => {
            require_3d(dim, "cylinder_patch")?;
            let axis_point = vec_of(&axis_point, 3, "axis_point")?;
            let axis_dir = unit_of(&axis_dir, 3, "axis_dir")?;
            let h_min = h_min.unwrap_or(f64::NEG_INFINITY);
            let h_max = h_max.unwrap_or(f64::INFINITY);
            if h_min.is_nan() || h_max.is_nan() || h_min >= h_max {
                return Err(Error::Validation("cylinder needs h_min < h_max".into()));
            }
            let mut exclude = regions(exclude)?;
            let base = axis_dir.dot(&axis_point);
            if h_min.is_finite() {
                exclude.push(vec![Cond::HalfSpace { normal: axis_dir, offset: base + h_min }]);
            }
            if h_max.is_finite() {
                exclude.push(vec![Cond::HalfSpace { normal: -axis_dir, offset: -(base + h_max) }]);
            }
            Primitive::CylinderPatch(CylinderPatch {
                axis_point,
                axis_dir,
                radius: positive(radius, "radius")?,
                h_min,
                h_max,
                exclude,
            })
        }
        PrimitiveDoc::PlanePatch { point, normal, polygon } => {
            require_3d(dim, "plane_patch")?;
            let point = vec_of(&point, 3, "point")?;
            let normal = unit_of(&normal, 3, "normal")?;
            if polygon.len() < 3 {
                return Err(Error::Validation("plane_patch polygon needs 3 vertices".into()));
            }
            let e1 = normal.any_orthogonal();
            let e2 = normal.cross(&e1);
            let polygon = polygon
                .iter()
                .map(|v| {
                    let q = vec_of(v, 3, "polygon vertex")? - point;
                    Ok([q.dot(&e1), q.dot(&e2)])
                })
                .collect::<Result<_>>()?;
            Primitive::PlanePatch(PlanePatch { point, normal, e1, e2, polygon })
        }
        PrimitiveDoc::SampledCurve { points, refine } => {
            let mut pts: Vec<Vector> = Vec::with_capacity(points.len());
            for p in &points {
                let v = vec_of(p, dim, "curve point")?;
                if pts.last() != Some(&v) {
                    pts.push(v);
                }
            }
            if pts.len() < 2 {
                return Err(Error::Validation("sampled_curve needs at least 2 distinct points".into()));
            }
            Primitive::SampledCurve(Spline::new(pts, refine.unwrap_or(16)))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::default_tolerances;

    const CIRCLE: &str = r#"{"name":"circle","dim":2,"primitives":[{"kind":"arc","center":[0,0],"radius":1}]}"#;

    #[test]
    fn parses_unit_circle() {
        let s = parse_scene(CIRCLE).unwrap();
        assert_eq!(s.dim, 2);
        assert_eq!(s.primitives.len(), 1);
        assert_eq!(s.primitives[0].kind(), "arc");
    }

    #[test]
    fn negative_radius_is_validation_error() {
        let text = CIRCLE.replace("\"radius\":1", "\"radius\":-1");
        assert!(matches!(parse_scene(&text), Err(Error::Validation(_))));
    }

    #[test]
    fn malformed_and_unknown_keys_are_parse_errors() {
        assert!(matches!(parse_scene("{"), Err(Error::Parse(_))));
        let text = CIRCLE.replace("\"radius\":1", "\"radius\":1,\"colour\":3");
        assert!(matches!(parse_scene(&text), Err(Error::Parse(_))));
        let text = CIRCLE.replace("\"dim\":2", "\"dim\":2,\"extra\":true");
        assert!(matches!(parse_scene(&text), Err(Error::Parse(_))));
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let text = CIRCLE.replace("[0,0]", "[0,0,0]");
        assert!(matches!(parse_scene(&text), Err(Error::Validation(_))));
        let text = r#"{"name":"s","dim":2,"primitives":[{"kind":"sphere_patch","center":[0,0],"radius":1}]}"#;
        assert!(matches!(parse_scene(text), Err(Error::Validation(_))));
        let text = r#"{"name":"s","dim":4,"primitives":[{"kind":"point_set","points":[[0,0,0,0]]}]}"#;
        assert!(matches!(parse_scene(text), Err(Error::Validation(_))));
    }

    #[test]
    fn curve_needs_two_distinct_points() {
        let text = r#"{"name":"c","dim":2,"primitives":[{"kind":"sampled_curve","points":[[1,1],[1,1]]}]}"#;
        assert!(matches!(parse_scene(text), Err(Error::Validation(_))));
    }

    #[test]
    fn empty_scene_is_rejected() {
        let text = r#"{"name":"c","dim":2,"primitives":[]}"#;
        assert!(matches!(parse_scene(text), Err(Error::Validation(_))));
    }

    #[test]
    fn distance_to_circle() {
        let s = parse_scene(CIRCLE).unwrap();
        assert_eq!(s.distance(&Vector::ZERO, &default_tolerances()), 1.0);
    }
}

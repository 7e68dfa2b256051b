use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use medialkit::cone::{compare_cone, sphere_medial};
use medialkit::dimension::verify_dim_formula;
use medialkit::mises::{derivative_via_sphere, directional_derivative, directional_derivative_fd};
use medialkit::reach::{frontier_classify, radius_report};
use medialkit::verify::{run_suite, SUITES};
use medialkit::{
    default_tolerances, distance, load_scene, nearest_set, scan_medial, Assertion, Error, Region, Report, Result,
    Scene, Tolerances, Vector,
};
use serde_json::json;

/// Finite-difference step of the derivative cross-check.
const FD_STEP: f64 = 1e-6;
const FD_MATCH: f64 = 1e-4;

#[derive(Parser)]
#[command(name = "medialkit", version, about = "Medial axes, tangent cones and reach radii of closed sets")]
struct Cli {
    /// Seed of the deterministic samplers.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Distance to X.
    Distance {
        scene: String,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
    /// Nearest points in X, clustered.
    Nearest {
        scene: String,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
    /// Medial samples of a grid scan, written as CSV.
    Medial {
        scene: String,
        /// Lower corner then upper corner, e.g. -2,-2,2,2.
        #[arg(long = "box", allow_hyphen_values = true)]
        bbox: String,
        #[arg(long)]
        step: f64,
        /// CSV destination; defaults to `<scene>_medial.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Directional derivative of the distance, with finite-difference check.
    Derivative {
        scene: String,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        #[arg(long, allow_hyphen_values = true)]
        dir: String,
    },
    /// Tangent cone of the medial axis against the sphere-medial cloud.
    Cone {
        scene: String,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        /// Strictly decreasing radii.
        #[arg(long, default_value = "0.4,0.2,0.1")]
        scales: String,
        #[arg(long = "box", allow_hyphen_values = true)]
        bbox: Option<String>,
        #[arg(long)]
        step: Option<f64>,
    },
    /// Directions of the sphere around a point that are medial for its nearest set.
    SphereMedial {
        scene: String,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        /// Optional CSV of the directions.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Local dimension formula at a medial point.
    Dim {
        scene: String,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        #[arg(long)]
        nbhd: f64,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
    },
    /// Radii of a point of X, and along a normal when given.
    Radius {
        scene: String,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        #[arg(long, allow_hyphen_values = true)]
        dir: Option<String>,
    },
    /// Whether a point lies in the closure of the medial axis.
    Frontier {
        scene: String,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
    /// Golden-scene assertions of one suite, or `all`.
    Verify {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(suite_names()))]
        suite: String,
    },
}

fn suite_names() -> Vec<&'static str> {
    SUITES.iter().copied().chain(["all"]).collect()
}

fn numbers(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Validation(format!("not a number: {t:?}"))))
        .collect()
}

fn point(s: &Scene, text: &str) -> Result<Vector> {
    let c = numbers(text)?;
    if c.len() != s.dim {
        return Err(Error::Validation(format!("expected {} coordinates, got {}", s.dim, c.len())));
    }
    Vector::from_slice(&c)
}

fn region(s: &Scene, text: &str, step: f64) -> Result<Region> {
    let c = numbers(text)?;
    if c.len() != 2 * s.dim {
        return Err(Error::Validation(format!("box needs {} numbers, got {}", 2 * s.dim, c.len())));
    }
    Region::new(Vector::from_slice(&c[..s.dim])?, Vector::from_slice(&c[s.dim..])?, step, s.dim)
}

/// Cube of half-width `half` around `a`, in the scene's dimension.
fn around(s: &Scene, a: &Vector, half: f64, step: f64) -> Result<Region> {
    let mut lo = *a;
    let mut hi = *a;
    for k in 0..s.dim {
        lo.0[k] -= half;
        hi.0[k] += half;
    }
    Region::new(lo, hi, step, s.dim)
}

fn run(cmd: Command, tol: &Tolerances) -> Result<Report> {
    Ok(match cmd {
        Command::Distance { scene, at } => {
            let s = load_scene(&scene)?;
            let x = point(&s, &at)?;
            Report::new("distance", &s.name).param("at", x).results(json!({ "distance": distance(&s, &x, tol) }))
        }
        Command::Nearest { scene, at } => {
            let s = load_scene(&scene)?;
            let x = point(&s, &at)?;
            Report::new("nearest", &s.name).param("at", x).results(nearest_set(&s, &x, tol))
        }
        Command::Medial { scene, bbox, step, out } => {
            let s = load_scene(&scene)?;
            let r = region(&s, &bbox, step)?;
            let cloud = scan_medial(&s, &r, tol)?;
            let out = out.unwrap_or_else(|| PathBuf::from(format!("{}_medial.csv", s.name)));
            fs::write(&out, cloud.to_csv())?;
            Report::new("medial", &s.name)
                .param("box", numbers(&bbox)?)
                .param("step", step)
                .results(json!({ "samples": cloud.samples.len(), "csv": out }))
        }
        Command::Derivative { scene, at, dir } => {
            let s = load_scene(&scene)?;
            let a = point(&s, &at)?;
            let v = point(&s, &dir)?;
            let formula = directional_derivative(&s, &a, &v, tol)?;
            let fd = directional_derivative_fd(&s, &a, &v, FD_STEP, tol)?;
            let sphere = derivative_via_sphere(&s, &a, &v, tol)?;
            let check = Assertion::close("formula = forward difference", formula.value, fd, FD_MATCH);
            Report::new("derivative", &s.name)
                .param("at", a)
                .param("dir", v)
                .param("h", FD_STEP)
                .results(json!({ "formula": formula, "forward_difference": fd, "via_sphere": sphere }))
                .assert_all([check])
        }
        Command::Cone { scene, at, scales, bbox, step } => {
            let s = load_scene(&scene)?;
            let a = point(&s, &at)?;
            let scales = numbers(&scales)?;
            let largest = scales.iter().copied().fold(0.0, f64::max);
            let smallest = scales.iter().copied().fold(f64::INFINITY, f64::min);
            let step = step.unwrap_or(smallest / 4.0);
            let r = match &bbox {
                Some(b) => region(&s, b, step)?,
                None => around(&s, &a, 1.05 * largest, step)?,
            };
            let cloud = scan_medial(&s, &r, tol)?;
            let cmp = compare_cone(&s, &cloud, &a, &scales, tol)?;
            Report::new("cone", &s.name).param("at", a).param("scales", scales).param("step", step).results(cmp)
        }
        Command::SphereMedial { scene, at, out } => {
            let s = load_scene(&scene)?;
            let a = point(&s, &at)?;
            let sm = sphere_medial(&s, &a, tol)?;
            if let Some(out) = &out {
                fs::write(out, sm.to_csv(s.dim))?;
            }
            Report::new("sphere-medial", &s.name)
                .param("at", a)
                .results(json!({ "count": sm.len(), "directions": sm.directions }))
        }
        Command::Dim { scene, at, nbhd, step } => {
            let s = load_scene(&scene)?;
            let a = point(&s, &at)?;
            let r = around(&s, &a, nbhd.max(8.0 * step) + 2.0 * step, step)?;
            let cloud = scan_medial(&s, &r, tol)?;
            let rep = verify_dim_formula(&s, &cloud, &a, nbhd, tol)?;
            let checks = rep.assertions.clone();
            Report::new("dim", &s.name)
                .param("at", a)
                .param("nbhd", nbhd)
                .param("step", step)
                .results(rep)
                .assert_all(checks)
        }
        Command::Radius { scene, at, dir } => {
            let s = load_scene(&scene)?;
            let a = point(&s, &at)?;
            let v = dir.map(|d| point(&s, &d)).transpose()?;
            let rep = radius_report(&s, &a, v.as_ref(), tol)?;
            Report::new("radius", &s.name).param("at", a).param("dir", v).results(rep)
        }
        Command::Frontier { scene, at } => {
            let s = load_scene(&scene)?;
            let x = point(&s, &at)?;
            Report::new("frontier", &s.name).param("at", x).results(frontier_classify(&s, &x, tol)?)
        }
        Command::Verify { suite } => {
            let reports = run_suite(&suite, tol)?;
            let mut checks = Vec::new();
            let mut results = serde_json::Map::new();
            for r in reports {
                checks.extend(r.assertions.into_iter().map(|mut a| {
                    a.name = format!("{}: {}", r.suite, a.name);
                    a
                }));
                results.insert(r.suite, r.results);
            }
            Report::new("verify", "golden")
                .param("suite", suite)
                .param("seed", tol.seed)
                .results(results)
                .assert_all(checks)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut tol = default_tolerances();
    tol.seed = cli.seed;
    let report = match run(cli.command, &tol) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let text = report.to_json();
    match &cli.report {
        Some(path) => {
            if let Err(e) = fs::write(path, text + "\n") {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        }
        None => {
            let _ = writeln!(std::io::stdout(), "{text}");
        }
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

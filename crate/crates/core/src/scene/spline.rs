//! C² cubic interpolation of an ordered sample of a curve.
//!
//! Knots are uniform (the `i`-th sample sits at parameter `i`) and the end
//! conditions are not-a-knot, so samples of any curve whose coordinates are
//! polynomials of degree ≤ 3 in the knot parameter are reproduced exactly.
//! A parabola sampled at uniform abscissae is therefore represented without
//! interpolation error.

use crate::geom::Vector;

#[derive(Debug, Clone, PartialEq)]
pub struct Spline {
    points: Vec<Vector>,
    /// Second derivatives at the knots.
    second: Vec<Vector>,
    /// Sub-samples per span used to seed the nearest-point search.
    pub refine: usize,
}

impl Spline {
    /// Requires at least two points; consecutive duplicates must be removed
    /// by the caller.
    pub fn new(points: Vec<Vector>, refine: usize) -> Self {
        let n = points.len();
        let second = match n {
            0..=2 => vec![Vector::ZERO; n],
            3 => {
                let m = points[0] - points[1] * 2.0 + points[2];
                vec![m; 3]
            }
            _ => not_a_knot_second_derivatives(&points),
        };
        Spline { points, second, refine: refine.max(2) }
    }

    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    pub fn spans(&self) -> usize {
        self.points.len() - 1
    }

    /// Parameter range `[0, spans]`.
    pub fn max_param(&self) -> f64 {
        self.spans() as f64
    }

    fn locate(&self, s: f64) -> (usize, f64) {
        let s = s.clamp(0.0, self.max_param());
        let i = (s.floor() as usize).min(self.spans() - 1);
        (i, s - i as f64)
    }

    /// Position, first and second derivative at parameter `s`.
    pub fn eval(&self, s: f64) -> (Vector, Vector, Vector) {
        let (i, u) = self.locate(s);
        let (y0, y1) = (self.points[i], self.points[i + 1]);
        let (m0, m1) = (self.second[i], self.second[i + 1]);
        let w = 1.0 - u;
        let p = y0 * w + y1 * u + m0 * ((w * w * w - w) / 6.0) + m1 * ((u * u * u - u) / 6.0);
        let d = (y1 - y0) + m0 * ((1.0 - 3.0 * w * w) / 6.0) + m1 * ((3.0 * u * u - 1.0) / 6.0);
        let dd = m0 * w + m1 * u;
        (p, d, dd)
    }

    pub fn point(&self, s: f64) -> Vector {
        self.eval(s).0
    }

    /// Stationary points of `|C(s) - x|²` together with both curve ends.
    pub fn nearest_candidates(&self, x: &Vector) -> Vec<f64> {
        let g = |s: f64| {
            let (p, d, _) = self.eval(s);
            (p - *x).dot(&d)
        };
        let mut out = vec![0.0, self.max_param()];
        let k = self.refine;
        for span in 0..self.spans() {
            let base = span as f64;
            let mut prev_s = base;
            let mut prev_g = g(prev_s);
            for j in 1..=k {
                let s = base + j as f64 / k as f64;
                let gs = g(s);
                if prev_g == 0.0 {
                    out.push(prev_s);
                } else if prev_g < 0.0 && gs > 0.0 {
                    out.push(self.solve_stationary(x, prev_s, s));
                }
                prev_s = s;
                prev_g = gs;
            }
            if prev_g == 0.0 {
                out.push(prev_s);
            }
        }
        out
    }

    /// Safeguarded Newton iteration for the root of `(C(s)-x)·C'(s)` in a
    /// bracket where it changes sign from negative to positive.
    fn solve_stationary(&self, x: &Vector, mut lo: f64, mut hi: f64) -> f64 {
        let mut s = 0.5 * (lo + hi);
        for _ in 0..200 {
            let (p, d, dd) = self.eval(s);
            let r = p - *x;
            let g = r.dot(&d);
            if g == 0.0 {
                return s;
            }
            if g < 0.0 {
                lo = s;
            } else {
                hi = s;
            }
            let dg = d.dot(&d) + r.dot(&dd);
            let mut next = if dg > 0.0 { s - g / dg } else { f64::NAN };
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - s).abs() <= 1e-16 * (1.0 + s.abs()) || hi - lo <= 1e-15 * (1.0 + s.abs()) {
                return next;
            }
            s = next;
        }
        s
    }
}

fn not_a_knot_second_derivatives(y: &[Vector]) -> Vec<Vector> {
    // Interior rows: M_{i-1} + 4 M_i + M_{i+1} = 6 Δ²y_i. Substituting the
    // not-a-knot relations M_0 = 2M_1 - M_2 and M_{n-1} = 2M_{n-2} - M_{n-3}
    // turns the first and last rows into 6 M_1 = rhs and 6 M_{n-2} = rhs.
    let n = y.len();
    let m = n - 2;
    let rhs: Vec<Vector> = (1..n - 1).map(|i| (y[i + 1] - y[i] * 2.0 + y[i - 1]) * 6.0).collect();
    let mut sub = vec![1.0; m];
    let mut diag = vec![4.0; m];
    let mut sup = vec![1.0; m];
    diag[0] = 6.0;
    sup[0] = 0.0;
    diag[m - 1] = 6.0;
    sub[m - 1] = 0.0;
    if m == 1 {
        diag[0] = 6.0;
    }
    // Thomas algorithm.
    let mut c = vec![0.0; m];
    let mut d = vec![Vector::ZERO; m];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..m {
        let den = diag[i] - sub[i] * c[i - 1];
        c[i] = sup[i] / den;
        d[i] = (rhs[i] - d[i - 1] * sub[i]) / den;
    }
    let mut inner = vec![Vector::ZERO; m];
    inner[m - 1] = d[m - 1];
    for i in (0..m - 1).rev() {
        inner[i] = d[i] - inner[i + 1] * c[i];
    }
    let mut out = Vec::with_capacity(n);
    out.push(if m >= 2 { inner[0] * 2.0 - inner[1] } else { inner[0] });
    out.extend_from_slice(&inner);
    out.push(if m >= 2 { inner[m - 1] * 2.0 - inner[m - 2] } else { inner[0] });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parabola(n: usize) -> Spline {
        let pts = (0..n)
            .map(|i| {
                let x = -2.0 + 4.0 * i as f64 / (n - 1) as f64;
                Vector::xy(x, x * x)
            })
            .collect();
        Spline::new(pts, 8)
    }

    #[test]
    fn reproduces_parabola_exactly() {
        let s = parabola(41);
        for k in 0..400 {
            let t = k as f64 * s.max_param() / 400.0;
            let p = s.point(t);
            assert!((p.y() - p.x() * p.x()).abs() < 1e-12, "{p}");
        }
        // curvature at the vertex (2 in y = x^2)
        let (_, d, dd) = s.eval(20.0);
        let kappa = (d.x() * dd.y() - d.y() * dd.x()).abs() / d.norm().powi(3);
        assert!((kappa - 2.0).abs() < 1e-9);
    }

    #[test]
    fn reproduces_cubic_with_four_points() {
        let pts: Vec<Vector> = (0..4)
            .map(|i| {
                let t = i as f64;
                Vector::xy(t, t * t * t - t)
            })
            .collect();
        let s = Spline::new(pts, 4);
        let p = s.point(1.5);
        assert!((p.y() - (1.5f64.powi(3) - 1.5)).abs() < 1e-12);
    }

    #[test]
    fn two_points_is_a_segment() {
        let s = Spline::new(vec![Vector::xy(0.0, 0.0), Vector::xy(2.0, 0.0)], 4);
        assert_eq!(s.point(0.5), Vector::xy(1.0, 0.0));
    }

    #[test]
    fn stationary_point_at_vertex() {
        let s = parabola(41);
        let c = s.nearest_candidates(&Vector::xy(0.0, 0.3));
        assert!(c.iter().any(|&t| s.point(t).norm() < 1e-12));
    }
}

use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

pub(crate) type P2 = [f64; 2];

const JOIN_TOL: f64 = 1e-9;
const PARAM_EPS: f64 = 1e-12;

/// One piece of a wall cell, in cell coordinates x in [0, 1], y <= 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Piece {
    Segment { a: P2, b: P2 },
    /// center + (rx cos t, ry sin t) for t running from t0 to t1.
    Arc { center: P2, rx: f64, ry: f64, t0: f64, t1: f64 },
    /// y = sum_k coeffs[k] (x - center)^k for x running from x0 to x1.
    Graph { x0: f64, x1: f64, center: f64, coeffs: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Hit {
    pub t: f64,
    pub point: P2,
    pub normal: P2,
}

fn poly(c: &[f64], z: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, k| acc * z + k)
}

fn poly_d(c: &[f64], z: f64) -> f64 {
    c.iter().enumerate().skip(1).rev().fold(0.0, |acc, (k, ck)| acc * z + k as f64 * ck)
}

fn cross(a: P2, b: P2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn unit(v: P2) -> P2 {
    let n = v[0].hypot(v[1]);
    [v[0] / n, v[1] / n]
}

impl Piece {
    pub fn point_at(&self, s: f64) -> P2 {
        match self {
            Piece::Segment { a, b } => [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])],
            Piece::Arc { center, rx, ry, t0, t1 } => {
                let t = t0 + s * (t1 - t0);
                [center[0] + rx * t.cos(), center[1] + ry * t.sin()]
            }
            Piece::Graph { x0, x1, center, coeffs } => {
                let x = x0 + s * (x1 - x0);
                [x, poly(coeffs, x - center)]
            }
        }
    }

    pub fn start(&self) -> P2 {
        self.point_at(0.0)
    }

    pub fn end(&self) -> P2 {
        self.point_at(1.0)
    }

    /// Unit tangent in the direction of traversal.
    pub fn tangent_at(&self, s: f64) -> P2 {
        match self {
            Piece::Segment { a, b } => unit([b[0] - a[0], b[1] - a[1]]),
            Piece::Arc { rx, ry, t0, t1, .. } => {
                let t = t0 + s * (t1 - t0);
                let dir = (t1 - t0).signum();
                unit([-rx * t.sin() * dir, ry * t.cos() * dir])
            }
            Piece::Graph { x0, x1, center, coeffs } => {
                let x = x0 + s * (x1 - x0);
                let dir = (x1 - x0).signum();
                unit([dir, dir * poly_d(coeffs, x - center)])
            }
        }
    }

    /// Apply x -> sx x + tx, y -> sy y + ty with sx, sy > 0.
    pub fn transformed(&self, sx: f64, sy: f64, tx: f64, ty: f64) -> Piece {
        let f = |p: &P2| [sx * p[0] + tx, sy * p[1] + ty];
        match self {
            Piece::Segment { a, b } => Piece::Segment { a: f(a), b: f(b) },
            Piece::Arc { center, rx, ry, t0, t1 } => {
                Piece::Arc { center: f(center), rx: sx * rx, ry: sy * ry, t0: *t0, t1: *t1 }
            }
            Piece::Graph { x0, x1, center, coeffs } => {
                let mut c: Vec<f64> =
                    coeffs.iter().enumerate().map(|(k, ck)| sy * ck / sx.powi(k as i32)).collect();
                c[0] += ty;
                Piece::Graph { x0: sx * x0 + tx, x1: sx * x1 + tx, center: sx * center + tx, coeffs: c }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        let ok = match self {
            Piece::Segment { a, b } => finite(a) && finite(b) && a != b,
            Piece::Arc { center, rx, ry, t0, t1 } => {
                finite(center) && finite(&[*rx, *ry, *t0, *t1]) && *rx > 0.0 && *ry > 0.0 && t0 != t1
            }
            Piece::Graph { x0, x1, center, coeffs } => {
                finite(&[*x0, *x1, *center]) && finite(coeffs) && !coeffs.is_empty() && x0 != x1
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidWall(format!("degenerate piece {self:?}")))
        }
    }

    /// Conservative bounding box [xmin, xmax, ymin, ymax].
    fn bbox(&self) -> [f64; 4] {
        let mut b = [f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY];
        let mut add = |p: P2| {
            b[0] = b[0].min(p[0]);
            b[1] = b[1].max(p[0]);
            b[2] = b[2].min(p[1]);
            b[3] = b[3].max(p[1]);
        };
        match self {
            Piece::Segment { a, b } => {
                add(*a);
                add(*b);
            }
            Piece::Arc { center, rx, ry, t0, t1 } => {
                add(self.start());
                add(self.end());
                let (lo, hi) = (t0.min(*t1), t0.max(*t1));
                for q in 0..4 {
                    let base = q as f64 * TAU / 4.0;
                    let k = ((lo - base) / TAU).ceil();
                    let mut t = base + k * TAU;
                    while t <= hi {
                        add([center[0] + rx * t.cos(), center[1] + ry * t.sin()]);
                        t += TAU;
                    }
                }
            }
            Piece::Graph { .. } => {
                let n = 256;
                for i in 0..=n {
                    add(self.point_at(i as f64 / n as f64));
                }
                let (_, m) = self.graph_bounds();
                let h = self.x_span() / n as f64;
                let pad = m * h * h / 8.0;
                b[2] -= pad;
                b[3] += pad;
            }
        }
        [b[0] - 1e-9, b[1] + 1e-9, b[2] - 1e-9, b[3] + 1e-9]
    }

    fn x_span(&self) -> f64 {
        match self {
            Piece::Graph { x0, x1, .. } => (x1 - x0).abs(),
            _ => 0.0,
        }
    }

    /// (radius about center, bound on |y''|) for a graph piece.
    fn graph_bounds(&self) -> (f64, f64) {
        match self {
            Piece::Graph { x0, x1, center, coeffs } => {
                let r = (x0 - center).abs().max((x1 - center).abs());
                let m = coeffs
                    .iter()
                    .enumerate()
                    .skip(2)
                    .map(|(k, c)| (k * (k - 1)) as f64 * c.abs() * r.powi(k as i32 - 2))
                    .sum();
                (r, m)
            }
            _ => (0.0, 0.0),
        }
    }

    /// Nearest intersection with t in (tmin, tmax).
    pub(crate) fn intersect(&self, o: P2, d: P2, tmin: f64, tmax: f64) -> Option<Hit> {
        match self {
            Piece::Segment { a, b } => {
                let e = [b[0] - a[0], b[1] - a[1]];
                let den = cross(d, e);
                if den == 0.0 {
                    return None;
                }
                let ao = [a[0] - o[0], a[1] - o[1]];
                let t = cross(ao, e) / den;
                let u = cross(ao, d) / den;
                if t > tmin && t < tmax && (-PARAM_EPS..=1.0 + PARAM_EPS).contains(&u) {
                    let point = [o[0] + t * d[0], o[1] + t * d[1]];
                    Some(Hit { t, point, normal: unit([-e[1], e[0]]) })
                } else {
                    None
                }
            }
            Piece::Arc { center, rx, ry, t0, t1 } => {
                let p = [(o[0] - center[0]) / rx, (o[1] - center[1]) / ry];
                let q = [d[0] / rx, d[1] / ry];
                let a = q[0] * q[0] + q[1] * q[1];
                let bh = p[0] * q[0] + p[1] * q[1];
                let c = p[0] * p[0] + p[1] * p[1] - 1.0;
                let disc = bh * bh - a * c;
                if disc < 0.0 {
                    return None;
                }
                let sq = disc.sqrt();
                let qq = -(bh + bh.signum() * sq);
                let (r1, r2) = if qq == 0.0 { (0.0, 0.0) } else { (qq / a, c / qq) };
                let (lo, hi) = (t0.min(*t1), t0.max(*t1));
                let mut roots = [r1.min(r2), r1.max(r2)];
                roots.sort_by(f64::total_cmp);
                roots.into_iter().filter(|t| *t > tmin && *t < tmax).find_map(|t| {
                    let z = [p[0] + t * q[0], p[1] + t * q[1]];
                    let tau = z[1].atan2(z[0]);
                    let rel = (tau - lo).rem_euclid(TAU);
                    let inside = rel <= hi - lo + PARAM_EPS || rel >= TAU - PARAM_EPS;
                    inside.then(|| {
                        let point = [o[0] + t * d[0], o[1] + t * d[1]];
                        let normal = unit([(point[0] - center[0]) / (rx * rx), (point[1] - center[1]) / (ry * ry)]);
                        Hit { t, point, normal }
                    })
                })
            }
            Piece::Graph { x0, x1, center, coeffs } => {
                graph_intersect(*x0, *x1, *center, coeffs, self.graph_bounds().1, o, d, tmin, tmax)
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn graph_intersect(
    x0: f64,
    x1: f64,
    center: f64,
    coeffs: &[f64],
    curv: f64,
    o: P2,
    d: P2,
    tmin: f64,
    tmax: f64,
) -> Option<Hit> {
    let (xl, xr) = (x0.min(x1), x0.max(x1));
    let hit_at = |t: f64| {
        let point = [o[0] + t * d[0], o[1] + t * d[1]];
        let slope = poly_d(coeffs, point[0] - center);
        Hit { t, point, normal: unit([-slope, 1.0]) }
    };
    if d[0] == 0.0 {
        if o[0] < xl || o[0] > xr || d[1] == 0.0 {
            return None;
        }
        let t = (poly(coeffs, o[0] - center) - o[1]) / d[1];
        return (t > tmin && t < tmax).then(|| hit_at(t));
    }
    // restrict to the t-range where x(t) lies over the graph
    let (ta, tb) = {
        let a = (xl - o[0]) / d[0];
        let b = (xr - o[0]) / d[0];
        (a.min(b).max(tmin), a.max(b).min(tmax))
    };
    if !(ta < tb) {
        return None;
    }
    // f(t) = ray height minus graph height
    let f = |t: f64| o[1] + t * d[1] - poly(coeffs, o[0] + t * d[0] - center);
    let df = |t: f64| d[1] - d[0] * poly_d(coeffs, o[0] + t * d[0] - center);
    let m = curv * d[0] * d[0];
    let min_step = 1e-10 * (tb - ta).max(1e-12);
    let mut t = ta;
    let mut ft = f(t);
    if ft == 0.0 && t > tmin {
        return Some(hit_at(t));
    }
    while t < tb {
        let slope = df(t).abs();
        let step = if m > 0.0 {
            (-slope + (slope * slope + 2.0 * m * ft.abs()).sqrt()) / m
        } else if slope > 0.0 {
            ft.abs() / slope
        } else {
            f64::INFINITY
        };
        let next = (t + step.max(min_step)).min(tb);
        let fn_ = f(next);
        if fn_ == 0.0 || fn_.signum() != ft.signum() {
            let root = refine(&f, &df, t, next, ft);
            return (root > tmin && root < tmax).then(|| hit_at(root));
        }
        if next >= tb {
            break;
        }
        t = next;
        ft = fn_;
    }
    None
}

/// Safeguarded Newton on a sign-change bracket.
fn refine(f: &impl Fn(f64) -> f64, df: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, flo: f64) -> f64 {
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fx = f(x);
        if fx == 0.0 {
            return x;
        }
        if fx.signum() == flo.signum() {
            lo = x;
        } else {
            hi = x;
        }
        let d = df(x);
        let mut next = if d != 0.0 { x - fx / d } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-16 * x.abs().max(1.0) || hi - lo <= 1e-16 * x.abs().max(1.0) {
            return next;
        }
        x = next;
    }
    x
}

/// A periodic wall: one cell of pieces on x in [0, 1], repeated with period 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WallFile", into = "WallFile")]
pub struct WallProfile {
    pieces: Vec<Piece>,
    corners: Vec<P2>,
    boxes: Vec<[f64; 4]>,
    y_min: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WallFile {
    period: f64,
    pieces: Vec<Piece>,
}

impl TryFrom<WallFile> for WallProfile {
    type Error = Error;
    fn try_from(f: WallFile) -> Result<Self> {
        if !(f.period.is_finite() && f.period > 0.0) {
            return Err(Error::InvalidWall(format!("period must be positive, got {}", f.period)));
        }
        if f.period == 1.0 {
            return WallProfile::new(f.pieces);
        }
        let k = 1.0 / f.period;
        WallProfile::new(f.pieces.iter().map(|p| p.transformed(k, k, 0.0, 0.0)).collect())
    }
}

impl From<WallProfile> for WallFile {
    fn from(w: WallProfile) -> Self {
        WallFile { period: 1.0, pieces: w.pieces }
    }
}

fn dist(a: P2, b: P2) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

impl WallProfile {
    /// Parse a wall description file, reporting every failure as [`Error::InvalidWall`].
    pub fn from_json(text: &str) -> Result<Self> {
        let file: WallFile = serde_json::from_str(text).map_err(|e| Error::InvalidWall(e.to_string()))?;
        WallProfile::try_from(file)
    }

    /// Validate and index a cell. The curve must run from (0, 0) to (1, 0),
    /// be continuous, stay in y <= 0 and 0 <= x <= 1, and not cross itself.
    pub fn new(pieces: Vec<Piece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidWall("no pieces".into()));
        }
        for p in &pieces {
            p.validate()?;
        }
        if dist(pieces[0].start(), [0.0, 0.0]) > JOIN_TOL {
            return Err(Error::InvalidWall("curve must start at (0, 0)".into()));
        }
        if dist(pieces[pieces.len() - 1].end(), [1.0, 0.0]) > JOIN_TOL {
            return Err(Error::InvalidWall("curve must end at (1, 0)".into()));
        }
        for (i, w) in pieces.windows(2).enumerate() {
            if dist(w[0].end(), w[1].start()) > JOIN_TOL {
                return Err(Error::InvalidWall(format!("gap between pieces {i} and {}", i + 1)));
            }
        }
        let polyline: Vec<P2> = pieces
            .iter()
            .enumerate()
            .flat_map(|(i, p)| (if i == 0 { 0 } else { 1 }..=64).map(move |k| p.point_at(k as f64 / 64.0)))
            .collect();
        if let Some(p) = polyline.iter().find(|p| p[1] > 1e-9 || p[0] < -1e-9 || p[0] > 1.0 + 1e-9) {
            return Err(Error::InvalidWall(format!("point ({}, {}) lies outside the cell", p[0], p[1])));
        }
        if self_intersects(&polyline) {
            return Err(Error::InvalidWall("curve crosses itself".into()));
        }
        let n = pieces.len();
        let mut corners = Vec::new();
        for i in 0..n {
            let prev = &pieces[(i + n - 1) % n];
            let (a, b) = (prev.tangent_at(1.0), pieces[i].tangent_at(0.0));
            if dist(a, b) > 1e-9 {
                let p = pieces[i].start();
                corners.push(p);
                if i == 0 {
                    corners.push([p[0] + 1.0, p[1]]);
                }
            }
        }
        let boxes: Vec<[f64; 4]> = pieces.iter().map(Piece::bbox).collect();
        let y_min = boxes.iter().map(|b| b[2]).fold(0.0, f64::min);
        Ok(WallProfile { pieces, corners, boxes, y_min })
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Points where the tangent jumps, in cell coordinates.
    pub fn corners(&self) -> &[P2] {
        &self.corners
    }

    /// Lowest height reached by the wall (a lower bound).
    pub fn depth(&self) -> f64 {
        -self.y_min
    }

    pub(crate) fn y_floor(&self) -> f64 {
        self.y_min
    }

    pub(crate) fn boxes(&self) -> &[[f64; 4]] {
        &self.boxes
    }

    /// Apply y -> lambda y to every piece.
    pub fn scaled_y(&self, lambda: f64) -> Result<WallProfile> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::param("lambda", format!("must be finite and > 0, got {lambda}")));
        }
        WallProfile::new(self.pieces.iter().map(|p| p.transformed(1.0, lambda, 0.0, 0.0)).collect())
    }

    /// Largest distance between corresponding points of two walls with the
    /// same piece structure, sampled along each piece.
    pub fn max_pointwise_distance(&self, other: &WallProfile) -> Option<f64> {
        if self.pieces.len() != other.pieces.len() {
            return None;
        }
        let mut worst: f64 = 0.0;
        for (a, b) in self.pieces.iter().zip(&other.pieces) {
            if std::mem::discriminant(a) != std::mem::discriminant(b) {
                return None;
            }
            for k in 0..=32 {
                let s = k as f64 / 32.0;
                worst = worst.max(dist(a.point_at(s), b.point_at(s)));
            }
        }
        Some(worst)
    }
}

fn segments_cross(p1: P2, p2: P2, q1: P2, q2: P2) -> bool {
    let d1 = [p2[0] - p1[0], p2[1] - p1[1]];
    let d2 = [q2[0] - q1[0], q2[1] - q1[1]];
    let den = cross(d1, d2);
    if den.abs() < 1e-300 {
        return false;
    }
    let w = [q1[0] - p1[0], q1[1] - p1[1]];
    let s = cross(w, d2) / den;
    let t = cross(w, d1) / den;
    (0.0..=1.0).contains(&s) && (0.0..=1.0).contains(&t)
}

fn self_intersects(pts: &[P2]) -> bool {
    let n = pts.len();
    (0..n - 1).any(|i| (i + 2..n - 1).any(|j| segments_cross(pts[i], pts[i + 1], pts[j], pts[j + 1])))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_walls() {
        assert!(WallProfile::new(vec![]).is_err());
        let up = Piece::Segment { a: [0.0, 0.0], b: [0.5, 0.2] };
        let back = Piece::Segment { a: [0.5, 0.2], b: [1.0, 0.0] };
        assert!(WallProfile::new(vec![up, back]).is_err());
        let gap = vec![
            Piece::Segment { a: [0.0, 0.0], b: [0.4, 0.0] },
            Piece::Segment { a: [0.5, 0.0], b: [1.0, 0.0] },
        ];
        assert!(WallProfile::new(gap).is_err());
        let cross = vec![
            Piece::Segment { a: [0.0, 0.0], b: [0.8, -0.5] },
            Piece::Segment { a: [0.8, -0.5], b: [0.2, -0.5] },
            Piece::Segment { a: [0.2, -0.5], b: [1.0, 0.0] },
        ];
        assert!(WallProfile::new(cross).is_err());
    }

    #[test]
    fn json_round_trip() {
        let w = WallProfile::new(vec![Piece::Segment { a: [0.0, 0.0], b: [1.0, 0.0] }]).unwrap();
        let s = serde_json::to_string(&w).unwrap();
        assert_eq!(s, r#"{"period":1.0,"pieces":[{"type":"segment","a":[0.0,0.0],"b":[1.0,0.0]}]}"#);
        let back: WallProfile = serde_json::from_str(&s).unwrap();
        assert_eq!(back, w);
        assert!(serde_json::from_str::<WallProfile>(r#"{"period":2,"pieces":[]}"#).is_err());
    }

    #[test]
    fn graph_transform_matches_pointwise() {
        let g = Piece::Graph { x0: 0.0, x1: 0.2, center: 0.0, coeffs: vec![0.0, 0.1, -3.0, 1.0] };
        let h = g.transformed(0.5, 2.0, 0.3, -0.1);
        for k in 0..=10 {
            let s = k as f64 / 10.0;
            let p = g.point_at(s);
            let q = h.point_at(s);
            assert!((q[0] - (0.5 * p[0] + 0.3)).abs() < 1e-14);
            assert!((q[1] - (2.0 * p[1] - 0.1)).abs() < 1e-13);
        }
    }

    #[test]
    fn graph_intersection_matches_quadratic() {
        // y = -x^2 on [0, 1], ray straight down at x = 0.5
        let g = Piece::Graph { x0: 0.0, x1: 1.0, center: 0.0, coeffs: vec![0.0, 0.0, -1.0] };
        let h = g.intersect([0.5, 0.0], [0.0, -1.0], 0.0, 10.0).unwrap();
        assert!((h.t - 0.25).abs() < 1e-14);
        let d = unit([-1.0, -1.0]);
        let h = g.intersect([0.7, 0.0], d, 0.0, 10.0).unwrap();
        // x = 0.7 - s, y = -s with y = -x^2: s = (0.7 - s)^2
        let s = (2.4 - (2.4f64 * 2.4 - 4.0 * 0.49).sqrt()) / 2.0;
        assert!((h.point[0] - (0.7 - s)).abs() < 1e-12);
    }
}

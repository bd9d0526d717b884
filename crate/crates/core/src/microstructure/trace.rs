use super::wall::{Hit, P2};
use super::WallProfile;
use crate::kernels1d::check_angle;
use crate::{Error, Result};

/// Hits closer than this to a corner are reported as singular.
pub const CORNER_TOL: f64 = 1e-10;
/// |cos| of the incidence angle below which a hit counts as grazing.
pub const GRAZING_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_BOUNCES: usize = 10_000;
const SELF_HIT: f64 = 1e-11;
const MAX_CELLS: i64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceOutcome {
    /// Exit abscissa, not reduced modulo the period.
    pub x: f64,
    /// Angle of the outgoing velocity, in (0, pi).
    pub theta: f64,
    pub bounces: usize,
    pub first_piece: Option<usize>,
    pub last_piece: Option<usize>,
}

struct CellHit {
    hit: Hit,
    piece: usize,
    cell: f64,
}

impl WallProfile {
    /// Trace a ray entering at (x, 0) with velocity -(cos theta, sin theta)
    /// until it crosses y = 0 upwards.
    pub fn trace(&self, x: f64, theta: f64) -> Result<TraceOutcome> {
        self.trace_with_limit(x, theta, DEFAULT_MAX_BOUNCES)
    }

    pub fn trace_with_limit(&self, x: f64, theta: f64, max_bounces: usize) -> Result<TraceOutcome> {
        check_angle(theta)?;
        if !x.is_finite() {
            return Err(Error::param("x", "must be finite"));
        }
        let mut o: P2 = [x, 0.0];
        let mut d: P2 = [-theta.cos(), -theta.sin()];
        let mut bounces = 0;
        let (mut first_piece, mut last_piece) = (None, None);
        loop {
            let t_exit = if d[1] > 0.0 { -o[1] / d[1] } else { f64::INFINITY };
            let tmin = if bounces == 0 { -1e-12 } else { SELF_HIT };
            let tmax = if d[1] > 0.0 {
                t_exit
            } else if d[1] < 0.0 {
                (o[1] - self.y_floor()) / -d[1] + 1e-9
            } else {
                4.0 / d[0].abs()
            };
            match self.first_hit(o, d, tmin, tmax)? {
                Some(CellHit { hit, piece, cell }) => {
                    let local = [hit.point[0] - cell, hit.point[1]];
                    if self.corners().iter().any(|c| (c[0] - local[0]).hypot(c[1] - local[1]) < CORNER_TOL) {
                        return Err(Error::SingularHit { x: hit.point[0], y: hit.point[1] });
                    }
                    let dn = d[0] * hit.normal[0] + d[1] * hit.normal[1];
                    if dn.abs() < GRAZING_TOL {
                        return Err(Error::SingularHit { x: hit.point[0], y: hit.point[1] });
                    }
                    d = [d[0] - 2.0 * dn * hit.normal[0], d[1] - 2.0 * dn * hit.normal[1]];
                    o = hit.point;
                    bounces += 1;
                    first_piece.get_or_insert(piece);
                    last_piece = Some(piece);
                    if bounces > max_bounces {
                        return Err(Error::BounceLimitExceeded(max_bounces));
                    }
                }
                None if d[1] > 0.0 => {
                    return Ok(TraceOutcome {
                        x: o[0] + d[0] * t_exit.max(0.0),
                        theta: d[1].atan2(d[0]),
                        bounces,
                        first_piece,
                        last_piece,
                    });
                }
                None => return Err(Error::RayEscaped),
            }
        }
    }

    /// Earliest wall hit along o + t d for t in (tmin, tmax), scanning cells
    /// in the direction of travel.
    fn first_hit(&self, o: P2, d: P2, tmin: f64, tmax: f64) -> Result<Option<CellHit>> {
        if !(tmin < tmax) {
            return Ok(None);
        }
        let xa = o[0] + d[0] * tmin.max(0.0);
        let xb = o[0] + d[0] * tmax;
        let (ka, kb) = (xa.floor() as i64, xb.floor() as i64);
        if (kb - ka).abs() > MAX_CELLS {
            return Err(Error::RayEscaped);
        }
        let step = if kb >= ka { 1 } else { -1 };
        let mut k = ka;
        loop {
            if let Some(h) = self.hit_in_cell(o, d, tmin, tmax, k as f64) {
                return Ok(Some(h));
            }
            if k == kb {
                return Ok(None);
            }
            k += step;
        }
    }

    fn hit_in_cell(&self, o: P2, d: P2, tmin: f64, tmax: f64, cell: f64) -> Option<CellHit> {
        let lo = [o[0] - cell, o[1]];
        let mut best: Option<CellHit> = None;
        for (i, (piece, b)) in self.pieces().iter().zip(self.boxes()).enumerate() {
            if !ray_meets_box(lo, d, tmin, tmax, b) {
                continue;
            }
            let upper = best.as_ref().map_or(tmax, |h| h.hit.t);
            if let Some(mut hit) = piece.intersect(lo, d, tmin, upper) {
                hit.point[0] += cell;
                best = Some(CellHit { hit, piece: i, cell });
            }
        }
        best
    }
}

/// Slab test of the segment o + t d, t in [tmin, tmax], against a box.
fn ray_meets_box(o: P2, d: P2, tmin: f64, tmax: f64, b: &[f64; 4]) -> bool {
    let (mut t0, mut t1) = (tmin, tmax);
    for (axis, (lo, hi)) in [(b[0], b[1]), (b[2], b[3])].into_iter().enumerate() {
        if d[axis] == 0.0 {
            if o[axis] < lo || o[axis] > hi {
                return false;
            }
        } else {
            let a = (lo - o[axis]) / d[axis];
            let c = (hi - o[axis]) / d[axis];
            t0 = t0.max(a.min(c));
            t1 = t1.min(a.max(c));
            if t0 > t1 {
                return false;
            }
        }
    }
    true
}

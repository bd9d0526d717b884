use super::wall::{Piece, WallProfile};
use crate::kernels1d::check_angle;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

/// Cap shape of a nub, apex at (0, 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum NubShape {
    /// h(u) = vscale (sqrt(radius^2 - u^2) - radius).
    EllipticCap { radius: f64, vscale: f64 },
    /// h(u) = -curvature u^2 / 2.
    Parabolic { curvature: f64 },
}

/// A smooth strictly concave bump on [-delta, delta] with maximum 0 at u = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NubFile", into = "NubFile")]
pub struct NubProfile {
    delta: f64,
    shape: NubShape,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct NubFile {
    delta: f64,
    shape: NubShape,
}

impl TryFrom<NubFile> for NubProfile {
    type Error = Error;
    fn try_from(f: NubFile) -> Result<Self> {
        NubProfile::new(f.delta, f.shape)
    }
}

impl From<NubProfile> for NubFile {
    fn from(n: NubProfile) -> Self {
        NubFile { delta: n.delta, shape: n.shape }
    }
}

impl NubProfile {
    pub fn new(delta: f64, shape: NubShape) -> Result<Self> {
        if !(delta > 0.0 && delta < 0.5) {
            return Err(Error::InvalidNub(format!("delta must lie in (0, 1/2), got {delta}")));
        }
        let ok = match shape {
            NubShape::EllipticCap { radius, vscale } => {
                radius.is_finite() && vscale.is_finite() && radius >= delta && vscale > 0.0
            }
            NubShape::Parabolic { curvature } => curvature.is_finite() && curvature > 0.0,
        };
        if !ok {
            return Err(Error::InvalidNub(format!("bad shape {shape:?} for delta {delta}")));
        }
        let nub = NubProfile { delta, shape };
        // sampled strict concavity
        let n = 64;
        let hs: Vec<f64> = (0..=n).map(|i| nub.h(-delta + 2.0 * delta * i as f64 / n as f64)).collect();
        if hs.windows(3).any(|w| w[0] + w[2] - 2.0 * w[1] >= 0.0) {
            return Err(Error::InvalidNub("profile is not strictly concave".into()));
        }
        Ok(nub)
    }

    /// Circular cap of the given radius.
    pub fn circular(delta: f64, radius: f64) -> Result<Self> {
        NubProfile::new(delta, NubShape::EllipticCap { radius, vscale: 1.0 })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn shape(&self) -> NubShape {
        self.shape
    }

    pub fn h(&self, u: f64) -> f64 {
        match self.shape {
            NubShape::EllipticCap { radius, vscale } => vscale * ((radius * radius - u * u).max(0.0).sqrt() - radius),
            NubShape::Parabolic { curvature } => -0.5 * curvature * u * u,
        }
    }

    pub fn dh(&self, u: f64) -> f64 {
        match self.shape {
            NubShape::EllipticCap { radius, vscale } => -vscale * u / (radius * radius - u * u).sqrt(),
            NubShape::Parabolic { curvature } => -curvature * u,
        }
    }

    /// Angle of the upward normal at (u, h(u)); pi/2 at the apex.
    pub fn alpha(&self, u: f64) -> f64 {
        1f64.atan2(-self.dh(u))
    }

    /// The height of both feet, h(delta) = h(-delta) < 0.
    pub fn foot(&self) -> f64 {
        self.h(self.delta)
    }

    /// The same nub stretched vertically by `lambda`.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        let shape = match self.shape {
            NubShape::EllipticCap { radius, vscale } => NubShape::EllipticCap { radius, vscale: vscale * lambda },
            NubShape::Parabolic { curvature } => NubShape::Parabolic { curvature: curvature * lambda },
        };
        NubProfile::new(self.delta, shape)
    }

    /// Right half on [0, delta] then left half on [1 - delta, 1].
    fn halves(&self) -> (Piece, Piece) {
        let d = self.delta;
        match self.shape {
            NubShape::EllipticCap { radius, vscale } => {
                let t = (d / radius).acos();
                let half = |cx: f64, t0: f64, t1: f64| Piece::Arc {
                    center: [cx, -vscale * radius],
                    rx: radius,
                    ry: vscale * radius,
                    t0,
                    t1,
                };
                (half(0.0, FRAC_PI_2, t), half(1.0, std::f64::consts::PI - t, FRAC_PI_2))
            }
            NubShape::Parabolic { curvature } => {
                let coeffs = vec![0.0, 0.0, -0.5 * curvature];
                (
                    Piece::Graph { x0: 0.0, x1: d, center: 0.0, coeffs: coeffs.clone() },
                    Piece::Graph { x0: 1.0 - d, x1: 1.0, center: 1.0, coeffs },
                )
            }
        }
    }
}

/// Put a nub at every integer and a copy of `wall` scaled by 1 - 2 delta
/// between consecutive nubs. The first and last pieces of the result are the
/// two halves of the nub.
pub fn attach_nubs(wall: &WallProfile, nub: &NubProfile) -> Result<WallProfile> {
    let d = nub.delta();
    let s = 1.0 - 2.0 * d;
    let (right, left) = nub.halves();
    let mut pieces = vec![right];
    pieces.extend(wall.pieces().iter().map(|p| p.transformed(s, s, d, nub.foot())));
    pieces.push(left);
    WallProfile::new(pieces)
}

/// True when piece `i` of a wall built by [`attach_nubs`] belongs to a nub.
pub fn is_nub_piece(wall: &WallProfile, i: usize) -> bool {
    i == 0 || i + 1 == wall.pieces().len()
}

/// The nub's action on a single bounce at abscissa u:
/// (entry x, exit angle) = (u - h(u) cot theta, 2 alpha(u) - theta).
pub fn nub_maps(nub: &NubProfile, u: f64, theta: f64) -> Result<(f64, f64)> {
    check_angle(theta)?;
    if u.abs() > nub.delta() {
        return Err(Error::param("u", format!("must lie in [-delta, delta], got {u}")));
    }
    Ok((u - nub.h(u) * theta.cos() / theta.sin(), 2.0 * nub.alpha(u) - theta))
}

/// Where a ray entering the nubbed wall at (x, 0) meets the base copy,
/// expressed in the base wall's coordinates.
pub fn coarse_map(nub: &NubProfile, x: f64, theta: f64) -> Result<f64> {
    check_angle(theta)?;
    let d = nub.delta();
    Ok((x - nub.foot().abs() * theta.cos() / theta.sin() - d) / (1.0 - 2.0 * d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::microstructure::build::flat;

    #[test]
    fn semicircular_nub_on_flat_wall() {
        let nub = NubProfile::circular(0.1, 0.1).unwrap();
        let w = attach_nubs(&flat(), &nub).unwrap();
        assert_eq!(w.pieces().len(), 3);
        let mid = w.pieces()[1].point_at(0.5);
        assert!((mid[1] + 0.1).abs() < 1e-14);
        // the apex is smooth, the two feet are corners
        assert!(!w.corners().iter().any(|c| c[1] == 0.0));
    }

    #[test]
    fn alpha_at_apex() {
        let nub = NubProfile::new(0.05, NubShape::Parabolic { curvature: 4.0 }).unwrap();
        assert!((nub.alpha(0.0) - FRAC_PI_2).abs() < 1e-15);
        assert!(nub.alpha(0.01) < FRAC_PI_2);
    }

    #[test]
    fn rejects_bad_nubs() {
        assert!(NubProfile::circular(0.1, 0.05).is_err());
        assert!(NubProfile::circular(0.6, 1.0).is_err());
        assert!(NubProfile::new(0.1, NubShape::Parabolic { curvature: -1.0 }).is_err());
    }
}

use super::wall::{Piece, WallProfile};
use crate::kernels1d::{ArcParams, TeethParams};
use crate::Result;
use std::f64::consts::FRAC_PI_2;

/// The flat wall y = 0.
pub fn flat() -> WallProfile {
    WallProfile::new(vec![Piece::Segment { a: [0.0, 0.0], b: [1.0, 0.0] }]).expect("flat wall is valid")
}

/// Plateau at height 0 on [0, 1/2], slot of depth r/2 on (1/2, 1).
pub fn build_rect_teeth(params: TeethParams) -> Result<WallProfile> {
    let h = -0.5 * params.r();
    WallProfile::new(vec![
        Piece::Segment { a: [0.0, 0.0], b: [0.5, 0.0] },
        Piece::Segment { a: [0.5, 0.0], b: [0.5, h] },
        Piece::Segment { a: [0.5, h], b: [1.0, h] },
        Piece::Segment { a: [1.0, h], b: [1.0, 0.0] },
    ])
}

/// Circular arc through (0, 0) and (1, 0) subtending 2 xi, concave up.
pub fn build_circular_arc(params: ArcParams) -> Result<WallProfile> {
    build_elliptic_arc(params, 1.0)
}

/// The circular arc compressed vertically by 1/lambda, so that
/// `foreshorten_by(build_elliptic_arc(p, l), l)` is `build_circular_arc(p)`.
pub fn build_elliptic_arc(params: ArcParams, lambda: f64) -> Result<WallProfile> {
    let xi = params.xi();
    let radius = 0.5 / xi.sin();
    let cy = 0.5 / xi.tan();
    WallProfile::new(vec![Piece::Arc {
        center: [0.5, cy / lambda],
        rx: radius,
        ry: radius / lambda,
        t0: -FRAC_PI_2 - xi,
        t1: -FRAC_PI_2 + xi,
    }])
}

/// lambda = sqrt(1 + m/J), the vertical stretch relating the disk
/// billiard to a point particle.
pub fn foreshortening_factor(m: f64, j: f64) -> Result<f64> {
    crate::diskstrip::gamma_of(m, j)?;
    Ok((1.0 + m / j).sqrt())
}

pub fn foreshorten(wall: &WallProfile, m: f64, j: f64) -> Result<WallProfile> {
    wall.scaled_y(foreshortening_factor(m, j)?)
}

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("angle {0} is outside the open interval (0, pi)")]
    AngleOutOfRange(f64),

    #[error("chord coordinate {0} is outside the open interval (-1, 1)")]
    ChordOutOfRange(f64),

    #[error("state ({u}, {v}) is not inside the ellipse")]
    OutsideEllipse { u: f64, v: f64 },

    #[error("velocity lies on the wall plane (v2 = {0})")]
    OnWallPlane(f64),

    #[error("velocity is at a chart pole")]
    ChartPole,

    #[error("circular-arc sampler produced theta' = {0} outside (0, pi)")]
    BranchFailure(f64),

    #[error("ray hit a corner or grazed the wall at ({x}, {y})")]
    SingularHit { x: f64, y: f64 },

    #[error("ray exceeded {0} bounces")]
    BounceLimitExceeded(usize),

    #[error("ray left the wall region without exiting")]
    RayEscaped,

    #[error("too many singular hits: {singular} of {total}")]
    TooManySingular { singular: usize, total: usize },

    #[error("invalid wall: {0}")]
    InvalidWall(String),

    #[error("invalid nub profile: {0}")]
    InvalidNub(String),

    #[error("quadrature did not converge: estimate {estimate}, error {error}")]
    NoConvergence { estimate: f64, error: f64 },

    #[error("histogram shapes differ")]
    HistogramMismatch,

    #[error("kernel spec: {0}")]
    KernelSpec(String),
}

impl Error {
    /// Stable snake_case name of the variant, for machine-readable output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::AngleOutOfRange(_) => "angle_out_of_range",
            Error::ChordOutOfRange(_) => "chord_out_of_range",
            Error::OutsideEllipse { .. } => "outside_ellipse",
            Error::OnWallPlane(_) => "on_wall_plane",
            Error::ChartPole => "chart_pole",
            Error::BranchFailure(_) => "branch_failure",
            Error::SingularHit { .. } => "singular_hit",
            Error::BounceLimitExceeded(_) => "bounce_limit_exceeded",
            Error::RayEscaped => "ray_escaped",
            Error::TooManySingular { .. } => "too_many_singular",
            Error::InvalidWall(_) => "invalid_wall",
            Error::InvalidNub(_) => "invalid_nub",
            Error::NoConvergence { .. } => "no_convergence",
            Error::HistogramMismatch => "histogram_mismatch",
            Error::KernelSpec(_) => "kernel_spec",
        }
    }

    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}

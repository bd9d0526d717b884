//! Pinned tolerances and sample sizes for the verification suite.

/// Exact identities evaluated in floating point (energy, involutions, round trips).
pub const EXACT: f64 = 1e-10;
/// Identities that involve only a handful of flops per state.
pub const EXACT_TIGHT: f64 = 1e-12;
/// Random states per exact-identity check.
pub const IDENTITY_STATES: usize = 10_000;
/// K-steps for the energy and contact-direction checks.
pub const ENERGY_STEPS: usize = 1_000_000;

/// Relative error of the Abel transform against closed forms.
pub const ABEL_REL: f64 = 1e-8;
pub const ABEL_GRID: usize = 100;
/// Largest x on the Abel grid.
pub const ABEL_X_MAX: f64 = 4.0;

pub const REVERSIBILITY_N: usize = 1_000_000;
pub const REVERSIBILITY_SIGMAS: f64 = 3.0;

pub const TEETH_N: usize = 100_000;
pub const TEETH_SIGMAS: f64 = 3.0;
pub const ARC_N: usize = 200_000;
pub const ARC_BINS: usize = 64;
pub const ARC_TV: f64 = 0.03;
pub const LAMBERT_N: usize = 1_000_000;
pub const LAMBERT_BINS: usize = 64;
pub const LAMBERT_TV: f64 = 0.02;
pub const INVOLUTION_N: usize = 10_000;
/// Position and angle tolerance for a retraced ray.
pub const INVOLUTION_TOL: f64 = 1e-8;
pub const INVOLUTION_RATE: f64 = 0.999;

pub const PUSHFORWARD_N: usize = 1_000_000;
pub const PUSHFORWARD_BINS: usize = 16;
pub const PUSHFORWARD_TV: f64 = 0.03;
pub const POINTWISE_STEPS: usize = 1_000;

pub const ERGODIC_STEPS: usize = 10_000_000;
pub const ERGODIC_BATCHES: usize = 100;
pub const ERGODIC_SIGMAS: f64 = 4.0;
pub const ENSEMBLE_CHAINS: usize = 10_000;
pub const ENSEMBLE_STEPS: usize = 1_000;

pub const CONFINEMENT_STEPS: usize = 100_000;
pub const NOSLIP_STEPS: usize = 1_000_000;
pub const NOSLIP_TV: f64 = 0.05;
pub const NOSLIP_BINS: usize = 64;

pub const NUB_DELTAS: [f64; 3] = [0.1, 0.05, 0.025];
pub const NUB_THETAS: usize = 32;
pub const NUB_BINS: usize = 32;
pub const NUB_N: usize = 100_000;
/// Share of the theta grid kept when taking the sup-deviation.
pub const NUB_KEEP: f64 = 0.9;

pub const M1M2_GRID: usize = 256;
pub const M1M2_REL: f64 = 1e-4;
pub const M1M2_N: usize = 1_000_000;
pub const M1M2_SIGMAS: f64 = 3.0;

/// Default seed when neither a flag nor ERGO_SEED is given.
pub const DEFAULT_SEED: u64 = 7;

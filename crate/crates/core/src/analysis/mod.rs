//! Histograms, quadrature, the Abel transform and the statistical checks
//! behind the verification suite.

mod checks;
mod histogram;
mod quadrature;
mod stats;

pub use checks::{
    coupled_deviation, ensemble_average_test, identity_check_m1m2, identity_check_m1m2_kernel, m2_integral_chords,
    m2_integral_direct, octant_observables, pushforward_equivalence, reversibility_test, standard_observables,
    state_axes, time_average_test, ChordAxis, IdentityCheck, Observable, PairStat, PushforwardOutcome,
    ReversibilityOutcome, Rule, TestFamily, TwoSided,
};
pub use histogram::{histogram_tv, ks_statistic, tv_distance, Axis, Histogram};
pub use quadrature::{abel_transform, gauss_legendre, integrate, midpoint};
pub use stats::{batch_means, familywise_sigmas, MeanAcc, StatReport};

use ergo_core::altwalk::{AltState, EllipseGeom, Sign};
use ergo_core::analysis::*;
use ergo_core::kernels1d::{cosine_conjugate, hat, AngleKernel};
use ergo_core::microstructure::{space_averaged_kernel, teeth_wall};
use ergo_core::parallel::{Exec, Runner};
use statrs::function::gamma::gamma;
use std::f64::consts::PI;

#[test]
fn abel_of_powers_is_a_beta_function() {
    for p in [0.0, 0.5, 1.0, 2.0, 3.5] {
        let beta = gamma(p + 1.0) * gamma(0.5) / gamma(p + 1.5);
        for x in [0.01, 0.3, 1.0, 2.7, 10.0] {
            let got = abel_transform(|t| t.powf(p), x).unwrap();
            let want = x.powf(p + 0.5) * beta;
            assert!((got - want).abs() <= 1e-10 * want.max(1.0), "p={p} x={x}: {got} vs {want}");
        }
    }
    for x in [0.0, 0.25, 1.0, 4.0] {
        assert!((abel_transform(|_| 0.5, x).unwrap() - x.sqrt()).abs() < 1e-13);
    }
    assert!(abel_transform(|_| 1.0, -1.0).is_err());
}

type Moment = fn(AltState) -> f64;

/// E[u^2], E[v^2] and E[uv] under m^2 from the disk image, where the
/// coordinates are uncorrelated with variance 1/4.
fn second_moments(gamma: f64) -> (f64, f64, f64) {
    let (s, c) = gamma.sin_cos();
    let k = 0.25 / (s * s);
    (k, k, -c * k)
}

#[test]
fn m2_integrals_match_second_moments() {
    for gamma in [0.4, PI / 3.0, PI / 2.0, 2.5] {
        let g = EllipseGeom::new(gamma).unwrap();
        let (uu, vv, uv) = second_moments(gamma);
        let cases: [(Moment, f64); 4] =
            [(|s| s.u * s.u, uu), (|s| s.v * s.v, vv), (|s| s.u * s.v, uv), (|_| 1.0, 1.0)];
        for (f, want) in cases {
            assert!((m2_integral_direct(&g, f, 64) - want).abs() < 1e-12);
            for axis in [ChordAxis::AlongU, ChordAxis::AlongV] {
                let got = m2_integral_chords(&g, f, 64, Rule::GaussLegendre, axis).unwrap();
                assert!((got - want).abs() < 1e-12, "gamma={gamma} {axis:?}: {got} vs {want}");
            }
        }
        let odd = m2_integral_direct(&g, |s| s.s.value() * s.u, 32);
        assert!(odd.abs() < 1e-14);
    }
}

#[test]
fn midpoint_chord_rule_is_second_order() {
    let gamma = 1.1;
    let g = EllipseGeom::new(gamma).unwrap();
    // u is quadratic in the chord coordinate along U, so the inner rule is not exact.
    let want = second_moments(gamma).0;
    let err = |n| (m2_integral_chords(&g, |s| s.u * s.u, n, Rule::Midpoint, ChordAxis::AlongU).unwrap() - want).abs();
    for n in [16, 32, 64] {
        let order = (err(n) / err(2 * n)).log2();
        assert!(order >= 1.9, "n={n}: order {order}");
    }
}

#[test]
fn familywise_thresholds() {
    assert!((familywise_sigmas(3.0, 1) - 3.0).abs() < 1e-9);
    assert!((familywise_sigmas(3.0, 21) - 3.829197664694222).abs() < 1e-9);
    assert!((familywise_sigmas(3.0, 4) - 3.3995578444761367).abs() < 1e-9);
    assert!(familywise_sigmas(3.0, 100) > familywise_sigmas(3.0, 10));
}

#[test]
fn ks_and_tv_basics() {
    let xs: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
    assert!(ks_statistic(&xs, |x| x) <= 0.5e-3 + 1e-12);
    assert!((ks_statistic(&xs, |x| x * x) - 0.25).abs() < 2e-3);
    assert_eq!(tv_distance(&[0.5, 0.5], &[1.0, 0.0]).unwrap(), 0.5);
    assert!(tv_distance(&[1.0], &[0.5, 0.5]).is_err());

    let mut a = Histogram::uniform1(0.0, 1.0, 4).unwrap();
    let mut b = a.clone();
    a.add(&[0.1]);
    b.add(&[0.9]);
    b.add(&[1.5]);
    a.merge(&b).unwrap();
    assert_eq!(a.counts(), &[1, 0, 0, 1]);
    assert_eq!(a.outside(), 1);
    assert!(a.merge(&Histogram::uniform1(0.0, 1.0, 3).unwrap()).is_err());
}

#[test]
fn sequential_and_parallel_agree_bitwise() {
    let g = EllipseGeom::new(PI / 3.0).unwrap();
    let q = hat(cosine_conjugate(AngleKernel::rect_teeth(0.8).unwrap()));
    let start = AltState::new(0.1, 0.2, Sign::Plus);
    let obs = standard_observables(&g);
    let run = |exec| {
        let r = Runner::new(11).with_exec(exec).with_chunk(1000);
        ensemble_average_test(&g, &q, start, 10_000, 20, &obs, 3.0, &r).unwrap()
    };
    assert_eq!(run(Exec::Sequential), run(Exec::Parallel));

    let wall = teeth_wall(0.6).unwrap();
    let row = |exec| space_averaged_kernel(&wall, 1.0, 50_000, 32, &Runner::new(5).with_exec(exec)).unwrap();
    assert_eq!(row(Exec::Sequential), row(Exec::Parallel));
}

use ergo_core::analysis::{ks_statistic, tv_distance};
use ergo_core::kernels1d::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Specular share of the slot wall from the mirror-unfolded slot: a ray
/// entering the slot at a uniform offset crosses floor(offset + y) side walls,
/// and leaves specularly when that count is even. Integrated on a fine grid.
fn unfolded_specular_share(r: f64, theta: f64) -> f64 {
    let y = 2.0 * r / theta.tan().abs();
    let n = 200_000;
    let even = (0..n)
        .filter(|i| {
            let u = (*i as f64 + 0.5) / n as f64;
            ((u + y).floor() as i64) % 2 == 0
        })
        .count();
    0.5 + 0.5 * even as f64 / n as f64
}

#[test]
fn teeth_law_matches_unfolded_slot() {
    for r in [0.1, 0.25, 0.5, 1.0, 2.0, 3.7] {
        for i in 1..40 {
            let theta = PI * i as f64 / 40.0;
            let p = rect_teeth_prob(TeethParams::new(r).unwrap(), theta).unwrap();
            let oracle = unfolded_specular_share(r, theta);
            assert!((p - oracle).abs() < 2e-5, "r={r} theta={theta}: {p} vs {oracle}");
        }
    }
}

#[test]
fn teeth_examples() {
    let p = |r: f64, t: f64| rect_teeth_prob(TeethParams::new(r).unwrap(), t).unwrap();
    assert!((p(0.25, PI / 4.0) - 0.75).abs() < 1e-12);
    assert!((p(0.5, PI / 4.0) - 0.5).abs() < 1e-12);
    assert!((p(1.0, PI / 2.0) - 1.0).abs() < 1e-12);
}

/// Reflect a ray inside the circle through the chord endpoints (0,0), (1,0)
/// whose lower arc subtends 2 xi, until it climbs back through y = 0.
fn reflect_in_circle(xi: f64, theta: f64, x: f64) -> f64 {
    let r = 0.5 / xi.sin();
    let c = [0.5, 0.5 / xi.tan()];
    let mut p = [x, 0.0];
    let mut d = [-theta.cos(), -theta.sin()];
    for _ in 0..100_000 {
        if d[1] > 0.0 {
            // leaving upward: the chord is crossed before the circle again
            let t_top = -p[1] / d[1];
            let q = [p[0] + t_top * d[0], 0.0];
            if q[0] >= 0.0 && q[0] <= 1.0 {
                return d[1].atan2(d[0]);
            }
        }
        let w = [p[0] - c[0], p[1] - c[1]];
        let b = w[0] * d[0] + w[1] * d[1];
        let cc = w[0] * w[0] + w[1] * w[1] - r * r;
        let t = -b + (b * b - cc).max(0.0).sqrt();
        let h = [p[0] + t * d[0], p[1] + t * d[1]];
        let n = [(h[0] - c[0]) / r, (h[1] - c[1]) / r];
        let dn = d[0] * n[0] + d[1] * n[1];
        d = [d[0] - 2.0 * dn * n[0], d[1] - 2.0 * dn * n[1]];
        p = h;
    }
    panic!("no exit");
}

#[test]
fn arc_exit_matches_direct_reflection() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..20_000 {
        let xi = 0.05 + 1.4 * rand::Rng::random::<f64>(&mut rng);
        let theta = 0.05 + (PI - 0.1) * rand::Rng::random::<f64>(&mut rng);
        let x = 0.001 + 0.998 * rand::Rng::random::<f64>(&mut rng);
        let Some(t) = circ_arc_exit(xi, theta, x) else { continue };
        let t = if t > PI { t - 2.0 * PI } else { t };
        let oracle = reflect_in_circle(xi, theta, x);
        worst = worst.max((t - oracle).abs());
    }
    assert!(worst < 1e-8, "worst {worst}");
}

#[test]
fn lambda1_sampler_has_cosine_law() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let xs: Vec<f64> = (0..200_000).map(|_| sample_lambda1(&mut rng)).collect();
    let d = ks_statistic(&xs, |t| 0.5 * (1.0 - t.cos()));
    assert!(d < 1.63 / (xs.len() as f64).sqrt(), "KS {d}");
    let us: Vec<f64> = (0..200_000).map(|_| sample_m1(&mut rng)).collect();
    let d = ks_statistic(&us, |x| 0.5 * (x + 1.0));
    assert!(d < 1.63 / (us.len() as f64).sqrt(), "KS {d}");
}

fn hist(xs: &[f64], lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    let mut h = vec![0.0; bins];
    for x in xs {
        h[(((x - lo) / (hi - lo) * bins as f64) as usize).min(bins - 1)] += 1.0 / xs.len() as f64;
    }
    h
}

#[test]
fn arc_kernel_preserves_lambda1() {
    let k = AngleKernel::circ_arc(0.7).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let out: Vec<f64> = (0..200_000).map(|_| k.sample(sample_lambda1(&mut rng), &mut rng).unwrap()).collect();
    let exact: Vec<f64> = (0..32).map(|i| lambda1_mass(PI * i as f64 / 32.0, PI * (i + 1) as f64 / 32.0)).collect();
    assert!(tv_distance(&hist(&out, 0.0, PI, 32), &exact).unwrap() < 0.01);
}

#[test]
fn dagger_and_hat_commute_for_teeth() {
    let q = cosine_conjugate(AngleKernel::rect_teeth(0.5).unwrap());
    let a = dagger(hat(q.clone()));
    let b = hat(dagger(q));
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = 100_000;
    let sa: Vec<f64> = (0..n).map(|_| a.sample(sample_m1(&mut rng), &mut rng).unwrap()).collect();
    let sb: Vec<f64> = (0..n).map(|_| b.sample(sample_m1(&mut rng), &mut rng).unwrap()).collect();
    assert!(tv_distance(&hist(&sa, -1.0, 1.0, 32), &hist(&sb, -1.0, 1.0, 32)).unwrap() < 0.02);
}

#[test]
fn quadrant_hat_keeps_sign_and_is_uniform_on_the_half() {
    let q = hat(quadrant_counterexample());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut pos = Vec::new();
    for _ in 0..50_000 {
        let x = sample_m1(&mut rng);
        let y = q.sample(x, &mut rng).unwrap();
        assert!(y * x > 0.0, "{x} -> {y}");
        if x > 0.0 {
            pos.push(y);
        }
    }
    let d = ks_statistic(&pos, |y| y.clamp(0.0, 1.0));
    assert!(d < 1.63 / (pos.len() as f64).sqrt(), "KS {d}");
}

proptest! {
    #[test]
    fn teeth_decomposition_is_two_atoms(r in 0.01f64..5.0, theta in 0.01f64..3.13) {
        let k = AngleKernel::rect_teeth(r).unwrap();
        let d = k.decompose(theta).unwrap();
        prop_assert!((d.total() - 1.0).abs() < 1e-12);
        for a in &d.atoms {
            prop_assert!((a.location - theta).abs() < 1e-12 || (a.location - (PI - theta)).abs() < 1e-12);
        }
    }

    #[test]
    fn samplers_stay_in_open_interval(xi in 0.01f64..1.55, theta in 0.001f64..3.1, seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = AngleKernel::circ_arc(xi).unwrap().sample(theta, &mut rng).unwrap();
        prop_assert!(t > 0.0 && t < PI);
        let q = hat(cosine_conjugate(AngleKernel::circ_arc(xi).unwrap()));
        let x = q.sample(theta.cos(), &mut rng).unwrap();
        prop_assert!(x > -1.0 && x < 1.0);
    }

    #[test]
    fn shorthand_round_trips_through_json(r in 0.01f64..10.0, xi in 0.01f64..1.5) {
        for text in [format!("rect_teeth:{r}"), format!("circ_arc:{xi}")] {
            let spec: KernelSpec = text.parse().unwrap();
            let json = serde_json::to_string(&spec).unwrap();
            let back: KernelSpec = json.parse().unwrap();
            prop_assert_eq!(spec, back);
        }
    }
}

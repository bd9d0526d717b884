use ergo_core::altwalk::{AltState, Sign};
use ergo_core::analysis::{ks_statistic, tv_distance, Axis, Histogram};
use ergo_core::diskstrip::*;
use ergo_core::kernels1d::AngleKernel;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

const BODIES: [(f64, f64); 4] = [(1.0, 1.0), (1.0, 0.5), (2.0, 0.3), (0.7, 3.0)];

fn kinetic(m: f64, j: f64, a: [f64; 3], b: [f64; 3]) -> f64 {
    0.5 * j * a[0] * b[0] + 0.5 * m * (a[1] * b[1] + a[2] * b[2])
}

/// Standard normal by Box-Muller.
fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = 1.0 - rng.random::<f64>();
    let v: f64 = rng.random();
    (-2.0 * u.ln()).sqrt() * (2.0 * PI * v).cos()
}

/// Lambda^2 as the flux measure |<v, n2>| dA on the unit sphere of frame
/// coordinates: uniform directions accepted with probability |a2|.
fn flux_sample(body: &BodyParams, rng: &mut ChaCha8Rng) -> Velocity {
    loop {
        let x = [normal(rng), normal(rng), normal(rng)];
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        let c = x.map(|t| t / r);
        if rng.random::<f64>() < c[2].abs() {
            return body.from_frame(c);
        }
    }
}

#[test]
fn frame_is_orthonormal_and_gamma_matches() {
    for (m, j) in BODIES {
        let body = BodyParams::new(m, j).unwrap();
        let f = body.frame();
        for a in 0..3 {
            for b in 0..3 {
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((kinetic(m, j, f[a].0, f[b].0) - want).abs() < 1e-12, "m={m} J={j} ({a},{b})");
            }
        }
        let n1 = f[1].0;
        let rn1 = [n1[0], -n1[1], -n1[2]];
        let cos = kinetic(m, j, n1, rn1);
        assert!((body.gamma() - cos.acos()).abs() < 1e-12);
        assert!((gamma_of(m, j).unwrap() - cos.acos()).abs() < 1e-12);
    }
    assert!((gamma_of(1.0, 1.0).unwrap() - PI / 2.0).abs() < 1e-15);
    assert!(gamma_of(-1.0, 1.0).is_err());
}

#[test]
fn smooth_and_no_slip_laws() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (m, j) in BODIES {
        let body = BodyParams::new(m, j).unwrap();
        for _ in 0..1000 {
            let v = flux_sample(&body, &mut rng);
            let [a, b, c] = v.0;
            let sm = body.k_smooth(v).0;
            assert!((sm[0] - a).abs() < 1e-14 && (sm[1] - b).abs() < 1e-14 && (sm[2] + c).abs() < 1e-14);

            let w = body.k_noslip(v).unwrap();
            let axis = if c < 0.0 { body.frame()[0] } else { body.frame()[0].reflect() };
            let along = |x: Velocity| kinetic(m, j, x.0, axis.0);
            assert!((along(w) - along(v)).abs() < 1e-12);
            // Everything orthogonal to the axis is reversed.
            let perp = |x: Velocity| {
                let k = along(x);
                [0, 1, 2].map(|i| x.0[i] - k * axis.0[i])
            };
            let (pv, pw) = (perp(v), perp(w));
            for i in 0..3 {
                assert!((pv[i] + pw[i]).abs() < 1e-12);
            }
            assert!(w.normal() * c < 0.0);
            // Time reversal: the reversed outgoing velocity returns to -v.
            let back = body.k_noslip(Velocity(w.0.map(|x| -x))).unwrap();
            for i in 0..3 {
                assert!((back.0[i] + v.0[i]).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn lower_wall_collisions_conserve_chi() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let kernels = [AngleKernel::rect_teeth(0.6).unwrap(), AngleKernel::circ_arc(0.8).unwrap(), AngleKernel::Specular];
    for (m, j) in BODIES {
        let body = BodyParams::new(m, j).unwrap();
        let chi = body.frame()[0];
        for p in &kernels {
            for _ in 0..2000 {
                let v = flux_sample(&body, &mut rng);
                let w = body.k_step(p, v, &mut rng).unwrap();
                let axis = if v.normal() < 0.0 { chi } else { chi.reflect() };
                assert!((kinetic(m, j, w.0, axis.0) - kinetic(m, j, v.0, axis.0)).abs() < 1e-12);
                assert!(w.normal() * v.normal() < 0.0);
            }
        }
    }
}

#[test]
fn specular_step_is_the_smooth_law() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (m, j) in BODIES {
        let body = BodyParams::new(m, j).unwrap();
        for _ in 0..1000 {
            let v = flux_sample(&body, &mut rng);
            let a = body.k_step(&AngleKernel::Specular, v, &mut rng).unwrap();
            let b = body.k_smooth(v);
            for i in 0..3 {
                assert!((a.0[i] - b.0[i]).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn h_pushes_lambda2_to_m2() {
    let body = BodyParams::new(1.0, 0.4).unwrap();
    let g = *body.geom();
    let b = g.coord_bound();
    let axes =
        || vec![Axis::new(-b, b, 12).unwrap(), Axis::new(-b, b, 12).unwrap(), Axis::new(-2.0, 2.0, 2).unwrap()];

    let mut exact = Histogram::new(axes()).unwrap();
    let fine = 1024;
    let h = 2.0 * b / fine as f64;
    for i in 0..fine {
        for k in 0..fine {
            let (u, v) = (-b + (i as f64 + 0.5) * h, -b + (k as f64 + 0.5) * h);
            if g.contains(u, v) {
                exact.add(&[u, v, 1.0]);
                exact.add(&[u, v, -1.0]);
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut oracle = Histogram::new(axes()).unwrap();
    let mut sampler = Histogram::new(axes()).unwrap();
    for _ in 0..500_000 {
        let st = body.h_map(flux_sample(&body, &mut rng)).unwrap();
        oracle.add(&[st.u, st.v, st.s.value()]);
        let st = body.h_map(body.lambda2_sample(&mut rng)).unwrap();
        sampler.add(&[st.u, st.v, st.s.value()]);
    }
    let tv = |x: &Histogram| tv_distance(&x.probabilities(), &exact.probabilities()).unwrap();
    assert!(tv(&oracle) < 0.02, "oracle tv = {}", tv(&oracle));
    assert!(tv(&sampler) < 0.02, "sampler tv = {}", tv(&sampler));
}

#[test]
fn lambda2_chart_marginals() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 100_000;
    let draws: Vec<(f64, f64)> = (0..n).map(|_| lambda2_chart_sample(&mut rng)).collect();
    let folded: Vec<f64> = draws.iter().map(|d| d.0 % PI).collect();
    let psi: Vec<f64> = draws.iter().map(|d| d.1).collect();
    let crit = 1.63 / (n as f64).sqrt();
    assert!(ks_statistic(&folded, |t| (1.0 - t.cos()) / 2.0) < crit);
    assert!(ks_statistic(&psi, |p| (p - p.sin() * p.cos()) / PI) < crit);
    let upper = draws.iter().filter(|d| d.0 < PI).count() as f64 / n as f64;
    assert!((upper - 0.5).abs() < 4.0 * 0.5 / (n as f64).sqrt());
}

proptest! {
    #[test]
    fn k_steps_conserve_energy(m in 0.1f64..5.0, j in 0.1f64..5.0, seed in any::<u64>(), r in 0.05f64..3.0, xi in 0.05f64..1.55) {
        let body = BodyParams::new(m, j).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let kernel = AngleKernel::mixture(vec![
            (0.5, AngleKernel::rect_teeth(r).unwrap()),
            (0.5, AngleKernel::circ_arc(xi).unwrap()),
        ]).unwrap();
        let mut v = flux_sample(&body, &mut rng);
        let e0 = body.energy(v);
        for _ in 0..500 {
            v = body.k_step(&kernel, v, &mut rng).unwrap();
        }
        prop_assert!((body.energy(v) - e0).abs() < 1e-12);
    }

    #[test]
    fn phi_and_h_are_inverse(m in 0.1f64..5.0, j in 0.1f64..5.0, x in -0.999f64..0.999, t in -0.999f64..0.999, up in any::<bool>()) {
        let body = BodyParams::new(m, j).unwrap();
        let g = body.geom();
        let v = t / g.sin();
        let st = AltState::new(g.ell_map(v, x).unwrap(), v, if up { Sign::Plus } else { Sign::Minus });
        let vel = body.phi(st).unwrap();
        prop_assert!((body.energy(vel) - 1.0).abs() < 1e-12);
        let back = body.h_map(vel).unwrap();
        prop_assert!((back.u - st.u).abs() < 1e-10 && (back.v - st.v).abs() < 1e-10 && back.s == st.s);
    }

    #[test]
    fn h_hat_is_h_after_the_chart(m in 0.1f64..5.0, j in 0.1f64..5.0, theta in 0.01f64..6.27, psi in 0.01f64..3.13) {
        prop_assume!((theta - PI).abs() > 1e-3);
        let body = BodyParams::new(m, j).unwrap();
        let a = body.h_hat(theta, psi).unwrap();
        let b = body.h_map(body.chart(theta, psi)).unwrap();
        prop_assert!((a.u - b.u).abs() < 1e-10 && (a.v - b.v).abs() < 1e-10 && a.s == b.s);
        let (t2, p2) = body.h_hat_inv(a).unwrap();
        prop_assert!((t2 - theta).abs() < 1e-7 && (p2 - psi).abs() < 1e-7);
        let (t3, p3) = body.chart_inv(body.chart(theta, psi)).unwrap();
        prop_assert!((t3 - theta).abs() < 1e-9 && (p3 - psi).abs() < 1e-9);
    }
}

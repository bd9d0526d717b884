use ergo_core::analysis::tv_distance;
use ergo_core::kernels1d::sample_lambda1;
use ergo_core::microstructure::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

type P = [f64; 2];

const ZIGZAG: [P; 5] = [[0.0, 0.0], [0.3, -0.4], [0.6, -0.1], [0.8, -0.5], [1.0, 0.0]];

fn zigzag() -> WallProfile {
    WallProfile::new(ZIGZAG.windows(2).map(|w| Piece::Segment { a: w[0], b: w[1] }).collect()).unwrap()
}

/// Minimal periodic tracer for polygonal cells. Returns None when a hit
/// lands within 1e-9 of a vertex.
fn polyline_trace(cell: &[P], x: f64, theta: f64) -> Option<(f64, f64)> {
    let mut o = [x, 0.0];
    let mut d = [-theta.cos(), -theta.sin()];
    let depth = cell.iter().map(|p| -p[1]).fold(0.0, f64::max);
    for bounce in 0..1000 {
        // horizontal reach before leaving the band -depth <= y <= 0
        let t_band = if d[1] < 0.0 { (o[1] + depth) / -d[1] } else if d[1] > 0.0 { -o[1] / d[1] } else { 4.0 };
        let (x0, x1) = (o[0].min(o[0] + t_band * d[0]), o[0].max(o[0] + t_band * d[0]));
        let mut best: Option<(f64, P, P)> = None;
        for k in (x0.floor() as i64 - 1)..=(x1.floor() as i64 + 1) {
            for w in cell.windows(2) {
                let a = [w[0][0] + k as f64, w[0][1]];
                let b = [w[1][0] + k as f64, w[1][1]];
                let e = [b[0] - a[0], b[1] - a[1]];
                let den = d[0] * e[1] - d[1] * e[0];
                if den.abs() < 1e-15 {
                    continue;
                }
                let r = [a[0] - o[0], a[1] - o[1]];
                let t = (r[0] * e[1] - r[1] * e[0]) / den;
                let s = (r[0] * d[1] - r[1] * d[0]) / den;
                let tmin = if bounce == 0 { -1e-12 } else { 1e-11 };
                if t > tmin && (0.0..=1.0).contains(&s) && best.is_none_or(|bt| t < bt.0) {
                    if !(1e-9..=1.0 - 1e-9).contains(&s) {
                        return None;
                    }
                    best = Some((t, [o[0] + t * d[0], o[1] + t * d[1]], e));
                }
            }
        }
        match best {
            Some((t, p, e)) if d[1] <= 0.0 || t < t_band => {
                let len = e[0].hypot(e[1]);
                let n = [-e[1] / len, e[0] / len];
                let dn = d[0] * n[0] + d[1] * n[1];
                d = [d[0] - 2.0 * dn * n[0], d[1] - 2.0 * dn * n[1]];
                o = p;
            }
            _ if d[1] <= 0.0 => return None,
            _ => {
                let t = -o[1] / d[1];
                return Some((o[0] + t * d[0], d[1].atan2(d[0])));
            }
        }
    }
    None
}

#[test]
fn tracer_matches_polyline_oracle() {
    let wall = zigzag();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut compared = 0;
    for _ in 0..20_000 {
        let x: f64 = rng.random();
        let theta = 0.02 + (PI - 0.04) * rng.random::<f64>();
        let (Some(want), Ok(got)) = (polyline_trace(&ZIGZAG, x, theta), wall.trace(x, theta)) else {
            continue;
        };
        assert!((got.x - want.0).abs() < 1e-8, "x={x} theta={theta}: {got:?} vs {want:?}");
        assert!((got.theta - want.1).abs() < 1e-8, "x={x} theta={theta}: {got:?} vs {want:?}");
        compared += 1;
    }
    assert!(compared > 19_000, "only {compared} rays compared");
}

#[test]
fn flat_wall_is_specular() {
    let wall = flat();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..1000 {
        let x: f64 = rng.random();
        let theta = sample_lambda1(&mut rng);
        let out = wall.trace(x, theta).unwrap();
        assert!((out.theta - (PI - theta)).abs() < 1e-12);
        assert!((out.x - x).abs() < 1e-12);
        assert_eq!(out.bounces, 1);
    }
}

#[test]
fn wall_json_round_trip_is_exact() {
    let walls = [
        zigzag(),
        build_rect_teeth(ergo_core::kernels1d::TeethParams::new(0.7).unwrap()).unwrap(),
        build_elliptic_arc(ergo_core::kernels1d::ArcParams::new(0.9).unwrap(), 1.3).unwrap(),
        attach_nubs(&zigzag(), &NubProfile::new(0.05, NubShape::Parabolic { curvature: 3.0 }).unwrap()).unwrap(),
    ];
    for w in walls {
        let text = serde_json::to_string(&w).unwrap();
        let back = WallProfile::from_json(&text).unwrap();
        assert_eq!(back, w);
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }
    let doubled = r#"{"period": 2.0, "pieces": [{"type": "segment", "a": [0.0, 0.0], "b": [2.0, 0.0]}]}"#;
    assert_eq!(WallProfile::from_json(doubled).unwrap().pieces(), flat().pieces());
    assert!(WallProfile::from_json(r#"{"period": 0, "pieces": []}"#).is_err());
    let above = r#"{"period": 1, "pieces": [{"type": "segment", "a": [0, 0], "b": [0.5, 0.2]},
        {"type": "segment", "a": [0.5, 0.2], "b": [1, 0]}]}"#;
    assert!(WallProfile::from_json(above).is_err());
}

#[test]
fn polygonal_wall_is_an_involution() {
    let runner = ergo_core::parallel::Runner::new(3);
    let rate = involution_rate(&zigzag(), 20_000, 1e-7, &runner).unwrap();
    assert!(rate > 0.999, "rate = {rate}");
}

/// Reflect -(cos theta, sin theta) in the circle x^2 + (y + radius)^2 = radius^2 at abscissa u.
fn circle_bounce(radius: f64, u: f64, theta: f64) -> f64 {
    let h = (radius * radius - u * u).sqrt() - radius;
    let n = [u / radius, (h + radius) / radius];
    let d = [-theta.cos(), -theta.sin()];
    let dn = d[0] * n[0] + d[1] * n[1];
    let r = [d[0] - 2.0 * dn * n[0], d[1] - 2.0 * dn * n[1]];
    r[1].atan2(r[0])
}

#[test]
fn nub_maps_match_traced_single_bounces() {
    let (delta, radius) = (0.1, 0.25);
    let nub = NubProfile::circular(delta, radius).unwrap();
    let wall = attach_nubs(&flat(), &nub).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut checked = 0;
    for _ in 0..20_000 {
        let u = delta * (2.0 * rng.random::<f64>() - 1.0);
        let theta = 0.05 + (PI - 0.1) * rng.random::<f64>();
        let (x, out) = nub_maps(&nub, u, theta).unwrap();
        let want = circle_bounce(radius, u, theta);
        if want <= 0.0 || want >= PI {
            continue;
        }
        assert!((out - want).abs() < 1e-10, "u={u} theta={theta}");
        let Ok(t) = wall.trace(x, theta) else { continue };
        if t.bounces == 1 && t.first_piece.is_some_and(|i| is_nub_piece(&wall, i)) {
            assert!((t.theta - out).abs() < 1e-8, "u={u} theta={theta}: {} vs {out}", t.theta);
            checked += 1;
        }
    }
    assert!(checked > 5000, "only {checked} single nub bounces");
}

#[test]
fn apex_reflects_specularly() {
    let nub = NubProfile::circular(0.1, 0.2).unwrap();
    let wall = attach_nubs(&zigzag(), &nub).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..1000 {
        let theta = 0.05 + (PI - 0.1) * rng.random::<f64>();
        let out = wall.trace(0.0, theta).unwrap();
        assert!((out.theta - (PI - theta)).abs() < 1e-9);
    }
}

#[test]
fn coarse_map_matches_base_wall_for_nub_free_paths() {
    let nub = NubProfile::new(0.04, NubShape::Parabolic { curvature: 5.0 }).unwrap();
    let base = zigzag();
    let wall = attach_nubs(&base, &nub).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut checked = 0;
    for _ in 0..20_000 {
        let x: f64 = rng.random();
        let theta = 0.05 + (PI - 0.1) * rng.random::<f64>();
        let Ok(t) = wall.trace(x, theta) else { continue };
        let touched = |p: Option<usize>| p.is_some_and(|i| is_nub_piece(&wall, i));
        if t.bounces > 2 || touched(t.first_piece) || touched(t.last_piece) {
            continue;
        }
        let u = coarse_map(&nub, x, theta).unwrap();
        let Ok(b) = base.trace(u.rem_euclid(1.0), theta) else { continue };
        assert!((b.theta - t.theta).abs() < 1e-8, "x={x} theta={theta}: {} vs {}", t.theta, b.theta);
        checked += 1;
    }
    assert!(checked > 5000, "only {checked} nub-free paths");
}

#[test]
fn foreshortening_commutes_with_nubs() {
    let nub = NubProfile::circular(0.08, 0.3).unwrap();
    let (m, j) = (1.0, 0.5);
    let lambda = foreshortening_factor(m, j).unwrap();
    assert!((lambda - 3f64.sqrt()).abs() < 1e-15);
    let base = zigzag();
    let a = foreshorten(&attach_nubs(&base, &nub).unwrap(), m, j).unwrap();
    let b = attach_nubs(&foreshorten(&base, m, j).unwrap(), &nub.scaled(lambda).unwrap()).unwrap();
    let gap = a.max_pointwise_distance(&b).unwrap();
    assert!(gap < 1e-12, "gap = {gap}");
}

#[test]
fn joint_exit_law_is_symmetric() {
    let wall = zigzag();
    let bins = 32;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut joint = vec![0.0; bins * bins];
    let bin = |t: f64| ((t / PI * bins as f64) as usize).min(bins - 1);
    let n = 1_000_000;
    for _ in 0..n {
        let x: f64 = rng.random();
        let theta = sample_lambda1(&mut rng);
        if let Ok(t) = wall.trace(x, theta) {
            joint[bin(theta) * bins + bin(t.theta)] += 1.0;
        }
    }
    let total: f64 = joint.iter().sum();
    let p: Vec<f64> = joint.iter().map(|c| c / total).collect();
    let transposed: Vec<f64> = (0..bins * bins).map(|k| p[(k % bins) * bins + k / bins]).collect();
    let tv = tv_distance(&p, &transposed).unwrap();
    assert!(tv <= 0.03, "tv = {tv}");
    assert!(total > 0.999 * n as f64);
}

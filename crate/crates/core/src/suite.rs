//! The verification suite: one function per acceptance criterion, each
//! returning a list of [`StatReport`]s. A criterion passes when all of its
//! reports pass.

use crate::altwalk::{AltState, EllipseGeom, Sign};
use crate::analysis::*;
use crate::diskstrip::{BodyParams, Velocity};
use crate::kernels1d::*;
use crate::microstructure::*;
use crate::parallel::{stream_rng, Exec, Runner};
use crate::tolerances as tol;
use crate::Result;
use rand::Rng;
use std::f64::consts::{FRAC_PI_2, PI};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub exec: Exec,
}

impl SuiteConfig {
    pub fn new(seed: u64) -> Self {
        SuiteConfig { seed, exec: Exec::default() }
    }

    fn runner(&self, salt: u64) -> Runner {
        Runner::new(self.seed).with_exec(self.exec).derive(salt)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub title: &'static str,
    pub reports: Vec<StatReport>,
}

impl CriterionResult {
    pub fn pass(&self) -> bool {
        !self.reports.is_empty() && self.reports.iter().all(|r| r.pass)
    }
}

type CriterionFn = fn(&SuiteConfig) -> Result<Vec<StatReport>>;

/// (id, short name, title, runner) for every criterion.
pub const CRITERIA: [(u8, &str, &str, CriterionFn); 9] = [
    (1, "exact", "exact identities", exact_identities),
    (2, "abel", "Abel transform", abel),
    (3, "reversibility", "kernel reversibility", reversibility),
    (4, "microstructure", "microstructure oracles", microstructure),
    (5, "pushforward", "K and Q pushforward equivalence", pushforward),
    (6, "ergodic", "ergodic positive case", ergodic),
    (7, "nonergodic", "non-ergodic controls", nonergodic),
    (8, "nubs", "delta-nub closeness and spreading", nubs),
    (9, "m1m2", "m1/m2 chord identities", m1m2),
];

pub fn run_criterion(name: &str, cfg: &SuiteConfig) -> Option<Result<CriterionResult>> {
    CRITERIA.iter().find(|c| c.1 == name || c.0.to_string() == name).map(|&(id, name, title, f)| {
        Ok(CriterionResult { id, name, title, reports: f(cfg)? })
    })
}

pub fn run_all(cfg: &SuiteConfig) -> Result<Vec<CriterionResult>> {
    CRITERIA
        .iter()
        .map(|&(id, name, title, f)| Ok(CriterionResult { id, name, title, reports: f(cfg)? }))
        .collect()
}

fn golden_gamma() -> f64 {
    PI * (5f64.sqrt() - 1.0) / 2.0
}

const GAMMAS: [f64; 3] = [PI / 3.0, FRAC_PI_2, 0.0];

fn gammas() -> [f64; 3] {
    [GAMMAS[0], GAMMAS[1], golden_gamma()]
}

fn max_abs(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, |a, b| a.max(b.abs()))
}

fn state_gap(a: AltState, b: AltState) -> f64 {
    if a.s != b.s {
        f64::INFINITY
    } else {
        (a.u - b.u).abs().max((a.v - b.v).abs())
    }
}

fn vel_gap(a: Velocity, b: Velocity) -> f64 {
    max_abs(a.0.iter().zip(&b.0).map(|(x, y)| x - y))
}

pub fn exact_identities(cfg: &SuiteConfig) -> Result<Vec<StatReport>> {
    let seed = cfg.seed;
    let mut out = Vec::new();
    let params = BodyParams::new(1.0, 0.5)?;
    let p = AngleKernel::circ_arc(0.5)?;
    let mut rng = stream_rng(seed, 101);
    let [chi, _, _] = params.frame();
    let mut v = params.lambda2_sample(&mut rng);
    let (mut e_err, mut c_err): (f64, f64) = (0.0, 0.0);
    for _ in 0..tol::ENERGY_STEPS {
        let axis = if v.normal() < 0.0 { chi } else { chi.reflect() };
        let before = params.inner(v, axis);
        v = params.k_step(&p, v, &mut rng)?;
        c_err = c_err.max((params.inner(v, axis) - before).abs());
        e_err = e_err.max((params.energy(v) - 1.0).abs());
    }
    let n = tol::ENERGY_STEPS as u64;
    out.push(StatReport::at_most("energy over K-steps", e_err, 0.0, tol::EXACT, n, seed));
    out.push(StatReport::at_most("contact direction conserved", c_err, 0.0, tol::EXACT_TIGHT, n, seed));

    let mut ortho: f64 = 0.0;
    let mut angle: f64 = 0.0;
    for (m, j) in [(1.0, 0.5), (1.0, 1.0), (2.5, 0.3), (0.2, 4.0)] {
        let bp = BodyParams::new(m, j)?;
        let f = bp.frame();
        for a in 0..3 {
            for b in 0..3 {
                ortho = ortho.max((bp.inner(f[a], f[b]) - if a == b { 1.0 } else { 0.0 }).abs());
            }
        }
        angle = angle.max((bp.inner(f[1].reflect(), f[0]) - bp.gamma().sin()).abs());
    }
    out.push(StatReport::at_most("frame orthonormal", ortho, 0.0, tol::EXACT_TIGHT, 4, seed));
    out.push(StatReport::at_most("<R n1, chi> = sin gamma", angle, 0.0, tol::EXACT_TIGHT, 4, seed));

    let ns = tol::IDENTITY_STATES;
    let (mut inv, mut rot, mut vinv): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for gamma in gammas() {
        let g = EllipseGeom::new(gamma)?;
        for _ in 0..ns {
            let x = g.sample_m2(&mut rng);
            inv = inv.max(state_gap(g.t0(g.t0(x)), x)).max(state_gap(g.t1(g.t1(x)), x));
            rot = rot.max(state_gap(g.t1(g.t0(x)), g.r_hat(2.0 * gamma, x)));
            vinv = vinv.max((g.v_coord(g.t0(x)) + g.v_coord(x)).abs());
        }
    }
    let n3 = 3 * ns as u64;
    out.push(StatReport::at_most("T0, T1 involutions", inv, 0.0, tol::EXACT_TIGHT, n3, seed));
    out.push(StatReport::at_most("T1 T0 = rotation by 2 gamma", rot, 0.0, tol::EXACT, n3, seed));
    out.push(StatReport::at_most("T0 flips V", vinv, 0.0, tol::EXACT, n3, seed));

    let (mut rt1, mut rt2, mut rt3): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for (m, j) in [(1.0, 0.5), (1.0, 1.0), (2.5, 0.3)] {
        let bp = BodyParams::new(m, j)?;
        let g = *bp.geom();
        for _ in 0..ns {
            let x = g.sample_m2(&mut rng);
            rt1 = rt1.max(state_gap(bp.h_map(bp.phi(x)?)?, x));
            let v = bp.lambda2_sample(&mut rng);
            rt2 = rt2.max(vel_gap(bp.phi(bp.h_map(v)?)?, v));
            let (th, ps) = bp.chart_inv(v)?;
            let hh = bp.h_hat(th, ps)?;
            rt3 = rt3.max(state_gap(hh, bp.h_map(v)?));
            let (t2, p2) = bp.h_hat_inv(hh)?;
            rt3 = rt3.max((t2 - th).abs()).max((p2 - ps).abs());
        }
    }
    out.push(StatReport::at_most("h(Phi(x)) = x", rt1, 0.0, tol::EXACT, n3, seed));
    out.push(StatReport::at_most("Phi(h(v)) = v", rt2, 0.0, tol::EXACT, n3, seed));
    out.push(StatReport::at_most("H-hat matches h o G and inverts", rt3, 0.0, tol::EXACT, n3, seed));

    let mut m5: f64 = 0.0;
    for gamma in gammas() {
        let g = EllipseGeom::new(gamma)?;
        let s2 = g.sin() * g.sin();
        for _ in 0..ns {
            let vv = (2.0 * rng.random::<f64>() - 1.0) / g.sin();
            let x = sample_m1(&mut rng);
            let lhs = g.v_coord(AltState::new(g.ell_map(vv, x)?, vv, Sign::Plus));
            let rhs = x * x * (1.0 - vv * vv * s2) + vv * vv * s2;
            m5 = m5.max((lhs - rhs).abs());
        }
    }
    out.push(StatReport::at_most("V along a chord", m5, 0.0, tol::EXACT_TIGHT, n3, seed));

    let lambda = foreshortening_factor(1.0, 0.5)?;
    let mut comm: f64 = 0.0;
    let walls = [flat(), teeth_wall(1.0)?, arc_wall(0.5)?];
    let nubs = [NubProfile::circular(0.05, 0.1)?, NubProfile::new(0.05, NubShape::Parabolic { curvature: 3.0 })?];
    for w in &walls {
        for nub in &nubs {
            let a = attach_nubs(&w.scaled_y(lambda)?, &nub.scaled(lambda)?)?;
            let b = attach_nubs(w, nub)?.scaled_y(lambda)?;
            comm = comm.max(a.max_pointwise_distance(&b).unwrap_or(f64::INFINITY));
        }
    }
    out.push(StatReport::at_most("foreshorten commutes with attach_nubs", comm, 0.0, tol::EXACT_TIGHT, 6, seed));
    Ok(out)
}

pub fn abel(cfg: &SuiteConfig) -> Result<Vec<StatReport>> {
    let seed = cfg.seed;
    let grid: Vec<f64> = (1..=tol::ABEL_GRID).map(|i| tol::ABEL_X_MAX * i as f64 / tol::ABEL_GRID as f64).collect();
    let n = grid.len() as u64;
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
    let mut out = Vec::new();
    type Pair = (&'static str, fn(f64) -> f64, fn(f64) -> f64);
    let cases: [Pair; 3] = [
        ("A[1] = 2 sqrt x", |_| 1.0, |x| 2.0 * x.sqrt()),
        ("A[1/2] = sqrt x", |_| 0.5, |x| x.sqrt()),
        ("A[sqrt t] = pi x / 2", |t| t.max(0.0).sqrt(), |x| PI * x / 2.0),
    ];
    for (name, phi, exact) in cases {
        let mut worst: f64 = 0.0;
        for &x in &grid {
            worst = worst.max(rel(abel_transform(phi, x)?, exact(x)));
        }
        out.push(StatReport::at_most(name, worst, 0.0, tol::ABEL_REL, n, seed));
    }
    let (f1, f2) = (|t: f64| (-t).exp(), |t: f64| t * t + 1.0);
    let mut lin: f64 = 0.0;
    let mut mono = true;
    for &x in &grid {
        let a = abel_transform(|t| 2.0 * f1(t) - 3.0 * f2(t), x)?;
        let b = 2.0 * abel_transform(f1, x)? - 3.0 * abel_transform(f2, x)?;
        lin = lin.max(rel(a, b));
        // exp(-t) <= 1 <= t^2 + 1 on t >= 0
        let (lo, mid, hi) = (abel_transform(f1, x)?, abel_transform(|_| 1.0, x)?, abel_transform(f2, x)?);
        mono &= lo <= mid && mid <= hi;
    }
    out.push(StatReport::at_most("linearity", lin, 0.0, tol::ABEL_REL, n, seed));
    out.push(StatReport::flag("monotonicity", mono, mono as u8 as f64, 1.0, 0.0, n, seed));
    Ok(out)
}

fn rev_report(name: &str, o: &ReversibilityOutcome, seed: u64) -> StatReport {
    let w = o.worst();
    StatReport::flag(format!("reversible: {name}"), o.pass(), w.z(), 0.0, o.sigmas, o.n as u64, seed)
}

pub fn reversibility(cfg: &SuiteConfig) -> Result<Vec<StatReport>> {
    let seed = cfg.seed;
    let n = tol::REVERSIBILITY_N;
    let m = TestFamily::angles().len();
    let sig = familywise_sigmas(tol::REVERSIBILITY_SIGMAS, m * (m - 1) / 2);
    let mut out = Vec::new();
    let angle_kernels: Vec<(String, AngleKernel)> = vec![
        ("specular".into(), AngleKernel::Specular),
        ("retro".into(), AngleKernel::Retro),
        ("rect_teeth:0.25".into(), AngleKernel::rect_teeth(0.25)?),
        ("rect_teeth:0.5".into(), AngleKernel::rect_teeth(0.5)?),
        ("rect_teeth:1".into(), AngleKernel::rect_teeth(1.0)?),
        ("circ_arc:0.2".into(), AngleKernel::circ_arc(0.2)?),
        ("circ_arc:0.5".into(), AngleKernel::circ_arc(0.5)?),
        ("circ_arc:1".into(), AngleKernel::circ_arc(1.0)?),
    ];
    for (i, (name, k)) in angle_kernels.iter().enumerate() {
        let o = reversibility_test(
            sample_lambda1,
            |t, r| k.sample(t, r),
            &TestFamily::angles(),
            n,
            sig,
            &cfg.runner(300 + i as u64),
        )?;
        out.push(rev_report(name, &o, seed));
    }
    let m = TestFamily::chords().len();
    let sig = familywise_sigmas(tol::REVERSIBILITY_SIGMAS, m * (m - 1) / 2);
    let q = quadrant_counterexample();
    let o = reversibility_test(sample_m1, |x, r| q.sample(x, r), &TestFamily::chords(), n, sig, &cfg.runner(320))?;
    out.push(rev_report("quadrant_cx", &o, seed));
    let broken = ChordKernel::scale(0.5)?;
    let o = reversibility_test(sample_m1, |x, r| broken.sample(x, r), &TestFamily::chords(), n, sig, &cfg.runner(321))?;
    let w = o.worst();
    out.push(StatReport::flag("broken kernel x -> x/2 is rejected", !o.pass(), w.z(), 0.0, sig, n as u64, seed));
    Ok(out)
}

/// Lambda^1 masses of `bins` equal cells of (0, pi).
fn lambda1_bins(bins: usize) -> Vec<f64> {
    (0..bins).map(|i| lambda1_mass(PI * i as f64 / bins as f64, PI * (i + 1) as f64 / bins as f64)).collect()
}

fn bin_of(t: f64, bins: usize) -> usize {
    ((t / PI * bins as f64) as usize).min(bins - 1)
}

fn hist_angles(samples: &[f64], bins: usize) -> Vec<f64> {
    let mut h = vec![0.0; bins];
    for t in samples {
        h[bin_of(*t, bins)] += 1.0;
    }
    let n = samples.len().max(1) as f64;
    h.iter().map(|c| c / n).collect()
}

pub fn microstructure(cfg: &SuiteConfig) -> Result<Vec<StatReport>> {
    let seed = cfg.seed;
    let mut out = Vec::new();
    let mut salt = 400;
    let mut next = || {
        salt += 1;
        cfg.runner(salt)
    };

    for r in [0.25, 0.5, 1.0] {
        let wall = teeth_wall(r)?;
        for th in [0.6, 1.0, 1.4] {
            let b = trace_many(&wall, tol::TEETH_N, &next(), |rng| (rng.random::<f64>(), th))?;
            let spec = b.outgoing.iter().filter(|t| (*t - (PI - th)).abs() < 1e-9).count();
            let p = rect_teeth_prob(TeethParams::new(r)?, th)?;
            let n = b.outgoing.len() as f64;
            let se = (p * (1.0 - p) / n).sqrt();
            let name = format!("teeth r={r} theta={th}: specular share");
            out.push(StatReport::within(name, spec as f64 / n, p, tol::TEETH_SIGMAS * se, se, n as u64, seed));
        }
    }

    for xi in [0.2, 0.5, 1.0] {
        let wall = arc_wall(xi)?;
        let k = AngleKernel::circ_arc(xi)?;
        for th in [0.6, 1.2, 2.0] {
            let b = trace_many(&wall, tol::ARC_N, &next(), |rng| (rng.random::<f64>(), th))?;
            let s = next().collect(tol::ARC_N, |rng, _| k.sample(th, rng));
            let s = s.into_iter().collect::<Result<Vec<_>>>()?;
            let tv = tv_distance(&hist_angles(&b.outgoing, tol::ARC_BINS), &hist_angles(&s, tol::ARC_BINS))?;
            let name = format!("arc xi={xi} theta={th}: tracer vs sampler TV");
            out.push(StatReport::at_most(name, tv, 0.0, tol::ARC_TV, tol::ARC_N as u64, seed));
        }
    }

    let fl = flat();
    let mut rng = stream_rng(seed, 410);
    let mut worst: f64 = 0.0;
    for _ in 0..tol::INVOLUTION_N {
        let (x, th) = (rng.random::<f64>(), sample_lambda1(&mut rng));
        let t = fl.trace(x, th)?;
        worst = worst.max((t.theta - (PI - th)).abs()).max((t.x - x).abs());
    }
    out.push(StatReport::at_most("flat wall is specular", worst, 0.0, tol::EXACT_TIGHT, tol::INVOLUTION_N as u64, seed));

    let lambda = foreshortening_factor(1.0, 0.5)?;
    let walls: Vec<(&str, WallProfile)> = vec![
        ("flat", fl.clone()),
        ("rect_teeth:1", teeth_wall(1.0)?),
        ("circ_arc:0.5", arc_wall(0.5)?),
        ("elliptic_arc:0.5", build_elliptic_arc(ArcParams::new(0.5)?, lambda)?),
        ("teeth+nubs", attach_nubs(&teeth_wall(1.0)?, &NubProfile::circular(0.05, 0.1)?)?),
    ];
    let exact = lambda1_bins(tol::LAMBERT_BINS);
    for (name, wall) in &walls {
        let b = trace_many(wall, tol::LAMBERT_N, &next(), |rng| (rng.random::<f64>(), sample_lambda1(rng)))?;
        let tv = tv_distance(&hist_angles(&b.outgoing, tol::LAMBERT_BINS), &exact)?;
        out.push(StatReport::at_most(format!("Lambertian invariance: {name}"), tv, 0.0, tol::LAMBERT_TV, tol::LAMBERT_N as u64, seed));
        let rate = involution_rate(wall, tol::INVOLUTION_N, tol::INVOLUTION_TOL, &next())?;
        out.push(StatReport::at_least(format!("time reversal: {name}"), rate, 1.0, tol::INVOLUTION_RATE, tol::INVOLUTION_N as u64, seed));
    }
    Ok(out)
}

pub fn pushforward(cfg: &SuiteConfig) -> Result<Vec<StatReport>> {
    let seed = cfg.seed;
    let params = BodyParams::new(1.0, 0.5)?;
    let v0 = params.chart(4.0, 1.1);
    let mut out = Vec::new();
    let kernels = [("rect_teeth:1", AngleKernel::rect_teeth(1.0)?), ("circ_arc:0.5", AngleKernel::circ_arc(0.5)?)];
    for (i, (name, p)) in kernels.iter().enumerate() {
        for steps in [1, 5] {
            let o = pushforward_equivalence(
                &params,
                p,
                v0,
                steps,
                tol::PUSHFORWARD_N,
                tol::PUSHFORWARD_BINS,
                &cfg.runner(500 + 10 * i as u64 + steps as u64),
            )?;
            let nm = format!("pushforward {name}, {steps} step(s): TV");
            out.push(StatReport::at_most(nm, o.tv, 0.0, tol::PUSHFORWARD_TV, tol::PUSHFORWARD_N as u64, seed));
        }
    }
    for (name, p) in [("retro", AngleKernel::Retro), ("specular", AngleKernel::Specular)] {
        let d = coupled_deviation(&params, &p, v0, tol::POINTWISE_STEPS, seed)?;
        out.push(StatReport::at_most(format!("pointwise h(K^t) = Q^t: {name}"), d, 0.0, tol::EXACT, tol::POINTWISE_STEPS as u64, seed));
    }
    Ok(out)
}

pub fn ergodic(cfg: &SuiteConfig) -> Result<Vec<StatReport>> {
    let g = EllipseGeom::new(golden_gamma())?;
    let q_hat = hat(cosine_conjugate(AngleKernel::circ_arc(0.5)?));
    let start = AltState::new(0.3, -0.2, Sign::Minus);
    let mut obs = standard_observables(&g);
    obs.extend(octant_observables(&g));
    let mut out = time_average_test(
        &g,
        &q_hat,
        start,
        tol::ERGODIC_STEPS,
        tol::ERGODIC_BATCHES,
        &obs,
        tol::ERGODIC_SIGMAS,
        cfg.seed,
    )?;
    let ens = standard_observables(&g);
    out.extend(ensemble_average_test(
        &g,
        &q_hat,
        start,
        tol::ENSEMBLE_CHAINS,
        tol::ENSEMBLE_STEPS,
        &ens,
        tol::ERGODIC_SIGMAS,
        &cfg.runner(600),
    )?);
    Ok(out)
}

pub fn nonergodic(cfg: &SuiteConfig) -> Result<Vec<StatReport>> {
    let seed = cfg.seed;
    let mut out = Vec::new();
    let mut rng = stream_rng(seed, 701);

    let g = EllipseGeom::new(FRAC_PI_2)?;
    let q_hat = hat(quadrant_counterexample());
    let mut st = AltState::new(0.3, 0.4, Sign::Minus);
    let mut left = 0usize;
    for _ in 0..tol::CONFINEMENT_STEPS {
        st = g.step(&q_hat, st, &mut rng)?;
        left += (st.u <= 0.0 || st.v <= 0.0) as usize;
    }
    out.push(StatReport::flag("quadrant walk stays in its quadrant", left == 0, left as f64, 0.0, 0.0, tol::CONFINEMENT_STEPS as u64, seed));

    let params = BodyParams::new(1.0, 0.5)?;
    let v0 = params.chart(4.0, 1.1);
    let v1 = params.k_step(&AngleKernel::Specular, v0, &mut rng)?;
    let mut v = v0;
    let mut gap: f64 = 0.0;
    for i in 0..tol::CONFINEMENT_STEPS {
        v = params.k_step(&AngleKernel::Specular, v, &mut rng)?;
        gap = gap.max(vel_gap(v, if i % 2 == 0 { v1 } else { v0 }));
    }
    out.push(StatReport::at_most("specular K-chain has period two", gap, 0.0, tol::EXACT, tol::CONFINEMENT_STEPS as u64, seed));

    let [chi, n1, n2] = params.frame();
    let mut v = v0;
    let c0 = params.inner(v, n2).abs();
    let mut drift: f64 = 0.0;
    let mut angles = Vec::with_capacity(tol::NOSLIP_STEPS / 2 + 1);
    for _ in 0..tol::NOSLIP_STEPS {
        v = params.k_noslip(v)?;
        drift = drift.max((params.inner(v, n2).abs() - c0).abs());
        if v.normal() < 0.0 {
            let a = params.inner(v, n1).atan2(params.inner(v, chi));
            angles.push(a.rem_euclid(2.0 * PI) / 2.0);
        }
    }
    out.push(StatReport::at_most("no-slip keeps |<v, n2>|", drift, 0.0, tol::EXACT_TIGHT, tol::NOSLIP_STEPS as u64, seed));
    let uniform = vec![1.0 / tol::NOSLIP_BINS as f64; tol::NOSLIP_BINS];
    let tv = tv_distance(&hist_angles(&angles, tol::NOSLIP_BINS), &uniform)?;
    out.push(StatReport::at_most("no-slip equidistributes on its circle", tv, 0.0, tol::NOSLIP_TV, angles.len() as u64, seed));
    Ok(out)
}

/// Bin masses of the exact teeth law P(theta, .).
fn teeth_row_bins(r: f64, theta: f64, bins: usize) -> Result<Vec<f64>> {
    let p = rect_teeth_prob(TeethParams::new(r)?, theta)?;
    let mut h = vec![0.0; bins];
    h[bin_of(PI - theta, bins)] += p;
    h[bin_of(theta, bins)] += 1.0 - p;
    Ok(h)
}

pub fn nubs(cfg: &SuiteConfig) -> Result<Vec<StatReport>> {
    let seed = cfg.seed;
    let base = teeth_wall(1.0)?;
    let thetas: Vec<f64> = (0..tol::NUB_THETAS).map(|i| PI * (i as f64 + 0.5) / tol::NUB_THETAS as f64).collect();
    let keep = ((tol::NUB_KEEP * thetas.len() as f64).ceil() as usize).clamp(1, thetas.len());
    let mut out = Vec::new();
    let mut stats = Vec::new();
    for (di, delta) in tol::NUB_DELTAS.iter().enumerate() {
        let wall = attach_nubs(&base, &NubProfile::circular(*delta, 2.0 * delta)?)?;
        let mut devs = Vec::with_capacity(thetas.len());
        let mut octants = [0u64; 8];
        for (ti, th) in thetas.iter().enumerate() {
            let row = space_averaged_kernel(&wall, *th, tol::NUB_N, tol::NUB_BINS, &cfg.runner(800 + 100 * di as u64 + ti as u64))?;
            let exact = teeth_row_bins(1.0, *th, tol::NUB_BINS)?;
            devs.push(max_abs(row.probabilities().iter().zip(&exact).map(|(a, b)| a - b)));
            for (b, c) in row.counts.iter().enumerate() {
                octants[b * 8 / tol::NUB_BINS] += c;
            }
        }
        devs.sort_by(f64::total_cmp);
        let stat = devs[keep - 1];
        stats.push(stat);
        let n = (tol::NUB_N * thetas.len()) as u64;
        out.push(StatReport::flag(format!("nub delta={delta}: sup deviation"), true, stat, 0.0, 0.0, n, seed));
        let empty = octants.iter().filter(|c| **c == 0).count();
        out.push(StatReport::flag(format!("nub delta={delta}: averaged row fills all octants"), empty == 0, empty as f64, 0.0, 0.0, n, seed));
    }
    let mono = stats.windows(2).all(|w| w[1] <= w[0]);
    out.push(StatReport::flag("nub deviation nonincreasing in delta", mono, stats[stats.len() - 1], stats[0], 0.0, tol::NUB_N as u64, seed));
    Ok(out)
}

pub fn m1m2(cfg: &SuiteConfig) -> Result<Vec<StatReport>> {
    let seed = cfg.seed;
    let mut out = Vec::new();
    type F = fn(AltState) -> f64;
    let fs: [(&str, F); 5] = [
        ("1", |_| 1.0),
        ("u^2", |s| s.u * s.u),
        ("v^2 1{s=1}", |s| if s.s == Sign::Plus { s.v * s.v } else { 0.0 }),
        ("exp(u) cos(v)", |s| s.u.exp() * s.v.cos()),
        ("(1 + uv)^2", |s| (1.0 + s.u * s.v).powi(2)),
    ];
    let plus: F = |s| (s.s == Sign::Plus) as u8 as f64;
    let minus: F = |s| (s.s == Sign::Minus) as u8 as f64;
    let pairs: [(&str, F, F); 4] = [
        ("f=1{s=-1}, g=1{s=1}", minus, plus),
        ("f=g=1{s=1}", plus, plus),
        ("f=u, g=v", |s| s.u, |s| s.v),
        ("f=u^2, g=s exp(v)", |s| s.u * s.u, |s| s.s.value() * s.v.exp()),
    ];
    let kernels = [("rect_teeth:1", cosine_conjugate(AngleKernel::rect_teeth(1.0)?)), ("quadrant_cx", quadrant_counterexample())];
    let sig = familywise_sigmas(tol::M1M2_SIGMAS, pairs.len());
    for (gi, gamma) in gammas().into_iter().enumerate() {
        let g = EllipseGeom::new(gamma)?;
        let gname = format!("gamma={gamma:.6}");
        for (name, f) in fs {
            let c = identity_check_m1m2(&g, f, tol::M1M2_GRID)?;
            out.push(StatReport::at_most(format!("(i) {gname} f={name}: rel err"), c.rel_err(), 0.0, tol::M1M2_REL, (tol::M1M2_GRID * tol::M1M2_GRID) as u64, seed));
        }
        for (ki, (kname, q)) in kernels.iter().enumerate() {
            for (pi, (pname, f, gf)) in pairs.iter().enumerate() {
                let r = cfg.runner(900 + 100 * gi as u64 + 10 * ki as u64 + pi as u64);
                let t = identity_check_m1m2_kernel(&g, q, f, gf, tol::M1M2_N, &r)?;
                let se = t.stderr();
                out.push(StatReport::within(
                    format!("(ii) {gname} q={kname} {pname}: lhs - rhs"),
                    t.diff(),
                    0.0,
                    sig * se,
                    se,
                    tol::M1M2_N as u64,
                    seed,
                ));
            }
        }
    }
    Ok(out)
}

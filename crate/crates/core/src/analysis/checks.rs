use super::histogram::{Axis, Histogram};
use super::quadrature::{gauss_legendre, midpoint};
use super::stats::{MeanAcc, StatReport};
use crate::altwalk::{AltState, EllipseGeom, Sign};
use crate::diskstrip::{BodyParams, Velocity};
use crate::kernels1d::{cosine_conjugate, hat, sample_m1, AngleKernel, ChordKernel};
use crate::parallel::Runner;
use crate::{Error, Result};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

/// Test functions 1, cos(k pi t), sin(k pi t) for k = 1..=harmonics, with
/// t = (x - lo) / (hi - lo).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestFamily {
    pub lo: f64,
    pub hi: f64,
    pub harmonics: usize,
}

impl TestFamily {
    pub fn angles() -> Self {
        TestFamily { lo: 0.0, hi: PI, harmonics: 3 }
    }

    pub fn chords() -> Self {
        TestFamily { lo: -1.0, hi: 1.0, harmonics: 3 }
    }

    pub fn len(&self) -> usize {
        1 + 2 * self.harmonics
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn eval(&self, i: usize, x: f64) -> f64 {
        if i == 0 {
            return 1.0;
        }
        let k = i.div_ceil(2) as f64;
        let a = k * PI * (x - self.lo) / (self.hi - self.lo);
        if i % 2 == 1 {
            a.cos()
        } else {
            a.sin()
        }
    }
}

/// Estimated E[k(X) j(X') - j(X) k(X')] for one pair of test functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairStat {
    pub k: usize,
    pub j: usize,
    pub mean: f64,
    pub stderr: f64,
}

impl PairStat {
    pub fn z(&self) -> f64 {
        if self.stderr > 0.0 {
            self.mean.abs() / self.stderr
        } else if self.mean.abs() < 1e-12 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReversibilityOutcome {
    pub pairs: Vec<PairStat>,
    pub n: usize,
    pub sigmas: f64,
}

impl ReversibilityOutcome {
    pub fn worst(&self) -> PairStat {
        *self.pairs.iter().max_by(|a, b| a.z().total_cmp(&b.z())).expect("at least one pair")
    }

    pub fn pass(&self) -> bool {
        self.pairs.iter().all(|p| p.z() <= self.sigmas)
    }
}

/// Monte Carlo test of mu(dx) K(x, dx') = mu(dx') K(x', dx) on every
/// unordered pair of test functions, each within `sigmas` standard errors.
pub fn reversibility_test<B, K>(
    base: B,
    kernel: K,
    family: &TestFamily,
    n: usize,
    sigmas: f64,
    runner: &Runner,
) -> Result<ReversibilityOutcome>
where
    B: Fn(&mut ChaCha8Rng) -> f64 + Sync + Send,
    K: Fn(f64, &mut ChaCha8Rng) -> Result<f64> + Sync + Send,
{
    let m = family.len();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|k| (k + 1..m).map(move |j| (k, j))).collect();
    let accs = runner
        .map_reduce(
            n,
            |rng, range| -> Result<Vec<MeanAcc>> {
                let mut acc = vec![MeanAcc::default(); pairs.len()];
                let mut fx = vec![0.0; m];
                let mut fy = vec![0.0; m];
                for _ in range {
                    let x = base(rng);
                    let y = kernel(x, rng)?;
                    for i in 0..m {
                        fx[i] = family.eval(i, x);
                        fy[i] = family.eval(i, y);
                    }
                    for (a, (k, j)) in acc.iter_mut().zip(&pairs) {
                        a.push(fx[*k] * fy[*j] - fx[*j] * fy[*k]);
                    }
                }
                Ok(acc)
            },
            |a, b| Ok(a?.into_iter().zip(b?).map(|(x, y)| x.merge(y)).collect()),
        )
        .ok_or_else(|| Error::param("n", "must be > 0"))??;
    let pairs = pairs
        .iter()
        .zip(accs)
        .map(|((k, j), a)| PairStat { k: *k, j: *j, mean: a.mean(), stderr: a.stderr() })
        .collect();
    Ok(ReversibilityOutcome { pairs, n, sigmas })
}

/// Tensor rule on [-1, 1] used by the chord-form integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    GaussLegendre,
    Midpoint,
}

fn rule_nodes(rule: Rule, n: usize) -> (Vec<f64>, Vec<f64>) {
    match rule {
        Rule::GaussLegendre => gauss_legendre(n),
        Rule::Midpoint => midpoint(n, -1.0, 1.0),
    }
}

/// int f dm^2 computed on the disk image of E in polar coordinates.
pub fn m2_integral_direct(geom: &EllipseGeom, f: impl Fn(AltState) -> f64, n: usize) -> f64 {
    let (r, wr) = gauss_legendre(n);
    let mut total = 0.0;
    for (ri, wi) in r.iter().zip(&wr) {
        let rad = 0.5 * (ri + 1.0);
        for k in 0..n {
            let phi = TAU * k as f64 / n as f64;
            let (u, v) = geom.u_gamma_inv(rad * phi.cos(), rad * phi.sin());
            let s = f(AltState::new(u, v, Sign::Plus)) + f(AltState::new(u, v, Sign::Minus));
            total += 0.5 * wi * rad * s * TAU / n as f64;
        }
    }
    total / TAU
}

/// Which coordinate the chord form integrates along.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChordAxis {
    /// Chords E_v at fixed v: f(l_v(x), v, s).
    AlongU,
    /// Chords E_u at fixed u: f(u, l_u(x), s).
    AlongV,
}

/// int f dm^2 written as (1/(2|E|)) int int [f(., 1) + f(., -1)] m1(dx) |E_w| dw,
/// evaluated on an n x n tensor grid after w = csc(gamma) sin(beta).
pub fn m2_integral_chords(
    geom: &EllipseGeom,
    f: impl Fn(AltState) -> f64,
    n: usize,
    rule: Rule,
    axis: ChordAxis,
) -> Result<f64> {
    let (xs, wx) = rule_nodes(rule, n);
    let (bs, wb) = rule_nodes(rule, n);
    let mut total = 0.0;
    for (b, wbi) in bs.iter().zip(&wb) {
        let beta = FRAC_PI_2 * b;
        let w = beta.sin() / geom.sin();
        let c = beta.cos();
        let mut inner = 0.0;
        for (x, wxi) in xs.iter().zip(&wx) {
            let l = geom.ell_map(w, *x)?;
            let (u, v) = match axis {
                ChordAxis::AlongU => (l, w),
                ChordAxis::AlongV => (w, l),
            };
            inner += wxi * (f(AltState::new(u, v, Sign::Plus)) + f(AltState::new(u, v, Sign::Minus)));
        }
        total += wbi * FRAC_PI_2 * c * c * inner;
    }
    Ok(total / TAU)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck {
    pub direct: f64,
    pub along_u: f64,
    pub along_v: f64,
}

impl IdentityCheck {
    /// Largest relative error of the two chord forms against the direct value.
    pub fn rel_err(&self) -> f64 {
        let scale = self.direct.abs().max(1e-300);
        ((self.along_u - self.direct).abs().max((self.along_v - self.direct).abs())) / scale
    }
}

/// Part (i) of the m1/m2 identity: the chord decompositions of m^2 agree
/// with a direct integral over E.
pub fn identity_check_m1m2(geom: &EllipseGeom, f: impl Fn(AltState) -> f64 + Copy, n: usize) -> Result<IdentityCheck> {
    Ok(IdentityCheck {
        direct: m2_integral_direct(geom, f, n),
        along_u: m2_integral_chords(geom, f, n, Rule::GaussLegendre, ChordAxis::AlongU)?,
        along_v: m2_integral_chords(geom, f, n, Rule::GaussLegendre, ChordAxis::AlongV)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSided {
    pub lhs: MeanAcc,
    pub rhs: MeanAcc,
}

impl TwoSided {
    pub fn diff(&self) -> f64 {
        self.lhs.mean() - self.rhs.mean()
    }

    pub fn stderr(&self) -> f64 {
        self.lhs.stderr().hypot(self.rhs.stderr())
    }
}

/// Part (ii): int g (Q f) dm^2 against the chord form
/// (1/(2|E|)) int [f(u, l_u x', -1) g(u, l_u x, 1) + f(l_u x', u, 1) g(l_u x, u, -1)]
/// q(-x, dx') m1(dx) |E_u| du, both by independent Monte Carlo.
pub fn identity_check_m1m2_kernel<F, G>(
    geom: &EllipseGeom,
    q: &ChordKernel,
    f: F,
    g: G,
    n: usize,
    runner: &Runner,
) -> Result<TwoSided>
where
    F: Fn(AltState) -> f64 + Sync + Send,
    G: Fn(AltState) -> f64 + Sync + Send,
{
    let q_hat = hat(q.clone());
    let lhs = runner
        .derive(1)
        .map_reduce(
            n,
            |rng, range| -> Result<MeanAcc> {
                let mut a = MeanAcc::default();
                for _ in range {
                    let x = geom.sample_m2(rng);
                    let y = geom.step(&q_hat, x, rng)?;
                    a.push(g(x) * f(y));
                }
                Ok(a)
            },
            |a, b| Ok(a?.merge(b?)),
        )
        .ok_or_else(|| Error::param("n", "must be > 0"))??;
    let rhs = runner
        .derive(2)
        .map_reduce(
            n,
            |rng, range| -> Result<MeanAcc> {
                let mut a = MeanAcc::default();
                for _ in range {
                    let u = geom.sample_u_marginal(rng);
                    let x = sample_m1(rng);
                    let xp = q.sample(-x, rng)?;
                    let (lx, lxp) = (geom.ell_map(u, x)?, geom.ell_map(u, xp)?);
                    let t1 = f(AltState::new(u, lxp, Sign::Minus)) * g(AltState::new(u, lx, Sign::Plus));
                    let t2 = f(AltState::new(lxp, u, Sign::Plus)) * g(AltState::new(lx, u, Sign::Minus));
                    a.push(0.5 * (t1 + t2));
                }
                Ok(a)
            },
            |a, b| Ok(a?.merge(b?)),
        )
        .ok_or_else(|| Error::param("n", "must be > 0"))??;
    Ok(TwoSided { lhs, rhs })
}

/// A named function of the walk state with its m^2 expectation.
pub struct Observable<'a> {
    pub name: String,
    pub f: Box<dyn Fn(AltState) -> f64 + Sync + Send + 'a>,
    pub target: f64,
}

impl<'a> Observable<'a> {
    pub fn new(name: impl Into<String>, target: f64, f: impl Fn(AltState) -> f64 + Sync + Send + 'a) -> Self {
        Observable { name: name.into(), f: Box::new(f), target }
    }

    /// Target computed by quadrature against m^2.
    pub fn with_quadrature(geom: &EllipseGeom, name: impl Into<String>, f: impl Fn(AltState) -> f64 + Sync + Send + Copy + 'a) -> Self {
        let target = m2_integral_direct(geom, f, 96);
        Observable::new(name, target, f)
    }
}

/// The standard observables u, u^2, v^2, uv, 1{s=1} and V.
pub fn standard_observables(geom: &EllipseGeom) -> Vec<Observable<'static>> {
    let g = *geom;
    vec![
        Observable::with_quadrature(geom, "u", |s| s.u),
        Observable::with_quadrature(geom, "u^2", |s| s.u * s.u),
        Observable::with_quadrature(geom, "v^2", |s| s.v * s.v),
        Observable::with_quadrature(geom, "uv", |s| s.u * s.v),
        Observable::new("1{s=1}", 0.5, |s| if s.s == Sign::Plus { 1.0 } else { 0.0 }),
        Observable::with_quadrature(geom, "V", move |s| g.v_coord(s)),
    ]
}

/// Indicators of the eight sign octants of E x {-1, +1} with their exact
/// m^2 masses: a quadrant of E maps to a sector of angle gamma or pi - gamma.
pub fn octant_observables(geom: &EllipseGeom) -> Vec<Observable<'static>> {
    let gamma = geom.gamma();
    let mut out = Vec::with_capacity(8);
    for su in [1.0, -1.0] {
        for sv in [1.0, -1.0] {
            for ss in [Sign::Plus, Sign::Minus] {
                let angle = if su * sv > 0.0 { gamma } else { PI - gamma };
                let name = format!("octant(u{},v{},s{})", sign_char(su), sign_char(sv), sign_char(ss.value()));
                out.push(Observable::new(name, angle / TAU / 2.0, move |s: AltState| {
                    (s.u * su > 0.0 && s.v * sv > 0.0 && s.s == ss) as u8 as f64
                }));
            }
        }
    }
    out
}

fn sign_char(x: f64) -> char {
    if x > 0.0 {
        '+'
    } else {
        '-'
    }
}

/// Time averages along one chain, with batch-means standard errors.
#[allow(clippy::too_many_arguments)]
pub fn time_average_test(
    geom: &EllipseGeom,
    q_hat: &ChordKernel,
    start: AltState,
    steps: usize,
    batches: usize,
    observables: &[Observable<'_>],
    sigmas: f64,
    seed: u64,
) -> Result<Vec<StatReport>> {
    let mut rng = crate::parallel::stream_rng(seed, u64::MAX);
    let len = (steps / batches.max(2)).max(1);
    let mut sums = vec![0.0; observables.len()];
    let mut batch_means: Vec<MeanAcc> = vec![MeanAcc::default(); observables.len()];
    let mut totals = vec![0.0; observables.len()];
    let mut st = start;
    let used = len * batches.max(2);
    for i in 0..used {
        st = geom.step(q_hat, st, &mut rng)?;
        for (s, o) in sums.iter_mut().zip(observables) {
            *s += (o.f)(st);
        }
        if (i + 1) % len == 0 {
            for k in 0..sums.len() {
                batch_means[k].push(sums[k] / len as f64);
                totals[k] += sums[k];
                sums[k] = 0.0;
            }
        }
    }
    Ok(observables
        .iter()
        .zip(batch_means)
        .zip(totals)
        .map(|((o, b), t)| {
            let se = b.stderr();
            StatReport::within(format!("time:{}", o.name), t / used as f64, o.target, sigmas * se, se, used as u64, seed)
        })
        .collect())
}

/// Averages over `chains` independent chains after `steps` steps. Chain i
/// starts at `start` with its sign flipped for odd i, so both signs are
/// equally represented at every time despite the alternation.
#[allow(clippy::too_many_arguments)]
pub fn ensemble_average_test(
    geom: &EllipseGeom,
    q_hat: &ChordKernel,
    start: AltState,
    chains: usize,
    steps: usize,
    observables: &[Observable<'_>],
    sigmas: f64,
    runner: &Runner,
) -> Result<Vec<StatReport>> {
    let finals = runner.map_indexed(chains, |rng, i| -> Result<AltState> {
        let mut st = if i % 2 == 1 { AltState { s: start.s.flip(), ..start } } else { start };
        for _ in 0..steps {
            st = geom.step(q_hat, st, rng)?;
        }
        Ok(st)
    });
    let finals = finals.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(observables
        .iter()
        .map(|o| {
            let a: MeanAcc = finals.iter().map(|s| (o.f)(*s)).collect();
            StatReport::within(
                format!("ensemble:{}", o.name),
                a.mean(),
                o.target,
                sigmas * a.stderr(),
                a.stderr(),
                chains as u64,
                runner.seed,
            )
        })
        .collect())
}

/// Histogram axes for (u, v, s) over the bounding box of E x {-1, +1}.
pub fn state_axes(geom: &EllipseGeom, bins: usize) -> Result<Vec<Axis>> {
    let c = geom.coord_bound();
    Ok(vec![Axis::new(-c, c, bins)?, Axis::new(-c, c, bins)?, Axis::new(-2.0, 2.0, 2)?])
}

fn state_point(s: AltState) -> [f64; 3] {
    [s.u, s.v, s.s.value()]
}

#[derive(Debug, Clone, PartialEq)]
pub struct PushforwardOutcome {
    pub tv: f64,
    pub k_hist: Histogram,
    pub q_hist: Histogram,
}

/// Compare h(K^steps(v0, .)) with Q^steps(h(v0), .) by histogram TV.
pub fn pushforward_equivalence(
    params: &BodyParams,
    p: &AngleKernel,
    v0: Velocity,
    steps: usize,
    n: usize,
    bins: usize,
    runner: &Runner,
) -> Result<PushforwardOutcome> {
    let geom = *params.geom();
    let q_hat = hat(cosine_conjugate(p.clone()));
    let start = params.h_map(v0)?;
    let axes = state_axes(&geom, bins)?;
    let empty = Histogram::new(axes)?;
    let run = |salt: u64, use_k: bool| -> Result<Histogram> {
        runner
            .derive(salt)
            .map_reduce(
                n,
                |rng, range| -> Result<Histogram> {
                    let mut h = empty.clone();
                    for _ in range {
                        let st = if use_k {
                            let mut v = v0;
                            for _ in 0..steps {
                                v = params.k_step(p, v, rng)?;
                            }
                            params.h_map(v)?
                        } else {
                            let mut st = start;
                            for _ in 0..steps {
                                st = geom.step(&q_hat, st, rng)?;
                            }
                            st
                        };
                        h.add(&state_point(st));
                    }
                    Ok(h)
                },
                |a, b| {
                    let mut a = a?;
                    a.merge(&b?)?;
                    Ok(a)
                },
            )
            .unwrap_or_else(|| Ok(empty.clone()))
    };
    let k_hist = run(11, true)?;
    let q_hist = run(12, false)?;
    let tv = super::histogram::histogram_tv(&k_hist, &q_hist)?;
    Ok(PushforwardOutcome { tv, k_hist, q_hist })
}

/// Run the K-chain and the Q-chain from corresponding starts on one shared
/// random stream and return the largest coordinate gap between h(K_t) and
/// Q_t. For deterministic kernels the two chains coincide exactly.
pub fn coupled_deviation(params: &BodyParams, p: &AngleKernel, v0: Velocity, steps: usize, seed: u64) -> Result<f64> {
    let geom = params.geom();
    let q_hat = hat(cosine_conjugate(p.clone()));
    let mut rk = crate::parallel::stream_rng(seed, 0);
    let mut rq = crate::parallel::stream_rng(seed, 0);
    let mut v = v0;
    let mut st = params.h_map(v0)?;
    let mut worst: f64 = 0.0;
    for _ in 0..steps {
        v = params.k_step(p, v, &mut rk)?;
        st = geom.step(&q_hat, st, &mut rq)?;
        let h = params.h_map(v)?;
        if h.s != st.s {
            return Ok(f64::INFINITY);
        }
        worst = worst.max((h.u - st.u).abs()).max((h.v - st.v).abs());
    }
    Ok(worst)
}

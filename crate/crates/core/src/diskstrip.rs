//! A rough disk of mass m and moment of inertia J bouncing between the two
//! walls of a strip.
//!
//! Velocities are (v0, v1, v2): angular, tangential and normal. The kinetic
//! inner product is <v, w> = J v0 w0 / 2 + m (v1 w1 + v2 w2) / 2, so the unit
//! sphere is the energy-one shell. The orthonormal frame (chi, n1, n2) has chi
//! spanning the contact direction that lower-wall collisions conserve.

use crate::altwalk::{AltState, EllipseGeom, Sign};
use crate::kernels1d::{open01, AngleKernel};
use crate::{Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use std::io::Write;

/// Physical velocity (v0, v1, v2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Velocity(pub [f64; 3]);

impl Velocity {
    /// The collision map's companion R(v0, v1, v2) = (v0, -v1, -v2).
    pub fn reflect(self) -> Velocity {
        let [a, b, c] = self.0;
        Velocity([a, -b, -c])
    }

    fn scale(self, k: f64) -> Velocity {
        Velocity(self.0.map(|x| k * x))
    }

    fn add(self, o: Velocity) -> Velocity {
        let [a, b, c] = self.0;
        let [x, y, z] = o.0;
        Velocity([a + x, b + y, c + z])
    }

    pub fn normal(self) -> f64 {
        self.0[2]
    }
}

/// The angle between n1 and R(n1), determined by m and J.
pub fn gamma_of(m: f64, j: f64) -> Result<f64> {
    check_positive("m", m)?;
    check_positive("J", j)?;
    Ok(((1.0 / j - 1.0 / m) / (1.0 / j + 1.0 / m)).acos())
}

fn check_positive(name: &'static str, x: f64) -> Result<f64> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(Error::param(name, format!("must be finite and > 0, got {x}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyParams {
    m: f64,
    j: f64,
    geom: EllipseGeom,
    chi: Velocity,
    n1: Velocity,
    n2: Velocity,
}

impl BodyParams {
    pub fn new(m: f64, j: f64) -> Result<Self> {
        let gamma = gamma_of(m, j)?;
        let c = (2.0 / (j + m)).sqrt();
        let d = (2.0 / (1.0 / j + 1.0 / m)).sqrt();
        Ok(BodyParams {
            m,
            j,
            geom: EllipseGeom::new(gamma)?,
            chi: Velocity([c, -c, 0.0]),
            n1: Velocity([d / j, d / m, 0.0]),
            n2: Velocity([0.0, 0.0, (2.0 / m).sqrt()]),
        })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn j(&self) -> f64 {
        self.j
    }

    pub fn gamma(&self) -> f64 {
        self.geom.gamma()
    }

    pub fn geom(&self) -> &EllipseGeom {
        &self.geom
    }

    /// (chi, n1, n2).
    pub fn frame(&self) -> [Velocity; 3] {
        [self.chi, self.n1, self.n2]
    }

    pub fn inner(&self, a: Velocity, b: Velocity) -> f64 {
        let [a0, a1, a2] = a.0;
        let [b0, b1, b2] = b.0;
        0.5 * self.j * a0 * b0 + 0.5 * self.m * (a1 * b1 + a2 * b2)
    }

    pub fn energy(&self, v: Velocity) -> f64 {
        self.inner(v, v)
    }

    /// Frame coordinates (<v, chi>, <v, n1>, <v, n2>).
    pub fn frame_coords(&self, v: Velocity) -> [f64; 3] {
        [self.inner(v, self.chi), self.inner(v, self.n1), self.inner(v, self.n2)]
    }

    pub fn from_frame(&self, [c, a1, a2]: [f64; 3]) -> Velocity {
        self.chi.scale(c).add(self.n1.scale(a1)).add(self.n2.scale(a2))
    }

    /// G(theta, psi) = cos psi chi + sin psi (cos theta n1 + sin theta n2).
    pub fn chart(&self, theta: f64, psi: f64) -> Velocity {
        let (sp, cp) = psi.sin_cos();
        let (st, ct) = theta.sin_cos();
        self.from_frame([cp, sp * ct, sp * st])
    }

    /// Inverse chart with theta in [0, 2 pi) and psi in (0, pi).
    pub fn chart_inv(&self, v: Velocity) -> Result<(f64, f64)> {
        let [c, a1, a2] = self.frame_coords(v);
        let rho = a1.hypot(a2);
        if rho < 1e-14 {
            return Err(Error::ChartPole);
        }
        Ok((a2.atan2(a1).rem_euclid(TAU), rho.atan2(c)))
    }

    fn lower_step<R: Rng + ?Sized>(&self, p: &AngleKernel, v: Velocity, rng: &mut R) -> Result<Velocity> {
        // v points into the lower wall; -v is in the upper hemisphere.
        let [c, a1, a2] = self.frame_coords(v);
        let rho = a1.hypot(a2);
        if rho < 1e-14 {
            return Err(Error::ChartPole);
        }
        let theta = (-a2).atan2(-a1);
        let t = p.sample(theta, rng)?;
        let (st, ct) = t.sin_cos();
        Ok(self.from_frame([c, rho * ct, rho * st]))
    }

    /// One collision drawn from the lifted kernel K built from `p`.
    pub fn k_step<R: Rng + ?Sized>(&self, p: &AngleKernel, v: Velocity, rng: &mut R) -> Result<Velocity> {
        let n = v.normal();
        if n < 0.0 {
            self.lower_step(p, v, rng)
        } else if n > 0.0 {
            Ok(self.lower_step(p, v.reflect(), rng)?.reflect())
        } else {
            Err(Error::OnWallPlane(n))
        }
    }

    /// Smooth-wall collision: flip the normal component.
    pub fn k_smooth(&self, v: Velocity) -> Velocity {
        v.add(self.n2.scale(-2.0 * self.inner(v, self.n2)))
    }

    /// No-slip collision: reflect through chi (lower wall) or R(chi) (upper).
    pub fn k_noslip(&self, v: Velocity) -> Result<Velocity> {
        let axis = match v.normal() {
            n if n < 0.0 => self.chi,
            n if n > 0.0 => self.chi.reflect(),
            n => return Err(Error::OnWallPlane(n)),
        };
        Ok(v.scale(-1.0).add(axis.scale(2.0 * self.inner(v, axis))))
    }

    /// Phi(u, v, s) = u n1 + v R(n1) + s sqrt(1 - |U(u, v)|^2) n2.
    pub fn phi(&self, st: AltState) -> Result<Velocity> {
        let g = &self.geom;
        let q = g.quad_form(st.u, st.v);
        if !(q < 1.0) {
            return Err(Error::OutsideEllipse { u: st.u, v: st.v });
        }
        Ok(self.from_frame([st.v * g.sin(), st.u + st.v * g.cos(), st.s.value() * (1.0 - q).sqrt()]))
    }

    /// Inverse of [`BodyParams::phi`] on the energy-one shell.
    pub fn h_map(&self, v: Velocity) -> Result<AltState> {
        let [c, a1, a2] = self.frame_coords(v);
        if a2 == 0.0 {
            return Err(Error::OnWallPlane(v.normal()));
        }
        let g = &self.geom;
        let vv = c / g.sin();
        Ok(AltState::new(a1 - vv * g.cos(), vv, Sign::of(a2)))
    }

    /// H-hat(theta, psi) = h_map(G(theta, psi)) in closed form.
    pub fn h_hat(&self, theta: f64, psi: f64) -> Result<AltState> {
        let g = &self.geom;
        let v = psi.cos() / g.sin();
        let s = theta.sin();
        if s == 0.0 {
            return Err(Error::OnWallPlane(0.0));
        }
        Ok(AltState::new(g.ell_map(v, theta.cos())?, v, Sign::of(s)))
    }

    pub fn h_hat_inv(&self, st: AltState) -> Result<(f64, f64)> {
        let g = &self.geom;
        let x = g.ell_inv(st.v, st.u)?.clamp(-1.0, 1.0).acos();
        let theta = match st.s {
            Sign::Plus => x,
            Sign::Minus => TAU - x,
        };
        Ok((theta, (st.v * g.sin()).clamp(-1.0, 1.0).acos()))
    }

    /// Draw from Lambda^2, density |sin theta| sin^2 psi / (2 pi) in the chart.
    pub fn lambda2_sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Velocity {
        let (theta, psi) = lambda2_chart_sample(rng);
        self.chart(theta, psi)
    }
}

/// Chart coordinates of a Lambda^2 draw, by inverse CDF in each factor.
pub fn lambda2_chart_sample<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    let t = (1.0 - 2.0 * open01(rng)).acos();
    let theta = if rng.random::<bool>() { t } else { t + PI };
    (theta, sin2_inverse_cdf(open01(rng)))
}

/// Inverse of F(psi) = (psi - sin psi cos psi) / pi on (0, pi).
fn sin2_inverse_cdf(u: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, PI);
    let mut x = PI * u;
    for _ in 0..100 {
        let f = (x - x.sin() * x.cos()) / PI - u;
        if f > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let df = 2.0 * x.sin().powi(2) / PI;
        let mut next = if df > 0.0 { x - f / df } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() < 1e-15 {
            return next;
        }
        x = next;
    }
    x
}

/// Write velocities as CSV with header `step,v0,v1,v2`.
pub fn write_csv<W: Write>(mut w: W, vs: &[Velocity]) -> std::io::Result<()> {
    writeln!(w, "step,v0,v1,v2")?;
    for (i, v) in vs.iter().enumerate() {
        let [a, b, c] = v.0;
        writeln!(w, "{i},{a},{b},{c}")?;
    }
    Ok(())
}

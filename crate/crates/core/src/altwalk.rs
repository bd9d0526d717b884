//! The alternating random walk on the ellipse
//! E = { u^2 + 2 u v cos(gamma) + v^2 < 1 }.
//!
//! From (u, v, -1) the walk keeps v and redraws u along the chord E_v; from
//! (u, v, +1) it keeps u and redraws v along E_u. The sign flips every step.

use crate::kernels1d::{check_chord, ChordKernel};
use crate::{Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Minus => Sign::Plus,
            Sign::Plus => Sign::Minus,
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Sign::Minus => -1.0,
            Sign::Plus => 1.0,
        }
    }

    pub fn of(x: f64) -> Sign {
        if x < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        match s {
            Sign::Minus => -1,
            Sign::Plus => 1,
        }
    }
}

impl TryFrom<i8> for Sign {
    type Error = Error;
    fn try_from(v: i8) -> Result<Sign> {
        match v {
            -1 => Ok(Sign::Minus),
            1 => Ok(Sign::Plus),
            _ => Err(Error::param("s", format!("must be -1 or +1, got {v}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AltState {
    pub u: f64,
    pub v: f64,
    pub s: Sign,
}

impl AltState {
    pub fn new(u: f64, v: f64, s: Sign) -> Self {
        AltState { u, v, s }
    }
}

/// The ellipse for a given angle gamma in (0, pi).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseGeom {
    gamma: f64,
    cos: f64,
    sin: f64,
}

impl EllipseGeom {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < PI) {
            return Err(Error::param("gamma", format!("must lie in (0, pi), got {gamma}")));
        }
        Ok(EllipseGeom { gamma, cos: gamma.cos(), sin: gamma.sin() })
    }

    pub fn from_gamma_over_pi(ratio: f64) -> Result<Self> {
        EllipseGeom::new(ratio * PI)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn cos(&self) -> f64 {
        self.cos
    }

    pub fn sin(&self) -> f64 {
        self.sin
    }

    pub fn quad_form(&self, u: f64, v: f64) -> f64 {
        u * u + 2.0 * u * v * self.cos + v * v
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        self.quad_form(u, v) < 1.0
    }

    /// Full axis lengths, major first. The diagonal axis has length
    /// 2/sqrt(1 + cos), the anti-diagonal one 2/sqrt(1 - cos).
    pub fn axes_lengths(&self) -> (f64, f64) {
        let a = 2.0 / (1.0 + self.cos).sqrt();
        let b = 2.0 / (1.0 - self.cos).sqrt();
        (a.max(b), a.min(b))
    }

    /// Lebesgue area pi / sin(gamma).
    pub fn area(&self) -> f64 {
        PI / self.sin
    }

    /// Largest |u| (equally |v|) on the closed ellipse.
    pub fn coord_bound(&self) -> f64 {
        1.0 / self.sin
    }

    fn half_width(&self, u: f64) -> Result<f64> {
        let w2 = 1.0 - u * u * self.sin * self.sin;
        if w2 > 0.0 {
            Ok(w2.sqrt())
        } else {
            Err(Error::param("u", format!("|u| must be < csc(gamma), got {u}")))
        }
    }

    /// The open chord E_u = { v : (u, v) in E }.
    pub fn chord_interval(&self, u: f64) -> Result<(f64, f64)> {
        let w = self.half_width(u)?;
        let c = -u * self.cos;
        Ok((c - w, c + w))
    }

    /// Length |E_u|.
    pub fn chord_length(&self, u: f64) -> Result<f64> {
        Ok(2.0 * self.half_width(u)?)
    }

    /// The affine bijection (-1, 1) -> E_u.
    pub fn ell_map(&self, u: f64, x: f64) -> Result<f64> {
        Ok(-u * self.cos + x * self.half_width(u)?)
    }

    pub fn ell_inv(&self, u: f64, v: f64) -> Result<f64> {
        Ok((v + u * self.cos) / self.half_width(u)?)
    }

    fn check(&self, st: AltState) -> Result<AltState> {
        if st.u.is_finite() && st.v.is_finite() && self.contains(st.u, st.v) {
            Ok(st)
        } else {
            Err(Error::OutsideEllipse { u: st.u, v: st.v })
        }
    }

    /// One step of Q driven by `q_hat`, the hatted chord kernel.
    pub fn step<R: Rng + ?Sized>(&self, q_hat: &ChordKernel, st: AltState, rng: &mut R) -> Result<AltState> {
        self.check(st)?;
        let out = match st.s {
            Sign::Minus => {
                let x = check_chord(self.ell_inv(st.v, st.u)?)?;
                AltState::new(self.ell_map(st.v, q_hat.sample(x, rng)?)?, st.v, Sign::Plus)
            }
            Sign::Plus => {
                let x = check_chord(self.ell_inv(st.u, st.v)?)?;
                AltState::new(st.u, self.ell_map(st.u, q_hat.sample(x, rng)?)?, Sign::Minus)
            }
        };
        self.check(out)
    }

    /// One step of the adjoint Q^dagger driven by `q_hat_dagger`. The roles of
    /// the two signs are exchanged relative to [`EllipseGeom::step`].
    pub fn step_dagger<R: Rng + ?Sized>(
        &self,
        q_hat_dagger: &ChordKernel,
        st: AltState,
        rng: &mut R,
    ) -> Result<AltState> {
        self.check(st)?;
        let out = match st.s {
            Sign::Plus => {
                let x = check_chord(self.ell_inv(st.v, st.u)?)?;
                AltState::new(self.ell_map(st.v, q_hat_dagger.sample(x, rng)?)?, st.v, Sign::Minus)
            }
            Sign::Minus => {
                let x = check_chord(self.ell_inv(st.u, st.v)?)?;
                AltState::new(st.u, self.ell_map(st.u, q_hat_dagger.sample(x, rng)?)?, Sign::Plus)
            }
        };
        self.check(out)
    }

    pub fn t0(&self, st: AltState) -> AltState {
        AltState::new(-st.u - 2.0 * st.v * self.cos, st.v, st.s.flip())
    }

    pub fn t1(&self, st: AltState) -> AltState {
        AltState::new(st.u, -st.v - 2.0 * st.u * self.cos, st.s.flip())
    }

    /// The linear map taking E onto the unit disk.
    pub fn u_gamma(&self, u: f64, v: f64) -> (f64, f64) {
        (u + v * self.cos, v * self.sin)
    }

    pub fn u_gamma_inv(&self, x: f64, y: f64) -> (f64, f64) {
        let v = y / self.sin;
        (x - v * self.cos, v)
    }

    /// Counter-clockwise rotation by `alpha` conjugated into (u, v)
    /// coordinates; the sign is unchanged.
    pub fn r_hat(&self, alpha: f64, st: AltState) -> AltState {
        let (x, y) = self.u_gamma(st.u, st.v);
        let (s, c) = alpha.sin_cos();
        let (u, v) = self.u_gamma_inv(c * x - s * y, s * x + c * y);
        AltState::new(u, v, st.s)
    }

    /// V = s |U_gamma(u, v)|^2, invariant under the deterministic maps.
    pub fn v_coord(&self, st: AltState) -> f64 {
        st.s.value() * self.quad_form(st.u, st.v)
    }

    /// Draw from m^2, the uniform law on E x {-1, +1}.
    pub fn sample_m2<R: Rng + ?Sized>(&self, rng: &mut R) -> AltState {
        let (x, y) = sample_unit_disk(rng);
        let (u, v) = self.u_gamma_inv(x, y);
        AltState::new(u, v, if rng.random::<bool>() { Sign::Plus } else { Sign::Minus })
    }

    /// Draw u from the marginal of m^2, density |E_u| / |E|.
    pub fn sample_u_marginal<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        sample_unit_disk(rng).0 / self.sin
    }

    /// Iterate the walk, keeping every state.
    pub fn trajectory<R: Rng + ?Sized>(
        &self,
        q_hat: &ChordKernel,
        start: AltState,
        steps: usize,
        rng: &mut R,
    ) -> Result<Vec<AltState>> {
        let mut out = Vec::with_capacity(steps + 1);
        out.push(self.check(start)?);
        let mut st = start;
        for _ in 0..steps {
            st = self.step(q_hat, st, rng)?;
            out.push(st);
        }
        Ok(out)
    }
}

/// Uniform point in the open unit disk by rejection.
pub fn sample_unit_disk<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    loop {
        let x = 2.0 * rng.random::<f64>() - 1.0;
        let y = 2.0 * rng.random::<f64>() - 1.0;
        if x * x + y * y < 1.0 {
            return (x, y);
        }
    }
}

/// Write a trajectory as CSV with header `step,u,v,s`.
pub fn write_csv<W: Write>(mut w: W, states: &[AltState]) -> std::io::Result<()> {
    writeln!(w, "step,u,v,s")?;
    for (i, st) in states.iter().enumerate() {
        writeln!(w, "{i},{},{},{}", st.u, st.v, i8::from(st.s))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels1d::{cosine_conjugate, hat, quadrant_counterexample, AngleKernel};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn right_angle_is_the_disk() {
        let g = EllipseGeom::new(PI / 2.0).unwrap();
        let (a, b) = g.axes_lengths();
        assert!((a - 2.0).abs() < 1e-12 && (b - 2.0).abs() < 1e-12);
        let (lo, hi) = g.chord_interval(0.6).unwrap();
        assert!((lo + 0.8).abs() < 1e-12 && (hi - 0.8).abs() < 1e-12);
    }

    #[test]
    fn chord_at_third_pi() {
        let g = EllipseGeom::new(PI / 3.0).unwrap();
        let (lo, hi) = g.chord_interval(0.0).unwrap();
        assert!((lo + 1.0).abs() < 1e-12 && (hi - 1.0).abs() < 1e-12);
        assert!(g.chord_interval(2.0).is_err());
        assert!(EllipseGeom::new(PI).is_err());
    }

    #[test]
    fn specular_walk_is_t0_then_t1() {
        let g = EllipseGeom::new(1.1).unwrap();
        let q_hat = hat(cosine_conjugate(AngleKernel::Specular));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let st = AltState::new(0.2, -0.3, Sign::Minus);
        let a = g.step(&q_hat, st, &mut rng).unwrap();
        let b = g.step(&q_hat, a, &mut rng).unwrap();
        assert_eq!(a.s, Sign::Plus);
        assert!((a.u - st.u).abs() < 1e-12 && (a.v - st.v).abs() < 1e-12);
        assert!((b.u - st.u).abs() < 1e-12 && (b.v - st.v).abs() < 1e-12);
    }

    #[test]
    fn retro_walk_is_t0_then_t1() {
        let g = EllipseGeom::new(1.1).unwrap();
        let q_hat = hat(cosine_conjugate(AngleKernel::Retro));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let st = AltState::new(0.2, -0.3, Sign::Minus);
        let a = g.step(&q_hat, st, &mut rng).unwrap();
        let t = g.t0(st);
        assert!((a.u - t.u).abs() < 1e-12 && a.v == t.v && a.s == t.s);
        let b = g.step(&q_hat, a, &mut rng).unwrap();
        let t = g.t1(a);
        assert!((b.v - t.v).abs() < 1e-12 && b.u == t.u);
    }

    #[test]
    fn quadrant_walk_is_confined() {
        let g = EllipseGeom::new(PI / 2.0).unwrap();
        let q_hat = hat(quadrant_counterexample());
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut st = AltState::new(0.3, 0.4, Sign::Minus);
        for _ in 0..10_000 {
            st = g.step(&q_hat, st, &mut rng).unwrap();
            assert!(st.u > 0.0 && st.v > 0.0);
        }
    }

    #[test]
    fn rejects_states_outside() {
        let g = EllipseGeom::new(PI / 2.0).unwrap();
        let q = hat(quadrant_counterexample());
        let err = g.step(&q, AltState::new(1.0, 1.0, Sign::Plus), &mut ChaCha8Rng::seed_from_u64(0));
        assert!(matches!(err, Err(Error::OutsideEllipse { .. })));
    }

    #[test]
    fn csv_header() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &[AltState::new(0.5, 0.0, Sign::Plus)]).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s, "step,u,v,s\n0,0.5,0,1\n");
    }
}

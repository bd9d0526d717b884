use super::{check_angle, open01, ChordKernel, Decomposition};
use crate::{Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Depth-to-width ratio of a rectangular-teeth wall.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct TeethParams(f64);

impl TeethParams {
    pub fn new(r: f64) -> Result<Self> {
        if r.is_finite() && r > 0.0 {
            Ok(TeethParams(r))
        } else {
            Err(Error::param("r", format!("must be finite and > 0, got {r}")))
        }
    }

    pub fn r(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for TeethParams {
    type Error = Error;
    fn try_from(r: f64) -> Result<Self> {
        TeethParams::new(r)
    }
}

impl From<TeethParams> for f64 {
    fn from(p: TeethParams) -> f64 {
        p.0
    }
}

/// Half-angle subtended by a circular-arc cavity, in (0, pi/2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct ArcParams(f64);

impl ArcParams {
    pub fn new(xi: f64) -> Result<Self> {
        if xi > 0.0 && xi < PI / 2.0 {
            Ok(ArcParams(xi))
        } else {
            Err(Error::param("xi", format!("must lie in (0, pi/2), got {xi}")))
        }
    }

    pub fn xi(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for ArcParams {
    type Error = Error;
    fn try_from(xi: f64) -> Result<Self> {
        ArcParams::new(xi)
    }
}

impl From<ArcParams> for f64 {
    fn from(p: ArcParams) -> f64 {
        p.0
    }
}

/// Piecewise-constant transition density on a uniform grid of (0, pi).
///
/// Row `i` is the law of theta' for theta in bin `i`; rows are normalised on
/// construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct DensityTable {
    rows: Vec<Vec<f64>>,
    cumulative: Vec<Vec<f64>>,
}

impl DensityTable {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::param("rows", "table is empty"));
        }
        let mut normalized = Vec::with_capacity(n);
        let mut cumulative = Vec::with_capacity(n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::param("rows", format!("row {i} has {} entries, expected {n}", row.len())));
            }
            if row.iter().any(|w| !w.is_finite() || *w < 0.0) {
                return Err(Error::param("rows", format!("row {i} has a negative or non-finite entry")));
            }
            let total: f64 = row.iter().sum();
            if total <= 0.0 {
                return Err(Error::param("rows", format!("row {i} has no mass")));
            }
            let row: Vec<f64> = row.iter().map(|w| w / total).collect();
            let cum = row
                .iter()
                .scan(0.0, |acc, w| {
                    *acc += w;
                    Some(*acc)
                })
                .collect();
            normalized.push(row);
            cumulative.push(cum);
        }
        Ok(DensityTable { rows: normalized, cumulative })
    }

    pub fn bins(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    fn bin_of(&self, theta: f64) -> usize {
        ((theta / PI * self.bins() as f64) as usize).min(self.bins() - 1)
    }

    fn sample<R: Rng + ?Sized>(&self, theta: f64, rng: &mut R) -> f64 {
        let cum = &self.cumulative[self.bin_of(theta)];
        let width = PI / self.bins() as f64;
        loop {
            let u: f64 = rng.random::<f64>() * cum[cum.len() - 1];
            let j = cum.partition_point(|c| *c <= u).min(cum.len() - 1);
            let t = (j as f64 + open01(rng)) * width;
            if t > 0.0 && t < PI {
                return t;
            }
        }
    }
}

impl TryFrom<Vec<Vec<f64>>> for DensityTable {
    type Error = Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        DensityTable::new(rows)
    }
}

impl From<DensityTable> for Vec<Vec<f64>> {
    fn from(t: DensityTable) -> Self {
        t.rows
    }
}

/// A Markov kernel on incidence angles in (0, pi).
#[derive(Debug, Clone, PartialEq)]
pub enum AngleKernel {
    /// theta' = pi - theta.
    Specular,
    /// theta' = theta.
    Retro,
    RectTeeth(TeethParams),
    CircArc(ArcParams),
    Mixture(Vec<(f64, AngleKernel)>),
    DensityTable(DensityTable),
    /// The image of a chord kernel under theta = arccos(x).
    Pullback(Box<ChordKernel>),
}

impl AngleKernel {
    pub fn rect_teeth(r: f64) -> Result<Self> {
        Ok(AngleKernel::RectTeeth(TeethParams::new(r)?))
    }

    pub fn circ_arc(xi: f64) -> Result<Self> {
        Ok(AngleKernel::CircArc(ArcParams::new(xi)?))
    }

    /// A convex combination; weights must be positive and are normalised.
    pub fn mixture(parts: Vec<(f64, AngleKernel)>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::param("weights", "mixture has no parts"));
        }
        if parts.iter().any(|(w, _)| !w.is_finite() || *w <= 0.0) {
            return Err(Error::param("weights", "mixture weights must be finite and > 0"));
        }
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        Ok(AngleKernel::Mixture(parts.into_iter().map(|(w, k)| (w / total, k)).collect()))
    }

    pub fn sample<R: Rng + ?Sized>(&self, theta: f64, rng: &mut R) -> Result<f64> {
        check_angle(theta)?;
        match self {
            AngleKernel::Specular => Ok(PI - theta),
            AngleKernel::Retro => Ok(theta),
            AngleKernel::RectTeeth(p) => rect_teeth_sample(*p, theta, rng),
            AngleKernel::CircArc(p) => circ_arc_sample(*p, theta, rng),
            AngleKernel::Mixture(parts) => {
                let mut u: f64 = rng.random();
                for (w, k) in parts {
                    if u < *w {
                        return k.sample(theta, rng);
                    }
                    u -= w;
                }
                parts[parts.len() - 1].1.sample(theta, rng)
            }
            AngleKernel::DensityTable(t) => Ok(t.sample(theta, rng)),
            AngleKernel::Pullback(q) => {
                let x = q.sample(theta.cos(), rng)?;
                check_angle(x.acos())
            }
        }
    }

    /// Atoms and continuous mass of the row at `theta`.
    pub fn decompose(&self, theta: f64) -> Result<Decomposition> {
        check_angle(theta)?;
        let d = match self {
            AngleKernel::Specular => Decomposition::atom(PI - theta),
            AngleKernel::Retro => Decomposition::atom(theta),
            AngleKernel::RectTeeth(p) => {
                let w = rect_teeth_prob(*p, theta)?;
                let mut d = Decomposition::atom(PI - theta).scaled(w);
                d.atoms.push(super::Atom { location: theta, weight: 1.0 - w });
                d
            }
            AngleKernel::CircArc(_) | AngleKernel::DensityTable(_) => Decomposition::continuous(),
            AngleKernel::Mixture(parts) => {
                let mut d = Decomposition::default();
                for (w, k) in parts {
                    let part = k.decompose(theta)?.scaled(*w);
                    d.atoms.extend(part.atoms);
                    d.continuous += part.continuous;
                }
                d
            }
            AngleKernel::Pullback(q) => q.decompose(theta.cos())?.map(f64::acos),
        };
        Ok(d.normalized(1e-12))
    }

    /// True when every row has an absolutely continuous component.
    pub fn is_nonsingular(&self) -> bool {
        match self {
            AngleKernel::Specular | AngleKernel::Retro | AngleKernel::RectTeeth(_) => false,
            AngleKernel::CircArc(_) | AngleKernel::DensityTable(_) => true,
            AngleKernel::Mixture(parts) => parts.iter().any(|(_, k)| k.is_nonsingular()),
            AngleKernel::Pullback(q) => q.is_nonsingular(),
        }
    }
}

/// Probability that a rectangular-teeth wall reflects specularly.
///
/// With y = 2 r |cot theta| and f its fractional part, the answer is
/// 1 - f/2 when floor(y) is even and 1/2 + f/2 when it is odd.
pub fn rect_teeth_prob(params: TeethParams, theta: f64) -> Result<f64> {
    check_angle(theta)?;
    let y = 2.0 * params.r() * (theta.cos() / theta.sin()).abs();
    let n = y.floor();
    let f = y - n;
    Ok(if n % 2.0 == 0.0 { 1.0 - 0.5 * f } else { 0.5 + 0.5 * f })
}

pub fn rect_teeth_sample<R: Rng + ?Sized>(params: TeethParams, theta: f64, rng: &mut R) -> Result<f64> {
    let p = rect_teeth_prob(params, theta)?;
    Ok(if rng.random::<f64>() < p { PI - theta } else { theta })
}

/// Exit angle of a ray entering a circular-arc cavity at abscissa `x` in
/// [0, 1] of the chord.
pub fn circ_arc_exit(xi: f64, theta: f64, x: f64) -> Option<f64> {
    let w = x * (theta - xi).cos() + (1.0 - x) * (theta + xi).cos();
    let a = w.clamp(-1.0, 1.0).acos();
    let mut s = -2.0 * a;
    if s <= -PI {
        s += TAU;
    }
    if s.abs() < 1e-12 {
        return None;
    }
    // central angle of the first hit, measured from the downward vertical
    let phi1 = (theta - a + PI).rem_euclid(TAU) - PI;
    let k = if s < 0.0 { ((phi1 + xi) / -s).floor() + 1.0 } else { ((xi - phi1) / s).floor() + 1.0 };
    Some((theta + PI + k * s).rem_euclid(TAU))
}

pub fn circ_arc_sample<R: Rng + ?Sized>(params: ArcParams, theta: f64, rng: &mut R) -> Result<f64> {
    check_angle(theta)?;
    loop {
        let Some(mut t) = circ_arc_exit(params.xi(), theta, rng.random()) else { continue };
        if t > TAU - 1e-9 {
            t -= TAU;
        }
        if t > 0.0 && t < PI {
            return Ok(t);
        }
        if t > -1e-9 && t < PI + 1e-9 {
            continue;
        }
        return Err(Error::BranchFailure(t));
    }
}

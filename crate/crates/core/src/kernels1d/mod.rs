//! One-dimensional reflection kernels.
//!
//! An [`AngleKernel`] maps an incidence angle in (0, pi) to a random exit
//! angle; a [`ChordKernel`] acts on chord coordinates in (-1, 1). The two are
//! related by the cosine conjugation x = cos(theta).

mod angle;
mod chord;
mod spec;

pub use angle::{circ_arc_exit, circ_arc_sample, rect_teeth_prob, rect_teeth_sample, AngleKernel, ArcParams, DensityTable, TeethParams};
pub use chord::{cosine_conjugate, dagger, hat, quadrant_counterexample, ChordKernel};
pub use spec::KernelSpec;

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A point mass of a kernel row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub location: f64,
    pub weight: f64,
}

/// Atomic part plus the mass of the absolutely continuous part.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Decomposition {
    pub atoms: Vec<Atom>,
    pub continuous: f64,
}

impl Decomposition {
    pub(crate) fn atom(location: f64) -> Self {
        Decomposition { atoms: vec![Atom { location, weight: 1.0 }], continuous: 0.0 }
    }

    pub(crate) fn continuous() -> Self {
        Decomposition { atoms: Vec::new(), continuous: 1.0 }
    }

    pub(crate) fn map(self, f: impl Fn(f64) -> f64) -> Self {
        let atoms = self.atoms.into_iter().map(|a| Atom { location: f(a.location), ..a }).collect();
        Decomposition { atoms, ..self }
    }

    pub(crate) fn scaled(self, w: f64) -> Self {
        let atoms = self.atoms.into_iter().map(|a| Atom { weight: a.weight * w, ..a }).collect();
        Decomposition { atoms, continuous: self.continuous * w }
    }

    /// Merge atoms closer than `tol` and drop zero weights.
    pub(crate) fn normalized(mut self, tol: f64) -> Self {
        self.atoms.retain(|a| a.weight > 0.0);
        self.atoms.sort_by(|a, b| a.location.total_cmp(&b.location));
        let mut out: Vec<Atom> = Vec::with_capacity(self.atoms.len());
        for a in self.atoms {
            match out.last_mut() {
                Some(last) if (a.location - last.location).abs() <= tol => last.weight += a.weight,
                _ => out.push(a),
            }
        }
        Decomposition { atoms: out, ..self }
    }

    pub fn total(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum::<f64>() + self.continuous
    }
}

pub(crate) fn check_angle(theta: f64) -> crate::Result<f64> {
    if theta > 0.0 && theta < PI {
        Ok(theta)
    } else {
        Err(crate::Error::AngleOutOfRange(theta))
    }
}

pub(crate) fn check_chord(x: f64) -> crate::Result<f64> {
    if x > -1.0 && x < 1.0 {
        Ok(x)
    } else {
        Err(crate::Error::ChordOutOfRange(x))
    }
}

/// Uniform draw from the open unit interval.
pub(crate) fn open01<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// Draw from Lambda^1(d theta) = sin(theta)/2 d theta on (0, pi).
pub fn sample_lambda1<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let t = (1.0 - 2.0 * open01(rng)).acos();
        if t > 0.0 && t < PI {
            return t;
        }
    }
}

/// Draw from m^1, the uniform law on (-1, 1).
pub fn sample_m1<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let x = 2.0 * rng.random::<f64>() - 1.0;
        if x > -1.0 {
            return x;
        }
    }
}

/// Lambda^1 mass of the interval (a, b) within (0, pi).
pub fn lambda1_mass(a: f64, b: f64) -> f64 {
    let (a, b) = (a.clamp(0.0, PI), b.clamp(0.0, PI));
    0.5 * (a.cos() - b.cos())
}

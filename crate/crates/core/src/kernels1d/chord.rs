use super::{check_chord, open01, AngleKernel, Decomposition};
use crate::{Error, Result};
use rand::Rng;

/// A Markov kernel on chord coordinates in (-1, 1).
#[derive(Debug, Clone, PartialEq)]
pub enum ChordKernel {
    /// x' = cos(theta') with theta' ~ P(arccos x).
    Conjugate(AngleKernel),
    /// The point mass at c * x.
    Scale(f64),
    /// Uniform on (0, 1) for x < 0 and on (-1, 0) for x > 0.
    Quadrant,
    /// hat q(x, .) = q(-x, .).
    Hat(Box<ChordKernel>),
    /// q^dagger(x, .) is the law of -x' for x' ~ q(x, .).
    Dagger(Box<ChordKernel>),
}

impl ChordKernel {
    /// Point mass at `c * x`; `c` must lie in [-1, 1] so the image stays in (-1, 1).
    pub fn scale(c: f64) -> Result<Self> {
        if (-1.0..=1.0).contains(&c) {
            Ok(ChordKernel::Scale(c))
        } else {
            Err(Error::param("c", format!("must lie in [-1, 1], got {c}")))
        }
    }

    pub fn identity() -> Self {
        ChordKernel::Scale(1.0)
    }

    pub fn sample<R: Rng + ?Sized>(&self, x: f64, rng: &mut R) -> Result<f64> {
        check_chord(x)?;
        match self {
            ChordKernel::Conjugate(p) => {
                let t = p.sample(x.acos(), rng)?;
                check_chord(t.cos())
            }
            ChordKernel::Scale(c) => Ok(c * x),
            ChordKernel::Quadrant => {
                let u = open01(rng);
                Ok(if x < 0.0 {
                    u
                } else if x > 0.0 {
                    -u
                } else if rng.random::<bool>() {
                    u
                } else {
                    -u
                })
            }
            ChordKernel::Hat(q) => q.sample(-x, rng),
            ChordKernel::Dagger(q) => Ok(-q.sample(x, rng)?),
        }
    }

    pub fn decompose(&self, x: f64) -> Result<Decomposition> {
        check_chord(x)?;
        let d = match self {
            ChordKernel::Conjugate(p) => p.decompose(x.acos())?.map(f64::cos),
            ChordKernel::Scale(c) => Decomposition::atom(c * x),
            ChordKernel::Quadrant => Decomposition::continuous(),
            ChordKernel::Hat(q) => q.decompose(-x)?,
            ChordKernel::Dagger(q) => q.decompose(x)?.map(|y| -y),
        };
        Ok(d.normalized(1e-12))
    }

    pub fn is_nonsingular(&self) -> bool {
        match self {
            ChordKernel::Conjugate(p) => p.is_nonsingular(),
            ChordKernel::Scale(_) => false,
            ChordKernel::Quadrant => true,
            ChordKernel::Hat(q) | ChordKernel::Dagger(q) => q.is_nonsingular(),
        }
    }
}

/// The chord kernel conjugate to `p` under x = cos(theta).
pub fn cosine_conjugate(p: AngleKernel) -> ChordKernel {
    match p {
        AngleKernel::Pullback(q) => *q,
        p => ChordKernel::Conjugate(p),
    }
}

pub fn hat(q: ChordKernel) -> ChordKernel {
    match q {
        ChordKernel::Hat(inner) => *inner,
        q => ChordKernel::Hat(Box::new(q)),
    }
}

pub fn dagger(q: ChordKernel) -> ChordKernel {
    match q {
        ChordKernel::Dagger(inner) => *inner,
        q => ChordKernel::Dagger(Box::new(q)),
    }
}

/// The reversible kernel whose alternating walk at gamma = pi/2 never leaves
/// a quadrant.
pub fn quadrant_counterexample() -> ChordKernel {
    ChordKernel::Quadrant
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn retro_conjugate_is_identity() {
        let q = cosine_conjugate(AngleKernel::Retro);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for x in [-0.9, -0.3, 0.0, 0.4, 0.99] {
            assert!((q.sample(x, &mut rng).unwrap() - x).abs() < 1e-12);
            let d = q.decompose(x).unwrap();
            assert!((d.atoms[0].location - x).abs() < 1e-12);
        }
    }

    #[test]
    fn specular_conjugate_is_negation() {
        let q = cosine_conjugate(AngleKernel::Specular);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for x in [-0.9, 0.25, 0.7] {
            assert!((q.sample(x, &mut rng).unwrap() + x).abs() < 1e-12);
        }
    }

    #[test]
    fn hat_and_dagger_are_involutions() {
        let q = quadrant_counterexample();
        assert_eq!(hat(hat(q.clone())), q);
        assert_eq!(dagger(dagger(q.clone())), q);
    }

    #[test]
    fn quadrant_switches_sign() {
        let q = quadrant_counterexample();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let y = q.sample(-0.5, &mut rng).unwrap();
            assert!(y > 0.0 && y < 1.0);
            let y = q.sample(0.5, &mut rng).unwrap();
            assert!(y < 0.0 && y > -1.0);
        }
    }

    #[test]
    fn pullback_round_trip() {
        let p = AngleKernel::Pullback(Box::new(quadrant_counterexample()));
        assert_eq!(cosine_conjugate(p), quadrant_counterexample());
        assert!(ChordKernel::Scale(0.5).sample(1.0, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
    }
}

use super::WallProfile;
use crate::kernels1d::{Atom, ArcParams, TeethParams};
use crate::parallel::Runner;
use crate::{Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Largest tolerated share of singular hits among all traced rays.
pub const MAX_SINGULAR_FRACTION: f64 = 0.01;
/// Exit angles closer than this are pooled when looking for atoms.
pub const ATOM_CLUSTER: f64 = 1e-9;
/// Minimum mass of a pooled cluster to be reported as an atom.
pub const ATOM_MIN_WEIGHT: f64 = 1e-3;

/// Exit angles of a batch of rays, in draw order.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceBatch {
    pub incoming: Vec<f64>,
    pub outgoing: Vec<f64>,
    pub singular: usize,
}

/// Trace `n` rays with (x, theta) drawn by `draw`, redrawing after a
/// singular hit. Fails if singular hits exceed 1% of all rays.
pub fn trace_many<F>(wall: &WallProfile, n: usize, runner: &Runner, draw: F) -> Result<TraceBatch>
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> (f64, f64) + Sync + Send,
{
    let part = runner.map_reduce(
        n,
        |rng, range| -> Result<TraceBatch> {
            let mut b = TraceBatch { incoming: Vec::with_capacity(range.len()), outgoing: Vec::new(), singular: 0 };
            b.outgoing.reserve(range.len());
            for _ in range {
                loop {
                    let (x, th) = draw(rng);
                    match wall.trace(x, th) {
                        Ok(t) => {
                            b.incoming.push(th);
                            b.outgoing.push(t.theta);
                            break;
                        }
                        Err(Error::SingularHit { .. }) => {
                            b.singular += 1;
                            if b.singular > b.outgoing.len() + 1000 {
                                return Err(Error::TooManySingular { singular: b.singular, total: b.outgoing.len() });
                            }
                        }
                        Err(e) => return Err(e),
                    }
                }
            }
            Ok(b)
        },
        |a, b| {
            let (mut a, b) = (a?, b?);
            a.incoming.extend(b.incoming);
            a.outgoing.extend(b.outgoing);
            a.singular += b.singular;
            Ok(a)
        },
    );
    let batch = part.unwrap_or(Ok(TraceBatch { incoming: vec![], outgoing: vec![], singular: 0 }))?;
    let total = batch.outgoing.len() + batch.singular;
    if batch.singular as f64 > MAX_SINGULAR_FRACTION * total as f64 {
        return Err(Error::TooManySingular { singular: batch.singular, total });
    }
    Ok(batch)
}

/// One row of a space-averaged reflection kernel, estimated by tracing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalKernelRow {
    pub theta: f64,
    /// Uniform bin edges on [0, pi].
    pub bins: Vec<f64>,
    /// Histogram of every exit angle, atoms included.
    pub counts: Vec<u64>,
    pub atoms: Vec<Atom>,
    pub n: usize,
    pub singular: usize,
}

impl EmpiricalKernelRow {
    pub fn from_samples(theta: f64, samples: &[f64], n_bins: usize, singular: usize) -> Self {
        let bins = (0..=n_bins).map(|i| PI * i as f64 / n_bins as f64).collect();
        let mut counts = vec![0u64; n_bins];
        for t in samples {
            counts[((t / PI * n_bins as f64) as usize).min(n_bins - 1)] += 1;
        }
        EmpiricalKernelRow { theta, bins, counts, atoms: find_atoms(samples), n: samples.len(), singular }
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.counts.iter().map(|c| *c as f64 / self.n as f64).collect()
    }

    /// Mass carried by the detected atoms.
    pub fn atomic_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }
}

/// Clusters of equal values (within [`ATOM_CLUSTER`]) with weight at least
/// [`ATOM_MIN_WEIGHT`], located at the cluster mean.
pub fn find_atoms(samples: &[f64]) -> Vec<Atom> {
    let n = samples.len();
    if n == 0 {
        return vec![];
    }
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let mut atoms = Vec::new();
    let mut start = 0;
    for i in 1..=n {
        if i == n || s[i] - s[i - 1] > ATOM_CLUSTER {
            let w = (i - start) as f64 / n as f64;
            if w >= ATOM_MIN_WEIGHT && i - start > 1 {
                let mean = s[start..i].iter().sum::<f64>() / (i - start) as f64;
                atoms.push(Atom { location: mean, weight: w });
            }
            start = i;
        }
    }
    atoms
}

/// P(theta, .) for `wall`, averaging over entry points x ~ U[0, 1).
pub fn space_averaged_kernel(
    wall: &WallProfile,
    theta: f64,
    n: usize,
    n_bins: usize,
    runner: &Runner,
) -> Result<EmpiricalKernelRow> {
    crate::kernels1d::check_angle(theta)?;
    if n_bins == 0 || n == 0 {
        return Err(Error::param("n", "need at least one ray and one bin"));
    }
    let b = trace_many(wall, n, runner, |rng| (rng.random::<f64>(), theta))?;
    Ok(EmpiricalKernelRow::from_samples(theta, &b.outgoing, n_bins, b.singular))
}

/// Share of rays whose reversed exit traces back to the entry, within `tol`
/// in both position and angle.
pub fn involution_rate(wall: &WallProfile, n: usize, tol: f64, runner: &Runner) -> Result<f64> {
    let ok = runner
        .map_reduce(
            n,
            |rng, range| {
                let mut good = 0usize;
                for _ in range {
                    let x: f64 = rng.random();
                    let th = crate::kernels1d::sample_lambda1(rng);
                    let back = wall.trace(x, th).and_then(|f| wall.trace(f.x, f.theta));
                    if let Ok(b) = back {
                        if (b.x - x).abs() < tol && (b.theta - th).abs() < tol {
                            good += 1;
                        }
                    }
                }
                good
            },
            |a, b| a + b,
        )
        .unwrap_or(0);
    Ok(ok as f64 / n.max(1) as f64)
}

/// Closed-form check helpers for the built-in walls.
pub fn teeth_wall(r: f64) -> Result<WallProfile> {
    super::build_rect_teeth(TeethParams::new(r)?)
}

pub fn arc_wall(xi: f64) -> Result<WallProfile> {
    super::build_circular_arc(ArcParams::new(xi)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atoms_are_found() {
        let mut s = vec![1.0; 600];
        s.extend(vec![2.0; 400]);
        s.extend((0..50).map(|i| 0.5 + i as f64 * 1e-3));
        let a = find_atoms(&s);
        assert_eq!(a.len(), 2);
        assert!((a[0].weight - 600.0 / 1050.0).abs() < 1e-12);
    }
}

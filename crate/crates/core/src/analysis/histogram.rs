use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// A uniform binning of [lo, hi).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub bins: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if !(lo < hi) || bins == 0 || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::param("axis", format!("need lo < hi and bins > 0, got [{lo}, {hi}) x {bins}")));
        }
        Ok(Axis { lo, hi, bins })
    }

    pub fn edges(&self) -> Vec<f64> {
        (0..=self.bins).map(|i| self.lo + (self.hi - self.lo) * i as f64 / self.bins as f64).collect()
    }

    fn index(&self, x: f64) -> Option<usize> {
        if x >= self.lo && x < self.hi {
            Some((((x - self.lo) / (self.hi - self.lo)) * self.bins as f64) as usize).map(|i| i.min(self.bins - 1))
        } else if x == self.hi {
            Some(self.bins - 1)
        } else {
            None
        }
    }
}

/// A multi-dimensional histogram over a product of uniform axes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    axes: Vec<Axis>,
    counts: Vec<u64>,
    outside: u64,
}

impl Histogram {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::param("axes", "need at least one axis"));
        }
        let cells = axes.iter().map(|a| a.bins).product();
        Ok(Histogram { axes, counts: vec![0; cells], outside: 0 })
    }

    pub fn uniform1(lo: f64, hi: f64, bins: usize) -> Result<Self> {
        Histogram::new(vec![Axis::new(lo, hi, bins)?])
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Points that fell inside the grid.
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Points that fell outside the grid.
    pub fn outside(&self) -> u64 {
        self.outside
    }

    pub fn add(&mut self, point: &[f64]) {
        debug_assert_eq!(point.len(), self.axes.len());
        let mut idx = 0;
        for (a, x) in self.axes.iter().zip(point) {
            match a.index(*x) {
                Some(i) => idx = idx * a.bins + i,
                None => {
                    self.outside += 1;
                    return;
                }
            }
        }
        self.counts[idx] += 1;
    }

    pub fn merge(&mut self, other: &Histogram) -> Result<()> {
        if self.axes != other.axes {
            return Err(Error::HistogramMismatch);
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.outside += other.outside;
        Ok(())
    }

    /// Cell frequencies among points inside the grid.
    pub fn probabilities(&self) -> Vec<f64> {
        let t = self.total().max(1) as f64;
        self.counts.iter().map(|c| *c as f64 / t).collect()
    }
}

/// Total variation distance between two probability vectors.
pub fn tv_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::HistogramMismatch);
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

pub fn histogram_tv(a: &Histogram, b: &Histogram) -> Result<f64> {
    if a.axes != b.axes {
        return Err(Error::HistogramMismatch);
    }
    tv_distance(&a.probabilities(), &b.probabilities())
}

/// Kolmogorov-Smirnov distance between the empirical law of `samples` and
/// the continuous CDF `cdf`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, x)| {
            let f = cdf(*x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

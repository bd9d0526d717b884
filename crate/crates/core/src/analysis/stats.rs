use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

/// Running mean and variance (Welford), mergeable in a fixed order.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MeanAcc {
    n: u64,
    mean: f64,
    m2: f64,
}

impl MeanAcc {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(self, o: MeanAcc) -> MeanAcc {
        if self.n == 0 {
            return o;
        }
        if o.n == 0 {
            return self;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        MeanAcc {
            n,
            mean: self.mean + d * o.n as f64 / n as f64,
            m2: self.m2 + o.m2 + d * d * (self.n as f64 * o.n as f64) / n as f64,
        }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    /// Standard error of the mean.
    pub fn stderr(&self) -> f64 {
        (self.variance() / self.n.max(1) as f64).sqrt()
    }
}

impl FromIterator<f64> for MeanAcc {
    fn from_iter<I: IntoIterator<Item = f64>>(it: I) -> Self {
        let mut a = MeanAcc::default();
        it.into_iter().for_each(|x| a.push(x));
        a
    }
}

/// Per-test two-sided z threshold that keeps the family-wise false
/// rejection rate of `tests` tests at the level of a single `sigmas` test.
pub fn familywise_sigmas(sigmas: f64, tests: usize) -> f64 {
    let n = Normal::standard();
    let alpha = 2.0 * n.sf(sigmas);
    n.inverse_cdf(1.0 - alpha / (2.0 * tests.max(1) as f64))
}

/// Mean and batch-means standard error of a correlated series.
pub fn batch_means(values: &[f64], batches: usize) -> (f64, f64) {
    let n = values.len();
    let b = batches.max(2).min(n.max(1));
    let len = n / b;
    if len == 0 {
        let a: MeanAcc = values.iter().copied().collect();
        return (a.mean(), a.stderr());
    }
    let means: MeanAcc = values.chunks_exact(len).take(b).map(|c| c.iter().sum::<f64>() / len as f64).collect();
    let mean = values.iter().sum::<f64>() / n as f64;
    (mean, means.stderr())
}

/// One line of a verification report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatReport {
    pub name: String,
    pub value: f64,
    pub target: f64,
    pub tol: f64,
    pub stderr: f64,
    pub n: u64,
    pub seed: u64,
    pub pass: bool,
}

impl StatReport {
    /// Pass when |value - target| <= tol.
    pub fn within(name: impl Into<String>, value: f64, target: f64, tol: f64, stderr: f64, n: u64, seed: u64) -> Self {
        let pass = (value - target).abs() <= tol;
        StatReport { name: name.into(), value, target, tol, stderr, n, seed, pass }
    }

    /// Pass when value <= tol (target records the ideal value).
    pub fn at_most(name: impl Into<String>, value: f64, target: f64, tol: f64, n: u64, seed: u64) -> Self {
        StatReport { name: name.into(), value, target, tol, stderr: 0.0, n, seed, pass: value <= tol }
    }

    /// Pass when value >= tol.
    pub fn at_least(name: impl Into<String>, value: f64, target: f64, tol: f64, n: u64, seed: u64) -> Self {
        StatReport { name: name.into(), value, target, tol, stderr: 0.0, n, seed, pass: value >= tol }
    }

    /// A report whose pass flag is fixed by the caller.
    pub fn flag(name: impl Into<String>, pass: bool, value: f64, target: f64, tol: f64, n: u64, seed: u64) -> Self {
        StatReport { name: name.into(), value, target, tol, stderr: 0.0, n, seed, pass }
    }

    pub fn json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

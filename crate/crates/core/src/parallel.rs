//! Deterministic chunked Monte Carlo.
//!
//! Work is cut into fixed-size chunks. Chunk `i` draws from its own ChaCha8
//! stream keyed by `(seed, i)` and partial results are merged in chunk order,
//! so the output does not depend on the thread count or on whether the
//! `parallel` feature is enabled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::ops::Range;

/// Items per chunk unless a caller asks otherwise.
pub const DEFAULT_CHUNK: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

/// Seed plus execution strategy for estimators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Runner {
    pub seed: u64,
    pub exec: Exec,
    pub chunk: usize,
}

impl Runner {
    pub fn new(seed: u64) -> Self {
        Runner { seed, exec: Exec::default(), chunk: DEFAULT_CHUNK }
    }

    pub fn sequential(seed: u64) -> Self {
        Runner { exec: Exec::Sequential, ..Runner::new(seed) }
    }

    pub fn with_exec(self, exec: Exec) -> Self {
        Runner { exec, ..self }
    }

    pub fn with_chunk(self, chunk: usize) -> Self {
        Runner { chunk: chunk.max(1), ..self }
    }

    /// A runner whose streams do not overlap with this one's.
    pub fn derive(&self, salt: u64) -> Self {
        Runner { seed: mix(self.seed ^ mix(salt.wrapping_add(0x9e37_79b9_7f4a_7c15))), ..*self }
    }

    /// The RNG for stream `index`.
    pub fn rng(&self, index: u64) -> ChaCha8Rng {
        stream_rng(self.seed, index)
    }

    /// Split `0..n` into chunks, run `f` on each with its own stream and fold
    /// the partial results left to right with `merge`.
    pub fn map_reduce<A, F, M>(&self, n: usize, f: F, merge: M) -> Option<A>
    where
        A: Send,
        F: Fn(&mut ChaCha8Rng, Range<usize>) -> A + Sync + Send,
        M: Fn(A, A) -> A,
    {
        let chunk = self.chunk.max(1);
        let n_chunks = n.div_ceil(chunk);
        let run = |i: usize| {
            let mut rng = self.rng(i as u64);
            f(&mut rng, i * chunk..((i + 1) * chunk).min(n))
        };
        let parts: Vec<A> = match self.exec {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                (0..n_chunks).into_par_iter().map(run).collect()
            }
            _ => (0..n_chunks).map(run).collect(),
        };
        parts.into_iter().reduce(merge)
    }

    /// Run `f` once per index, each with its own stream, results in order.
    pub fn map_indexed<A, F>(&self, n: usize, f: F) -> Vec<A>
    where
        A: Send,
        F: Fn(&mut ChaCha8Rng, usize) -> A + Sync + Send,
    {
        let run = |i: usize| {
            let mut rng = self.rng(i as u64);
            f(&mut rng, i)
        };
        match self.exec {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                (0..n).into_par_iter().map(run).collect()
            }
            _ => (0..n).map(run).collect(),
        }
    }

    /// Collect per-item outputs of `f`, concatenated in chunk order.
    pub fn collect<A, F>(&self, n: usize, f: F) -> Vec<A>
    where
        A: Send,
        F: Fn(&mut ChaCha8Rng, usize) -> A + Sync + Send,
    {
        self.map_reduce(
            n,
            |rng, range| range.map(|i| f(rng, i)).collect::<Vec<_>>(),
            |mut a, mut b| {
                a.append(&mut b);
                a
            },
        )
        .unwrap_or_default()
    }
}

/// ChaCha8 stream `index` of `seed`.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Run `f` inside a pool with `threads` workers (0 means the default pool).
#[cfg(feature = "parallel")]
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    if threads == 0 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn with_threads<T: Send>(_threads: usize, f: impl FnOnce() -> T + Send) -> T {
    f()
}

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn sum_of_uniforms(runner: Runner) -> f64 {
        runner
            .map_reduce(100_000, |rng, r| r.map(|_| rng.random::<f64>()).sum::<f64>(), |a, b| a + b)
            .unwrap()
    }

    #[test]
    fn sequential_and_parallel_agree_bitwise() {
        let a = sum_of_uniforms(Runner::sequential(3).with_chunk(1000));
        let b = sum_of_uniforms(Runner::new(3).with_chunk(1000));
        assert_eq!(a.to_bits(), b.to_bits());
        let c = with_threads(2, || sum_of_uniforms(Runner::new(3).with_chunk(1000)));
        assert_eq!(a.to_bits(), c.to_bits());
    }

    #[test]
    fn streams_differ() {
        let mut a = stream_rng(1, 0);
        let mut b = stream_rng(1, 1);
        assert_ne!(a.random::<u64>(), b.random::<u64>());
        assert_ne!(Runner::new(1).derive(1).seed, Runner::new(1).derive(2).seed);
    }

    #[test]
    fn empty_work_is_none() {
        assert!(Runner::new(0).map_reduce(0, |_, _| 1, |a, b| a + b).is_none());
        assert!(Runner::new(0).collect(0, |_, i| i).is_empty());
    }
}

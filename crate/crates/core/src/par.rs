//! Index-parallel map with a sequential fallback.
//!
//! With the `parallel` feature the work is spread over a rayon pool; without
//! it (or with [`Execution::Sequential`]) it runs on the calling thread. The
//! output order is the index order either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// `threads: None` uses the global rayon pool.
    #[default]
    Parallel,
    ParallelWith {
        threads: usize,
    },
}

impl Execution {
    pub fn from_threads(threads: Option<usize>) -> Self {
        match threads {
            None => Execution::Parallel,
            Some(0 | 1) => Execution::Sequential,
            Some(t) => Execution::ParallelWith { threads: t },
        }
    }
}

pub fn map_indices<T, F>(n: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        Execution::Sequential => (0..n).map(f).collect(),
        #[cfg(feature = "parallel")]
        Execution::Parallel => (0..n).into_par_iter().map(f).collect(),
        #[cfg(feature = "parallel")]
        Execution::ParallelWith { threads } => {
            match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
                Ok(pool) => pool.install(|| (0..n).into_par_iter().map(&f).collect()),
                Err(_) => (0..n).map(f).collect(),
            }
        }
        #[cfg(not(feature = "parallel"))]
        _ => (0..n).map(f).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let seq = map_indices(1000, Execution::Sequential, |i| i * i);
        let par = map_indices(1000, Execution::ParallelWith { threads: 4 }, |i| i * i);
        assert_eq!(seq, par);
        assert_eq!(
            map_indices(10, Execution::Parallel, |i| i),
            (0..10).collect::<Vec<_>>()
        );
    }
}

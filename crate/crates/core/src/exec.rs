//! Execution strategy for batch workloads.
//!
//! Every batch entry point takes an [`Exec`]. `Exec::Parallel` runs on the
//! rayon global pool when the `parallel` feature is enabled and silently
//! degrades to the sequential path otherwise. Results never depend on the
//! strategy: maps preserve input order and reductions are commutative.

use std::ops::Range;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// True when this strategy actually fans out to worker threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// Ordered map over a slice.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// Counts indices in `range` satisfying `pred`.
    pub fn count<F>(self, range: Range<u64>, pred: F) -> u64
    where
        F: Fn(u64) -> bool + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            use rayon::prelude::*;
            return range.into_par_iter().filter(|&i| pred(i)).count() as u64;
        }
        range.filter(|&i| pred(i)).count() as u64
    }

    /// Folds every index in `range` into a per-worker accumulator, then merges
    /// the accumulators. `merge` must be commutative and associative.
    pub fn fold<A, I, F, M>(self, range: Range<u64>, init: I, fold: F, merge: M) -> A
    where
        A: Send,
        I: Fn() -> A + Sync + Send,
        F: Fn(A, u64) -> A + Sync + Send,
        M: Fn(A, A) -> A + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            use rayon::prelude::*;
            return range
                .into_par_iter()
                .fold(&init, &fold)
                .reduce(&init, &merge);
        }
        let _ = &merge;
        range.fold(init(), fold)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree() {
        let items: Vec<u64> = (0..1000).collect();
        for exec in [Exec::Sequential, Exec::Parallel] {
            assert_eq!(exec.map(&items, |x| x * 2)[999], 1998);
            assert_eq!(exec.count(0..1000, |i| i % 3 == 0), 334);
            let s = exec.fold(0..1000, || 0u64, |a, i| a + i, |a, b| a + b);
            assert_eq!(s, 499_500);
        }
    }
}

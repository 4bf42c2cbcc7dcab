//! Sequential / parallel execution of the enumeration loops.
//!
//! Every parallel path returns exactly what the sequential path returns: first
//! hits are selected in index order and folds are only used with commutative,
//! associative operations (gcd, max, sum).

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How the enumeration loops run. `Parallel` silently degrades to
/// `Sequential` when the crate is built without the `parallel` feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// Whether work will actually be spread over the rayon pool.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    /// `f(i)` for the smallest `i` in `range` where it is `Some`.
    pub fn find_map_first<T, F>(self, range: Range<u64>, f: F) -> Option<T>
    where
        T: Send,
        F: Fn(u64) -> Option<T> + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return range.into_par_iter().find_map_first(f);
        }
        range.into_iter().find_map(f)
    }

    /// Maps every item and folds the results with `combine`, which must be
    /// associative and commutative.
    pub fn map_reduce<I, T, M, C>(self, items: &[I], identity: T, map: M, combine: C) -> T
    where
        I: Sync,
        T: Send + Sync + Clone,
        M: Fn(&I) -> T + Sync + Send,
        C: Fn(T, T) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return items.par_iter().map(&map).reduce(|| identity.clone(), &combine);
        }
        items.iter().map(map).fold(identity, combine)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_hit_is_the_same_in_both_modes() {
        let pred = |i: u64| (i % 97 == 13 && i > 1000).then_some(i * 2);
        let seq = Execution::Sequential.find_map_first(0..100_000, pred);
        let par = Execution::Parallel.find_map_first(0..100_000, pred);
        assert_eq!(seq, Some(2 * 1080));
        assert_eq!(seq, par);
    }

    #[test]
    fn reduce_matches() {
        let items: Vec<u64> = (1..=1000).collect();
        for exec in [Execution::Sequential, Execution::Parallel] {
            assert_eq!(exec.map_reduce(&items, 0, |&x| x * x, |a, b| a + b), 333_833_500);
        }
    }
}

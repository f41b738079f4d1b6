//! Execution helpers: data-parallel map with a sequential fallback.
//!
//! With the `parallel` feature (default) the maps run on the ambient rayon
//! pool; without it they run serially. Both paths return results in input
//! order, and every per-item computation is internally sequential, so the
//! output of any operation built on these helpers is bitwise independent of
//! the thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `0..len`, collecting results in index order.
#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..len).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..len).map(f).collect()
}

/// Always-serial variant, kept callable so benchmarks can compare the two
/// paths inside one build.
pub fn map_indexed_seq<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..len).map(f).collect()
}

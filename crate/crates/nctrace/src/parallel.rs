//! Thin switch between rayon-backed and sequential data-parallel loops.
//!
//! The numeric layers only ever need "map an independent closure over items
//! and collect". With the `parallel` feature (default) [`par_map`] fans out
//! over the rayon pool; without it, it degrades to the sequential loop.
//! [`seq_map`] is always sequential and is kept callable so the benchmark
//! suite can compare both paths in one build.

/// Sequential reference implementation.
pub fn seq_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U + Sync + Send,
    T: Send,
    U: Send,
{
    items.into_iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn par_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U + Sync + Send,
    T: Send,
    U: Send,
{
    use rayon::prelude::*;
    items.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn par_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U + Sync + Send,
    T: Send,
    U: Send,
{
    seq_map(items, f)
}

/// Maps over `0..n` in parallel (or sequentially without the feature).
pub fn par_map_indexed<U, F>(n: usize, f: F) -> Vec<U>
where
    F: Fn(usize) -> U + Sync + Send,
    U: Send,
{
    par_map((0..n).collect(), f)
}

/// Configures the global thread pool size; call once at startup. With the
/// sequential build this is a no-op.
pub fn configure_threads(n: usize) {
    #[cfg(feature = "parallel")]
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = n;
    }
}

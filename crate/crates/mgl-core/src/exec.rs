//! Batch execution helpers with a sequential fallback.
//!
//! With the default `parallel` feature, batch maps fan out over rayon.
//! Without it, the same entry points run on the calling thread. Either way
//! the output is an index-ordered buffer and every reduction is an ordered
//! pairwise sum, so results do not depend on thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Applies `f` to every index in `0..n`, preserving index order in the output.
pub fn map_indexed<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Applies `f` to every element of `items`, preserving order.
pub fn map_slice<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Sums a slice by recursive halving.
///
/// The summation tree is a fixed function of the slice length, so totals are
/// bit-reproducible across runs and thread counts, and rounding error grows
/// like O(log n) rather than O(n).
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

/// Caps the global rayon pool from the `MGL_THREADS` environment variable.
///
/// Call once at process start; later calls and unparsable values are
/// ignored. A no-op without the `parallel` feature.
pub fn init_threads_from_env() {
    #[cfg(feature = "parallel")]
    {
        if let Some(k) = std::env::var("MGL_THREADS")
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&k| k >= 1)
        {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build_global();
        }
    }
}

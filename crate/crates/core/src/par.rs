//! Data-parallel map with a sequential fallback.
//!
//! Verification grids, per-generator extension checks, and search passes
//! are independent item-wise; with the `parallel` feature they fan out on
//! rayon, otherwise they run in order. Results keep input order either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `items`, in parallel when both the feature and the flag
/// allow it. Output order matches input order.
pub fn map_items<T, R, F>(items: Vec<T>, parallel: bool, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if parallel {
            return items.into_par_iter().map(f).collect();
        }
    }
    let _ = parallel;
    items.into_iter().map(f).collect()
}

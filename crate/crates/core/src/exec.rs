//! Index-ordered parallel map.
//!
//! Every parallel loop in the crate goes through [`map_indexed`]: results come
//! back in index order and all reductions over them happen sequentially
//! afterwards, so floating-point sums never depend on the thread count. With
//! the `parallel` feature disabled the same loops run sequentially.

/// Evaluates `f(0), ..., f(len - 1)` and returns the results in index order.
#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..len).into_par_iter().map(f).collect()
}

/// Evaluates `f(0), ..., f(len - 1)` and returns the results in index order.
#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..len).map(f).collect()
}

/// Whether the crate was built with the rayon backend.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

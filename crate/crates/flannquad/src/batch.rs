//! Deterministic batch evaluation.
//!
//! Training passes and sweep rows are elementwise maps over a slice; this
//! module fans them out with rayon when the `parallel` feature is enabled
//! and the input is large enough to amortize the dispatch, and falls back
//! to a plain loop otherwise. Outputs are written by index and every
//! reduction downstream folds sequentially, so both paths produce
//! bit-identical results.

/// Below this length the rayon dispatch costs more than the work.
pub const PAR_MIN_LEN: usize = 4096;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Elementwise map preserving input order.
pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if items.len() >= PAR_MIN_LEN {
        return map_par(items, f);
    }
    map_seq(items, f)
}

/// Elementwise map that stops at the first error. Error selection is
/// deterministic: the failure at the lowest index wins.
pub fn try_map<T, U, E, F>(items: &[T], f: F) -> Result<Vec<U>, E>
where
    T: Sync,
    U: Send,
    E: Send,
    F: Fn(&T) -> Result<U, E> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if items.len() >= PAR_MIN_LEN {
        let results: Vec<Result<U, E>> = items.par_iter().map(&f).collect();
        let mut out = Vec::with_capacity(results.len());
        for r in results {
            out.push(r?);
        }
        return Ok(out);
    }
    items.iter().map(f).collect()
}

/// Indexed in-place fill of a preallocated buffer.
pub fn fill<U, F>(out: &mut [U], f: F)
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if out.len() >= PAR_MIN_LEN {
        fill_par(out, f);
        return;
    }
    fill_seq(out, f);
}

pub fn map_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map_par<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

pub fn fill_seq<U, F>(out: &mut [U], f: F)
where
    F: Fn(usize) -> U,
{
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = f(i);
    }
}

#[cfg(feature = "parallel")]
pub fn fill_par<U, F>(out: &mut [U], f: F)
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    out.par_iter_mut().enumerate().for_each(|(i, slot)| {
        *slot = f(i);
    });
}

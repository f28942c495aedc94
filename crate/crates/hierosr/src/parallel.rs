//! Data-parallel helpers: rayon when the `parallel` feature is enabled,
//! plain iteration otherwise. The `seq_*` twins are always sequential and
//! exist for benchmark comparisons and as an explicit fallback path.

use crate::error::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
pub fn maybe_par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn maybe_par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn maybe_par_try_map<T, U, F>(items: &[T], f: F) -> Result<Vec<U>, Error>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> Result<U, Error> + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn maybe_par_try_map<T, U, F>(items: &[T], f: F) -> Result<Vec<U>, Error>
where
    F: Fn(&T) -> Result<U, Error>,
{
    items.iter().map(f).collect()
}

pub fn seq_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

pub fn seq_try_map<T, U, F>(items: &[T], f: F) -> Result<Vec<U>, Error>
where
    F: Fn(&T) -> Result<U, Error>,
{
    items.iter().map(f).collect()
}

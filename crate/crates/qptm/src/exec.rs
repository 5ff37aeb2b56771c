//! Execution backend for data-parallel loops.
//!
//! With the `parallel` feature (default), [`map_indexed`] and
//! [`try_map_indexed`] fan out over rayon's current thread pool; without it
//! they degrade to plain sequential iteration. Output order is index order in
//! both cases, so results never depend on the backend or thread count.
//!
//! [`map_indexed_seq`] is always sequential regardless of features; the
//! benchmark suite uses it as the reference path when comparing backends.

#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn try_map_indexed<T, E, F>(n: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn try_map_indexed<T, E, F>(n: usize, f: F) -> Result<Vec<T>, E>
where
    F: Fn(usize) -> Result<T, E>,
{
    (0..n).map(f).collect()
}

/// Sequential reference path, available under every feature combination.
pub fn map_indexed_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_and_sequential_agree_in_order() {
        let a = map_indexed(100, |i| i * i);
        let b = map_indexed_seq(100, |i| i * i);
        assert_eq!(a, b);
    }

    #[test]
    fn try_map_propagates_first_error_deterministically() {
        let r: Result<Vec<usize>, String> =
            try_map_indexed(10, |i| if i >= 7 { Err(format!("bad {i}")) } else { Ok(i) });
        assert!(r.is_err());
    }
}

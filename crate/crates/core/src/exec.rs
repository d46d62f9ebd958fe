//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (on by default) the [`Mode::Parallel`] path
//! runs on the rayon global pool; without it both modes run sequentially.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    Sequential,
    #[default]
    Parallel,
}

/// Maps `f` over `0..n`, preserving order.
pub fn map_range<T, F>(mode: Mode, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        Mode::Parallel => (0..n).into_par_iter().map(f).collect(),
        _ => (0..n).map(f).collect(),
    }
}

/// Maps `f` over a slice, preserving order.
pub fn map_slice<S, T, F>(mode: Mode, items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        Mode::Parallel => items.par_iter().map(f).collect(),
        _ => items.iter().map(f).collect(),
    }
}

/// Fallible ordered map over a slice; the first error in slice order wins.
pub fn try_map_slice<S, T, E, F>(mode: Mode, items: &[S], f: F) -> Result<Vec<T>, E>
where
    S: Sync,
    T: Send,
    E: Send,
    F: Fn(&S) -> Result<T, E> + Sync + Send,
{
    map_slice(mode, items, f).into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let a = map_range(Mode::Sequential, 1000, |i| (i as f64).sqrt());
        let b = map_range(Mode::Parallel, 1000, |i| (i as f64).sqrt());
        assert_eq!(a, b);
    }

    #[test]
    fn first_error_in_order() {
        let items: Vec<i32> = (0..100).collect();
        let r: Result<Vec<i32>, i32> =
            try_map_slice(Mode::Parallel, &items, |&x| if x % 30 == 29 { Err(x) } else { Ok(x) });
        assert_eq!(r, Err(29));
    }
}

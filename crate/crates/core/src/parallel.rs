//! Order-preserving data-parallel helpers.
//!
//! With the `parallel` feature these dispatch to rayon; without it they are
//! plain sequential loops. Every helper returns results in index order, so
//! callers that reduce sequentially get bit-identical output either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Evaluates `f(i)` for `i in 0..n` and collects the results in order.
pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
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

/// Evaluates `f` on each `width`-long row of a row-major buffer.
pub fn map_rows<T, F>(data: &[f64], width: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&[f64]) -> T + Sync + Send,
{
    if width == 0 {
        return Vec::new();
    }
    #[cfg(feature = "parallel")]
    {
        data.par_chunks(width).map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        data.chunks(width).map(f).collect()
    }
}

/// Applies `f` to every element of a mutable slice, passing the index.
pub fn for_each_mut<T, F>(items: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize, &mut T) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter_mut().enumerate().for_each(|(i, x)| f(i, x));
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter_mut().enumerate().for_each(|(i, x)| f(i, x));
    }
}

/// Whether this build dispatches to a thread pool.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_range_preserves_order() {
        let v = map_range(1000, |i| i * 2);
        assert!(v.iter().enumerate().all(|(i, &x)| x == 2 * i));
    }

    #[test]
    fn map_rows_splits_row_major() {
        let data = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        assert_eq!(map_rows(&data, 2, |r| r[0] + r[1]), vec![3.0, 7.0, 11.0]);
        assert!(map_rows(&data, 0, |r| r.len()).is_empty());
    }

    #[test]
    fn for_each_mut_sees_indices() {
        let mut v = vec![0usize; 64];
        for_each_mut(&mut v, |i, x| *x = i + 1);
        assert_eq!(v[63], 64);
    }
}

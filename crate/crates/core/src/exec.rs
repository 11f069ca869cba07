//! Deterministic data-parallel helpers.
//!
//! Every kernel in this crate that fans out over atoms, enumerated
//! outcomes, or Monte Carlo chunks goes through these functions. Outputs
//! are always collected in input order and reduced in that fixed order, so
//! a run is bit-identical whether it executes on one thread, many threads,
//! or with the `parallel` feature disabled entirely.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `items`, collecting results in input order.
pub fn ordered_map<T, R, F>(items: &[T], f: F) -> Vec<R>
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
        ordered_map_seq(items, f)
    }
}

/// Sequential twin of [`ordered_map`]; kept unconditionally so benchmarks
/// can compare both paths in a single build.
pub fn ordered_map_seq<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

/// Split `0..len` into fixed-size chunks and map `f` over `(chunk_index,
/// range)` pairs, in order. Chunk boundaries depend only on `len` and
/// `chunk_size`, never on the worker count.
pub fn ordered_chunk_map<R, F>(len: usize, chunk_size: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize, std::ops::Range<usize>) -> R + Sync + Send,
{
    let chunks: Vec<(usize, std::ops::Range<usize>)> = (0..len)
        .step_by(chunk_size.max(1))
        .enumerate()
        .map(|(i, start)| (i, start..(start + chunk_size).min(len)))
        .collect();
    ordered_map(&chunks, |(i, r)| f(*i, r.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordered_map_preserves_order() {
        let xs: Vec<u64> = (0..10_000).collect();
        let par = ordered_map(&xs, |x| x * 3);
        let seq = ordered_map_seq(&xs, |x| x * 3);
        assert_eq!(par, seq);
    }

    #[test]
    fn chunk_map_covers_range_exactly_once() {
        let parts = ordered_chunk_map(10, 3, |i, r| (i, r.collect::<Vec<_>>()));
        let flat: Vec<usize> = parts.iter().flat_map(|(_, v)| v.clone()).collect();
        assert_eq!(flat, (0..10).collect::<Vec<_>>());
        assert_eq!(parts.len(), 4);
    }
}

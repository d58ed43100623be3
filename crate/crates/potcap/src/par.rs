//! Deterministic parallel helpers.
//!
//! Sweeps over candidate schedules, refinement levels and randomized pairs are
//! embarrassingly parallel. The helpers here run them through rayon when the
//! `parallel` feature is enabled and sequentially otherwise, with one hard
//! rule: the result must be bitwise identical in both modes and for any thread
//! count. Maps collect by index, and floating-point reductions always use the
//! fixed chunking of [`chunk_sum`], never a data-dependent reduction tree.

use std::cell::Cell;

thread_local! {
    static FORCE_SEQUENTIAL: Cell<bool> = const { Cell::new(false) };
}

/// Runs `f` with the parallel helpers forced onto their sequential paths on
/// this thread. Used by benchmarks to compare modes within one build.
pub fn force_sequential<R>(f: impl FnOnce() -> R) -> R {
    FORCE_SEQUENTIAL.with(|flag| {
        let prev = flag.replace(true);
        let out = f();
        flag.set(prev);
        out
    })
}

fn sequential_forced() -> bool {
    FORCE_SEQUENTIAL.with(|flag| flag.get())
}

/// Chunk width for deterministic sums. Partial sums are formed per chunk and
/// combined in chunk order, so the result is independent of thread count.
const SUM_CHUNK: usize = 4096;

/// Sums `values` with fixed chunking. Bitwise reproducible across thread
/// counts and across the parallel/sequential builds.
pub fn chunk_sum(values: &[f64]) -> f64 {
    let partials = map_chunks(values, |chunk| chunk.iter().sum::<f64>());
    partials.into_iter().sum()
}

/// Dot product with the same fixed chunking as [`chunk_sum`].
pub fn chunk_dot(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "dot of mismatched lengths");
    let partials = map_chunk_indices(a.len(), |lo, hi| {
        let mut s = 0.0;
        for i in lo..hi {
            s += a[i] * b[i];
        }
        s
    });
    partials.into_iter().sum()
}

/// Maximum of a per-index evaluation, NaN-free inputs assumed.
pub fn chunk_max(n: usize, f: impl Fn(usize) -> f64 + Sync) -> f64 {
    if n == 0 {
        return f64::NEG_INFINITY;
    }
    let partials = map_chunk_indices(n, |lo, hi| {
        let mut m = f64::NEG_INFINITY;
        for i in lo..hi {
            let v = f(i);
            if v > m {
                m = v;
            }
        }
        m
    });
    partials.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

fn map_chunks<R: Send>(values: &[f64], per_chunk: impl Fn(&[f64]) -> R + Send + Sync) -> Vec<R> {
    #[cfg(feature = "parallel")]
    {
        if !sequential_forced() {
            use rayon::prelude::*;
            return values.par_chunks(SUM_CHUNK).map(per_chunk).collect();
        }
    }
    values.chunks(SUM_CHUNK).map(per_chunk).collect()
}

fn map_chunk_indices<R: Send>(
    n: usize,
    per_range: impl Fn(usize, usize) -> R + Send + Sync,
) -> Vec<R> {
    let ranges: Vec<(usize, usize)> = (0..n)
        .step_by(SUM_CHUNK)
        .map(|lo| (lo, (lo + SUM_CHUNK).min(n)))
        .collect();
    #[cfg(feature = "parallel")]
    {
        if !sequential_forced() {
            use rayon::prelude::*;
            return ranges.into_par_iter().map(|(lo, hi)| per_range(lo, hi)).collect();
        }
    }
    ranges.into_iter().map(|(lo, hi)| per_range(lo, hi)).collect()
}

/// Maps `f` over `items`, collecting by index. Parallel when enabled.
pub fn map_collect<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Send + Sync) -> Vec<R> {
    #[cfg(feature = "parallel")]
    {
        if !sequential_forced() {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
    }
    items.iter().map(f).collect()
}

/// Maps `f` over an index range, collecting by index. Parallel when enabled.
pub fn map_indices<R: Send>(n: usize, f: impl Fn(usize) -> R + Send + Sync) -> Vec<R> {
    #[cfg(feature = "parallel")]
    {
        if !sequential_forced() {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunk_sum_matches_forced_sequential_bitwise() {
        let values: Vec<f64> = (0..20_000).map(|i| ((i * 2654435761_usize) % 1000) as f64 / 997.0).collect();
        let par = chunk_sum(&values);
        let seq = force_sequential(|| chunk_sum(&values));
        assert_eq!(par.to_bits(), seq.to_bits());
    }

    #[test]
    fn chunk_dot_matches_forced_sequential_bitwise() {
        let a: Vec<f64> = (0..10_000).map(|i| (i as f64).sin()).collect();
        let b: Vec<f64> = (0..10_000).map(|i| (i as f64).cos()).collect();
        assert_eq!(
            chunk_dot(&a, &b).to_bits(),
            force_sequential(|| chunk_dot(&a, &b)).to_bits()
        );
    }

    #[test]
    fn chunk_max_scans_all_indices() {
        let vals: Vec<f64> = (0..9000).map(|i| -((i as f64 - 4500.5).abs())).collect();
        let m = chunk_max(vals.len(), |i| vals[i]);
        assert_eq!(m, -0.5);
        assert_eq!(chunk_max(0, |_| 1.0), f64::NEG_INFINITY);
    }
}
